#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sqbench {

/// Toolkit-wide error type. Thrown for precondition violations and I/O
/// failures; the CLI maps these to non-zero exit codes.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Mono audio as double samples in [-1, 1] (full scale = 1.0).
/// Immutable by convention: every operation returns a new buffer.
struct AudioBuffer {
  std::vector<double> samples;
  int sample_rate = 0;

  std::size_t size() const { return samples.size(); }
  double duration_s() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
  }
};

/// RMS amplitude in linear full-scale units. Throws on an empty buffer.
double rms(const AudioBuffer& buf);

/// RMS level in dBFS, or nullopt for the all-zero (silent) signal.
/// Silence is a typed state rather than -inf so downstream math stays finite.
std::optional<double> level_dbfs(const AudioBuffer& buf);

constexpr double kClipErrorFraction = 1e-4;  // > 0.01% clipped samples is an error

/// Scales the buffer so its RMS hits `target_db` dBFS. Pure scalar gain;
/// samples are hard-clipped to [-1, 1] afterwards and the clip count is
/// reported through `clipped_out` when non-null. Clipping more than 0.01%
/// of samples throws. Throws on silent input.
AudioBuffer normalize_to_dbfs(const AudioBuffer& buf, double target_db,
                              std::size_t* clipped_out = nullptr);

/// Reads a PCM 16-bit WAV file. Multichannel inputs are averaged down to
/// mono; integer samples map to [-1, 1) by division by 32768.
AudioBuffer read_wav(const std::string& path);

/// Writes a mono PCM 16-bit WAV file. Round-trips within one quantization
/// step per sample.
void write_wav(const AudioBuffer& buf, const std::string& path);

/// Saturating float -> int16 with round-half-away-from-zero. The codec and
/// WAV writer share this so quantization conventions match.
std::int16_t sample_to_int16(double x);

/// Windowed-sinc resampler between the toolkit rates {8000, 16000, 22050}.
/// Anti-aliasing when downsampling rejects above-Nyquist content by >= 60 dB;
/// linear phase, zero net delay, duration preserved within one output sample.
AudioBuffer resample(const AudioBuffer& buf, int target_rate);

/// Removes leading/trailing frames whose level is below `threshold_db`
/// dBFS, measured over `frame_ms` windows. Throws if everything is below
/// the threshold.
AudioBuffer trim_silence(const AudioBuffer& buf, double threshold_db = -50.0,
                         double frame_ms = 20.0);

}  // namespace sqbench
