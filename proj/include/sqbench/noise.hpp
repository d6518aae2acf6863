#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sqbench/audio.hpp"

namespace sqbench {

enum class NoiseKind { Pink, Blue, Babble };

NoiseKind noise_kind_from_string(const std::string& name);
std::string to_string(NoiseKind kind);

/// Gain arithmetic for hitting a target SNR: scale the noise by G dB so the
/// clean/noise RMS ratio equals the target.
struct MixGains {
  double clean_rms = 0.0;    // P_s
  double noise_rms = 0.0;    // P_n, before scaling
  double desired_rms = 0.0;  // P_d = P_s / 10^(T/20)
  double gain_db = 0.0;      // G = 20 log10(P_d / P_n)
};

MixGains required_noise_gain(double clean_rms, double noise_rms, double snr_db);

/// Spectrally shaped Gaussian noise: amplitude weight f^(-1/2) for pink,
/// f^(+1/2) for blue. Output normalized to -26 dBFS; bit-identical for a
/// given (kind, length, rate, seed).
AudioBuffer gen_colored(NoiseKind kind, std::size_t length, int rate,
                        std::uint64_t seed);

/// Multi-talker babble: `talkers` randomly chosen, circularly shifted pool
/// entries tiled to `length` and summed, normalized to -26 dBFS.
AudioBuffer gen_babble(const std::vector<AudioBuffer>& pool, int talkers,
                       std::size_t length, int rate, std::uint64_t seed);

/// clean + noise scaled so the measured clean-to-noise RMS ratio equals
/// `snr_db` exactly. Noise longer than clean is truncated. The result is not
/// re-normalized; callers re-normalize per the pipeline.
AudioBuffer mix_at_snr(const AudioBuffer& clean, const AudioBuffer& noise,
                       double snr_db);

/// Deterministic seeded standard-normal generator (Box-Muller over a 64-bit
/// PCG-style stream), shared by all noise synthesis.
class GaussianSource {
public:
  explicit GaussianSource(std::uint64_t seed);
  double next();
  std::uint64_t next_u64();

private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Stable child-seed derivation for parallel workers: hash of (master, key).
std::uint64_t derive_seed(std::uint64_t master, const std::string& key);

}  // namespace sqbench
