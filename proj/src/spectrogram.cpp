#include <cmath>

#include "sqbench/fft.hpp"
#include "sqbench/metrics.hpp"

namespace sqbench {

namespace {

constexpr int kRate = 16000;
constexpr std::size_t kFrameLen = 480;  // 30 ms at 16 kHz
constexpr std::size_t kHop = 240;       // 15 ms
constexpr std::size_t kFftLen = 512;
constexpr double kFminHz = 50.0;
constexpr double kFmaxHz = 8000.0;

double hz_to_mel(double f) { return 2595.0 * std::log10(1.0 + f / 700.0); }

// Band index per FFT bin: 32 equal mel intervals over [50 Hz, 8 kHz],
// -1 for bins outside. Non-overlapping partition keeps a pure tone's
// energy inside a single band.
const std::vector<int>& bin_to_band() {
  static const std::vector<int> map = [] {
    std::vector<int> m(kFftLen / 2 + 1, -1);
    const double mel_lo = hz_to_mel(kFminHz);
    const double mel_hi = hz_to_mel(kFmaxHz);
    for (std::size_t k = 0; k < m.size(); ++k) {
      const double f = static_cast<double>(k) * kRate / kFftLen;
      if (f < kFminHz || f > kFmaxHz) continue;
      int band = static_cast<int>((hz_to_mel(f) - mel_lo) /
                                  (mel_hi - mel_lo) * kSpectrogramBands);
      if (band >= kSpectrogramBands) band = kSpectrogramBands - 1;
      m[k] = band;
    }
    return m;
  }();
  return map;
}

const std::vector<double>& hann_window() {
  static const std::vector<double> w = [] {
    std::vector<double> v(kFrameLen);
    for (std::size_t i = 0; i < kFrameLen; ++i)
      v[i] = 0.5 - 0.5 * std::cos(2.0 * M_PI * i / (kFrameLen - 1));
    return v;
  }();
  return w;
}

}  // namespace

Spectrogram spectrogram(const AudioBuffer& buf) {
  if (buf.sample_rate != kRate)
    throw Error("spectrogram: requires 16000 Hz input, got " +
                std::to_string(buf.sample_rate));
  if (buf.samples.size() < static_cast<std::size_t>(kRate))
    throw Error("spectrogram: signal shorter than 1 s");

  const std::size_t n_frames = (buf.samples.size() - kFrameLen) / kHop + 1;
  Spectrogram spec;
  spec.bands = kSpectrogramBands;
  spec.frames = n_frames;
  spec.values.assign(static_cast<std::size_t>(kSpectrogramBands) * n_frames, 0.0);

  const auto& window = hann_window();
  const auto& band_of = bin_to_band();
  std::vector<double> frame(kFftLen, 0.0);
  std::vector<double> energy(kSpectrogramBands);
  double max_energy = 0.0;
  for (std::size_t t = 0; t < n_frames; ++t) {
    for (std::size_t i = 0; i < kFrameLen; ++i)
      frame[i] = buf.samples[t * kHop + i] * window[i];
    std::fill(frame.begin() + kFrameLen, frame.end(), 0.0);
    const auto bins = rfft(frame);
    std::fill(energy.begin(), energy.end(), 0.0);
    for (std::size_t k = 0; k < bins.size(); ++k) {
      const int band = band_of[k];
      if (band >= 0) energy[static_cast<std::size_t>(band)] += std::norm(bins[k]);
    }
    for (int b = 0; b < kSpectrogramBands; ++b) {
      spec.at(b, t) = energy[static_cast<std::size_t>(b)];
      max_energy = std::max(max_energy, energy[static_cast<std::size_t>(b)]);
    }
  }

  // Log-compress relative to the per-signal maximum, floored at -80 dB.
  // All-silent input lands entirely on the floor.
  for (double& v : spec.values) {
    v = max_energy > 0.0 && v > 0.0
            ? std::max(kSpectrogramFloorDb, 10.0 * std::log10(v / max_energy))
            : kSpectrogramFloorDb;
  }
  return spec;
}

}  // namespace sqbench
