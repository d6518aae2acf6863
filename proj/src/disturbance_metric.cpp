#include <algorithm>
#include <cmath>

#include "sqbench/fft.hpp"
#include "sqbench/metrics.hpp"

namespace sqbench {

namespace {

constexpr int kRate = 8000;
constexpr std::size_t kFrameLen = 256;  // 32 ms at 8 kHz
constexpr std::size_t kHop = 128;       // 16 ms
constexpr int kBarkBands = 17;          // ~1 bark each over 50 Hz - 4 kHz
constexpr double kFminHz = 50.0;
constexpr double kLoudnessExp = 0.23;   // Zwicker power-law compression

// Logistic mapping of aggregate disturbance D onto (1.0, 4.6]:
// mos = 1 + 3.6 / (1 + (D / kMapPivot)^kMapSlope). Pivot and slope are
// pinned to place the telephony pipeline's SNR sweep across the scale.
constexpr double kMapPivot = 0.02;
constexpr double kMapSlope = 1.4;

double hz_to_bark(double f) {
  return 13.0 * std::atan(0.00076 * f) +
         3.5 * std::atan((f / 7500.0) * (f / 7500.0));
}

// Bark-band index per FFT bin: kBarkBands equal bark intervals over
// [50 Hz, 4 kHz], -1 below 50 Hz.
const std::vector<int>& bin_to_band() {
  static const std::vector<int> map = [] {
    std::vector<int> m(kFrameLen / 2 + 1, -1);
    const double bark_lo = hz_to_bark(kFminHz);
    const double bark_hi = hz_to_bark(kRate / 2.0);
    for (std::size_t k = 0; k < m.size(); ++k) {
      const double f = static_cast<double>(k) * kRate / kFrameLen;
      if (f < kFminHz) continue;
      int band = static_cast<int>((hz_to_bark(f) - bark_lo) /
                                  (bark_hi - bark_lo) * kBarkBands);
      if (band >= kBarkBands) band = kBarkBands - 1;
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

// Compressed bark-band loudness per frame, frame-major [frame][band].
std::vector<std::vector<double>> loudness_frames(const AudioBuffer& buf) {
  const std::size_t n_frames =
      buf.samples.size() >= kFrameLen ? (buf.samples.size() - kFrameLen) / kHop + 1
                                      : 0;
  const auto& window = hann_window();
  const auto& band_of = bin_to_band();
  std::vector<std::vector<double>> out(n_frames);
  std::vector<double> frame(kFrameLen);
  for (std::size_t t = 0; t < n_frames; ++t) {
    for (std::size_t i = 0; i < kFrameLen; ++i)
      frame[i] = buf.samples[t * kHop + i] * window[i];
    const auto bins = rfft(frame);
    std::vector<double> energy(kBarkBands, 0.0);
    for (std::size_t k = 0; k < bins.size(); ++k) {
      const int band = band_of[k];
      if (band >= 0) energy[static_cast<std::size_t>(band)] += std::norm(bins[k]);
    }
    auto& loud = out[t];
    loud.resize(kBarkBands);
    for (int b = 0; b < kBarkBands; ++b)
      loud[static_cast<std::size_t>(b)] =
          std::pow(energy[static_cast<std::size_t>(b)], kLoudnessExp);
  }
  return out;
}

}  // namespace

MosScore disturbance_score(const AudioBuffer& reference,
                           const AudioBuffer& degraded) {
  if (reference.sample_rate != kRate || degraded.sample_rate != kRate)
    throw Error("disturbance_score: requires 8000 Hz inputs");
  if (rms(reference) == 0.0) throw Error("disturbance_score: silent reference");
  if (reference.samples.size() < kFrameLen)
    throw Error("disturbance_score: reference too short");

  const auto ref_loud = loudness_frames(reference);
  const auto deg_loud = loudness_frames(degraded);
  const std::size_t n_frames = std::min(ref_loud.size(), deg_loud.size());
  if (n_frames == 0) throw Error("disturbance_score: degraded too short");

  double total = 0.0;
  for (std::size_t t = 0; t < n_frames; ++t) {
    double frame_dist = 0.0;
    for (int b = 0; b < kBarkBands; ++b) {
      const double diff = deg_loud[t][static_cast<std::size_t>(b)] -
                          ref_loud[t][static_cast<std::size_t>(b)];
      frame_dist += diff > 0.0 ? kAsymmetryFactor * diff : -diff;
    }
    total += frame_dist / kBarkBands;
  }
  const double disturbance = total / static_cast<double>(n_frames);
  const double mos =
      1.0 + 3.6 / (1.0 + std::pow(disturbance / kMapPivot, kMapSlope));
  return {std::clamp(mos, 1.0, 5.0)};
}

}  // namespace sqbench
