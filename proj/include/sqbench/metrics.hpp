#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "sqbench/audio.hpp"

namespace sqbench {

/// Log-compressed mel-band spectrogram: values in dB relative to the signal
/// maximum, floored at -80 dB. Laid out band-major: value(band, frame).
struct Spectrogram {
  int bands = 0;
  std::size_t frames = 0;
  std::vector<double> values;  // size bands * frames

  double at(int band, std::size_t frame) const {
    return values[static_cast<std::size_t>(band) * frames + frame];
  }
  double& at(int band, std::size_t frame) {
    return values[static_cast<std::size_t>(band) * frames + frame];
  }
};

constexpr int kSpectrogramBands = 32;
constexpr double kSpectrogramFloorDb = -80.0;

/// 32 mel-spaced bands over 50 Hz - 8 kHz, 30 ms frames with 15 ms hop.
/// Requires a 16 kHz signal of at least one second.
Spectrogram spectrogram(const AudioBuffer& buf);

/// Neurogram similarity of two equally shaped spectrogram patches: mean of
/// luminance * structure over 3x3 Gaussian-weighted neighborhoods.
double nsim(const Spectrogram& ref_patch, const Spectrogram& deg_patch);

/// MOS-LQO in [1, 5].
struct MosScore {
  double value = 0.0;
};

/// NSIM spectrogram similarity metric (16 kHz): cross-correlation alignment,
/// mean NSIM over the spectrogram pair, monotone mapping onto MOS.
MosScore visqol_like_score(const AudioBuffer& reference,
                           const AudioBuffer& degraded);

/// Bark-band perceptual disturbance metric (8 kHz): frame-wise compressed
/// loudness differences with asymmetric weighting of additive content,
/// time-aggregated and mapped by a decreasing logistic onto [1.0, 4.6].
MosScore disturbance_score(const AudioBuffer& reference,
                           const AudioBuffer& degraded);

/// Extra additive-disturbance weight in the disturbance metric.
constexpr double kAsymmetryFactor = 12.0;

/// Runs `command` with {ref} and {deg} substituted by WAV paths; the child's
/// standard output must contain exactly one decimal number, taken as the MOS
/// and clamped to [1, 5]. Non-zero exit, unparsable output, or exceeding
/// `timeout_s` is an error.
MosScore external_metric(const std::string& command, const std::string& ref_path,
                         const std::string& deg_path, double timeout_s = 60.0);

/// A named intrusive metric as the runner consumes it. `required_rate` is the
/// rate `score` expects both buffers at.
struct Metric {
  std::string name;
  int required_rate = 8000;
  std::function<MosScore(const AudioBuffer&, const AudioBuffer&)> score;
};

/// Builds a metric by name: "nsim", "disturbance", or an external command
/// template (anything containing "{ref}").
Metric make_metric(const std::string& spec);

/// Names of the built-in metrics.
std::vector<std::string> builtin_metric_names();

}  // namespace sqbench
