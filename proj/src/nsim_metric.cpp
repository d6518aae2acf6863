#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "sqbench/fft.hpp"
#include "sqbench/metrics.hpp"

namespace sqbench {

namespace {

constexpr int kRate = 16000;
constexpr double kDynamicRange = -kSpectrogramFloorDb;  // L = 80 dB
const double kC1 = std::pow(0.01 * kDynamicRange, 2.0);
const double kC2 = std::pow(0.03 * kDynamicRange, 2.0) / 2.0;

// 3x3 Gaussian neighborhood weights, sigma 0.5, normalized.
const std::array<double, 9>& gaussian3x3() {
  static const std::array<double, 9> w = [] {
    std::array<double, 9> g{};
    double sum = 0.0;
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        const double v = std::exp(-(dx * dx + dy * dy) / (2.0 * 0.5 * 0.5));
        g[static_cast<std::size_t>((dy + 1) * 3 + dx + 1)] = v;
        sum += v;
      }
    for (double& v : g) v /= sum;
    return g;
  }();
  return w;
}

// Alignment lag (in samples of `deg` relative to `ref`) that maximizes the
// cross-correlation, searched over +-max_lag via FFT.
long best_lag(const std::vector<double>& ref, const std::vector<double>& deg,
              long max_lag) {
  std::size_t n = 1;
  while (n < ref.size() + deg.size()) n <<= 1;
  std::vector<double> a(n, 0.0), b(n, 0.0);
  std::copy(ref.begin(), ref.end(), a.begin());
  std::copy(deg.begin(), deg.end(), b.begin());
  auto fa = rfft(a);
  const auto fb = rfft(b);
  for (std::size_t k = 0; k < fa.size(); ++k) fa[k] *= std::conj(fb[k]);
  const auto corr = irfft(fa, n);  // corr[m] = sum ref[i+m] * deg[i], circular
  long best = 0;
  double best_val = -std::numeric_limits<double>::infinity();
  for (long lag = -max_lag; lag <= max_lag; ++lag) {
    const std::size_t idx =
        static_cast<std::size_t>((lag % static_cast<long>(n) +
                                  static_cast<long>(n)) %
                                 static_cast<long>(n));
    if (corr[idx] > best_val) {
      best_val = corr[idx];
      best = lag;
    }
  }
  return best;
}

// Monotone piecewise-cubic Hermite (Fritsch-Carlson) through the NSIM -> MOS
// anchors; clamped outside the anchor range.
double nsim_to_mos(double nsim_value) {
  static constexpr std::array<double, 5> xs = {0.6, 0.7, 0.8, 0.9, 1.0};
  static constexpr std::array<double, 5> ys = {1.0, 2.0, 3.0, 4.0, 5.0};
  constexpr std::size_t n = xs.size();
  if (nsim_value <= xs.front()) return ys.front();
  if (nsim_value >= xs.back()) return ys.back();
  // Uniform spacing and uniform slope here make the tangents all equal to the
  // secant slope, but the general construction is kept for clarity.
  std::array<double, n - 1> d{};
  for (std::size_t i = 0; i + 1 < n; ++i)
    d[i] = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
  std::array<double, n> m{};
  m[0] = d[0];
  m[n - 1] = d[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i)
    m[i] = (d[i - 1] * d[i] <= 0.0) ? 0.0 : 0.5 * (d[i - 1] + d[i]);
  std::size_t i = 0;
  while (i + 2 < n && nsim_value > xs[i + 1]) ++i;
  const double h = xs[i + 1] - xs[i];
  const double t = (nsim_value - xs[i]) / h;
  const double t2 = t * t, t3 = t2 * t;
  return ys[i] * (2 * t3 - 3 * t2 + 1) + m[i] * h * (t3 - 2 * t2 + t) +
         ys[i + 1] * (-2 * t3 + 3 * t2) + m[i + 1] * h * (t3 - t2);
}

}  // namespace

double nsim(const Spectrogram& ref_patch, const Spectrogram& deg_patch) {
  if (ref_patch.bands != deg_patch.bands || ref_patch.frames != deg_patch.frames)
    throw Error("nsim: patch shape mismatch");
  if (ref_patch.bands < 3 || ref_patch.frames < 3)
    throw Error("nsim: patch too small for 3x3 neighborhoods");
  const auto& w = gaussian3x3();
  const int bands = ref_patch.bands;
  const std::size_t frames = ref_patch.frames;
  double total = 0.0;
  std::size_t count = 0;
  for (int b = 1; b + 1 < bands; ++b) {
    for (std::size_t t = 1; t + 1 < frames; ++t) {
      double mu_r = 0.0, mu_d = 0.0;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          const double wk = w[static_cast<std::size_t>((dy + 1) * 3 + dx + 1)];
          mu_r += wk * ref_patch.at(b + dy, t + static_cast<std::size_t>(dx + 1) - 1);
          mu_d += wk * deg_patch.at(b + dy, t + static_cast<std::size_t>(dx + 1) - 1);
        }
      double var_r = 0.0, var_d = 0.0, cov = 0.0;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          const double wk = w[static_cast<std::size_t>((dy + 1) * 3 + dx + 1)];
          const double r =
              ref_patch.at(b + dy, t + static_cast<std::size_t>(dx + 1) - 1) - mu_r;
          const double d =
              deg_patch.at(b + dy, t + static_cast<std::size_t>(dx + 1) - 1) - mu_d;
          var_r += wk * r * r;
          var_d += wk * d * d;
          cov += wk * r * d;
        }
      const double luminance =
          (2.0 * mu_r * mu_d + kC1) / (mu_r * mu_r + mu_d * mu_d + kC1);
      const double structure =
          (cov + kC2) / (std::sqrt(var_r) * std::sqrt(var_d) + kC2);
      total += luminance * structure;
      ++count;
    }
  }
  return total / static_cast<double>(count);
}

MosScore visqol_like_score(const AudioBuffer& reference,
                           const AudioBuffer& degraded) {
  if (reference.sample_rate != kRate || degraded.sample_rate != kRate)
    throw Error("visqol_like_score: requires 16000 Hz inputs");
  if (rms(reference) == 0.0) throw Error("visqol_like_score: silent reference");
  const long max_lag = kRate / 2;  // +-0.5 s search window
  if (std::llabs(static_cast<long long>(reference.samples.size()) -
                 static_cast<long long>(degraded.samples.size())) > max_lag)
    throw Error("visqol_like_score: duration mismatch beyond alignment window");

  const long lag = best_lag(reference.samples, degraded.samples, max_lag);
  // deg appears shifted by `lag` relative to ref; undo the shift.
  const std::size_t n = reference.samples.size();
  std::vector<double> aligned(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const long j = static_cast<long>(i) - lag;
    if (j >= 0 && j < static_cast<long>(degraded.samples.size()))
      aligned[i] = degraded.samples[static_cast<std::size_t>(j)];
  }
  const Spectrogram ref_spec = spectrogram(reference);
  const Spectrogram deg_spec =
      spectrogram(AudioBuffer{std::move(aligned), kRate});
  const double similarity = nsim(ref_spec, deg_spec);
  return {std::clamp(nsim_to_mos(similarity), 1.0, 5.0)};
}

}  // namespace sqbench
