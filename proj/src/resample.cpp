#include "sqbench/audio.hpp"

#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>

namespace sqbench {

namespace {

constexpr std::array<int, 3> kSupportedRates = {8000, 16000, 22050};

bool rate_supported(int rate) {
  for (int r : kSupportedRates)
    if (r == rate) return true;
  return false;
}

// Zeroth-order modified Bessel function, for the Kaiser window.
double bessel_i0(double x) {
  double sum = 1.0, term = 1.0;
  for (int k = 1; k < 64; ++k) {
    term *= (x / (2.0 * k)) * (x / (2.0 * k));
    sum += term;
    if (term < 1e-16 * sum) break;
  }
  return sum;
}

double sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  const double px = M_PI * x;
  return std::sin(px) / px;
}

// Polyphase windowed-sinc kernel bank for one rate conversion. Output sample
// n sits at input time n*M/L; phase p = (n*M) % L selects a precomputed tap
// row. The kernel is symmetric, so there is no net delay to compensate.
struct PolyphaseKernel {
  long up = 1;          // L
  long down = 1;        // M
  int half_width = 0;   // kernel half support, in input samples
  std::vector<std::vector<double>> taps;  // [phase][2*half_width + 1]
};

PolyphaseKernel design_kernel(int fs_in, int fs_out) {
  const double nyq_in = fs_in / 2.0;
  const double nyq_out = fs_out / 2.0;

  // Downsampling: pass 0.975 * Nyquist_out, stop 1.25 * Nyquist_out (the
  // telephone band ends well below the transition). Upsampling: stopband at
  // the input Nyquist so no imaging energy appears above the original band.
  double f_pass, f_stop;
  if (fs_out < fs_in) {
    f_pass = 0.975 * nyq_out;
    f_stop = 1.25 * nyq_out;
  } else {
    f_pass = 0.925 * nyq_in;
    f_stop = nyq_in;
  }

  const double atten_db = 70.0;
  const double beta = 0.1102 * (atten_db - 8.7);
  // Kaiser length estimate: N >= (A - 7.95) / (2.285 * delta_omega).
  const double delta_w = 2.0 * M_PI * (f_stop - f_pass) / fs_in;
  const int half_width =
      static_cast<int>(std::ceil((atten_db - 7.95) / (2.285 * delta_w))) + 1;
  const double cutoff = (f_pass + f_stop) / (2.0 * nyq_in);  // of input Nyquist
  const double inv_i0_beta = 1.0 / bessel_i0(beta);

  const long g = std::gcd(fs_in, fs_out);
  PolyphaseKernel kernel;
  kernel.up = fs_out / g;
  kernel.down = fs_in / g;
  kernel.half_width = half_width;
  kernel.taps.resize(static_cast<std::size_t>(kernel.up));
  for (long p = 0; p < kernel.up; ++p) {
    const double frac = static_cast<double>(p) / static_cast<double>(kernel.up);
    auto& row = kernel.taps[static_cast<std::size_t>(p)];
    row.resize(static_cast<std::size_t>(2 * half_width + 1));
    for (int j = 0; j <= 2 * half_width; ++j) {
      // Tap j multiplies input sample floor(t) - half_width + j.
      const double dt = frac + static_cast<double>(half_width - j);
      const double u = dt / (half_width + 1.0);
      const double w =
          bessel_i0(beta * std::sqrt(std::max(0.0, 1.0 - u * u))) * inv_i0_beta;
      row[static_cast<std::size_t>(j)] = cutoff * sinc(cutoff * dt) * w;
    }
  }
  return kernel;
}

const PolyphaseKernel& cached_kernel(int fs_in, int fs_out) {
  static std::map<std::pair<int, int>, PolyphaseKernel> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto [it, inserted] = cache.try_emplace({fs_in, fs_out});
  if (inserted) it->second = design_kernel(fs_in, fs_out);
  return it->second;
}

}  // namespace

AudioBuffer resample(const AudioBuffer& buf, int target_rate) {
  if (!rate_supported(buf.sample_rate) || !rate_supported(target_rate))
    throw Error("resample: unsupported rate pair " +
                std::to_string(buf.sample_rate) + " -> " +
                std::to_string(target_rate));
  if (buf.sample_rate == target_rate) return buf;
  if (buf.samples.empty()) return {{}, target_rate};

  const auto& kernel = cached_kernel(buf.sample_rate, target_rate);
  const long n_in = static_cast<long>(buf.samples.size());
  const std::size_t n_out = static_cast<std::size_t>(std::floor(
      static_cast<double>(buf.samples.size()) * target_rate / buf.sample_rate +
      0.5));
  AudioBuffer out{std::vector<double>(n_out, 0.0), target_rate};

  for (std::size_t n = 0; n < n_out; ++n) {
    const long num = static_cast<long>(n) * kernel.down;
    const long base = num / kernel.up;
    const long phase = num % kernel.up;
    const auto& row = kernel.taps[static_cast<std::size_t>(phase)];
    const long k_start = base - kernel.half_width;
    const long j_lo = std::max<long>(0, -k_start);
    const long j_hi =
        std::min<long>(static_cast<long>(row.size()) - 1, n_in - 1 - k_start);
    double acc = 0.0;
    for (long j = j_lo; j <= j_hi; ++j)
      acc += buf.samples[static_cast<std::size_t>(k_start + j)] *
             row[static_cast<std::size_t>(j)];
    out.samples[n] = acc;
  }
  return out;
}

}  // namespace sqbench
