#include "sqbench/channel.hpp"

#include <cmath>

#include "sqbench/fft.hpp"

namespace sqbench {

namespace {

constexpr int kIrsRate = 8000;
constexpr int kIrsTaps = 801;  // odd, linear phase, delay (N-1)/2

// Target magnitude of the band limitation: unity over 310-3390 Hz with
// raised-cosine transitions reaching zero at 80 Hz and 3960 Hz. Smooth
// by construction, so the windowed realization rolls off monotonically.
double irs_target(double f) {
  if (f <= 80.0 || f >= 3960.0) return 0.0;
  if (f < 310.0) {
    const double x = (f - 80.0) / (310.0 - 80.0);
    const double s = std::sin(M_PI / 2.0 * x);
    return s * s;
  }
  if (f > 3390.0) {
    const double x = (3960.0 - f) / (3960.0 - 3390.0);
    const double s = std::sin(M_PI / 2.0 * x);
    return s * s;
  }
  return 1.0;
}

double bessel_i0(double x) {
  double sum = 1.0, term = 1.0;
  for (int k = 1; k < 64; ++k) {
    term *= (x / (2.0 * k)) * (x / (2.0 * k));
    sum += term;
    if (term < 1e-16 * sum) break;
  }
  return sum;
}

// Frequency-sampling design: inverse FFT of the zero-phase target, rotated
// to the center and Kaiser-windowed down to kIrsTaps.
std::vector<double> design_irs() {
  const std::size_t nfft = 8192;
  std::vector<std::complex<double>> spectrum(nfft / 2 + 1);
  for (std::size_t k = 0; k < spectrum.size(); ++k) {
    const double f = static_cast<double>(k) * kIrsRate / nfft;
    spectrum[k] = irs_target(f);
  }
  const std::vector<double> impulse = irfft(spectrum, nfft);

  const int half = (kIrsTaps - 1) / 2;
  const double beta = 8.0;
  const double inv_i0 = 1.0 / bessel_i0(beta);
  std::vector<double> taps(kIrsTaps);
  for (int i = 0; i < kIrsTaps; ++i) {
    const int offset = i - half;  // impulse index, wrapped
    const std::size_t idx =
        static_cast<std::size_t>((offset + static_cast<int>(nfft)) % nfft);
    const double u = static_cast<double>(offset) / (half + 1.0);
    const double w = bessel_i0(beta * std::sqrt(std::max(0.0, 1.0 - u * u))) * inv_i0;
    taps[static_cast<std::size_t>(i)] = impulse[idx] * w;
  }
  return taps;
}

}  // namespace

const std::vector<double>& irs_filter_taps() {
  static const std::vector<double> taps = design_irs();
  return taps;
}

AudioBuffer irs_filter(const AudioBuffer& buf) {
  if (buf.sample_rate != kIrsRate)
    throw Error("irs_filter: requires 8000 Hz input, got " +
                std::to_string(buf.sample_rate));
  const auto& taps = irs_filter_taps();
  const long half = (static_cast<long>(taps.size()) - 1) / 2;
  const long n = static_cast<long>(buf.samples.size());
  AudioBuffer out{std::vector<double>(buf.samples.size(), 0.0), kIrsRate};
  // Zero-phase application: output index n takes input n-half .. n+half,
  // which trims the group delay and keeps reference/degraded aligned.
  for (long i = 0; i < n; ++i) {
    const long k_lo = std::max<long>(0, i - half);
    const long k_hi = std::min<long>(n - 1, i + half);
    double acc = 0.0;
    for (long k = k_lo; k <= k_hi; ++k)
      acc += buf.samples[static_cast<std::size_t>(k)] *
             taps[static_cast<std::size_t>(half + i - k)];
    out.samples[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

std::uint8_t alaw_encode(std::int16_t sample) {
  int ix = sample < 0 ? (~sample) >> 4 : sample >> 4;
  if (ix > 15) {
    int iexp = 1;
    while (ix > 16 + 15) {
      ix >>= 1;
      ++iexp;
    }
    ix -= 16;
    ix += iexp << 4;
  }
  if (sample >= 0) ix |= 0x80;
  return static_cast<std::uint8_t>(ix ^ 0x55);
}

std::int16_t alaw_decode(std::uint8_t code) {
  const int ix = (code ^ 0x55) & 0x7f;
  const int iexp = ix >> 4;
  int mant = ix & 0x0f;
  if (iexp > 0) mant += 16;
  mant = (mant << 4) + 8;
  if (iexp > 1) mant <<= iexp - 1;
  return static_cast<std::int16_t>(code > 127 ? mant : -mant);
}

AudioBuffer codec_pass(const AudioBuffer& buf) {
  if (buf.sample_rate != kIrsRate)
    throw Error("codec_pass: requires 8000 Hz input, got " +
                std::to_string(buf.sample_rate));
  AudioBuffer out{std::vector<double>(buf.samples.size()), kIrsRate};
  for (std::size_t i = 0; i < buf.samples.size(); ++i) {
    const std::int16_t q = sample_to_int16(buf.samples[i]);
    out.samples[i] = alaw_decode(alaw_encode(q)) / 32768.0;
  }
  return out;
}

}  // namespace sqbench
