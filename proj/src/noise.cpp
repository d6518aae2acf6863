#include "sqbench/noise.hpp"

#include <cmath>

#include "sqbench/fft.hpp"

namespace sqbench {

namespace {
constexpr double kNoiseLevelDbfs = -26.0;

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace

GaussianSource::GaussianSource(std::uint64_t seed) : state_(seed) {
  // Burn a few outputs so trivially related seeds decorrelate.
  for (int i = 0; i < 4; ++i) splitmix64(state_);
}

std::uint64_t GaussianSource::next_u64() { return splitmix64(state_); }

double GaussianSource::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1, u2;
  do {
    u1 = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  } while (u1 <= 0.0);
  u2 = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  const double radius = std::sqrt(-2.0 * std::log(u1));
  spare_ = radius * std::sin(2.0 * M_PI * u2);
  has_spare_ = true;
  return radius * std::cos(2.0 * M_PI * u2);
}

std::uint64_t derive_seed(std::uint64_t master, const std::string& key) {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ master;
  for (unsigned char c : key) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::uint64_t s = h;
  return splitmix64(s);
}

NoiseKind noise_kind_from_string(const std::string& name) {
  if (name == "pink") return NoiseKind::Pink;
  if (name == "blue") return NoiseKind::Blue;
  if (name == "babble") return NoiseKind::Babble;
  throw Error("unknown noise kind: " + name + " (expected pink, blue, babble)");
}

std::string to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::Pink: return "pink";
    case NoiseKind::Blue: return "blue";
    case NoiseKind::Babble: return "babble";
  }
  throw Error("invalid noise kind");
}

MixGains required_noise_gain(double clean_rms, double noise_rms, double snr_db) {
  if (!(clean_rms > 0.0) || !(noise_rms > 0.0))
    throw Error("required_noise_gain: RMS inputs must be positive");
  MixGains g;
  g.clean_rms = clean_rms;
  g.noise_rms = noise_rms;
  g.desired_rms = clean_rms / std::pow(10.0, snr_db / 20.0);
  g.gain_db = 20.0 * std::log10(g.desired_rms / noise_rms);
  return g;
}

AudioBuffer gen_colored(NoiseKind kind, std::size_t length, int rate,
                        std::uint64_t seed) {
  if (kind != NoiseKind::Pink && kind != NoiseKind::Blue)
    throw Error("gen_colored: kind must be pink or blue");
  if (length == 0) throw Error("gen_colored: zero length");

  GaussianSource rng(seed);
  std::vector<double> white(length);
  for (double& s : white) s = rng.next();

  auto spectrum = rfft(white);
  const double exponent = kind == NoiseKind::Pink ? -0.5 : 0.5;
  spectrum[0] = 0.0;  // no DC
  for (std::size_t k = 1; k < spectrum.size(); ++k) {
    const double f = static_cast<double>(k) * rate / static_cast<double>(length);
    spectrum[k] *= std::pow(f, exponent);
  }
  AudioBuffer shaped{irfft(spectrum, length), rate};
  return normalize_to_dbfs(shaped, kNoiseLevelDbfs);
}

AudioBuffer gen_babble(const std::vector<AudioBuffer>& pool, int talkers,
                       std::size_t length, int rate, std::uint64_t seed) {
  if (pool.empty()) throw Error("gen_babble: empty pool");
  if (talkers < 2) throw Error("gen_babble: need at least 2 talkers");
  if (length == 0) throw Error("gen_babble: zero length");
  for (const auto& entry : pool) {
    if (entry.sample_rate != rate)
      throw Error("gen_babble: pool entry rate mismatch");
    if (entry.samples.empty()) throw Error("gen_babble: empty pool entry");
  }

  GaussianSource rng(seed);
  std::vector<double> sum(length, 0.0);
  for (int t = 0; t < talkers; ++t) {
    const auto& entry = pool[rng.next_u64() % pool.size()];
    const std::size_t offset = rng.next_u64() % entry.samples.size();
    for (std::size_t i = 0; i < length; ++i)
      sum[i] += entry.samples[(offset + i) % entry.samples.size()];
  }
  AudioBuffer mixed{std::move(sum), rate};
  return normalize_to_dbfs(mixed, kNoiseLevelDbfs);
}

AudioBuffer mix_at_snr(const AudioBuffer& clean, const AudioBuffer& noise,
                       double snr_db) {
  if (clean.sample_rate != noise.sample_rate)
    throw Error("mix_at_snr: sample rate mismatch");
  if (noise.samples.size() < clean.samples.size())
    throw Error("mix_at_snr: noise shorter than clean signal");
  AudioBuffer trimmed{
      std::vector<double>(noise.samples.begin(),
                          noise.samples.begin() +
                              static_cast<long>(clean.samples.size())),
      noise.sample_rate};
  const double clean_rms = rms(clean);
  const double noise_rms = rms(trimmed);
  if (clean_rms == 0.0) throw Error("mix_at_snr: silent clean signal");
  if (noise_rms == 0.0) throw Error("mix_at_snr: silent noise signal");
  const MixGains gains = required_noise_gain(clean_rms, noise_rms, snr_db);
  const double scale = std::pow(10.0, gains.gain_db / 20.0);
  AudioBuffer out{std::vector<double>(clean.samples.size()), clean.sample_rate};
  for (std::size_t i = 0; i < out.samples.size(); ++i)
    out.samples[i] = clean.samples[i] + scale * trimmed.samples[i];
  return out;
}

}  // namespace sqbench
