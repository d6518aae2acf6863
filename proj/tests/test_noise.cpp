#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "sqbench/noise.hpp"

using namespace sqbench;

namespace {

double measured_snr(const AudioBuffer& clean, const AudioBuffer& mixed) {
  AudioBuffer residual = mixed;
  for (std::size_t i = 0; i < residual.samples.size(); ++i)
    residual.samples[i] -= clean.samples[i];
  return 20.0 * std::log10(rms(clean) / rms(residual));
}

AudioBuffer test_tone(double seconds, int rate) {
  AudioBuffer buf{{}, rate};
  const auto n = static_cast<std::size_t>(seconds * rate);
  buf.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    buf.samples[i] =
        0.05 * std::sin(2.0 * M_PI * 433.0 * static_cast<double>(i) / rate) +
        0.03 * std::sin(2.0 * M_PI * 1291.0 * static_cast<double>(i) / rate);
  return buf;
}

double mean_slope(NoiseKind kind, int seeds) {
  double total = 0.0;
  for (int s = 0; s < seeds; ++s) {
    const AudioBuffer noise =
        gen_colored(kind, 5 * 8000, 8000, static_cast<std::uint64_t>(s) + 1);
    const auto psd = oracles::welch_psd(noise.samples, 8000.0, 512);
    total += oracles::psd_slope_db_per_decade(psd, 100.0, 3000.0);
  }
  return total / seeds;
}

}  // namespace

TEST_CASE("pink noise PSD slope is -10 dB/decade") {
  CHECK(mean_slope(NoiseKind::Pink, 10) == doctest::Approx(-10.0).epsilon(0.15));
}

TEST_CASE("blue noise PSD slope is +10 dB/decade") {
  CHECK(mean_slope(NoiseKind::Blue, 10) == doctest::Approx(10.0).epsilon(0.15));
}

TEST_CASE("gen_colored is deterministic in the seed") {
  const AudioBuffer a = gen_colored(NoiseKind::Pink, 8000, 8000, 77);
  const AudioBuffer b = gen_colored(NoiseKind::Pink, 8000, 8000, 77);
  REQUIRE(a.samples.size() == b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i)
    CHECK(a.samples[i] == b.samples[i]);
  const AudioBuffer c = gen_colored(NoiseKind::Pink, 8000, 8000, 78);
  bool differs = false;
  for (std::size_t i = 0; i < a.samples.size(); ++i)
    if (a.samples[i] != c.samples[i]) differs = true;
  CHECK(differs);
}

TEST_CASE("gen_colored output level and errors") {
  const AudioBuffer noise = gen_colored(NoiseKind::Blue, 8000, 8000, 5);
  CHECK(rms(noise) == doctest::Approx(std::pow(10.0, -26.0 / 20.0)).epsilon(1e-6));
  CHECK_THROWS_AS(gen_colored(NoiseKind::Pink, 0, 8000, 1), Error);
  CHECK_THROWS_AS(gen_colored(NoiseKind::Babble, 100, 8000, 1), Error);
}

TEST_CASE("gen_babble determinism, level, and errors") {
  std::vector<AudioBuffer> pool;
  for (int i = 0; i < 4; ++i)
    pool.push_back({oracles::harmonic_speech(100.0 + 17.0 * i, 2.0, 8000,
                                             static_cast<std::uint64_t>(i)),
                    8000});
  const AudioBuffer a = gen_babble(pool, 6, 8000, 8000, 11);
  const AudioBuffer b = gen_babble(pool, 6, 8000, 8000, 11);
  for (std::size_t i = 0; i < a.samples.size(); ++i)
    CHECK(a.samples[i] == b.samples[i]);
  CHECK(rms(a) == doctest::Approx(std::pow(10.0, -26.0 / 20.0)).epsilon(1e-6));
  CHECK_THROWS_AS(gen_babble({}, 6, 8000, 8000, 1), Error);
  CHECK_THROWS_AS(gen_babble(pool, 1, 8000, 8000, 1), Error);
}

TEST_CASE("gen_babble spectral centroid sits in the speech band") {
  std::vector<AudioBuffer> pool;
  for (int i = 0; i < 6; ++i)
    pool.push_back({oracles::harmonic_speech(95.0 + 23.0 * i, 2.0, 8000,
                                             static_cast<std::uint64_t>(i + 10)),
                    8000});
  const AudioBuffer babble = gen_babble(pool, 6, 4 * 8000, 8000, 3);
  const auto psd = oracles::welch_psd(babble.samples, 8000.0, 512);
  double num = 0.0, den = 0.0;
  for (const auto& [f, p] : psd) {
    num += f * p;
    den += p;
  }
  const double centroid = num / den;
  CHECK(centroid > 300.0);
  CHECK(centroid < 3400.0);
}

TEST_CASE("babble sum of identical streams normalizes to the single stream") {
  // Normalization is scale invariant: k * x normalizes to the same signal.
  std::vector<AudioBuffer> pool = {
      {oracles::harmonic_speech(120.0, 1.0, 8000, 1), 8000}};
  AudioBuffer doubled = pool[0];
  for (double& s : doubled.samples) s *= 2.0;
  const AudioBuffer norm_single = normalize_to_dbfs(pool[0], -26.0);
  const AudioBuffer norm_double = normalize_to_dbfs(doubled, -26.0);
  for (std::size_t i = 0; i < norm_single.samples.size(); ++i)
    CHECK(norm_single.samples[i] ==
          doctest::Approx(norm_double.samples[i]).epsilon(1e-12));
}

TEST_CASE("required_noise_gain arithmetic") {
  SUBCASE("T = 0 gives P_d = P_s") {
    const MixGains g = required_noise_gain(0.05, 0.02, 0.0);
    CHECK(g.desired_rms == doctest::Approx(0.05));
    CHECK(g.gain_db == doctest::Approx(20.0 * std::log10(0.05 / 0.02)));
  }
  SUBCASE("P_s = P_n, T = 20 gives G = -20 dB") {
    const MixGains g = required_noise_gain(0.1, 0.1, 20.0);
    CHECK(g.gain_db == doctest::Approx(-20.0));
  }
  SUBCASE("errors on non-positive RMS") {
    CHECK_THROWS_AS(required_noise_gain(0.0, 0.1, 10.0), Error);
    CHECK_THROWS_AS(required_noise_gain(0.1, -1.0, 10.0), Error);
  }
}

TEST_CASE("required_noise_gain closes the loop within 0.01 dB") {
  std::uint64_t state = 2024;
  auto next = [&state] {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    return static_cast<double>(state >> 11) * 0x1.0p-53;
  };
  for (int trial = 0; trial < 100; ++trial) {
    const double ps = 0.001 + next() * 0.5;
    const double pn = 0.001 + next() * 0.5;
    const double target = -30.0 + next() * 70.0;
    const MixGains g = required_noise_gain(ps, pn, target);
    const double scaled_noise_rms = pn * std::pow(10.0, g.gain_db / 20.0);
    const double achieved = 20.0 * std::log10(ps / scaled_noise_rms);
    CHECK(achieved == doctest::Approx(target).epsilon(1e-6));
    CHECK(std::abs(achieved - target) < 0.01);
  }
}

TEST_CASE("mix_at_snr hits the target at the grid extremes") {
  const AudioBuffer clean = test_tone(2.0, 8000);
  const AudioBuffer noise = gen_colored(NoiseKind::Pink, 2 * 8000, 8000, 55);
  SUBCASE("T = 40: noise RMS is clean RMS / 100") {
    const AudioBuffer mixed = mix_at_snr(clean, noise, 40.0);
    AudioBuffer residual = mixed;
    for (std::size_t i = 0; i < residual.samples.size(); ++i)
      residual.samples[i] -= clean.samples[i];
    CHECK(rms(residual) == doctest::Approx(rms(clean) / 100.0).epsilon(1e-9));
  }
  SUBCASE("T = -25: noise RMS is about 17.78x clean RMS") {
    const AudioBuffer mixed = mix_at_snr(clean, noise, -25.0);
    AudioBuffer residual = mixed;
    for (std::size_t i = 0; i < residual.samples.size(); ++i)
      residual.samples[i] -= clean.samples[i];
    CHECK(rms(residual) / rms(clean) == doctest::Approx(17.7828).epsilon(1e-4));
  }
}

TEST_CASE("mix_at_snr SNR closure over a grid") {
  const AudioBuffer clean = test_tone(2.0, 8000);
  for (double target = -25.0; target <= 40.0; target += 5.0) {
    for (NoiseKind kind : {NoiseKind::Pink, NoiseKind::Blue}) {
      const AudioBuffer noise =
          gen_colored(kind, 2 * 8000, 8000, static_cast<std::uint64_t>(target + 100));
      const AudioBuffer mixed = mix_at_snr(clean, noise, target);
      CHECK(measured_snr(clean, mixed) == doctest::Approx(target).epsilon(1e-6));
    }
  }
}

TEST_CASE("mix_at_snr error paths") {
  const AudioBuffer clean = test_tone(1.0, 8000);
  const AudioBuffer noise = gen_colored(NoiseKind::Pink, 8000, 8000, 1);
  AudioBuffer wrong_rate = noise;
  wrong_rate.sample_rate = 16000;
  CHECK_THROWS_AS(mix_at_snr(clean, wrong_rate, 0.0), Error);
  const AudioBuffer short_noise = gen_colored(NoiseKind::Pink, 4000, 8000, 1);
  CHECK_THROWS_AS(mix_at_snr(clean, short_noise, 0.0), Error);
  const AudioBuffer silent{std::vector<double>(8000, 0.0), 8000};
  CHECK_THROWS_AS(mix_at_snr(silent, noise, 0.0), Error);
}

TEST_CASE("mixing preserves target SNR under clean-signal scaling") {
  AudioBuffer clean = test_tone(1.5, 8000);
  const AudioBuffer noise = gen_colored(NoiseKind::Blue, 2 * 8000, 8000, 9);
  for (double g : {0.25, 1.0, 3.0}) {
    AudioBuffer scaled = clean;
    for (double& s : scaled.samples) s *= g;
    const AudioBuffer mixed = mix_at_snr(scaled, noise, 12.0);
    CHECK(measured_snr(scaled, mixed) == doctest::Approx(12.0).epsilon(1e-6));
  }
}

TEST_CASE("derive_seed separates keys and masters") {
  CHECK(derive_seed(1, "a/pink/0") != derive_seed(1, "a/pink/5"));
  CHECK(derive_seed(1, "a/pink/0") != derive_seed(2, "a/pink/0"));
  CHECK(derive_seed(1, "a/pink/0") == derive_seed(1, "a/pink/0"));
}
