// End-to-end acceptance checks. Each check prints a single PASS/FAIL line;
// the process exits non-zero if any check fails.

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "sqbench/channel.hpp"
#include "sqbench/experiment.hpp"
#include "sqbench/noise.hpp"
#include "sqbench/stats.hpp"

using namespace sqbench;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(const std::string& name, bool ok, const std::string& detail = "") {
  std::cout << (ok ? "PASS" : "FAIL") << " - " << name;
  if (!detail.empty()) std::cout << " (" << detail << ")";
  std::cout << "\n" << std::flush;
  if (!ok) ++failures;
}

double now_s() {
  using clock = std::chrono::steady_clock;
  static const clock::time_point start = clock::now();
  return std::chrono::duration<double>(clock::now() - start).count();
}

// --- 1. A-law codec vs an independent table oracle --------------------------

void check_alaw() {
  const double t0 = now_s();
  oracles::AlawOracle oracle;
  bool ok = true;
  for (int x = -32768; x <= 32767 && ok; ++x)
    ok = alaw_encode(static_cast<std::int16_t>(x)) ==
         oracle.encode(static_cast<std::int16_t>(x));
  for (int c = 0; c < 256 && ok; ++c)
    ok = alaw_decode(static_cast<std::uint8_t>(c)) ==
         oracle.decode(static_cast<std::uint8_t>(c));
  const double elapsed = now_s() - t0;
  std::ostringstream detail;
  detail << "65536 encode + 256 decode values, " << elapsed << " s";
  report("A-law codec matches the G.711 table oracle bit-exactly",
         ok && elapsed < 1.0, detail.str());
}

// --- 2. SNR closure across the full grid ------------------------------------

AudioBuffer synthetic_reference(std::uint64_t variant, double f0) {
  AudioBuffer raw{oracles::harmonic_speech(f0, 5.0, 8000, variant), 8000};
  return normalize_to_dbfs(irs_filter(raw), -26.0);
}

void check_snr_closure() {
  const std::vector<double> snrs = default_snr_grid();
  const std::vector<NoiseKind> kinds{NoiseKind::Pink, NoiseKind::Blue,
                                     NoiseKind::Babble};
  std::vector<AudioBuffer> refs;
  std::vector<AudioBuffer> pool;
  for (int i = 0; i < 4; ++i)
    refs.push_back(synthetic_reference(400 + i, 100.0 + 35.0 * i));
  for (int i = 0; i < 3; ++i)
    pool.push_back(synthetic_reference(500 + i, 120.0 + 25.0 * i));

  double worst = 0.0;
  int cells = 0;
  for (const AudioBuffer& ref : refs) {
    for (NoiseKind kind : kinds) {
      const AudioBuffer noise =
          make_noise(kind, ref.size(), pool, 6, 900 + cells);
      for (double snr : snrs) {
        AudioBuffer mixed = mix_at_snr(ref, noise, snr);
        AudioBuffer noise_part = mixed;
        for (std::size_t i = 0; i < noise_part.size(); ++i)
          noise_part.samples[i] -= ref.samples[i];
        const double achieved =
            20.0 * std::log10(rms(ref) / rms(noise_part));
        worst = std::max(worst, std::abs(achieved - snr));
        ++cells;
      }
    }
  }
  std::ostringstream detail;
  detail << cells << " cells, worst |error| = " << worst << " dB";
  report("post-mix SNR within 0.1 dB of target across the grid", worst <= 0.1,
         detail.str());
}

// --- 3. Noise spectral slopes ------------------------------------------------

void check_noise_color() {
  double worst_pink = 0.0, worst_blue = 0.0;
  for (int seed = 0; seed < 50; ++seed) {
    const AudioBuffer pink =
        gen_colored(NoiseKind::Pink, 8000 * 4, 8000, 3000 + seed);
    const AudioBuffer blue =
        gen_colored(NoiseKind::Blue, 8000 * 4, 8000, 4000 + seed);
    const double sp = oracles::psd_slope_db_per_decade(
        oracles::welch_psd(pink.samples, 8000, 2048), 100.0, 3000.0);
    const double sb = oracles::psd_slope_db_per_decade(
        oracles::welch_psd(blue.samples, 8000, 2048), 100.0, 3000.0);
    worst_pink = std::max(worst_pink, std::abs(sp - (-10.0)));
    worst_blue = std::max(worst_blue, std::abs(sb - 10.0));
  }
  std::ostringstream detail;
  detail << "worst pink dev " << worst_pink << ", worst blue dev " << worst_blue
         << " dB/decade over 50 seeds";
  report("pink/blue noise slopes within 1.5 dB/decade of -10/+10",
         worst_pink <= 1.5 && worst_blue <= 1.5, detail.str());
}

// --- 4. IRS filter mask ------------------------------------------------------

double filter_response_db(double freq) {
  const int rate = 8000;
  const std::size_t n = rate * 3 / 2;
  AudioBuffer tone{{}, rate};
  tone.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    tone.samples[i] = 0.25 * std::sin(2.0 * M_PI * freq * i / rate);
  const AudioBuffer filtered = irs_filter(tone);
  const std::vector<double> mid_in(tone.samples.begin() + 2000,
                                   tone.samples.end() - 2000);
  const std::vector<double> mid_out(filtered.samples.begin() + 2000,
                                    filtered.samples.end() - 2000);
  const double in = oracles::tone_magnitude(mid_in, freq, rate);
  const double out = oracles::tone_magnitude(mid_out, freq, rate);
  return 20.0 * std::log10(std::max(out, 1e-12) / in);
}

void check_irs_mask() {
  bool ok = true;
  std::string first_bad;
  const double lo = std::log10(50.0), hi = std::log10(3950.0);
  double prev_low = 1e9, prev_high = -1e9;
  std::vector<std::pair<double, double>> curve;
  for (int i = 0; i < 50; ++i) {
    const double freq = std::pow(10.0, lo + (hi - lo) * i / 49.0);
    curve.emplace_back(freq, filter_response_db(freq));
  }
  for (const auto& [freq, db] : curve) {
    bool point_ok = true;
    if (freq <= 100.0 || freq >= 3950.0) point_ok = db <= -20.0;
    if (freq >= 995.0 && freq <= 1005.0) point_ok = std::abs(db) <= 0.5;
    if (freq >= 310.0 && freq <= 3390.0) point_ok = point_ok && db >= -3.0;
    if (!point_ok && first_bad.empty()) {
      std::ostringstream bad;
      bad << freq << " Hz -> " << db << " dB";
      first_bad = bad.str();
    }
    ok = ok && point_ok;
  }
  // Monotone rolloff outside the passband edges (up to floor effects).
  for (const auto& [freq, db] : curve) {
    if (freq < 310.0) {
      if (db < prev_low - 0.75 && db > -45.0) ok = false;
      prev_low = db;
    }
    if (freq > 3390.0) {
      if (db > prev_high + 0.75 && prev_high < -1e8) prev_high = db;
      if (db > prev_high + 0.75 && db > -45.0) ok = false;
      prev_high = std::min(prev_high, db);
    }
  }
  report("IRS filter magnitude satisfies the 50-point mask", ok, first_bad);
}

// --- 5/6. KS test vs permutation oracle + fixed reference points -------------

void check_ks_vs_permutation() {
  const double t0 = now_s();
  std::mt19937_64 rng(20240526);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const double shift = (trial % 10) * 0.1;
    std::vector<double> a(42), b(42);
    for (double& v : a) v = gauss(rng);
    for (double& v : b) v = gauss(rng) + shift;
    const KsResult res = ks_two_sample(a, b);
    const double p_perm =
        oracles::ks_permutation_p(a, b, 10000, 77000 + trial);
    worst = std::max(worst, std::abs(res.p_value - p_perm));
  }
  std::ostringstream detail;
  detail << "worst |p - p_perm| = " << worst << " over 200 trials, "
         << (now_s() - t0) << " s";
  report("KS p-value within 0.02 of the permutation oracle",
         worst <= 0.02, detail.str());
}

void check_ks_reference_points() {
  auto sample_with_d = [](int shifted) {
    std::vector<double> a(42), b(42);
    for (int i = 0; i < 42; ++i) {
      a[i] = i;
      b[i] = i < shifted ? i + 1000.0 : i + 0.5;
    }
    return ks_two_sample(a, b);
  };
  const KsResult strong = sample_with_d(13);  // D = 0.333
  const KsResult weak = sample_with_d(6);     // D = 0.167
  std::ostringstream detail;
  detail << "D=" << strong.statistic << " -> p=" << strong.p_value << "; D="
         << weak.statistic << " -> p=" << weak.p_value;
  report("KS p-values at n=42 land in the published ranges",
         strong.p_value >= 0.01 && strong.p_value <= 0.03 &&
             weak.p_value >= 0.45 && weak.p_value <= 0.70,
         detail.str());
}

// --- 7/10/11. Synthetic corpus, metric sanity, determinism, reports ----------

struct Corpus {
  fs::path dir;
  fs::path manifest;
};

Corpus write_synthetic_corpus() {
  Corpus corpus;
  corpus.dir = fs::temp_directory_path() /
               ("sqbench_accept_" + std::to_string(::getpid()));
  fs::create_directories(corpus.dir);
  corpus.manifest = corpus.dir / "manifest.csv";
  std::ofstream out(corpus.manifest);
  out << "sample_id,path,language,gender,speaker_id,age,start_s,end_s,role\n";
  const char* languages[] = {"turkish", "korean", "english"};
  int id = 0;
  // 48 test excerpts: 3 languages x 2 genders x 8 speakers.
  for (int lang = 0; lang < 3; ++lang) {
    for (int g = 0; g < 2; ++g) {
      for (int k = 0; k < 8; ++k, ++id) {
        const double f0 = (g == 0 ? 95.0 : 180.0) + 6.0 * k + 2.0 * lang;
        std::ostringstream sid;
        sid << languages[lang] << "_" << (g == 0 ? "m" : "f") << "_"
            << std::setw(2) << std::setfill('0') << k;
        const std::string wav = sid.str() + ".wav";
        write_wav({oracles::harmonic_speech(f0, 5.5, 22050, 10 + id), 22050},
                  (corpus.dir / wav).string());
        out << sid.str() << "," << wav << "," << languages[lang] << ","
            << (g == 0 ? "male" : "female") << ",spk" << id << ","
            << (25 + id % 20) << ",0,0,test\n";
      }
    }
  }
  for (int i = 0; i < 4; ++i) {
    const std::string sid = "pool_" + std::to_string(i);
    write_wav({oracles::harmonic_speech(115.0 + 22.0 * i, 5.5, 22050, 600 + i),
               22050},
              (corpus.dir / (sid + ".wav")).string());
    out << sid << "," << sid << ".wav,english," << (i % 2 ? "female" : "male")
        << ",pool" << i << ",35,0,0,babble_pool\n";
  }
  return corpus;
}

void check_metric_sanity(const CorpusManifest& manifest) {
  const std::vector<double> snrs = default_snr_grid();
  const Metric nsim_metric = make_metric("nsim");
  const Metric dist_metric = make_metric("disturbance");
  double worst_nsim_rho = 1.0, worst_dist_rho = 1.0, worst_self = 5.0;
  for (const SampleMeta& meta : manifest.test_samples) {
    const AudioBuffer ref = prepare_reference(meta);
    const AudioBuffer ref16 = resample(ref, 16000);
    worst_self = std::min(worst_self, nsim_metric.score(ref16, ref16).value);
    worst_self = std::min(worst_self, dist_metric.score(ref, ref).value);
    const AudioBuffer noise = make_noise(NoiseKind::Pink, ref.size(), {}, 6,
                                         std::hash<std::string>{}(meta.sample_id));
    std::vector<double> nsim_scores, dist_scores;
    for (double snr : snrs) {
      const AudioBuffer deg = degrade(ref, {NoiseKind::Pink, snr, true}, noise);
      dist_scores.push_back(dist_metric.score(ref, deg).value);
      nsim_scores.push_back(
          nsim_metric.score(ref16, resample(deg, 16000)).value);
    }
    worst_nsim_rho =
        std::min(worst_nsim_rho, oracles::spearman(snrs, nsim_scores));
    worst_dist_rho =
        std::min(worst_dist_rho, oracles::spearman(snrs, dist_scores));
  }
  std::ostringstream detail;
  detail << "worst rho(SNR, score): nsim " << worst_nsim_rho << ", disturbance "
         << worst_dist_rho << "; worst self-score " << worst_self;
  report("metric sanity on the 48-sample synthetic corpus",
         worst_nsim_rho >= 0.95 && worst_dist_rho >= 0.9 && worst_self >= 4.4,
         detail.str());
}

std::string file_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<ScoreRecord> check_determinism(const Corpus& corpus,
                                           const CorpusManifest& manifest) {
  const double t0 = now_s();
  RunConfig config;
  config.manifest_path = corpus.manifest.string();
  config.master_seed = 20260826;
  config.out_dir = (corpus.dir / "out").string();

  RunConfig serial = config;
  serial.parallelism = 1;
  const fs::path store1 = corpus.dir / "scores_p1.jsonl";
  run_experiment(manifest, serial, store1.string());

  RunConfig parallel = config;
  parallel.parallelism = 8;
  const fs::path store8 = corpus.dir / "scores_p8.jsonl";
  const std::vector<ScoreRecord> records =
      run_experiment(manifest, parallel, store8.string());

  const std::string bytes1 = file_bytes(store1);
  const std::string bytes8 = file_bytes(store8);
  const double elapsed = now_s() - t0;
  std::ostringstream detail;
  detail << records.size() << " records per run, " << elapsed << " s total";
  report(
      "2016-job run is byte-identical at parallelism 1 and 8 within 10 min",
      bytes1 == bytes8 && !bytes1.empty() && records.size() == 2016 * 2 &&
          elapsed < 600.0,
      detail.str());
  return records;
}

void check_reports(const Corpus& corpus,
                   const std::vector<ScoreRecord>& records) {
  const fs::path out_dir = corpus.dir / "reports";
  emit_report(records, out_dir.string());
  bool ok = true;
  std::string first_bad;
  for (const char* name :
       {"fig1_language_snr.csv", "fig2_boxstats.csv", "fig4_noise_snr.csv",
        "fig5_gender_fit.csv", "table1_ks_language.csv", "table2_ks_noise.csv",
        "table3_deviation.csv"}) {
    const fs::path file = out_dir / name;
    bool file_ok = fs::exists(file);
    if (file_ok) {
      std::ifstream in(file);
      std::string header, row;
      file_ok = static_cast<bool>(std::getline(in, header)) &&
                header.find(',') != std::string::npos &&
                static_cast<bool>(std::getline(in, row)) && !row.empty();
      // Every data row must have the header's column count.
      const auto columns = [](const std::string& line) {
        return std::count(line.begin(), line.end(), ',');
      };
      const auto want = columns(header);
      while (file_ok && std::getline(in, row))
        if (!row.empty()) file_ok = columns(row) == want;
    }
    if (!file_ok && first_bad.empty()) first_bad = name;
    ok = ok && file_ok;
  }
  report("all seven report files exist, parse, and are populated", ok,
         first_bad);
}

// --- 8. Deviation statistics -------------------------------------------------

void check_deviation_stats() {
  std::mt19937_64 rng(888);
  std::normal_distribution<double> gauss(0.0, 3.0);
  bool ok = true;
  for (int trial = 0; trial < 1000 && ok; ++trial) {
    const std::size_t n = 2 + trial % 50;
    std::vector<std::pair<double, double>> pairs(n);
    double sum = 0.0, abs_sum = 0.0, sq_sum = 0.0;
    for (auto& pr : pairs) {
      pr = {gauss(rng), gauss(rng)};
      const double diff = pr.first - pr.second;
      sum += diff;
      abs_sum += std::abs(diff);
      sq_sum += diff * diff;
    }
    const DeviationStats d = deviation_stats(pairs);
    ok = std::abs(d.mean_diff - sum / n) <= 1e-12 &&
         std::abs(d.mad - abs_sum / n) <= 1e-12 &&
         std::abs(d.rmsd - std::sqrt(sq_sum / n)) <= 1e-12 &&
         std::abs(d.mean_diff) <= d.mad + 1e-12 && d.mad <= d.rmsd + 1e-12;
  }
  report("deviation statistics match brute force on 1000 random sets", ok);
}

// --- 9. Cubic fit ------------------------------------------------------------

void check_cubic_fit() {
  std::vector<double> x, clean_y;
  const double c[4] = {1.25, -0.4, 0.09, 0.02};
  for (int i = 0; i < 30; ++i) {
    const double xi = -10.0 + 20.0 * i / 29.0;
    x.push_back(xi);
    clean_y.push_back(c[0] + c[1] * xi + c[2] * xi * xi + c[3] * xi * xi * xi);
  }
  const CubicFit exact = polyfit_cubic(x, clean_y);
  bool ok = true;
  for (int k = 0; k < 4; ++k) ok = ok && std::abs(exact.coeffs[k] - c[k]) <= 1e-8;

  std::mt19937_64 rng(31337);
  std::normal_distribution<double> gauss(0.0, 0.5);
  std::vector<double> noisy_y = clean_y;
  for (double& v : noisy_y) v += gauss(rng);
  const CubicFit fit = polyfit_cubic(x, noisy_y);
  auto sse = [&](const std::array<double, 4>& coeffs) {
    double total = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double xi = x[i];
      const double pred = coeffs[0] + coeffs[1] * xi + coeffs[2] * xi * xi +
                          coeffs[3] * xi * xi * xi;
      total += (noisy_y[i] - pred) * (noisy_y[i] - pred);
    }
    return total;
  };
  const double best = sse(fit.coeffs);
  std::uniform_int_distribution<int> which(0, 3);
  std::uniform_real_distribution<double> delta(-1e-4, 1e-4);
  for (int trial = 0; trial < 500 && ok; ++trial) {
    std::array<double, 4> perturbed = fit.coeffs;
    perturbed[which(rng)] += delta(rng) / std::pow(10.0, which(rng));
    ok = sse(perturbed) >= best - 1e-12;
  }
  report("cubic fit recovers planted coefficients and is a local optimum", ok);
}

}  // namespace

int main() {
  check_alaw();
  check_snr_closure();
  check_noise_color();
  check_irs_mask();
  check_ks_vs_permutation();
  check_ks_reference_points();
  check_deviation_stats();
  check_cubic_fit();

  const Corpus corpus = write_synthetic_corpus();
  try {
    const CorpusManifest manifest = load_manifest(corpus.manifest.string());
    check_metric_sanity(manifest);
    const std::vector<ScoreRecord> records =
        check_determinism(corpus, manifest);
    check_reports(corpus, records);
  } catch (const std::exception& err) {
    report("synthetic corpus pipeline", false, err.what());
  }
  std::error_code ec;
  fs::remove_all(corpus.dir, ec);

  std::cout << (failures == 0 ? "ALL CHECKS PASSED" : "CHECKS FAILED")
            << "\n";
  return failures == 0 ? 0 : 1;
}
