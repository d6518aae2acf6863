#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sqbench/audio.hpp"
#include "sqbench/metrics.hpp"
#include "sqbench/noise.hpp"

namespace sqbench {

inline constexpr const char* kToolkitVersion = "0.1.0";

/// One corpus excerpt plus its labels.
struct SampleMeta {
  std::string sample_id;
  std::string path;
  std::string language;
  std::string gender;  // "male" | "female"
  std::string speaker_id;
  int age = 0;
  double start_s = 0.0;
  double end_s = 0.0;   // 0 = to end of file
  std::string role;     // "test" | "babble_pool"
};

struct CorpusManifest {
  std::vector<SampleMeta> test_samples;
  std::vector<SampleMeta> babble_pool;
};

/// Parses and validates the CSV manifest (documented schema: sample_id,path,
/// language,gender,speaker_id,age,start_s,end_s,role). All referenced audio
/// must exist; duplicate sample ids are an error; excerpts outside 5-10 s
/// draw a warning on stderr.
CorpusManifest load_manifest(const std::string& path);

/// One channel condition.
struct DegradationSpec {
  NoiseKind noise = NoiseKind::Pink;
  double snr_db = 0.0;
  bool codec = true;
};

/// Excerpt -> mono -> edge silence trim -> 8 kHz -> IRS -> -26 dBFS.
/// The result is the reference signal of the experiment.
AudioBuffer prepare_reference(const SampleMeta& sample,
                              double trim_threshold_db = -50.0);

/// Noise for one condition, already narrowband (IRS) and at -26 dBFS.
/// Colored noise is synthesized at 8 kHz; babble is summed from the prepared
/// pool. Deterministic in (spec, length, seed, pool).
AudioBuffer make_noise(NoiseKind kind, std::size_t length,
                       const std::vector<AudioBuffer>& babble_pool, int talkers,
                       std::uint64_t seed);

/// Mix at the target SNR, re-normalize to -26 dBFS, then the A-law codec
/// when the spec asks for it.
AudioBuffer degrade(const AudioBuffer& reference, const DegradationSpec& spec,
                    const AudioBuffer& noise);

/// One (sample, condition, metric) observation.
struct ScoreRecord {
  std::string sample_id;
  std::string language;
  std::string gender;
  std::string noise;
  double snr_db = 0.0;
  std::string metric;
  double mos = 0.0;
  std::uint64_t seed = 0;
  std::string version;
};

struct Job {
  SampleMeta sample;
  DegradationSpec spec;
};

/// Default SNR grid: -25..40 dB in 5 dB steps, 14 levels.
std::vector<double> default_snr_grid();

/// Cartesian product of samples x noises x SNRs in canonical order.
std::vector<Job> build_grid(const CorpusManifest& manifest,
                            const std::vector<double>& snr_levels,
                            const std::vector<NoiseKind>& noises);

struct RunConfig {
  std::string manifest_path;
  std::string out_dir = "out";
  std::vector<double> snr_levels = default_snr_grid();
  std::vector<NoiseKind> noises = {NoiseKind::Pink, NoiseKind::Blue,
                                   NoiseKind::Babble};
  std::vector<std::string> metrics = {"disturbance", "nsim"};
  int parallelism = 1;
  std::uint64_t master_seed = 0;
  bool codec = true;
  int babble_talkers = 6;
  double trim_threshold_db = -50.0;
  std::string ks_granularity = "per-signal";  // or "per-snr-mean"
  bool resume = false;
};

/// Loads a JSON config file; unknown keys are an error.
RunConfig load_run_config(const std::string& path);

/// Executes the grid under a bounded worker pool, appending records to
/// `store_path` in canonical job order (so any parallelism level and any
/// interrupted/resumed run yields byte-identical stores). Returns all
/// records including previously stored ones when resuming.
std::vector<ScoreRecord> run_experiment(const CorpusManifest& manifest,
                                        const RunConfig& config,
                                        const std::string& store_path);

/// Score store I/O: line-delimited JSON records, UTF-8.
void append_record(std::ostream& out, const ScoreRecord& record);
std::vector<ScoreRecord> load_store(const std::string& path);

/// Emits the seven report files into `out_dir`:
/// fig1_language_snr.csv, fig2_boxstats.csv, fig4_noise_snr.csv,
/// fig5_gender_fit.csv, table1_ks_language.csv, table2_ks_noise.csv,
/// table3_deviation.csv. Pure view over the records.
void emit_report(const std::vector<ScoreRecord>& records,
                 const std::string& out_dir,
                 const std::string& ks_granularity = "per-signal",
                 const std::string& first_metric = "disturbance",
                 const std::string& second_metric = "nsim");

}  // namespace sqbench
