#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "sqbench/experiment.hpp"

namespace sqbench {

namespace {

std::string format_snr(double snr) {
  std::ostringstream out;
  out << snr;
  return out.str();
}

std::string job_key(const Job& job) {
  return job.sample.sample_id + "/" + to_string(job.spec.noise) + "/" +
         format_snr(job.spec.snr_db);
}

nlohmann::ordered_json record_to_json(const ScoreRecord& r) {
  nlohmann::ordered_json j;
  j["sample_id"] = r.sample_id;
  j["language"] = r.language;
  j["gender"] = r.gender;
  j["noise"] = r.noise;
  j["snr_db"] = r.snr_db;
  j["metric"] = r.metric;
  j["mos"] = r.mos;
  j["seed"] = r.seed;
  j["version"] = r.version;
  return j;
}

ScoreRecord record_from_json(const nlohmann::json& j) {
  ScoreRecord r;
  r.sample_id = j.at("sample_id").get<std::string>();
  r.language = j.at("language").get<std::string>();
  r.gender = j.at("gender").get<std::string>();
  r.noise = j.at("noise").get<std::string>();
  r.snr_db = j.at("snr_db").get<double>();
  r.metric = j.at("metric").get<std::string>();
  r.mos = j.at("mos").get<double>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.version = j.at("version").get<std::string>();
  return r;
}

}  // namespace

void append_record(std::ostream& out, const ScoreRecord& record) {
  out << record_to_json(record).dump() << "\n";
}

std::vector<ScoreRecord> load_store(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("load_store: cannot open " + path);
  std::vector<ScoreRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      records.push_back(record_from_json(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      throw Error("load_store: " + path + ": line " + std::to_string(line_no) +
                  ": corrupt record: " + e.what());
    }
  }
  return records;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("load_run_config: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw Error("load_run_config: " + path + ": " + e.what());
  }
  RunConfig cfg;
  const std::set<std::string> known = {
      "manifest",    "out_dir",        "snr_levels", "noises",
      "metrics",     "parallelism",    "master_seed", "codec",
      "babble_talkers", "trim_threshold_db", "ks_granularity"};
  for (const auto& [key, value] : j.items())
    if (!known.count(key))
      throw Error("load_run_config: unknown key '" + key + "'");
  if (!j.contains("manifest"))
    throw Error("load_run_config: missing required key 'manifest'");
  cfg.manifest_path = j.at("manifest").get<std::string>();
  if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();
  if (j.contains("snr_levels")) {
    cfg.snr_levels = j.at("snr_levels").get<std::vector<double>>();
    if (cfg.snr_levels.empty())
      throw Error("load_run_config: snr_levels must be non-empty");
  }
  if (j.contains("noises")) {
    cfg.noises.clear();
    for (const auto& name : j.at("noises"))
      cfg.noises.push_back(noise_kind_from_string(name.get<std::string>()));
    if (cfg.noises.empty())
      throw Error("load_run_config: noises must be non-empty");
  }
  if (j.contains("metrics")) {
    cfg.metrics = j.at("metrics").get<std::vector<std::string>>();
    if (cfg.metrics.empty())
      throw Error("load_run_config: metrics must be non-empty");
  }
  if (j.contains("parallelism")) {
    cfg.parallelism = j.at("parallelism").get<int>();
    if (cfg.parallelism < 1)
      throw Error("load_run_config: parallelism must be >= 1");
  }
  if (j.contains("master_seed"))
    cfg.master_seed = j.at("master_seed").get<std::uint64_t>();
  if (j.contains("codec")) cfg.codec = j.at("codec").get<bool>();
  if (j.contains("babble_talkers")) {
    cfg.babble_talkers = j.at("babble_talkers").get<int>();
    if (cfg.babble_talkers < 2)
      throw Error("load_run_config: babble_talkers must be >= 2");
  }
  if (j.contains("trim_threshold_db"))
    cfg.trim_threshold_db = j.at("trim_threshold_db").get<double>();
  if (j.contains("ks_granularity")) {
    cfg.ks_granularity = j.at("ks_granularity").get<std::string>();
    if (cfg.ks_granularity != "per-signal" &&
        cfg.ks_granularity != "per-snr-mean")
      throw Error(
          "load_run_config: ks_granularity must be per-signal or per-snr-mean");
  }
  return cfg;
}

std::vector<ScoreRecord> run_experiment(const CorpusManifest& manifest,
                                        const RunConfig& config,
                                        const std::string& store_path) {
  // References and babble pool are shared immutable inputs for all workers.
  std::vector<AudioBuffer> references;
  references.reserve(manifest.test_samples.size());
  for (const auto& sample : manifest.test_samples)
    references.push_back(prepare_reference(sample, config.trim_threshold_db));

  const bool need_babble =
      std::any_of(config.noises.begin(), config.noises.end(),
                  [](NoiseKind k) { return k == NoiseKind::Babble; });
  std::vector<AudioBuffer> babble_pool;
  if (need_babble) {
    if (manifest.babble_pool.empty())
      throw Error("run_experiment: babble noise requested but the manifest has "
                  "no babble_pool samples");
    for (const auto& sample : manifest.babble_pool)
      babble_pool.push_back(prepare_reference(sample, config.trim_threshold_db));
  }

  std::vector<Metric> metrics;
  for (const auto& spec : config.metrics) metrics.push_back(make_metric(spec));

  std::vector<Job> jobs = build_grid(manifest, config.snr_levels, config.noises);
  for (auto& job : jobs) job.spec.codec = config.codec;

  // Resume: previously stored records are kept verbatim; a job is skipped
  // only when every metric for it is already present.
  std::vector<ScoreRecord> done_records;
  std::set<std::string> done_keys;  // job_key + "/" + metric
  if (config.resume && std::filesystem::exists(store_path)) {
    // A killed run may leave a truncated final line or a half-written job;
    // drop back to the last whole-job boundary so the resumed store matches
    // an uninterrupted run byte for byte.
    std::vector<std::string> lines;
    {
      std::ifstream in(store_path);
      std::string line;
      while (std::getline(in, line))
        if (!line.empty()) lines.push_back(line);
    }
    while (!lines.empty()) {
      try {
        (void)nlohmann::json::parse(lines.back());
        break;
      } catch (const std::exception&) {
        lines.pop_back();
      }
    }
    const std::size_t keep = lines.size() - lines.size() % metrics.size();
    if (keep != lines.size()) lines.resize(keep);
    {
      std::ofstream out(store_path, std::ios::trunc);
      for (const auto& line : lines) out << line << "\n";
    }
    done_records = load_store(store_path);
    for (const auto& r : done_records)
      done_keys.insert(r.sample_id + "/" + r.noise + "/" + format_snr(r.snr_db) +
                       "/" + r.metric);
  }
  auto job_done = [&](const Job& job) {
    for (const auto& m : metrics)
      if (!done_keys.count(job_key(job) + "/" + m.name)) return false;
    return true;
  };

  // Cache of 16 kHz references for metrics that score at 16 kHz.
  std::vector<AudioBuffer> references_16k(references.size());
  const bool need_16k = std::any_of(metrics.begin(), metrics.end(),
                                    [](const Metric& m) { return m.required_rate == 16000; });
  if (need_16k)
    for (std::size_t i = 0; i < references.size(); ++i)
      references_16k[i] = resample(references[i], 16000);

  struct JobResult {
    std::vector<ScoreRecord> records;
    std::string error;
    bool ready = false;
  };
  std::vector<JobResult> results(jobs.size());
  std::mutex mutex;
  std::condition_variable cv;
  std::atomic<std::size_t> next_job{0};

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next_job.fetch_add(1);
      if (i >= jobs.size()) return;
      const Job& job = jobs[i];
      JobResult result;
      if (!job_done(job)) {
        try {
          const std::size_t sample_index =
              i / (config.noises.size() * config.snr_levels.size());
          const AudioBuffer& ref = references[sample_index];
          const std::uint64_t seed =
              derive_seed(config.master_seed, job_key(job));
          const AudioBuffer noise =
              make_noise(job.spec.noise, ref.samples.size(), babble_pool,
                         config.babble_talkers, seed);
          const AudioBuffer deg = degrade(ref, job.spec, noise);
          AudioBuffer deg_16k;
          if (need_16k) deg_16k = resample(deg, 16000);
          for (const auto& metric : metrics) {
            const MosScore mos =
                metric.required_rate == 16000
                    ? metric.score(references_16k[sample_index], deg_16k)
                    : metric.score(ref, deg);
            ScoreRecord r;
            r.sample_id = job.sample.sample_id;
            r.language = job.sample.language;
            r.gender = job.sample.gender;
            r.noise = to_string(job.spec.noise);
            r.snr_db = job.spec.snr_db;
            r.metric = metric.name;
            r.mos = mos.value;
            r.seed = seed;
            r.version = kToolkitVersion;
            result.records.push_back(std::move(r));
          }
        } catch (const std::exception& e) {
          result.error = e.what();
        }
      }
      {
        std::lock_guard<std::mutex> lock(mutex);
        results[i] = std::move(result);
        results[i].ready = true;
      }
      cv.notify_all();
    }
  };

  std::vector<std::thread> threads;
  const int n_threads = std::max(1, config.parallelism);
  for (int t = 0; t < n_threads; ++t) threads.emplace_back(worker);

  // Single writer appends in canonical job order so the store bytes never
  // depend on scheduling.
  std::ofstream store(store_path, std::ios::app);
  if (!store) {
    for (auto& t : threads) t.join();
    throw Error("run_experiment: cannot open store " + store_path);
  }
  std::vector<ScoreRecord> all_records = done_records;
  std::size_t failures = 0;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    {
      std::unique_lock<std::mutex> lock(mutex);
      cv.wait(lock, [&] { return results[i].ready; });
    }
    if (!results[i].error.empty()) {
      ++failures;
      std::cerr << "job failed (" << job_key(jobs[i])
                << "): " << results[i].error << "\n";
    } else {
      for (auto& r : results[i].records) {
        append_record(store, r);
        all_records.push_back(std::move(r));
      }
      store.flush();
    }
    results[i].records.clear();
    if ((i + 1) % 100 == 0 || i + 1 == jobs.size())
      std::cerr << "progress: " << (i + 1) << "/" << jobs.size() << " jobs\n";
  }
  for (auto& t : threads) t.join();

  if (static_cast<double>(failures) > 0.01 * static_cast<double>(jobs.size()))
    throw Error("run_experiment: " + std::to_string(failures) + " of " +
                std::to_string(jobs.size()) + " jobs failed (> 1%)");
  return all_records;
}

}  // namespace sqbench
