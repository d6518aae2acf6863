#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "sqbench/channel.hpp"
#include "sqbench/experiment.hpp"
#include "sqbench/stats.hpp"

namespace {

using namespace sqbench;

std::uint64_t default_master_seed() {
  if (const char* env = std::getenv("SQBENCH_SEED"))
    return std::strtoull(env, nullptr, 10);
  return 0;
}

int cmd_degrade(const std::string& ref_path, const std::string& noise_name,
                double snr, std::uint64_t seed, const std::string& out_path,
                bool no_codec, int talkers, const std::string& babble_manifest) {
  const NoiseKind kind = noise_kind_from_string(noise_name);
  SampleMeta meta;
  meta.sample_id = "cli";
  meta.path = ref_path;
  const AudioBuffer reference = prepare_reference(meta);

  std::vector<AudioBuffer> pool;
  if (kind == NoiseKind::Babble) {
    if (babble_manifest.empty())
      throw Error("babble noise needs --babble-manifest");
    const CorpusManifest manifest = load_manifest(babble_manifest);
    if (manifest.babble_pool.empty())
      throw Error("manifest has no babble_pool samples");
    for (const auto& sample : manifest.babble_pool)
      pool.push_back(prepare_reference(sample));
  }

  const AudioBuffer noise =
      make_noise(kind, reference.samples.size(), pool, talkers, seed);
  const AudioBuffer mixed = mix_at_snr(reference, noise, snr);
  // Measured SNR straight from the mixed signal before re-normalization.
  AudioBuffer residual = mixed;
  for (std::size_t i = 0; i < residual.samples.size(); ++i)
    residual.samples[i] -= reference.samples[i];
  const double measured =
      20.0 * std::log10(rms(reference) / rms(residual));

  DegradationSpec spec{kind, snr, !no_codec};
  const AudioBuffer degraded = degrade(reference, spec, noise);

  const std::filesystem::path out(out_path);
  const std::filesystem::path ref_out =
      out.parent_path() / (out.stem().string() + "_ref" + out.extension().string());
  write_wav(degraded, out.string());
  write_wav(reference, ref_out.string());
  std::cout << "measured SNR: " << measured << " dB\n";
  std::cout << "degraded: " << out.string() << "\nreference: " << ref_out.string()
            << "\n";
  return 0;
}

int cmd_score(const std::string& ref_path, const std::string& deg_path,
              const std::string& metric_name) {
  const Metric metric = make_metric(metric_name);
  AudioBuffer ref = read_wav(ref_path);
  AudioBuffer deg = read_wav(deg_path);
  ref = resample(ref, metric.required_rate);
  deg = resample(deg, metric.required_rate);
  std::cout << metric.score(ref, deg).value << "\n";
  return 0;
}

int cmd_gen_noise(const std::string& noise_name, double seconds, int rate,
                  std::uint64_t seed, const std::string& out_path, int talkers,
                  const std::string& babble_manifest) {
  const NoiseKind kind = noise_kind_from_string(noise_name);
  const auto length = static_cast<std::size_t>(seconds * rate + 0.5);
  AudioBuffer noise;
  if (kind == NoiseKind::Babble) {
    if (babble_manifest.empty())
      throw Error("babble noise needs --babble-manifest");
    const CorpusManifest manifest = load_manifest(babble_manifest);
    if (manifest.babble_pool.empty())
      throw Error("manifest has no babble_pool samples");
    std::vector<AudioBuffer> pool;
    for (const auto& sample : manifest.babble_pool)
      pool.push_back(prepare_reference(sample));
    noise = gen_babble(pool, talkers, length, rate, seed);
  } else {
    noise = gen_colored(kind, length, rate, seed);
  }
  write_wav(noise, out_path);
  std::cout << out_path << "\n";
  return 0;
}

int cmd_run(const std::string& config_path, bool resume, int parallelism_override,
            std::uint64_t seed_override, bool have_seed_override) {
  RunConfig config = load_run_config(config_path);
  config.resume = resume;
  config.master_seed = have_seed_override ? seed_override : default_master_seed();
  if (parallelism_override > 0) config.parallelism = parallelism_override;

  // Manifest paths resolve relative to the config file.
  std::filesystem::path manifest(config.manifest_path);
  if (manifest.is_relative())
    manifest = std::filesystem::path(config_path).parent_path() / manifest;
  const CorpusManifest corpus = load_manifest(manifest.string());

  std::filesystem::create_directories(config.out_dir);
  const std::string store_path =
      (std::filesystem::path(config.out_dir) / "scores.jsonl").string();
  if (!resume && std::filesystem::exists(store_path))
    std::filesystem::remove(store_path);
  const auto records = run_experiment(corpus, config, store_path);
  const std::string first = config.metrics.size() > 0 ? config.metrics[0] : "";
  const std::string second = config.metrics.size() > 1 ? config.metrics[1] : "";
  emit_report(records, config.out_dir, config.ks_granularity,
              make_metric(first).name, make_metric(second).name);
  std::cout << "records: " << records.size() << "\nreports: " << config.out_dir
            << "\n";
  return 0;
}

int cmd_analyze(const std::string& store_path, const std::string& out_dir,
                const std::string& granularity, const std::string& first,
                const std::string& second) {
  const auto records = load_store(store_path);
  if (records.empty()) throw Error("empty store: " + store_path);
  emit_report(records, out_dir, granularity, first, second);
  std::cout << "reports: " << out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Narrowband speech degradation and objective quality toolkit"};
  app.require_subcommand(1);

  // degrade
  auto* degrade_cmd =
      app.add_subcommand("degrade", "Degrade one WAV through the channel");
  std::string deg_ref, deg_noise = "pink", deg_out = "degraded.wav";
  std::string deg_babble_manifest;
  double deg_snr = 0.0;
  std::uint64_t deg_seed = default_master_seed();
  bool deg_no_codec = false;
  int deg_talkers = 6;
  degrade_cmd->add_option("ref", deg_ref, "Reference WAV")->required();
  degrade_cmd->add_option("--noise", deg_noise, "pink | blue | babble");
  degrade_cmd->add_option("--snr", deg_snr, "Target SNR in dB")->required();
  degrade_cmd->add_option("--seed", deg_seed, "Noise seed");
  degrade_cmd->add_option("--out", deg_out, "Output WAV path");
  degrade_cmd->add_flag("--no-codec", deg_no_codec, "Skip the A-law codec");
  degrade_cmd->add_option("--talkers", deg_talkers, "Babble talker count");
  degrade_cmd->add_option("--babble-manifest", deg_babble_manifest,
                          "Manifest providing babble_pool samples");

  // score
  auto* score_cmd = app.add_subcommand("score", "Score a reference/degraded pair");
  std::string score_ref, score_deg, score_metric = "nsim";
  score_cmd->add_option("ref", score_ref, "Reference WAV")->required();
  score_cmd->add_option("deg", score_deg, "Degraded WAV")->required();
  score_cmd->add_option("--metric", score_metric,
                        "nsim | disturbance | external command template");

  // gen-noise
  auto* gen_cmd = app.add_subcommand("gen-noise", "Synthesize a noise WAV");
  std::string gen_kind = "pink", gen_out = "noise.wav", gen_babble_manifest;
  double gen_seconds = 5.0;
  int gen_rate = 8000, gen_talkers = 6;
  std::uint64_t gen_seed = default_master_seed();
  gen_cmd->add_option("--kind", gen_kind, "pink | blue | babble");
  gen_cmd->add_option("--seconds", gen_seconds, "Duration");
  gen_cmd->add_option("--rate", gen_rate, "Sample rate");
  gen_cmd->add_option("--seed", gen_seed, "Seed");
  gen_cmd->add_option("--out", gen_out, "Output WAV path");
  gen_cmd->add_option("--talkers", gen_talkers, "Babble talker count");
  gen_cmd->add_option("--babble-manifest", gen_babble_manifest,
                      "Manifest providing babble_pool samples");

  // run
  auto* run_cmd = app.add_subcommand("run", "Run the full degradation grid");
  std::string run_config;
  bool run_resume = false;
  int run_parallelism = 0;
  std::uint64_t run_seed = 0;
  run_cmd->add_option("config", run_config, "Run config (JSON)")->required();
  run_cmd->add_flag("--resume", run_resume, "Resume an interrupted run");
  run_cmd->add_option("--parallelism", run_parallelism, "Worker count override");
  auto* seed_opt = run_cmd->add_option("--seed", run_seed, "Master seed override");

  // analyze
  auto* analyze_cmd =
      app.add_subcommand("analyze", "Re-run statistics over a score store");
  std::string an_store, an_out = "out", an_granularity = "per-signal";
  std::string an_first = "disturbance", an_second = "nsim";
  analyze_cmd->add_option("store", an_store, "Score store (JSONL)")->required();
  analyze_cmd->add_option("--out", an_out, "Report directory");
  analyze_cmd
      ->add_option("--ks-granularity", an_granularity,
                   "per-signal | per-snr-mean")
      ->check(CLI::IsMember({"per-signal", "per-snr-mean"}));
  analyze_cmd->add_option("--first-metric", an_first, "PESQ-role metric name");
  analyze_cmd->add_option("--second-metric", an_second, "ViSQOL-role metric name");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (degrade_cmd->parsed())
      return cmd_degrade(deg_ref, deg_noise, deg_snr, deg_seed, deg_out,
                         deg_no_codec, deg_talkers, deg_babble_manifest);
    if (score_cmd->parsed()) {
      if (score_metric != "nsim" && score_metric != "disturbance" &&
          score_metric.find("{ref}") == std::string::npos) {
        std::cerr << "unknown metric: " << score_metric
                  << " (available: nsim, disturbance, or a command template "
                     "containing {ref} and {deg})\n";
        return 2;
      }
      return cmd_score(score_ref, score_deg, score_metric);
    }
    if (gen_cmd->parsed())
      return cmd_gen_noise(gen_kind, gen_seconds, gen_rate, gen_seed, gen_out,
                           gen_talkers, gen_babble_manifest);
    if (run_cmd->parsed())
      return cmd_run(run_config, run_resume, run_parallelism, run_seed,
                     seed_opt->count() > 0);
    if (analyze_cmd->parsed())
      return cmd_analyze(an_store, an_out, an_granularity, an_first, an_second);
  } catch (const sqbench::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    // Missing files and invalid configuration are usage errors.
    const std::string what = e.what();
    const bool usage = what.find("cannot open") != std::string::npos ||
                       what.find("missing") != std::string::npos ||
                       what.find("unknown") != std::string::npos ||
                       what.find("load_manifest") != std::string::npos ||
                       what.find("load_run_config") != std::string::npos ||
                       what.find("empty store") != std::string::npos;
    return usage ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
