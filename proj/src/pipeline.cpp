#include <cmath>

#include "sqbench/channel.hpp"
#include "sqbench/experiment.hpp"

namespace sqbench {

namespace {
constexpr double kReferenceLevelDbfs = -26.0;
constexpr int kChannelRate = 8000;
}  // namespace

AudioBuffer prepare_reference(const SampleMeta& sample,
                              double trim_threshold_db) {
  AudioBuffer buf = read_wav(sample.path);
  if (sample.end_s > sample.start_s || sample.start_s > 0.0) {
    const auto begin = static_cast<std::size_t>(
        std::min<double>(sample.start_s * buf.sample_rate,
                         static_cast<double>(buf.samples.size())));
    const auto end = sample.end_s > sample.start_s
                         ? static_cast<std::size_t>(std::min<double>(
                               sample.end_s * buf.sample_rate,
                               static_cast<double>(buf.samples.size())))
                         : buf.samples.size();
    if (begin >= end)
      throw Error("prepare_reference: empty excerpt for " + sample.sample_id);
    buf.samples.assign(buf.samples.begin() + static_cast<long>(begin),
                       buf.samples.begin() + static_cast<long>(end));
  }
  buf = trim_silence(buf, trim_threshold_db);
  buf = resample(buf, kChannelRate);
  buf = irs_filter(buf);
  return normalize_to_dbfs(buf, kReferenceLevelDbfs);
}

AudioBuffer make_noise(NoiseKind kind, std::size_t length,
                       const std::vector<AudioBuffer>& babble_pool, int talkers,
                       std::uint64_t seed) {
  AudioBuffer noise =
      kind == NoiseKind::Babble
          ? gen_babble(babble_pool, talkers, length, kChannelRate, seed)
          : gen_colored(kind, length, kChannelRate, seed);
  noise = irs_filter(noise);
  return normalize_to_dbfs(noise, kReferenceLevelDbfs);
}

AudioBuffer degrade(const AudioBuffer& reference, const DegradationSpec& spec,
                    const AudioBuffer& noise) {
  AudioBuffer mixed = mix_at_snr(reference, noise, spec.snr_db);
  mixed = normalize_to_dbfs(mixed, kReferenceLevelDbfs);
  if (spec.codec) mixed = codec_pass(mixed);
  return mixed;
}

std::vector<double> default_snr_grid() {
  std::vector<double> grid;
  for (double snr = -25.0; snr <= 40.0 + 1e-9; snr += 5.0) grid.push_back(snr);
  return grid;
}

std::vector<Job> build_grid(const CorpusManifest& manifest,
                            const std::vector<double>& snr_levels,
                            const std::vector<NoiseKind>& noises) {
  if (manifest.test_samples.empty()) throw Error("build_grid: no samples");
  if (snr_levels.empty()) throw Error("build_grid: no SNR levels");
  if (noises.empty()) throw Error("build_grid: no noise kinds");
  std::vector<Job> jobs;
  jobs.reserve(manifest.test_samples.size() * noises.size() * snr_levels.size());
  for (const auto& sample : manifest.test_samples)
    for (const auto& noise : noises)
      for (double snr : snr_levels)
        jobs.push_back({sample, DegradationSpec{noise, snr, true}});
  return jobs;
}

}  // namespace sqbench
