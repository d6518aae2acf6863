#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "sqbench/experiment.hpp"
#include "sqbench/stats.hpp"

namespace sqbench {

namespace {

std::string num(double v) {
  std::ostringstream out;
  out.precision(10);
  out << v;
  return out.str();
}

std::ofstream open_csv(const std::filesystem::path& dir, const std::string& name,
                       const std::string& header) {
  std::ofstream out(dir / name);
  if (!out) throw Error("emit_report: cannot write " + (dir / name).string());
  out << header << "\n";
  return out;
}

using Records = std::vector<ScoreRecord>;

std::vector<std::string> sorted_unique(const Records& records,
                                       std::string ScoreRecord::* field) {
  std::set<std::string> values;
  for (const auto& r : records) values.insert(r.*field);
  return {values.begin(), values.end()};
}

// Score lists per KS group, at the configured granularity. Per-signal uses
// raw record scores; per-snr-mean collapses each (noise, snr) cell to its
// mean over samples first (~42 observations per group on the default grid).
std::vector<double> ks_observations(const Records& records,
                                    const std::string& granularity) {
  if (granularity == "per-signal") {
    std::vector<double> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(r.mos);
    return out;
  }
  std::map<std::pair<std::string, double>, std::vector<double>> cells;
  for (const auto& r : records) cells[{r.noise, r.snr_db}].push_back(r.mos);
  std::vector<double> out;
  for (const auto& [key, values] : cells) out.push_back(mean(values));
  return out;
}

Records filter(const Records& records, auto&& pred) {
  Records out;
  std::copy_if(records.begin(), records.end(), std::back_inserter(out), pred);
  return out;
}

// Paired (first_metric, second_metric) scores keyed by (sample, noise, snr).
std::vector<std::pair<double, double>> metric_pairs(
    const Records& records, const std::string& first_metric,
    const std::string& second_metric) {
  std::map<std::string, std::pair<double, double>> by_key;
  std::map<std::string, int> seen;
  for (const auto& r : records) {
    if (r.metric != first_metric && r.metric != second_metric) continue;
    std::ostringstream key;
    key << r.sample_id << "/" << r.noise << "/" << r.snr_db;
    auto& entry = by_key[key.str()];
    if (r.metric == first_metric) {
      entry.first = r.mos;
      seen[key.str()] |= 1;
    } else {
      entry.second = r.mos;
      seen[key.str()] |= 2;
    }
  }
  std::vector<std::pair<double, double>> pairs;
  for (const auto& [key, flags] : seen)
    if (flags == 3) pairs.push_back(by_key[key]);
  if (pairs.empty())
    throw Error("emit_report: no (" + first_metric + ", " + second_metric +
                ") metric pairs for paired statistics");
  return pairs;
}

}  // namespace

void emit_report(const Records& records, const std::string& out_dir,
                 const std::string& ks_granularity,
                 const std::string& first_metric,
                 const std::string& second_metric) {
  if (records.empty()) throw Error("emit_report: no records");
  const std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);

  const auto metrics = sorted_unique(records, &ScoreRecord::metric);
  const auto languages = sorted_unique(records, &ScoreRecord::language);
  const auto noises = sorted_unique(records, &ScoreRecord::noise);
  std::set<double> snr_set;
  for (const auto& r : records) snr_set.insert(r.snr_db);

  // fig1: mean score per (metric, language, snr).
  {
    auto out = open_csv(dir, "fig1_language_snr.csv",
                        "metric,language,snr_db,mean_mos,count");
    for (const auto& m : metrics)
      for (const auto& lang : languages)
        for (double snr : snr_set) {
          std::vector<double> scores;
          for (const auto& r : records)
            if (r.metric == m && r.language == lang && r.snr_db == snr)
              scores.push_back(r.mos);
          if (scores.empty()) continue;
          out << m << "," << lang << "," << num(snr) << ","
              << num(mean(scores)) << "," << scores.size() << "\n";
        }
  }

  // fig2: distribution summary per (metric, language).
  {
    auto out = open_csv(dir, "fig2_boxstats.csv",
                        "metric,language,min,q1,median,q3,max,mean,count");
    for (const auto& m : metrics)
      for (const auto& lang : languages) {
        std::vector<double> scores;
        for (const auto& r : records)
          if (r.metric == m && r.language == lang) scores.push_back(r.mos);
        if (scores.empty()) continue;
        out << m << "," << lang << "," << num(quantile(scores, 0.0)) << ","
            << num(quantile(scores, 0.25)) << "," << num(median(scores)) << ","
            << num(quantile(scores, 0.75)) << "," << num(quantile(scores, 1.0))
            << "," << num(mean(scores)) << "," << scores.size() << "\n";
      }
  }

  // fig4: score evolution per (metric, noise, snr).
  {
    auto out = open_csv(dir, "fig4_noise_snr.csv",
                        "metric,noise,snr_db,mean_mos,count");
    for (const auto& m : metrics)
      for (const auto& noise : noises)
        for (double snr : snr_set) {
          std::vector<double> scores;
          for (const auto& r : records)
            if (r.metric == m && r.noise == noise && r.snr_db == snr)
              scores.push_back(r.mos);
          if (scores.empty()) continue;
          out << m << "," << noise << "," << num(snr) << ","
              << num(mean(scores)) << "," << scores.size() << "\n";
        }
  }

  // fig5: cubic fit of second-metric score against first-metric score,
  // per gender and per (language, gender).
  {
    auto out = open_csv(dir, "fig5_gender_fit.csv",
                        "group,c0,c1,c2,c3,residual_rms,count");
    auto emit_fit = [&](const std::string& group, const Records& subset) {
      if (subset.empty()) return;
      const auto pairs = metric_pairs(subset, first_metric, second_metric);
      std::vector<double> x, y;
      for (const auto& [a, b] : pairs) {
        x.push_back(a);
        y.push_back(b);
      }
      if (x.size() < 4) return;
      try {
        const CubicFit fit = polyfit_cubic(x, y);
        out << group << "," << num(fit.coeffs[0]) << "," << num(fit.coeffs[1])
            << "," << num(fit.coeffs[2]) << "," << num(fit.coeffs[3]) << ","
            << num(fit.residual_rms) << "," << x.size() << "\n";
      } catch (const Error&) {
        // < 4 distinct x values in this group: no fit row.
      }
    };
    for (const std::string gender : {"female", "male"})
      emit_fit(gender, filter(records, [&](const ScoreRecord& r) {
                 return r.gender == gender;
               }));
    for (const auto& lang : languages)
      for (const std::string gender : {"female", "male"})
        emit_fit(lang + "_" + gender, filter(records, [&](const ScoreRecord& r) {
                   return r.language == lang && r.gender == gender;
                 }));
  }

  // table1: pairwise KS by language, per metric.
  {
    auto out = open_csv(dir, "table1_ks_language.csv",
                        "metric,group_a,group_b,ks_statistic,p_value,n_a,n_b,"
                        "granularity");
    for (const auto& m : metrics)
      for (std::size_t i = 0; i < languages.size(); ++i)
        for (std::size_t j = i + 1; j < languages.size(); ++j) {
          const auto a = ks_observations(
              filter(records,
                     [&](const ScoreRecord& r) {
                       return r.metric == m && r.language == languages[i];
                     }),
              ks_granularity);
          const auto b = ks_observations(
              filter(records,
                     [&](const ScoreRecord& r) {
                       return r.metric == m && r.language == languages[j];
                     }),
              ks_granularity);
          if (a.size() < 2 || b.size() < 2) continue;
          const KsResult ks = ks_two_sample(a, b);
          out << m << "," << languages[i] << "," << languages[j] << ","
              << num(ks.statistic) << "," << num(ks.p_value) << "," << ks.n1
              << "," << ks.n2 << "," << ks_granularity << "\n";
        }
  }

  // table2: pairwise KS by noise kind, per metric. The per-snr-mean
  // granularity collapses over (language, snr) cells here.
  {
    auto out = open_csv(dir, "table2_ks_noise.csv",
                        "metric,group_a,group_b,ks_statistic,p_value,n_a,n_b,"
                        "granularity");
    auto noise_observations = [&](const Records& subset) {
      if (ks_granularity == "per-signal") {
        std::vector<double> out_scores;
        for (const auto& r : subset) out_scores.push_back(r.mos);
        return out_scores;
      }
      std::map<std::pair<std::string, double>, std::vector<double>> cells;
      for (const auto& r : subset) cells[{r.language, r.snr_db}].push_back(r.mos);
      std::vector<double> out_scores;
      for (const auto& [key, values] : cells) out_scores.push_back(mean(values));
      return out_scores;
    };
    for (const auto& m : metrics)
      for (std::size_t i = 0; i < noises.size(); ++i)
        for (std::size_t j = i + 1; j < noises.size(); ++j) {
          const auto a = noise_observations(filter(records, [&](const ScoreRecord& r) {
            return r.metric == m && r.noise == noises[i];
          }));
          const auto b = noise_observations(filter(records, [&](const ScoreRecord& r) {
            return r.metric == m && r.noise == noises[j];
          }));
          if (a.size() < 2 || b.size() < 2) continue;
          const KsResult ks = ks_two_sample(a, b);
          out << m << "," << noises[i] << "," << noises[j] << ","
              << num(ks.statistic) << "," << num(ks.p_value) << "," << ks.n1
              << "," << ks.n2 << "," << ks_granularity << "\n";
        }
  }

  // table3: deviation statistics for Overall / Non-TM / TM, with the Diff
  // column (TM minus Non-TM). TM = Turkish male, per the study's grouping.
  {
    auto out = open_csv(dir, "table3_deviation.csv",
                        "stat,overall,non_tm,tm,diff");
    auto is_tm = [](const ScoreRecord& r) {
      return r.language == "Turkish" && r.gender == "male";
    };
    const Records tm = filter(records, is_tm);
    const Records non_tm =
        filter(records, [&](const ScoreRecord& r) { return !is_tm(r); });
    const DeviationStats overall =
        deviation_stats(metric_pairs(records, first_metric, second_metric));
    const bool have_tm = !tm.empty() && !non_tm.empty();
    DeviationStats tm_stats, non_tm_stats;
    if (have_tm) {
      tm_stats = deviation_stats(metric_pairs(tm, first_metric, second_metric));
      non_tm_stats =
          deviation_stats(metric_pairs(non_tm, first_metric, second_metric));
    }
    auto row = [&](const std::string& name, double o, double n, double t) {
      out << name << "," << num(o);
      if (have_tm)
        out << "," << num(n) << "," << num(t) << "," << num(t - n);
      else
        out << ",,,";
      out << "\n";
    };
    row("mad", overall.mad, non_tm_stats.mad, tm_stats.mad);
    row("rmsd", overall.rmsd, non_tm_stats.rmsd, tm_stats.rmsd);
    row("mean_diff", overall.mean_diff, non_tm_stats.mean_diff,
        tm_stats.mean_diff);
  }
}

}  // namespace sqbench
