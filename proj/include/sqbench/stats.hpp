#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "sqbench/audio.hpp"

namespace sqbench {

/// Two-sample Kolmogorov-Smirnov result.
struct KsResult {
  double statistic = 0.0;  // sup |F1 - F2|
  double p_value = 1.0;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
};

/// Exact D over the merged empirical CDFs. The p-value is the exact
/// conditional (permutation) tail probability for n1 + n2 <= 1000, computed
/// by lattice-path counting; larger samples fall back to the asymptotic
/// Kolmogorov series with the small-sample lambda correction.
KsResult ks_two_sample(const std::vector<double>& a,
                       const std::vector<double>& b);

/// Paired deviation statistics over (a, b) pairs; mean_diff is mean(a - b).
struct DeviationStats {
  double mad = 0.0;        // mean |a - b|
  double rmsd = 0.0;       // sqrt(mean (a - b)^2)
  double mean_diff = 0.0;  // mean (a - b)
};

DeviationStats deviation_stats(
    const std::vector<std::pair<double, double>>& pairs);

/// Least-squares cubic fit y ~ c0 + c1 x + c2 x^2 + c3 x^3.
struct CubicFit {
  std::array<double, 4> coeffs{};
  double residual_rms = 0.0;
};

CubicFit polyfit_cubic(const std::vector<double>& x,
                       const std::vector<double>& y);

/// Per-group aggregate of a grouped score set.
struct GroupAggregate {
  std::size_t count = 0;
  double mean = 0.0;
  double median = 0.0;
};

/// Groups values by pre-computed string keys (the experiment layer builds
/// keys from record fields). Every value lands in exactly one group.
std::map<std::string, GroupAggregate> group_aggregate(
    const std::vector<std::pair<std::string, double>>& keyed_values);

double mean(const std::vector<double>& v);
double median(std::vector<double> v);  // by value: sorts its copy
double quantile(std::vector<double> v, double q);

}  // namespace sqbench
