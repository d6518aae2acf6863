#include "sqbench/stats.hpp"

#include <algorithm>
#include <cmath>

namespace sqbench {

namespace {

// Integer-scaled D: max over the merged scan of |i*n2 - j*n1|, so the
// statistic is m / (n1*n2) with no floating-point comparisons involved.
// Ties advance both sides before the gap is measured, which keeps tied
// inputs deterministic.
long ks_statistic_scaled(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const long n1 = static_cast<long>(a.size());
  const long n2 = static_cast<long>(b.size());
  std::size_t i = 0, j = 0;
  long m = 0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= v) ++i;
    while (j < b.size() && b[j] <= v) ++j;
    m = std::max(m, std::labs(static_cast<long>(i) * n2 -
                              static_cast<long>(j) * n1));
  }
  return m;
}

// Exact conditional null: over all C(n1+n2, n1) orderings of distinct
// pooled values, the fraction whose scaled D reaches `m_obs`. Lattice-path
// count of the complement (paths staying strictly inside the band) via a
// rolling-row DP; path counts stay within double range for n1+n2 <= 1000.
double ks_exact_p(long n1, long n2, long m_obs) {
  if (m_obs <= 0) return 1.0;
  std::vector<double> row(static_cast<std::size_t>(n2) + 1, 0.0);
  row[0] = 1.0;
  for (long j = 1; j <= n2; ++j)
    row[static_cast<std::size_t>(j)] =
        (std::labs(j * n1) < m_obs) ? row[static_cast<std::size_t>(j - 1)] : 0.0;
  for (long i = 1; i <= n1; ++i) {
    row[0] = (std::labs(i * n2) < m_obs) ? row[0] : 0.0;
    for (long j = 1; j <= n2; ++j) {
      auto& cell = row[static_cast<std::size_t>(j)];
      if (std::labs(i * n2 - j * n1) < m_obs)
        cell += row[static_cast<std::size_t>(j - 1)];
      else
        cell = 0.0;
    }
  }
  // Divide the inside-band count by C(n1+n2, n1) incrementally.
  double inside = row[static_cast<std::size_t>(n2)];
  for (long k = 1; k <= n2; ++k)
    inside *= static_cast<double>(k) / static_cast<double>(n1 + k);
  return std::clamp(1.0 - inside, 0.0, 1.0);
}

}  // namespace

KsResult ks_two_sample(const std::vector<double>& a,
                       const std::vector<double>& b) {
  if (a.size() < 2 || b.size() < 2)
    throw Error("ks_two_sample: need at least 2 samples per side");
  for (double v : a)
    if (!std::isfinite(v)) throw Error("ks_two_sample: non-finite value");
  for (double v : b)
    if (!std::isfinite(v)) throw Error("ks_two_sample: non-finite value");

  KsResult result;
  result.n1 = a.size();
  result.n2 = b.size();
  const long n1 = static_cast<long>(a.size());
  const long n2 = static_cast<long>(b.size());
  const long m = ks_statistic_scaled(a, b);
  result.statistic = static_cast<double>(m) / static_cast<double>(n1 * n2);

  if (n1 + n2 <= 1000) {
    // Exact permutation distribution: at these sizes the asymptotic series
    // is off by up to ~0.05 against resampling (the statistic is lattice
    // valued), which matters at the 0.05 significance threshold.
    result.p_value = ks_exact_p(n1, n2, m);
    return result;
  }

  const double ne = static_cast<double>(n1) * static_cast<double>(n2) /
                    static_cast<double>(n1 + n2);
  const double lambda =
      (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * result.statistic;
  if (lambda < 0.3) {
    // The alternating series converges badly as lambda -> 0; the survival
    // function is 1 to well below any tolerance used here.
    result.p_value = 1.0;
    return result;
  }
  double p = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    p += sign * term;
    sign = -sign;
    if (term < 1e-12) break;
  }
  result.p_value = std::clamp(2.0 * p, 0.0, 1.0);
  return result;
}

DeviationStats deviation_stats(
    const std::vector<std::pair<double, double>>& pairs) {
  if (pairs.empty()) throw Error("deviation_stats: empty input");
  DeviationStats s;
  for (const auto& [a, b] : pairs) {
    const double d = a - b;
    s.mad += std::abs(d);
    s.rmsd += d * d;
    s.mean_diff += d;
  }
  const double n = static_cast<double>(pairs.size());
  s.mad /= n;
  s.rmsd = std::sqrt(s.rmsd / n);
  s.mean_diff /= n;
  return s;
}

CubicFit polyfit_cubic(const std::vector<double>& x,
                       const std::vector<double>& y) {
  if (x.size() != y.size()) throw Error("polyfit_cubic: size mismatch");
  {
    std::vector<double> distinct(x);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 4)
      throw Error("polyfit_cubic: need at least 4 distinct x values");
  }

  // QR via Gram-Schmidt on the shifted/scaled Vandermonde columns; the
  // centering keeps the normal system well conditioned for narrow x ranges.
  const std::size_t n = x.size();
  const double x_mean = mean(x);
  double x_scale = 0.0;
  for (double v : x) x_scale = std::max(x_scale, std::abs(v - x_mean));
  if (x_scale == 0.0) x_scale = 1.0;

  std::array<std::vector<double>, 4> cols;
  for (int p = 0; p < 4; ++p) {
    cols[static_cast<std::size_t>(p)].resize(n);
    for (std::size_t i = 0; i < n; ++i)
      cols[static_cast<std::size_t>(p)][i] = std::pow((x[i] - x_mean) / x_scale, p);
  }

  // Solve least squares by modified Gram-Schmidt QR.
  std::array<std::vector<double>, 4> q = cols;
  std::array<std::array<double, 4>, 4> r{};
  for (int k = 0; k < 4; ++k) {
    auto& qk = q[static_cast<std::size_t>(k)];
    for (int j = 0; j < k; ++j) {
      const auto& qj = q[static_cast<std::size_t>(j)];
      double dot = 0.0;
      for (std::size_t i = 0; i < n; ++i) dot += qj[i] * qk[i];
      r[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] = dot;
      for (std::size_t i = 0; i < n; ++i) qk[i] -= dot * qj[i];
    }
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) norm += qk[i] * qk[i];
    norm = std::sqrt(norm);
    if (norm < 1e-12) throw Error("polyfit_cubic: rank-deficient design matrix");
    r[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)] = norm;
    for (std::size_t i = 0; i < n; ++i) qk[i] /= norm;
  }

  std::array<double, 4> qty{};
  for (int k = 0; k < 4; ++k) {
    double dot = 0.0;
    for (std::size_t i = 0; i < n; ++i) dot += q[static_cast<std::size_t>(k)][i] * y[i];
    qty[static_cast<std::size_t>(k)] = dot;
  }
  std::array<double, 4> scaled{};  // coefficients in the scaled basis
  for (int k = 3; k >= 0; --k) {
    double v = qty[static_cast<std::size_t>(k)];
    for (int j = k + 1; j < 4; ++j)
      v -= r[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)] *
           scaled[static_cast<std::size_t>(j)];
    scaled[static_cast<std::size_t>(k)] =
        v / r[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)];
  }

  // Expand c0 + c1 u + c2 u^2 + c3 u^3 with u = (x - x_mean)/x_scale back
  // into plain powers of x.
  const double a = -x_mean / x_scale;
  const double s = 1.0 / x_scale;
  CubicFit fit;
  fit.coeffs[0] = scaled[0] + scaled[1] * a + scaled[2] * a * a +
                  scaled[3] * a * a * a;
  fit.coeffs[1] = s * (scaled[1] + 2.0 * scaled[2] * a + 3.0 * scaled[3] * a * a);
  fit.coeffs[2] = s * s * (scaled[2] + 3.0 * scaled[3] * a);
  fit.coeffs[3] = s * s * s * scaled[3];

  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = (x[i] - x_mean) / x_scale;
    const double fitted = scaled[0] + u * (scaled[1] + u * (scaled[2] + u * scaled[3]));
    ss += (y[i] - fitted) * (y[i] - fitted);
  }
  fit.residual_rms = std::sqrt(ss / static_cast<double>(n));
  return fit;
}

std::map<std::string, GroupAggregate> group_aggregate(
    const std::vector<std::pair<std::string, double>>& keyed_values) {
  if (keyed_values.empty()) throw Error("group_aggregate: empty input");
  std::map<std::string, std::vector<double>> groups;
  for (const auto& [key, value] : keyed_values) groups[key].push_back(value);
  std::map<std::string, GroupAggregate> out;
  for (auto& [key, values] : groups) {
    GroupAggregate agg;
    agg.count = values.size();
    agg.mean = mean(values);
    agg.median = median(values);
    out.emplace(key, agg);
  }
  return out;
}

double mean(const std::vector<double>& v) {
  if (v.empty()) throw Error("mean: empty input");
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc / static_cast<double>(v.size());
}

double median(std::vector<double> v) { return quantile(std::move(v), 0.5); }

double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw Error("quantile: empty input");
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] * (1.0 - frac) + v[hi] * frac;
}

}  // namespace sqbench
