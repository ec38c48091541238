#include "calfront/stats.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace calfront::stats {
namespace {

void require_finite(std::span<const double> v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) throw std::invalid_argument(std::string(what) + ": non-finite value");
  }
}

double clamp01(double p) { return std::clamp(p, 0.0, 1.0); }

// Sum of t^3 - t over tie groups of the sorted data.
double tie_term(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double term = 0.0;
  for (std::size_t i = 0; i < values.size();) {
    std::size_t j = i;
    while (j < values.size() && values[j] == values[i]) ++j;
    const double t = static_cast<double>(j - i);
    term += t * t * t - t;
    i = j;
  }
  return term;
}

double mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

std::string_view to_string(Method m) {
  switch (m) {
    case Method::Exact: return "exact";
    case Method::NormalApprox: return "normal";
    case Method::ChiSquareApprox: return "chi-square";
  }
  return "?";
}

std::string_view to_string(Alternative a) {
  switch (a) {
    case Alternative::Less: return "less";
    case Alternative::Greater: return "greater";
    case Alternative::TwoSided: return "two-sided";
  }
  return "?";
}

Alternative parse_alternative(std::string_view token) {
  if (token == "less") return Alternative::Less;
  if (token == "greater") return Alternative::Greater;
  if (token == "two-sided") return Alternative::TwoSided;
  throw std::invalid_argument("unknown alternative '" + std::string(token) + "'");
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double chi_square_sf(double statistic, int df) {
  if (df < 1) throw std::invalid_argument("chi-square needs df >= 1");
  if (statistic <= 0.0) return 1.0;
  return boost::math::gamma_q(0.5 * df, 0.5 * statistic);
}

std::vector<double> midranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + 1 + j);  // mean of ranks i+1 .. j
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
    i = j;
  }
  return ranks;
}

StatResult kruskal_wallis(const std::vector<Sample>& groups) {
  if (groups.size() < 2) throw std::invalid_argument("Kruskal-Wallis needs at least 2 groups");
  std::vector<double> pooled;
  for (const auto& g : groups) {
    if (g.empty()) throw std::invalid_argument("Kruskal-Wallis group is empty");
    require_finite(g, "Kruskal-Wallis");
    pooled.insert(pooled.end(), g.begin(), g.end());
  }
  const auto n = static_cast<double>(pooled.size());
  const std::vector<double> ranks = midranks(pooled);

  double between = 0.0;
  std::size_t offset = 0;
  for (const auto& g : groups) {
    double sum = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) sum += ranks[offset + i];
    between += sum * sum / static_cast<double>(g.size());
    offset += g.size();
  }
  const int df = static_cast<int>(groups.size()) - 1;
  const double correction = 1.0 - tie_term(pooled) / (n * n * n - n);
  if (correction <= 0.0) return {0.0, df, 1.0, Method::ChiSquareApprox};
  const double h = std::max(0.0, (12.0 / (n * (n + 1.0)) * between - 3.0 * (n + 1.0)) / correction);
  return {h, df, clamp01(chi_square_sf(h, df)), Method::ChiSquareApprox};
}

std::vector<double> mann_whitney_null_pmf(int m, int n) {
  if (m < 0 || n < 0) throw std::invalid_argument("sample sizes must be >= 0");
  // counts[j] holds arrangement counts for (i, j) while sweeping i; the
  // recursion is c(i, j, u) = c(i - 1, j, u - j) + c(i, j - 1, u).
  std::vector<std::vector<double>> counts(static_cast<std::size_t>(n) + 1);
  for (int j = 0; j <= n; ++j) counts[static_cast<std::size_t>(j)] = {1.0};
  for (int i = 1; i <= m; ++i) {
    std::vector<std::vector<double>> next(static_cast<std::size_t>(n) + 1);
    next[0] = {1.0};
    for (int j = 1; j <= n; ++j) {
      std::vector<double> c(static_cast<std::size_t>(i * j) + 1, 0.0);
      const auto& up = counts[static_cast<std::size_t>(j)];
      for (std::size_t u = 0; u < up.size(); ++u) c[u + static_cast<std::size_t>(j)] += up[u];
      const auto& left = next[static_cast<std::size_t>(j) - 1];
      for (std::size_t u = 0; u < left.size(); ++u) c[u] += left[u];
      next[static_cast<std::size_t>(j)] = std::move(c);
    }
    counts = std::move(next);
  }
  std::vector<double> pmf = counts[static_cast<std::size_t>(n)];
  const double total = std::accumulate(pmf.begin(), pmf.end(), 0.0);
  for (double& p : pmf) p /= total;
  return pmf;
}

StatResult mann_whitney_u(std::span<const double> x, std::span<const double> y,
                          Alternative alternative) {
  if (x.empty() || y.empty()) throw std::invalid_argument("Mann-Whitney U needs non-empty samples");
  require_finite(x, "Mann-Whitney U");
  require_finite(y, "Mann-Whitney U");

  std::vector<double> pooled(x.begin(), x.end());
  pooled.insert(pooled.end(), y.begin(), y.end());
  const std::vector<double> ranks = midranks(pooled);
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  const double rank_sum_x = std::accumulate(ranks.begin(), ranks.begin() + static_cast<std::ptrdiff_t>(x.size()), 0.0);
  const double u = rank_sum_x - nx * (nx + 1.0) / 2.0;

  const double ties = tie_term(pooled);
  const bool exact = ties == 0.0 && static_cast<long>(x.size()) * static_cast<long>(y.size()) <= kExactCellLimit;

  if (exact) {
    const auto pmf = mann_whitney_null_pmf(static_cast<int>(x.size()), static_cast<int>(y.size()));
    const auto uo = static_cast<std::size_t>(std::llround(u));
    double p_less = 0.0, p_greater = 0.0;
    for (std::size_t k = 0; k < pmf.size(); ++k) {
      if (k <= uo) p_less += pmf[k];
      if (k >= uo) p_greater += pmf[k];
    }
    double p = alternative == Alternative::Less      ? p_less
               : alternative == Alternative::Greater ? p_greater
                                                     : 2.0 * std::min(p_less, p_greater);
    return {u, std::nullopt, clamp01(p), Method::Exact};
  }

  const double n = nx + ny;
  const double mu = nx * ny / 2.0;
  const double var = nx * ny / 12.0 * ((n + 1.0) - ties / (n * (n - 1.0)));
  if (!(var > 0.0)) return {u, std::nullopt, 1.0, Method::NormalApprox};
  const double sd = std::sqrt(var);
  double p = 1.0;
  switch (alternative) {
    case Alternative::Less: p = normal_cdf((u - mu + 0.5) / sd); break;
    case Alternative::Greater: p = 1.0 - normal_cdf((u - mu - 0.5) / sd); break;
    case Alternative::TwoSided: {
      const double z = std::max(0.0, std::abs(u - mu) - 0.5) / sd;
      p = 2.0 * normal_cdf(-z);
      break;
    }
  }
  return {u, std::nullopt, clamp01(p), Method::NormalApprox};
}

double bonferroni(double alpha, int m) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must be in (0, 1]");
  if (m < 1) throw std::invalid_argument("Bonferroni needs m >= 1");
  return alpha / m;
}

double adjust_p(double p, int m) {
  if (m < 1) throw std::invalid_argument("Bonferroni needs m >= 1");
  return std::min(1.0, p * m);
}

double cohens_d(std::span<const double> x, std::span<const double> y) {
  if (x.size() < 2 || y.size() < 2) throw std::invalid_argument("Cohen's d needs at least 2 values per sample");
  require_finite(x, "Cohen's d");
  require_finite(y, "Cohen's d");
  const double mx = mean(x), my = mean(y);
  double ss = 0.0;
  for (double v : x) ss += (v - mx) * (v - mx);
  for (double v : y) ss += (v - my) * (v - my);
  const double pooled_var = ss / static_cast<double>(x.size() + y.size() - 2);
  if (!(pooled_var > 0.0)) throw std::invalid_argument("Cohen's d undefined: zero pooled variance");
  return (mx - my) / std::sqrt(pooled_var);
}

namespace {

// Inversions (strict) in `v`, sorting it in the process.
long long count_inversions(std::vector<double>& v, std::vector<double>& buf, std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  long long inv = count_inversions(v, buf, lo, mid) + count_inversions(v, buf, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      inv += static_cast<long long>(mid - i);
      buf[k++] = v[j++];
    } else {
      buf[k++] = v[i++];
    }
  }
  while (i < mid) buf[k++] = v[i++];
  while (j < hi) buf[k++] = v[j++];
  std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo), buf.begin() + static_cast<std::ptrdiff_t>(hi),
            v.begin() + static_cast<std::ptrdiff_t>(lo));
  return inv;
}

struct TieSums {
  double pairs = 0.0;  // sum t(t-1)/2
  double v0 = 0.0;     // sum t(t-1)(t-2)
  double v1 = 0.0;     // sum t(t-1)(2t+5)
};

TieSums tie_sums(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  TieSums s;
  for (std::size_t i = 0; i < values.size();) {
    std::size_t j = i;
    while (j < values.size() && values[j] == values[i]) ++j;
    const double t = static_cast<double>(j - i);
    s.pairs += t * (t - 1.0) / 2.0;
    s.v0 += t * (t - 1.0) * (t - 2.0);
    s.v1 += t * (t - 1.0) * (2.0 * t + 5.0);
    i = j;
  }
  return s;
}

}  // namespace

StatResult kendall_tau(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("Kendall's tau needs equal-length samples");
  if (x.size() < 2) throw std::invalid_argument("Kendall's tau needs at least 2 pairs");
  require_finite(x, "Kendall's tau");
  require_finite(y, "Kendall's tau");
  const std::size_t n = x.size();

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return x[a] != x[b] ? x[a] < x[b] : y[a] < y[b];
  });

  // Pairs tied in both coordinates.
  double joint_ties = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && x[order[j]] == x[order[i]] && y[order[j]] == y[order[i]]) ++j;
    const double t = static_cast<double>(j - i);
    joint_ties += t * (t - 1.0) / 2.0;
    i = j;
  }

  std::vector<double> ys(n), buf(n);
  for (std::size_t i = 0; i < n; ++i) ys[i] = y[order[i]];
  const double discordant = static_cast<double>(count_inversions(ys, buf, 0, n));

  const TieSums tx = tie_sums(std::vector<double>(x.begin(), x.end()));
  const TieSums ty = tie_sums(std::vector<double>(y.begin(), y.end()));
  const double nn = static_cast<double>(n);
  const double total = nn * (nn - 1.0) / 2.0;
  const double con_minus_dis = total - tx.pairs - ty.pairs + joint_ties - 2.0 * discordant;
  const double denom = std::sqrt((total - tx.pairs) * (total - ty.pairs));
  if (!(denom > 0.0)) throw std::invalid_argument("Kendall's tau undefined for constant input");
  const double tau = con_minus_dis / denom;

  double var = (nn * (nn - 1.0) * (2.0 * nn + 5.0) - tx.v1 - ty.v1) / 18.0 +
               2.0 * tx.pairs * ty.pairs / (nn * (nn - 1.0));
  if (n > 2) var += tx.v0 * ty.v0 / (9.0 * nn * (nn - 1.0) * (nn - 2.0));
  const double p = var > 0.0 ? 2.0 * normal_cdf(-std::abs(con_minus_dis) / std::sqrt(var)) : 1.0;
  return {std::clamp(tau, -1.0, 1.0), std::nullopt, clamp01(p), Method::NormalApprox};
}

}  // namespace calfront::stats
