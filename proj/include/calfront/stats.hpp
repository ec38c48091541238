#pragma once

// Rank-based tests and effect sizes used to compare evaluation runs:
// Kruskal-Wallis, one- or two-sided Mann-Whitney U, Bonferroni correction,
// Cohen's d and Kendall's tau-b.

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace calfront::stats {

using Sample = std::vector<double>;

enum class Method { Exact, NormalApprox, ChiSquareApprox };
enum class Alternative { Less, Greater, TwoSided };

std::string_view to_string(Method m);
std::string_view to_string(Alternative a);
Alternative parse_alternative(std::string_view token);

struct StatResult {
  double statistic = 0.0;
  std::optional<int> df;
  double p_value = 1.0;
  Method method = Method::Exact;
};

/// Midranks (1-based) of `values`; ties share the mean of their ranks.
std::vector<double> midranks(std::span<const double> values);

/// H with tie correction; p from the chi-square upper tail with k - 1 df.
StatResult kruskal_wallis(const std::vector<Sample>& groups);

/// U statistic of `x`. Exact null distribution when n_x * n_y <= 400 and the
/// pooled data has no ties; otherwise the normal approximation with tie
/// corrected variance and continuity correction.
StatResult mann_whitney_u(std::span<const double> x, std::span<const double> y,
                          Alternative alternative);

inline constexpr long kExactCellLimit = 400;

/// Exact P(U = u) for every u in [0, m * n] under the null, m and n sample sizes.
std::vector<double> mann_whitney_null_pmf(int m, int n);

double bonferroni(double alpha, int m);
double adjust_p(double p, int m);

/// Pooled-standard-deviation Cohen's d, (mean_x - mean_y) / s_pooled.
double cohens_d(std::span<const double> x, std::span<const double> y);

/// Tau-b with tie correction; two-sided p from the normal approximation.
StatResult kendall_tau(std::span<const double> x, std::span<const double> y);

double normal_cdf(double z);
double chi_square_sf(double statistic, int df);

}  // namespace calfront::stats
