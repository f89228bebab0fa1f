#pragma once

#include <map>
#include <span>
#include <vector>

namespace gsim {

/// A rank correlation; `defined` is false when either input is constant,
/// in which case `value` is 0.
struct RankCorrelation {
  double value = 0.0;
  bool defined = true;
};

/// Average ranks (1-based); tied values share the mean of their positions.
std::vector<double> average_ranks(std::span<const double> xs);

/// Pearson correlation of the average ranks.
RankCorrelation spearman(std::span<const double> xs, std::span<const double> ys);

/// Kendall tau-b: (nc - nd) / sqrt((n0 - n1)(n0 - n2)), with n1, n2 the
/// pairs tied in xs, ys respectively.
RankCorrelation kendall_tau_b(std::span<const double> xs, std::span<const double> ys);

/// |predicted top-k ∩ true top-k| / k. Both rankings sort by score
/// descending with ties broken by ascending position. The true set is
/// widened to every item tied with the k-th true label.
double precision_at_k(std::span<const double> predicted, std::span<const double> truth, int k);

struct MetricsReport {
  double mse_e3 = 0.0;  // MSE x 1000
  double rho = 0.0;
  double tau = 0.0;
  std::map<int, double> p_at;
  /// Queries whose rank correlation was undefined (constant labels or
  /// predictions); they contribute 0.
  int undefined_rank_queries = 0;
  int queries = 0;
  std::size_t pairs = 0;
};

}  // namespace gsim
