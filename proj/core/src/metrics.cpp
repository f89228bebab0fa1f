#include "gsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

namespace gsim {

namespace {

void require_lengths(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("rank correlation: length mismatch");
  if (xs.size() < 2) throw std::invalid_argument("rank correlation: need at least 2 observations");
}

// Descending by score, ascending by position on ties.
std::vector<std::size_t> order_desc(std::span<const double> scores) {
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return idx;
}

}  // namespace

std::vector<double> average_ranks(std::span<const double> xs) {
  std::vector<std::size_t> idx(xs.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> ranks(xs.size());
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j + 1 < idx.size() && xs[idx[j + 1]] == xs[idx[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
    i = j + 1;
  }
  return ranks;
}

RankCorrelation spearman(std::span<const double> xs, std::span<const double> ys) {
  require_lengths(xs, ys);
  const auto rx = average_ranks(xs);
  const auto ry = average_ranks(ys);
  const double n = static_cast<double>(rx.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return {0.0, false};
  return {sxy / std::sqrt(sxx * syy), true};
}

RankCorrelation kendall_tau_b(std::span<const double> xs, std::span<const double> ys) {
  require_lengths(xs, ys);
  const std::size_t n = xs.size();
  long long concordant = 0, discordant = 0, tied_x = 0, tied_y = 0;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      const double dx = xs[a] - xs[b];
      const double dy = ys[a] - ys[b];
      if (dx == 0.0) ++tied_x;
      if (dy == 0.0) ++tied_y;
      if (dx == 0.0 || dy == 0.0) continue;
      if ((dx > 0.0) == (dy > 0.0)) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  const double n0 = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
  const double denom = std::sqrt((n0 - static_cast<double>(tied_x)) * (n0 - static_cast<double>(tied_y)));
  if (denom == 0.0) return {0.0, false};
  return {static_cast<double>(concordant - discordant) / denom, true};
}

double precision_at_k(std::span<const double> predicted, std::span<const double> truth, int k) {
  if (predicted.size() != truth.size()) throw std::invalid_argument("precision_at_k: length mismatch");
  if (k < 1 || static_cast<std::size_t>(k) > truth.size()) {
    throw std::invalid_argument("precision_at_k: k=" + std::to_string(k) + " exceeds corpus of " +
                                std::to_string(truth.size()));
  }
  const auto pred_order = order_desc(predicted);
  const auto true_order = order_desc(truth);
  const double kth = truth[true_order[static_cast<std::size_t>(k) - 1]];
  std::set<std::size_t> true_set;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] >= kth) true_set.insert(i);
  }
  int hits = 0;
  for (int r = 0; r < k; ++r) hits += true_set.count(pred_order[r]) > 0;
  return static_cast<double>(hits) / k;
}

}  // namespace gsim
