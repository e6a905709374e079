#include "lpocv/neighbors.hpp"

#include "lpocv/errors.hpp"
#include "lpocv/parallel.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <utility>

namespace lpocv {

NeighborTable::NeighborTable(IndexMatrix order, IndexMatrix rank)
    : order_(std::move(order)), rank_(std::move(rank)) {}

NeighborTable build_neighbor_table(const Dataset& dataset, unsigned workers) {
  const std::size_t n = dataset.size();
  if (n < 2) throw InputError("neighbor table needs at least 2 points");
  if (!dataset.features().allFinite()) throw InputError("non-finite coordinate in dataset");

  const auto dist = pairwise_squared_distances(dataset.features());
  const auto rows = static_cast<Eigen::Index>(n);
  IndexMatrix order(rows, rows - 1);
  IndexMatrix rank = IndexMatrix::Constant(rows, rows, -1);

  parallel_for(n, workers, [&](std::size_t i) {
    const auto ii = static_cast<Eigen::Index>(i);
    std::vector<std::int32_t> others;
    others.reserve(n - 1);
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) others.push_back(static_cast<std::int32_t>(j));
    }
    std::sort(others.begin(), others.end(), [&](std::int32_t a, std::int32_t b) {
      const double da = dist(ii, a);
      const double db = dist(ii, b);
      return da < db || (da == db && a < b);
    });
    for (std::size_t r = 0; r + 1 < n; ++r) {
      order(ii, static_cast<Eigen::Index>(r)) = others[r];
      rank(ii, others[r]) = static_cast<std::int32_t>(r);
    }
  });
  return {std::move(order), std::move(rank)};
}

Label knn_classify(const NeighborTable& table, std::span<const Label> labels,
                   std::span<const std::uint8_t> in_subset, std::size_t i, std::size_t k) {
  std::size_t seen = 0;
  std::size_t ones = 0;
  for (const std::int32_t j : table.row(i)) {
    if (!in_subset[static_cast<std::size_t>(j)]) continue;
    ones += static_cast<std::size_t>(labels[static_cast<std::size_t>(j)]);
    if (++seen == k) return majority_vote(ones, k) ? 1 : 0;
  }
  throw InsufficientNeighborsError("training subset has " + std::to_string(seen) +
                                   " points, fewer than k = " + std::to_string(k));
}

Label knn_classify_loo(const NeighborTable& table, std::span<const Label> labels, std::size_t i,
                       std::size_t k) {
  if (k == 0 || k > table.size() - 1) {
    throw InsufficientNeighborsError("k = " + std::to_string(k) + " exceeds the " +
                                     std::to_string(table.size() - 1) + " available neighbors");
  }
  std::size_t ones = 0;
  const auto row = table.row(i);
  for (std::size_t r = 0; r < k; ++r) ones += static_cast<std::size_t>(labels[static_cast<std::size_t>(row[r])]);
  return majority_vote(ones, k) ? 1 : 0;
}

Label knn_predict(const Dataset& train, std::size_t n_train, const Eigen::Ref<const Vector>& query,
                  std::size_t k) {
  if (k == 0 || n_train < k) {
    throw InsufficientNeighborsError("n_train = " + std::to_string(n_train) +
                                     " is smaller than k = " + std::to_string(k));
  }
  std::vector<std::pair<double, std::size_t>> d(n_train);
  for (std::size_t j = 0; j < n_train; ++j) {
    d[j] = {(train.point(j).transpose() - query).squaredNorm(), j};
  }
  std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k - 1), d.end());
  std::size_t ones = 0;
  // After nth_element the first k entries are the k smallest (distance, index) pairs.
  for (std::size_t r = 0; r < k; ++r) ones += static_cast<std::size_t>(train.label(d[r].second));
  return majority_vote(ones, k) ? 1 : 0;
}

}  // namespace lpocv
