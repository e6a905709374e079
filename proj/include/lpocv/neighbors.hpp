#pragma once

#include "lpocv/dataset.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace lpocv {

using IndexMatrix = Eigen::Matrix<std::int32_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// For each point i, the other n-1 points ordered by (distance to X_i, index).
///
/// Positions are 0-based: order(i, 0) is the nearest neighbor of i and
/// rank(i, j) is the position of j in row i of `order`, so that
/// rank(i, order(i, r)) == r. rank(i, i) is -1.
class NeighborTable {
 public:
  NeighborTable(IndexMatrix order, IndexMatrix rank);

  std::size_t size() const { return static_cast<std::size_t>(order_.rows()); }

  std::span<const std::int32_t> row(std::size_t i) const {
    return {order_.data() + i * order_.cols(), static_cast<std::size_t>(order_.cols())};
  }
  std::size_t neighbor(std::size_t i, std::size_t position) const {
    return static_cast<std::size_t>(order_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(position)));
  }
  std::int32_t rank(std::size_t i, std::size_t j) const {
    return rank_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }

  const IndexMatrix& order() const { return order_; }
  const IndexMatrix& ranks() const { return rank_; }

 private:
  IndexMatrix order_;
  IndexMatrix rank_;
};

/// Squared Euclidean distances between all rows of `points`.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
pairwise_squared_distances(const Eigen::MatrixBase<Derived>& points) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = points.rows();
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(n, n);
  // Direct differences rather than the Gram trick: exact zeros and exact
  // symmetry matter for tie-breaking.
  for (Eigen::Index i = 0; i < n; ++i) {
    out(i, i) = Scalar(0);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const Scalar d = (points.row(i) - points.row(j)).squaredNorm();
      out(i, j) = d;
      out(j, i) = d;
    }
  }
  return out;
}

NeighborTable build_neighbor_table(const Dataset& dataset, unsigned workers = 1);

/// Majority vote of the k nearest neighbors of point i among the points
/// flagged in `in_subset` (length n; entry i is ignored).
///
/// Returns 1 iff strictly more than half of the k labels are 1.
/// Throws InsufficientNeighborsError when fewer than k points are flagged.
Label knn_classify(const NeighborTable& table, std::span<const Label> labels,
                   std::span<const std::uint8_t> in_subset, std::size_t i, std::size_t k);

/// Vote with the training set made of every point except i.
Label knn_classify_loo(const NeighborTable& table, std::span<const Label> labels, std::size_t i,
                       std::size_t k);

/// Prediction at an arbitrary query using the first `n_train` points of
/// `train` (distance ties broken by smaller index).
Label knn_predict(const Dataset& train, std::size_t n_train, const Eigen::Ref<const Vector>& query,
                  std::size_t k);

inline bool majority_vote(std::size_t ones, std::size_t k) { return 2 * ones > k; }

}  // namespace lpocv
