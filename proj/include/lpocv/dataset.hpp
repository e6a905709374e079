#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <span>
#include <vector>

namespace lpocv {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using Label = int;

struct LabeledPoint {
  Vector features;
  Label label = 0;
};

/// n labeled points in R^d, one row of `features` per point.
///
/// Construction validates: n >= 2, d >= 1, finite coordinates, labels in {0,1}.
/// Instances are immutable.
class Dataset {
 public:
  Dataset(Matrix features, std::vector<Label> labels);

  static Dataset from_points(std::span<const LabeledPoint> points);

  std::size_t size() const { return labels_.size(); }
  std::size_t dimension() const { return static_cast<std::size_t>(features_.cols()); }

  const Matrix& features() const { return features_; }
  const std::vector<Label>& labels() const { return labels_; }
  Label label(std::size_t i) const { return labels_[i]; }
  auto point(std::size_t i) const { return features_.row(static_cast<Eigen::Index>(i)); }

  /// Sub-sample keeping the given indices, in the given order.
  Dataset subset(std::span<const std::size_t> indices) const;

  /// Copy with every label flipped.
  Dataset flipped() const;

  friend bool operator==(const Dataset& a, const Dataset& b) {
    return a.labels_ == b.labels_ && a.features_.rows() == b.features_.rows() &&
           a.features_.cols() == b.features_.cols() && a.features_ == b.features_;
  }

 private:
  Matrix features_;
  std::vector<Label> labels_;
};

}  // namespace lpocv
