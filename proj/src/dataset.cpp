#include "lpocv/dataset.hpp"

#include "lpocv/errors.hpp"

#include <string>

namespace lpocv {

Dataset::Dataset(Matrix features, std::vector<Label> labels)
    : features_(std::move(features)), labels_(std::move(labels)) {
  if (static_cast<std::size_t>(features_.rows()) != labels_.size()) {
    throw InputError("feature rows (" + std::to_string(features_.rows()) + ") and labels (" +
                     std::to_string(labels_.size()) + ") differ in length");
  }
  if (labels_.size() < 2) throw InputError("a dataset needs at least 2 points");
  if (features_.cols() < 1) throw InputError("feature dimension must be at least 1");
  if (!features_.allFinite()) throw InputError("non-finite coordinate in dataset");
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] != 0 && labels_[i] != 1) {
      throw InputError("label of point " + std::to_string(i) + " is not in {0,1}");
    }
  }
}

Dataset Dataset::from_points(std::span<const LabeledPoint> points) {
  if (points.empty()) throw InputError("a dataset needs at least 2 points");
  const Eigen::Index d = points.front().features.size();
  Matrix x(static_cast<Eigen::Index>(points.size()), d);
  std::vector<Label> y(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].features.size() != d) throw InputError("points have inconsistent dimensions");
    x.row(static_cast<Eigen::Index>(i)) = points[i].features.transpose();
    y[i] = points[i].label;
  }
  return {std::move(x), std::move(y)};
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  Matrix x(static_cast<Eigen::Index>(indices.size()), features_.cols());
  std::vector<Label> y(indices.size());
  for (std::size_t r = 0; r < indices.size(); ++r) {
    x.row(static_cast<Eigen::Index>(r)) = features_.row(static_cast<Eigen::Index>(indices[r]));
    y[r] = labels_[indices[r]];
  }
  return {std::move(x), std::move(y)};
}

Dataset Dataset::flipped() const {
  std::vector<Label> y(labels_.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = 1 - labels_[i];
  return {features_, std::move(y)};
}

}  // namespace lpocv
