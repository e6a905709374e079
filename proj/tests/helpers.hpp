#pragma once

#include "lpocv/dataset.hpp"

#include <initializer_list>
#include <vector>

namespace lpocv::testing {

inline Dataset line(std::initializer_list<double> xs, std::initializer_list<Label> ys) {
  Matrix m(static_cast<Eigen::Index>(xs.size()), 1);
  Eigen::Index r = 0;
  for (double x : xs) m(r++, 0) = x;
  return Dataset(std::move(m), std::vector<Label>(ys));
}

}  // namespace lpocv::testing
