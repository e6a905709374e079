#pragma once

#include "lpocv/dataset.hpp"
#include "lpocv/lpo.hpp"

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace lpocv {

/// x such that 1 - 2 e^{-x} = 0.95.
inline const double kDefaultConfidenceExponent = std::log(2.0 / 0.05);

struct SelectionCurve {
  std::size_t p = 0;
  std::vector<std::size_t> grid;
  std::vector<LpOEstimate> estimates;
  /// Confidence radius per grid entry; nullopt when p > n/2 + 1 or no gamma_d.
  std::vector<std::optional<double>> confidence_radius;
  std::size_t chosen_k = 0;
  double confidence_exponent = kDefaultConfidenceExponent;
};

/// Position of the smallest value; ties go to the earliest position.
std::size_t argmin_first(std::span<const double> values);

/// Exact LpO risk for each k in `k_grid` and the minimizing k (smallest k on ties).
SelectionCurve select_k(const Dataset& dataset, std::size_t p, std::span<const std::size_t> k_grid,
                        std::optional<double> gamma_d = std::nullopt,
                        double confidence_exponent = kDefaultConfidenceExponent,
                        unsigned workers = 1);

}  // namespace lpocv
