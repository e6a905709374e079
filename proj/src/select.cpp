#include "lpocv/select.hpp"

#include "lpocv/bounds.hpp"
#include "lpocv/errors.hpp"
#include "lpocv/neighbors.hpp"
#include "lpocv/parallel.hpp"

#include <algorithm>
#include <numeric>

namespace lpocv {

std::size_t argmin_first(std::span<const double> values) {
  if (values.empty()) throw InputError("argmin of an empty sequence");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] < values[best]) best = i;
  }
  return best;
}

SelectionCurve select_k(const Dataset& dataset, std::size_t p, std::span<const std::size_t> k_grid,
                        std::optional<double> gamma_d, double confidence_exponent,
                        unsigned workers) {
  if (k_grid.empty()) throw InputError("k grid is empty");
  const std::size_t n = dataset.size();
  for (const std::size_t k : k_grid) check_feasible(n, p, k);

  // smallest-k tie rule: evaluate in increasing k and take the first minimum
  std::vector<std::size_t> grid(k_grid.begin(), k_grid.end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  const auto table = build_neighbor_table(dataset, workers);
  SelectionCurve curve;
  curve.p = p;
  curve.grid = grid;
  curve.confidence_exponent = confidence_exponent;
  curve.estimates.resize(grid.size());
  parallel_for(grid.size(), workers, [&](std::size_t g) {
    curve.estimates[g] = lpo_exact(table, dataset.labels(), grid[g], p);
  });

  std::vector<double> values(grid.size());
  std::transform(curve.estimates.begin(), curve.estimates.end(), values.begin(),
                 [](const LpOEstimate& e) { return e.value; });
  curve.chosen_k = grid[argmin_first(values)];

  curve.confidence_radius.resize(grid.size());
  if (gamma_d && !is_large_p(n, p)) {
    for (std::size_t g = 0; g < grid.size(); ++g) {
      curve.confidence_radius[g] = confidence_gap_bound(n, p, grid[g], *gamma_d, confidence_exponent);
    }
  }
  return curve;
}

}  // namespace lpocv
