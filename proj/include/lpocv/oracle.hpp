#pragma once

#include "lpocv/dataset.hpp"
#include "lpocv/lpo.hpp"

#include <cstddef>
#include <cstdint>

namespace lpocv {

/// Random dataset with Gaussian features and fair-coin labels, used by the
/// oracle sweeps. With `integer_grid`, coordinates are small integers so that
/// distance ties are frequent.
Dataset random_dataset(std::size_t n, std::size_t d, std::uint64_t seed, bool integer_grid = false);

struct OracleSweepConfig {
  std::size_t n_min = 4;
  std::size_t n_max = 10;
  std::size_t k_max = 3;
  std::size_t datasets_per_dimension = 20;
  std::size_t permutation_n_max = 7;
  std::uint64_t seed = 2024;
  std::uint64_t cap = kDefaultEnumerationCap;
  double tolerance = 1e-12;
  int fault_rank_shift = 0;
  unsigned workers = 1;
};

struct OracleSweepResult {
  std::size_t cases = 0;
  std::size_t failures = 0;
  double max_abs_discrepancy = 0.0;
  std::size_t permutation_cases = 0;
  std::size_t permutation_failures = 0;
  double permutation_max_discrepancy = 0.0;

  bool passed() const { return failures == 0 && permutation_failures == 0; }
};

/// Exact recursion against split enumeration for every n in [n_min, n_max],
/// k <= k_max, p <= n - k on 1-d and 2-d random data, plus the permutation
/// identity for n <= permutation_n_max and block sizes m in {2, 3}.
/// Throws CapExceededError if some C(n, p) exceeds the cap.
OracleSweepResult run_oracle_sweep(const OracleSweepConfig& config);

}  // namespace lpocv
