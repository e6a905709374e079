#pragma once

#include "lpocv/dataset.hpp"
#include "lpocv/lpo.hpp"
#include "lpocv/neighbors.hpp"

#include <cstddef>
#include <cstdint>
#include <span>

namespace lpocv {

/// Mean of the L1O kernel over floor(n/m) disjoint consecutive blocks of a
/// permuted sample, m = n - p + 1. Trailing points that do not fill a block
/// are unused.
struct BlockStatistic {
  double value = 0.0;
  std::size_t m = 0;
  std::size_t blocks = 0;
  std::uint64_t permutation_seed = 0;
};

/// L1O risk of the k-NN rule on a standalone m-point sample.
double kernel_h(const Dataset& sample, std::size_t k);

/// Kernel on the block `members` of a larger sample, with neighbors and
/// tie-breaks taken from the full table. Symmetric in the order of `members`.
double kernel_h(const NeighborTable& table, std::span<const Label> labels,
                std::span<const std::size_t> members, std::size_t k);

BlockStatistic hoeffding_block_estimate(const NeighborTable& table, std::span<const Label> labels,
                                        std::size_t k, std::size_t p,
                                        std::span<const std::size_t> permutation);
BlockStatistic hoeffding_block_estimate(const Dataset& dataset, std::size_t k, std::size_t p,
                                        std::span<const std::size_t> permutation);

struct IncompleteUStatEstimate {
  LpOEstimate estimate;  // method == hoeffding_mc
  double standard_error = 0.0;
  std::size_t replicates = 0;
  std::uint64_t seed = 0;
};

/// Monte-Carlo average of the block statistic over seeded random permutations.
/// Replicate b shuffles with Rng(derive_seed(seed, b)).
IncompleteUStatEstimate incomplete_ustat_estimate(const Dataset& dataset, std::size_t k,
                                                  std::size_t p, std::size_t replicates,
                                                  std::uint64_t seed, unsigned workers = 1);

/// Average of the block statistic over all n! orderings (n <= 10).
/// Equals the leave-p-out value; used as an identity check.
double exhaustive_permutation_average(const Dataset& dataset, std::size_t k, std::size_t p);

}  // namespace lpocv
