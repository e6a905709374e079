#include "lpocv/ustat.hpp"

#include "lpocv/errors.hpp"
#include "lpocv/parallel.hpp"
#include "lpocv/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace lpocv {

namespace {

void check_kernel(std::size_t m, std::size_t k) {
  if (k < 1 || k + 1 > m) {
    throw InfeasibleError("kernel needs 1 <= k <= m - 1, got m = " + std::to_string(m) +
                          ", k = " + std::to_string(k));
  }
}

std::size_t kernel_errors(const NeighborTable& table, std::span<const Label> labels,
                          std::span<const std::size_t> members, std::size_t k) {
  thread_local std::vector<std::uint8_t> mask;
  mask.assign(table.size(), 0);
  for (const std::size_t j : members) mask[j] = 1;
  std::size_t errors = 0;
  for (const std::size_t i : members) {
    mask[i] = 0;
    if (knn_classify(table, labels, mask, i, k) != labels[i]) ++errors;
    mask[i] = 1;
  }
  return errors;
}

// Misclassified held-out points summed over the floor(n/m) blocks.
std::size_t block_errors(const NeighborTable& table, std::span<const Label> labels, std::size_t k,
                         std::size_t m, std::span<const std::size_t> permutation) {
  std::size_t total = 0;
  for (std::size_t b = 0; b < table.size() / m; ++b) {
    total += kernel_errors(table, labels, permutation.subspan(b * m, m), k);
  }
  return total;
}

void check_block_inputs(std::size_t n, std::size_t p, std::size_t k, std::size_t perm_size) {
  if (perm_size != n) throw InputError("permutation length differs from sample size");
  if (p < 1 || p > n - 1) throw InfeasibleError("p must lie in [1, n-1]");
  check_kernel(n - p + 1, k);
}

}  // namespace

double kernel_h(const Dataset& sample, std::size_t k) {
  check_kernel(sample.size(), k);
  return l1o(sample, k).value;
}

double kernel_h(const NeighborTable& table, std::span<const Label> labels,
                std::span<const std::size_t> members, std::size_t k) {
  check_kernel(members.size(), k);
  return static_cast<double>(kernel_errors(table, labels, members, k)) /
         static_cast<double>(members.size());
}

BlockStatistic hoeffding_block_estimate(const NeighborTable& table, std::span<const Label> labels,
                                        std::size_t k, std::size_t p,
                                        std::span<const std::size_t> permutation) {
  const std::size_t n = table.size();
  check_block_inputs(n, p, k, permutation.size());
  const std::size_t m = n - p + 1;
  const std::size_t blocks = n / m;
  const std::size_t errors = block_errors(table, labels, k, m, permutation);
  return {static_cast<double>(errors) / static_cast<double>(blocks * m), m, blocks, 0};
}

BlockStatistic hoeffding_block_estimate(const Dataset& dataset, std::size_t k, std::size_t p,
                                        std::span<const std::size_t> permutation) {
  const auto table = build_neighbor_table(dataset);
  return hoeffding_block_estimate(table, dataset.labels(), k, p, permutation);
}

IncompleteUStatEstimate incomplete_ustat_estimate(const Dataset& dataset, std::size_t k,
                                                  std::size_t p, std::size_t replicates,
                                                  std::uint64_t seed, unsigned workers) {
  if (replicates < 2) throw InputError("incomplete U-statistic needs at least 2 replicates");
  const std::size_t n = dataset.size();
  check_feasible(n, p, k);
  const auto table = build_neighbor_table(dataset, workers);
  const std::size_t m = n - p + 1;
  const double cells = static_cast<double>((n / m) * m);
  // Integer error counts keep identical replicates exactly identical.
  std::vector<std::int64_t> counts(replicates);
  parallel_for(replicates, workers, [&](std::size_t b) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    Rng rng(derive_seed(seed, b));
    rng.shuffle(std::span<std::size_t>(perm));
    counts[b] = static_cast<std::int64_t>(block_errors(table, dataset.labels(), k, m, perm));
  });
  const auto reps = static_cast<std::int64_t>(replicates);
  std::int64_t total = 0;
  for (const auto c : counts) total += c;
  const double mean = static_cast<double>(total) / (static_cast<double>(reps) * cells);
  double ss = 0.0;
  for (const auto c : counts) {
    const double dev = static_cast<double>(c * reps - total);
    ss += dev * dev;
  }
  ss /= static_cast<double>(reps) * static_cast<double>(reps) * cells * cells;
  const double sd = std::sqrt(ss / static_cast<double>(replicates - 1));

  IncompleteUStatEstimate out;
  out.estimate = {mean, n, p, k, Method::hoeffding_mc};
  out.standard_error = sd / std::sqrt(static_cast<double>(replicates));
  out.replicates = replicates;
  out.seed = seed;
  return out;
}

double exhaustive_permutation_average(const Dataset& dataset, std::size_t k, std::size_t p) {
  const std::size_t n = dataset.size();
  if (n > 10) throw CapExceededError("exhaustive permutation average is limited to n <= 10");
  const auto table = build_neighbor_table(dataset);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  double total = 0.0;
  std::size_t count = 0;
  do {
    total += hoeffding_block_estimate(table, dataset.labels(), k, p, perm).value;
    ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total / static_cast<double>(count);
}

}  // namespace lpocv
