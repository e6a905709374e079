#pragma once

#include "lpocv/dataset.hpp"
#include "lpocv/neighbors.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace lpocv {

enum class Method { exact_dp, brute_force, hoeffding_mc };

std::string_view to_string(Method m);

/// Value of the leave-p-out risk estimator for the k-NN rule.
struct LpOEstimate {
  double value = 0.0;
  std::size_t n = 0;
  std::size_t p = 0;
  std::size_t k = 0;
  Method method = Method::exact_dp;
};

/// P_e[f(Z^e; X_i) != Y_i] for e uniform over (n-p)-subsets not containing i.
struct PerPointError {
  std::size_t index = 0;
  double prob = 0.0;
  /// Total probability mass of the rank/label configurations visited (should be 1).
  double mass = 0.0;
};

struct ExactOptions {
  unsigned workers = 1;
  /// Shifts the last admissible rank of the k-th neighbor. Only used by the
  /// harness self-test to plant a known defect; must be 0 otherwise.
  int fault_rank_shift = 0;
};

/// Throws InfeasibleError unless 1 <= k, 1 <= p and p + k <= n.
void check_feasible(std::size_t n, std::size_t p, std::size_t k);

/// Per-point error probability by the rank/ones-count recursion.
///
/// With sigma the neighbor order of i, the k-th nearest training point sits
/// at 1-based rank r in [k, k+p-1] with probability
///   C(r-1, k-1) C(n-1-r, n-p-k) / C(n-1, n-p),
/// and given r the number of ones among the k-1 closer training points is
/// hypergeometric on the first r-1 labels of sigma.
PerPointError per_point_error_prob(const NeighborTable& table, std::span<const Label> labels,
                                   std::size_t i, std::size_t k, std::size_t p,
                                   int fault_rank_shift = 0);

LpOEstimate lpo_exact(const NeighborTable& table, std::span<const Label> labels, std::size_t k,
                      std::size_t p, const ExactOptions& options = {});
LpOEstimate lpo_exact(const Dataset& dataset, std::size_t k, std::size_t p,
                      const ExactOptions& options = {});

/// Exact rational result of the split enumeration.
struct BruteForceResult {
  LpOEstimate estimate;
  std::int64_t numerator = 0;    // total misclassified test points over all splits
  std::int64_t denominator = 1;  // p * C(n, p)
  std::uint64_t splits = 0;
};

inline constexpr std::uint64_t kDefaultEnumerationCap = 1'000'000;

/// C(n, r) saturating at UINT64_MAX.
std::uint64_t binomial_saturating(std::uint64_t n, std::uint64_t r);

/// Literal evaluation by enumerating every training subset.
/// Throws CapExceededError when C(n, p) > cap.
BruteForceResult lpo_bruteforce(const Dataset& dataset, std::size_t k, std::size_t p,
                                std::uint64_t cap = kDefaultEnumerationCap);

/// Leave-one-out through the exact recursion (p = 1).
LpOEstimate l1o(const Dataset& dataset, std::size_t k);
LpOEstimate l1o(const NeighborTable& table, std::span<const Label> labels, std::size_t k);

/// Leave-one-out by the plain loop over held-out points.
LpOEstimate l1o_direct(const NeighborTable& table, std::span<const Label> labels, std::size_t k);

}  // namespace lpocv
