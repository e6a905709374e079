#include "lpocv/oracle.hpp"

#include "lpocv/errors.hpp"
#include "lpocv/parallel.hpp"
#include "lpocv/random.hpp"
#include "lpocv/ustat.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace lpocv {

Dataset random_dataset(std::size_t n, std::size_t d, std::uint64_t seed, bool integer_grid) {
  Rng rng(seed);
  Matrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  std::vector<Label> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < d; ++c) {
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
          integer_grid ? static_cast<double>(rng.below(5)) : rng.normal();
    }
    y[i] = rng.bernoulli(0.5) ? 1 : 0;
  }
  return {std::move(x), std::move(y)};
}

namespace {

struct Case {
  std::size_t n, d, k, p, replicate;
  std::uint64_t seed;
};

}  // namespace

OracleSweepResult run_oracle_sweep(const OracleSweepConfig& cfg) {
  if (cfg.n_min < 2 || cfg.n_max < cfg.n_min) throw InputError("invalid n range for oracle sweep");
  for (std::size_t n = cfg.n_min; n <= cfg.n_max; ++n) {
    for (std::size_t p = 1; p < n; ++p) {
      if (binomial_saturating(n, p) > cfg.cap) {
        throw CapExceededError("C(" + std::to_string(n) + ", " + std::to_string(p) +
                               ") exceeds the enumeration cap");
      }
    }
  }

  std::vector<Case> cases;
  std::uint64_t stream = 0;
  for (std::size_t n = cfg.n_min; n <= cfg.n_max; ++n) {
    for (std::size_t d = 1; d <= 2; ++d) {
      for (std::size_t r = 0; r < cfg.datasets_per_dimension; ++r) {
        const std::uint64_t seed = derive_seed(cfg.seed, stream++);
        for (std::size_t k = 1; k <= std::min(cfg.k_max, n - 1); ++k) {
          for (std::size_t p = 1; p + k <= n; ++p) cases.push_back({n, d, k, p, r, seed});
        }
      }
    }
  }

  std::vector<double> discrepancy(cases.size());
  parallel_for(cases.size(), cfg.workers, [&](std::size_t c) {
    const auto& cs = cases[c];
    const auto data = random_dataset(cs.n, cs.d, cs.seed);
    ExactOptions opts;
    opts.fault_rank_shift = cfg.fault_rank_shift;
    const double exact = lpo_exact(data, cs.k, cs.p, opts).value;
    const double brute = lpo_bruteforce(data, cs.k, cs.p, cfg.cap).estimate.value;
    discrepancy[c] = std::abs(exact - brute);
  });

  OracleSweepResult out;
  out.cases = cases.size();
  for (const double v : discrepancy) {
    out.max_abs_discrepancy = std::max(out.max_abs_discrepancy, v);
    if (!(v <= cfg.tolerance)) ++out.failures;
  }

  // permutation identity on small n, block size m = n - p + 1 in {2, 3}
  std::vector<Case> perm_cases;
  for (std::size_t n = std::max<std::size_t>(cfg.n_min, 4); n <= std::min(cfg.permutation_n_max, cfg.n_max); ++n) {
    for (std::size_t m = 2; m <= 3; ++m) {
      const std::size_t p = n - m + 1;
      for (std::size_t k = 1; k + 1 <= m; ++k) {
        perm_cases.push_back({n, 1, k, p, 0, derive_seed(cfg.seed ^ 0xA5A5A5A5ULL, stream++)});
      }
    }
  }
  std::vector<double> perm_gap(perm_cases.size());
  parallel_for(perm_cases.size(), cfg.workers, [&](std::size_t c) {
    const auto& cs = perm_cases[c];
    const auto data = random_dataset(cs.n, cs.d, cs.seed);
    ExactOptions opts;
    opts.fault_rank_shift = cfg.fault_rank_shift;
    perm_gap[c] = std::abs(exhaustive_permutation_average(data, cs.k, cs.p) -
                           lpo_exact(data, cs.k, cs.p, opts).value);
  });
  out.permutation_cases = perm_cases.size();
  for (const double v : perm_gap) {
    out.permutation_max_discrepancy = std::max(out.permutation_max_discrepancy, v);
    if (!(v <= cfg.tolerance)) ++out.permutation_failures;
  }
  return out;
}

}  // namespace lpocv
