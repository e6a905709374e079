#include "lpocv/lpo.hpp"

#include "lpocv/errors.hpp"
#include "lpocv/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

namespace lpocv {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::exact_dp: return "exact_dp";
    case Method::brute_force: return "brute_force";
    case Method::hoeffding_mc: return "hoeffding_mc";
  }
  return "unknown";
}

void check_feasible(std::size_t n, std::size_t p, std::size_t k) {
  if (k < 1 || p < 1 || p + k > n) {
    throw InfeasibleError("infeasible (n, p, k) = (" + std::to_string(n) + ", " + std::to_string(p) +
                          ", " + std::to_string(k) + "): need k >= 1, p >= 1 and p + k <= n");
  }
}

namespace {

// Sum over the hypergeometric law of the ones-count j among k-1 draws from a
// population of `ones` ones and `zeros` zeros, of the indicator that the vote
// j + extra (out of k) disagrees with `truth`.
double hypergeometric_error(std::size_t ones, std::size_t zeros, std::size_t k, Label extra,
                            Label truth) {
  const std::size_t draws = k - 1;
  const std::size_t jmin = draws > zeros ? draws - zeros : 0;
  const std::size_t jmax = std::min(ones, draws);
  if (jmin == jmax) {
    const Label vote = majority_vote(jmin + static_cast<std::size_t>(extra), k) ? 1 : 0;
    return vote != truth ? 1.0 : 0.0;
  }
  // log-weights relative to jmin through the pmf ratio
  // P(j+1)/P(j) = (ones-j)(draws-j) / ((j+1)(zeros-draws+j+1)).
  thread_local std::vector<double> logw;
  logw.assign(jmax - jmin + 1, 0.0);
  double top = 0.0;
  for (std::size_t j = jmin; j < jmax; ++j) {
    const double num = static_cast<double>(ones - j) * static_cast<double>(draws - j);
    const double den = static_cast<double>(j + 1) * static_cast<double>(zeros + j + 1 - draws);
    logw[j + 1 - jmin] = logw[j - jmin] + std::log(num / den);
    top = std::max(top, logw[j + 1 - jmin]);
  }
  double total = 0.0;
  double wrong = 0.0;
  for (std::size_t j = jmin; j <= jmax; ++j) {
    const double w = std::exp(logw[j - jmin] - top);
    total += w;
    const Label vote = majority_vote(j + static_cast<std::size_t>(extra), k) ? 1 : 0;
    if (vote != truth) wrong += w;
  }
  return wrong / total;
}

}  // namespace

PerPointError per_point_error_prob(const NeighborTable& table, std::span<const Label> labels,
                                   std::size_t i, std::size_t k, std::size_t p,
                                   int fault_rank_shift) {
  const std::size_t n = table.size();
  check_feasible(n, p, k);
  const auto row = table.row(i);
  const Label truth = labels[i];

  // Ones among the first r-1 neighbors, for r = 1 .. k+p-1.
  std::size_t ones_before = 0;
  for (std::size_t s = 0; s + 1 < k; ++s) ones_before += static_cast<std::size_t>(labels[static_cast<std::size_t>(row[s])]);

  const double nd = static_cast<double>(n);
  const double pd = static_cast<double>(p);
  const double kd = static_cast<double>(k);
  // log P[k-th training neighbor at rank k] = sum_t log((n-p-t)/(n-1-t)).
  double log_w = 0.0;
  for (std::size_t t = 0; t < k; ++t) {
    log_w += std::log((nd - pd - static_cast<double>(t)) / (nd - 1.0 - static_cast<double>(t)));
  }

  const long last_signed = static_cast<long>(k + p - 1) + fault_rank_shift;
  const std::size_t last = static_cast<std::size_t>(std::clamp<long>(last_signed, 0, static_cast<long>(n - 1)));

  PerPointError out{i, 0.0, 0.0};
  for (std::size_t r = k; r <= last; ++r) {
    const double w = std::exp(log_w);
    const std::size_t zeros_before = (r - 1) - ones_before;
    const Label at_r = labels[static_cast<std::size_t>(row[r - 1])];
    out.prob += w * hypergeometric_error(ones_before, zeros_before, k, at_r, truth);
    out.mass += w;

    ones_before += static_cast<std::size_t>(at_r);
    if (r + 1 > k + p - 1) break;
    const double rd = static_cast<double>(r);
    log_w += std::log(rd / (rd - kd + 1.0)) + std::log((pd + kd - 1.0 - rd) / (nd - 1.0 - rd));
  }
  out.prob = std::clamp(out.prob, 0.0, 1.0);
  return out;
}

LpOEstimate lpo_exact(const NeighborTable& table, std::span<const Label> labels, std::size_t k,
                      std::size_t p, const ExactOptions& options) {
  const std::size_t n = table.size();
  check_feasible(n, p, k);
  std::vector<double> probs(n);
  parallel_for(n, options.workers, [&](std::size_t i) {
    probs[i] = per_point_error_prob(table, labels, i, k, p, options.fault_rank_shift).prob;
  });
  double total = 0.0;
  for (const double v : probs) total += v;
  return {total / static_cast<double>(n), n, p, k, Method::exact_dp};
}

LpOEstimate lpo_exact(const Dataset& dataset, std::size_t k, std::size_t p,
                      const ExactOptions& options) {
  check_feasible(dataset.size(), p, k);
  const auto table = build_neighbor_table(dataset, options.workers);
  return lpo_exact(table, dataset.labels(), k, p, options);
}

std::uint64_t binomial_saturating(std::uint64_t n, std::uint64_t r) {
  if (r > n) return 0;
  r = std::min(r, n - r);
  std::uint64_t c = 1;
  for (std::uint64_t t = 1; t <= r; ++t) {
    // c * (n - r + t) / t is exact at every step; guard the multiplication.
    const std::uint64_t factor = n - r + t;
    const std::uint64_t g = std::gcd(c, t);
    const std::uint64_t a = c / g;
    const std::uint64_t b = factor / (t / g);
    if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    c = a * b;
  }
  return c;
}

BruteForceResult lpo_bruteforce(const Dataset& dataset, std::size_t k, std::size_t p,
                                std::uint64_t cap) {
  const std::size_t n = dataset.size();
  check_feasible(n, p, k);
  const std::uint64_t splits = binomial_saturating(n, p);
  if (splits > cap) {
    throw CapExceededError("C(" + std::to_string(n) + ", " + std::to_string(p) + ") = " +
                           std::to_string(splits) + " splits exceeds the enumeration cap " +
                           std::to_string(cap));
  }
  const auto table = build_neighbor_table(dataset);
  const auto& labels = dataset.labels();

  std::vector<std::size_t> test(p);
  std::iota(test.begin(), test.end(), std::size_t{0});
  std::vector<std::uint8_t> in_train(n);
  std::int64_t errors = 0;
  std::uint64_t visited = 0;
  while (true) {
    std::fill(in_train.begin(), in_train.end(), std::uint8_t{1});
    for (const std::size_t t : test) in_train[t] = 0;
    for (const std::size_t t : test) {
      if (knn_classify(table, labels, in_train, t, k) != labels[t]) ++errors;
    }
    ++visited;
    // next combination in lexicographic order
    std::size_t pos = p;
    while (pos > 0 && test[pos - 1] == n - p + pos - 1) --pos;
    if (pos == 0) break;
    ++test[pos - 1];
    for (std::size_t q = pos; q < p; ++q) test[q] = test[q - 1] + 1;
  }

  BruteForceResult out;
  out.splits = visited;
  const auto den = static_cast<std::int64_t>(p) * static_cast<std::int64_t>(splits);
  const std::int64_t g = std::gcd(errors, den);
  out.numerator = errors / (g == 0 ? 1 : g);
  out.denominator = den / (g == 0 ? 1 : g);
  out.estimate = {static_cast<double>(out.numerator) / static_cast<double>(out.denominator), n, p, k,
                  Method::brute_force};
  return out;
}

LpOEstimate l1o(const NeighborTable& table, std::span<const Label> labels, std::size_t k) {
  return lpo_exact(table, labels, k, 1);
}

LpOEstimate l1o(const Dataset& dataset, std::size_t k) { return lpo_exact(dataset, k, 1); }

LpOEstimate l1o_direct(const NeighborTable& table, std::span<const Label> labels, std::size_t k) {
  const std::size_t n = table.size();
  check_feasible(n, 1, k);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    total += knn_classify_loo(table, labels, i, k) != labels[i] ? 1.0 : 0.0;
  }
  return {total / static_cast<double>(n), n, 1, k, Method::exact_dp};
}

}  // namespace lpocv
