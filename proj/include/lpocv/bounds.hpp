#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lpocv {

/// Universal constant of the generalized Efron-Stein inequality (upper value).
inline constexpr double kKappa = 1.271;

/// Stone constant: `override` if given, else 2 for d = 1.
/// Throws MissingConstantError for d >= 2 without an override.
double stone_gamma(std::size_t d, std::optional<double> override = std::nullopt);

/// Constants derived from gamma_d. The two C1 values come from different
/// theorems (L1O moments vs LpO moments) and are kept apart.
struct BoundConstants {
  double gamma_d = 0.0;
  double c1_loo = 0.0;  // 2 + 16 gamma_d
  double c2 = 0.0;      // 4 gamma_d sqrt(2 kappa)
  double c1_lpo = 0.0;  // 128 kappa gamma_d / sqrt(2 pi)
  double delta = 0.0;   // 4 sqrt(e) max(c2, sqrt(c1_loo))
  double gamma = 0.0;   // 2 sqrt(2e) max(sqrt(2 c1_lpo), 2 c2)
  double square = 0.0;  // 1024 e kappa (1 + gamma_d)

  static BoundConstants from_gamma(double gamma_d);
};

/// True iff p > n/2 + 1.
constexpr bool is_large_p(std::size_t n, std::size_t p) { return 2 * p > n + 2; }

/// floor(n / (n - p + 1)).
std::size_t block_count(std::size_t n, std::size_t p);

struct ResamplingProbs {
  double p_test = 0.0;        // P_e[i in test set]
  double neighbor_sum = 0.0;  // sum_j P_e[i in test, j in V_k^e(X_i)]
  double far_rank_sum = 0.0;  // same sum restricted to k < rank_i(j) <= k + p
};
ResamplingProbs resampling_probs(std::size_t n, std::size_t p, std::size_t k);

/// |E[R_p - L(f_k)]| <= 4/sqrt(2 pi) * p sqrt(k) / n.
double bias_bound(std::size_t n, std::size_t p, std::size_t k);
/// E[(R_p - L(f_k))^2] <= 2 sqrt(2)/sqrt(pi) * (2p + 3) sqrt(k) / n + 1/n.
double mse_bound(std::size_t n, std::size_t p, std::size_t k);
/// P[f_k(X) != g(X)] where g drops p of the n training points.
double stability_bound(std::size_t n, std::size_t p, std::size_t k);

// Tail envelopes. Raw values; these may exceed 1.
double mcdiarmid_tail(std::size_t n, std::size_t p, std::size_t k, double gamma_d, double t);
double concentration_tail_poly(std::size_t n, std::size_t p, std::size_t k, double gamma_d, double t);
double concentration_tail_small_p(std::size_t n, std::size_t p, std::size_t k, double gamma_d, double t);
/// Requires p > n/2 + 1 (RegimeError otherwise).
double concentration_tail_large_p(std::size_t n, std::size_t p, std::size_t k, double gamma_d, double t);

/// Deviation |R_p - E R_p| > sub_gaussian_term + heavy_term has probability
/// at most prefactor * e^{-x}. Requires p > n/2 + 1.
struct DeviationTerms {
  double sub_gaussian_term = 0.0;
  double heavy_term = 0.0;
  double prefactor = 0.0;
};
DeviationTerms deviation_terms_large_p(std::size_t n, std::size_t p, std::size_t k, double gamma_d,
                                       double x);

// Central moment bounds of order q >= 2.
double moment_bound_loo(double q, std::size_t k, std::size_t m, double gamma_d);
double moment_bound_lpo(double q, std::size_t n, std::size_t p, std::size_t k, double gamma_d);
/// Requires n/2 + 1 < p <= n - k.
double moment_bound_lpo_large_p(double q, std::size_t n, std::size_t p, std::size_t k,
                                double gamma_d);

/// LpO central q-th moment bound from the L1O moments on m = n - p + 1 points.
/// Pass-through for p <= n/2 + 1; block-count improvements otherwise.
double moment_transfer_lpo_from_loo(double q, std::size_t n, std::size_t p, double loo_moment_q,
                                    double loo_variance);

/// Rosenthal-type bound for symmetric independent sums, q > 2:
///   E|sum X_i|^q <= scale * max(heavy_weight * sum E|X_i|^q,
///                               gaussian_weight * (sum E X_i^2)^{q/2}).
struct RosenthalConstant {
  double scale = 0.0;            // (2 sqrt(2e))^q
  double heavy_weight = 0.0;     // q^q
  double gaussian_weight = 0.0;  // sqrt(q)^q
  double scalar = 0.0;           // (2 sqrt(2e) sqrt(q))^q
};
RosenthalConstant rosenthal_constant(double q);

/// Tail bound implied by E|X|^q <= C (sum_i lambda_i q^{alpha_i})^q for q >= q0.
double tail_from_moments(double c, double q0, std::span<const double> lambdas,
                         std::span<const double> alphas, double t);
/// Deviation exceeded with probability at most C e^{q0 min alpha} e^{-x}.
double deviation_from_moments(std::span<const double> lambdas, std::span<const double> alphas,
                              double x);

/// L1O tail 2 exp(-n eps / (gamma_d^2 k^2)). The exponent is linear in eps as
/// in the source lemma (not eps^2).
double l1o_concentration_devroye(std::size_t n, std::size_t k, double gamma_d, double eps);

/// Radius of the event |R(f_k) - R_p| <= radius, of probability >= 1 - 2e^{-x}.
/// Requires p <= n/2 + 1.
double confidence_gap_bound(std::size_t n, std::size_t p, std::size_t k, double gamma_d, double x);

struct BoundInputs {
  std::size_t n = 0;
  std::size_t p = 0;
  std::size_t k = 0;
  double q = 2.0;
  double t = 0.1;
  double x = 1.0;
  double gamma_d = 2.0;
};

struct BoundEntry {
  std::string id;
  bool applicable = true;
  bool probability = false;  // clipped value is meaningful
  double value = 0.0;        // raw
  double clipped = 0.0;      // min(value, 1) for probabilities, value otherwise
  std::string note;          // reason when not applicable
};

struct BoundReport {
  BoundInputs inputs;
  BoundConstants constants;
  std::vector<BoundEntry> entries;

  const BoundEntry* find(std::string_view id) const;
};

/// Every bound evaluated at `inputs`; out-of-regime bounds are marked, not thrown.
/// Throws InfeasibleError when p + k > n.
BoundReport evaluate_bounds(const BoundInputs& inputs);

}  // namespace lpocv
