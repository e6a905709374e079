#include "lpocv/bounds.hpp"

#include "lpocv/errors.hpp"
#include "lpocv/lpo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace lpocv {

namespace {

constexpr double kE = std::numbers::e;
constexpr double kPi = std::numbers::pi;
// 4 / sqrt(2 pi)
const double kStabilityFactor = 4.0 / std::sqrt(2.0 * kPi);

double as_d(std::size_t v) { return static_cast<double>(v); }

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw InputError(std::string(name) + " must be a finite positive number");
  }
}

void require_large_p(std::size_t n, std::size_t p, const char* what) {
  if (!is_large_p(n, p)) {
    throw RegimeError(std::string(what) + " requires p > n/2 + 1 (n = " + std::to_string(n) +
                      ", p = " + std::to_string(p) + ")");
  }
}

void require_moment_order(double q) {
  if (!(q >= 2.0) || !std::isfinite(q)) throw InputError("moment order q must be >= 2");
}

}  // namespace

double stone_gamma(std::size_t d, std::optional<double> override) {
  if (d < 1) throw InputError("dimension must be at least 1");
  if (override) {
    require_positive(*override, "gamma_d");
    return *override;
  }
  if (d == 1) return 2.0;
  throw MissingConstantError("no built-in Stone constant for d = " + std::to_string(d) +
                             "; supply gamma_d explicitly");
}

BoundConstants BoundConstants::from_gamma(double gamma_d) {
  require_positive(gamma_d, "gamma_d");
  BoundConstants c;
  c.gamma_d = gamma_d;
  c.c1_loo = 2.0 + 16.0 * gamma_d;
  c.c2 = 4.0 * gamma_d * std::sqrt(2.0 * kKappa);
  c.c1_lpo = 128.0 * kKappa * gamma_d / std::sqrt(2.0 * kPi);
  c.delta = 4.0 * std::sqrt(kE) * std::max(c.c2, std::sqrt(c.c1_loo));
  c.gamma = 2.0 * std::sqrt(2.0 * kE) * std::max(std::sqrt(2.0 * c.c1_lpo), 2.0 * c.c2);
  c.square = 1024.0 * kE * kKappa * (1.0 + gamma_d);
  return c;
}

std::size_t block_count(std::size_t n, std::size_t p) {
  if (p < 1 || p > n) throw InfeasibleError("p must lie in [1, n]");
  return n / (n - p + 1);
}

ResamplingProbs resampling_probs(std::size_t n, std::size_t p, std::size_t k) {
  if (n < 2) throw InfeasibleError("resampling identities need n >= 2");
  check_feasible(n, p, k);
  const double share = as_d(p) / as_d(n);
  return {share, as_d(k) * share, as_d(k) * share * as_d(p - 1) / as_d(n - 1)};
}

double bias_bound(std::size_t n, std::size_t p, std::size_t k) {
  check_feasible(n, p, k);
  return kStabilityFactor * as_d(p) * std::sqrt(as_d(k)) / as_d(n);
}

double mse_bound(std::size_t n, std::size_t p, std::size_t k) {
  check_feasible(n, p, k);
  return 2.0 * std::sqrt(2.0) / std::sqrt(kPi) * as_d(2 * p + 3) * std::sqrt(as_d(k)) / as_d(n) +
         1.0 / as_d(n);
}

double stability_bound(std::size_t n, std::size_t p, std::size_t k) {
  if (p < 1 || p + k > n) {
    throw InfeasibleError("stability bound needs 1 <= p <= n - k");
  }
  return kStabilityFactor * as_d(p) * std::sqrt(as_d(k)) / as_d(n);
}

double mcdiarmid_tail(std::size_t n, std::size_t p, std::size_t k, double gamma_d, double t) {
  require_positive(t, "t");
  require_positive(gamma_d, "gamma_d");
  const double spread = as_d(k + p - 1) * gamma_d;
  return 2.0 * std::exp(-as_d(n) * t * t / (8.0 * spread * spread));
}

double concentration_tail_poly(std::size_t n, std::size_t p, std::size_t k, double gamma_d,
                               double t) {
  require_positive(t, "t");
  const auto c = BoundConstants::from_gamma(gamma_d);
  const double bracket = 1.0 + as_d(k + p) * as_d(p - 1) / as_d(n - 1);
  return std::exp(-as_d(n) * t * t / (c.square * as_d(k) * as_d(k) * bracket));
}

double concentration_tail_small_p(std::size_t n, std::size_t p, std::size_t k, double gamma_d,
                                  double t) {
  require_positive(t, "t");
  check_feasible(n, p, k);
  const auto c = BoundConstants::from_gamma(gamma_d);
  return std::exp(-as_d(n - p + 1) * t * t / (c.delta * c.delta * as_d(k) * as_d(k)));
}

double concentration_tail_large_p(std::size_t n, std::size_t p, std::size_t k, double gamma_d,
                                  double t) {
  require_positive(t, "t");
  check_feasible(n, p, k);
  require_large_p(n, p, "concentration_tail_large_p");
  const auto c = BoundConstants::from_gamma(gamma_d);
  const double m = as_d(n - p + 1);
  const double f = as_d(block_count(n, p));
  const double kd = as_d(k);
  const double g2 = c.gamma * c.gamma;
  const double light = m * f * t * t / (4.0 * g2 * kd * std::sqrt(kd));
  const double heavy = std::cbrt(m * f * f * t * t / (4.0 * g2 * kd * kd));
  return kE * f * std::exp(-std::min(light, heavy) / (2.0 * kE));
}

DeviationTerms deviation_terms_large_p(std::size_t n, std::size_t p, std::size_t k, double gamma_d,
                                       double x) {
  if (!(x >= 0.0)) throw InputError("x must be nonnegative");
  check_feasible(n, p, k);
  require_large_p(n, p, "deviation_terms_large_p");
  const auto c = BoundConstants::from_gamma(gamma_d);
  const double m = as_d(n - p + 1);
  const double f = as_d(block_count(n, p));
  const double kd = as_d(k);
  const double root2e = std::sqrt(2.0 * kE);
  DeviationTerms out;
  out.sub_gaussian_term = root2e * c.gamma * std::sqrt(kd * std::sqrt(kd) / (m * f)) * std::sqrt(x);
  out.heavy_term = root2e * c.gamma * 2.0 * kE * std::sqrt(kd * kd / (m * f * f)) * x * std::sqrt(x);
  out.prefactor = kE * f;
  return out;
}

double moment_bound_loo(double q, std::size_t k, std::size_t m, double gamma_d) {
  require_moment_order(q);
  if (k < 1 || k + 1 > m) throw InfeasibleError("moment_bound_loo needs 1 <= k <= m - 1");
  const auto c = BoundConstants::from_gamma(gamma_d);
  const double kd = as_d(k);
  if (q == 2.0) return c.c1_loo * kd * std::sqrt(kd) / as_d(m);
  return std::pow(c.c2 * std::sqrt(q) * kd / std::sqrt(as_d(m)), q);
}

double moment_bound_lpo(double q, std::size_t n, std::size_t p, std::size_t k, double gamma_d) {
  require_moment_order(q);
  check_feasible(n, p, k);
  const auto c = BoundConstants::from_gamma(gamma_d);
  const double kd = as_d(k);
  const double m = as_d(n - p + 1);
  if (q == 2.0) return c.c1_lpo * kd * std::sqrt(kd) / m;
  return std::pow(c.c2 * std::sqrt(kd * kd / m) * std::sqrt(q), q);
}

double moment_bound_lpo_large_p(double q, std::size_t n, std::size_t p, std::size_t k,
                                double gamma_d) {
  require_moment_order(q);
  check_feasible(n, p, k);
  require_large_p(n, p, "moment_bound_lpo_large_p");
  const auto c = BoundConstants::from_gamma(gamma_d);
  const double kd = as_d(k);
  const double m = as_d(n - p + 1);
  const double f = as_d(block_count(n, p));
  if (q == 2.0) return c.c1_lpo * kd * std::sqrt(kd) / (m * f);
  const double light = std::sqrt(kd * std::sqrt(kd) / (m * f)) * std::sqrt(q);
  const double heavy = std::sqrt(kd * kd / (m * f * f)) * q * std::sqrt(q);
  return f * std::pow(c.gamma * std::max(light, heavy), q);
}

double moment_transfer_lpo_from_loo(double q, std::size_t n, std::size_t p, double loo_moment_q,
                                    double loo_variance) {
  require_moment_order(q);
  if (p < 1 || p > n - 1) throw InfeasibleError("p must lie in [1, n - 1]");
  if (!is_large_p(n, p)) return loo_moment_q;
  const double f = as_d(block_count(n, p));
  if (q == 2.0) return loo_variance / f;
  // Symmetrized blocks zeta_i / f with E|zeta|^q <= 2^q E|h - Eh|^q and E zeta^2 = 2 Var h.
  const auto r = rosenthal_constant(q);
  const double heavy = r.heavy_weight * f * std::pow(2.0, q) * loo_moment_q / std::pow(f, q);
  const double gaussian = r.gaussian_weight * std::pow(2.0 * loo_variance / f, q / 2.0);
  return r.scale * std::max(heavy, gaussian);
}

RosenthalConstant rosenthal_constant(double q) {
  if (!(q > 2.0) || !std::isfinite(q)) throw InputError("Rosenthal constant needs q > 2");
  const double base = 2.0 * std::sqrt(2.0 * kE);
  RosenthalConstant r;
  r.scale = std::pow(base, q);
  r.heavy_weight = std::pow(q, q);
  r.gaussian_weight = std::pow(std::sqrt(q), q);
  r.scalar = std::pow(base * std::sqrt(q), q);
  return r;
}

namespace {

void check_moment_profile(std::span<const double> lambdas, std::span<const double> alphas) {
  if (lambdas.empty() || lambdas.size() != alphas.size()) {
    throw InputError("lambdas and alphas must be nonempty and of equal length");
  }
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    require_positive(lambdas[i], "lambda");
    require_positive(alphas[i], "alpha");
  }
}

}  // namespace

double tail_from_moments(double c, double q0, std::span<const double> lambdas,
                         std::span<const double> alphas, double t) {
  check_moment_profile(lambdas, alphas);
  require_positive(c, "C");
  require_positive(t, "t");
  const double count = as_d(lambdas.size());
  const double min_alpha = *std::min_element(alphas.begin(), alphas.end());
  double min_ratio = INFINITY;
  for (std::size_t j = 0; j < lambdas.size(); ++j) {
    min_ratio = std::min(min_ratio, std::pow(t / (count * lambdas[j]), 1.0 / alphas[j]));
  }
  return c * std::exp(q0 * min_alpha) * std::exp(-min_alpha * min_ratio / kE);
}

double deviation_from_moments(std::span<const double> lambdas, std::span<const double> alphas,
                              double x) {
  check_moment_profile(lambdas, alphas);
  if (!(x >= 0.0)) throw InputError("x must be nonnegative");
  const double min_alpha = *std::min_element(alphas.begin(), alphas.end());
  double total = 0.0;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    total += lambdas[i] * std::pow(kE * x / min_alpha, alphas[i]);
  }
  return total;
}

double l1o_concentration_devroye(std::size_t n, std::size_t k, double gamma_d, double eps) {
  require_positive(eps, "eps");
  require_positive(gamma_d, "gamma_d");
  return 2.0 * std::exp(-as_d(n) * eps / (gamma_d * gamma_d * as_d(k) * as_d(k)));
}

double confidence_gap_bound(std::size_t n, std::size_t p, std::size_t k, double gamma_d, double x) {
  if (!(x >= 0.0)) throw InputError("x must be nonnegative");
  check_feasible(n, p, k);
  if (is_large_p(n, p)) {
    throw RegimeError("confidence_gap_bound requires p <= n/2 + 1 (n = " + std::to_string(n) +
                      ", p = " + std::to_string(p) + ")");
  }
  const auto c = BoundConstants::from_gamma(gamma_d);
  const double kd = as_d(k);
  const double nd = as_d(n);
  const double spread = c.delta * c.delta * kd * kd * x / (nd * (1.0 - as_d(p - 1) / nd));
  return std::sqrt(spread) + bias_bound(n, p, k);
}

const BoundEntry* BoundReport::find(std::string_view id) const {
  for (const auto& e : entries) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

BoundReport evaluate_bounds(const BoundInputs& in) {
  check_feasible(in.n, in.p, in.k);
  require_positive(in.t, "t");
  require_positive(in.x, "x");
  require_moment_order(in.q);
  BoundReport report;
  report.inputs = in;
  report.constants = BoundConstants::from_gamma(in.gamma_d);

  auto add = [&](std::string id, bool probability, auto&& compute) {
    BoundEntry e;
    e.id = std::move(id);
    e.probability = probability;
    try {
      e.value = compute();
      e.clipped = probability ? std::min(e.value, 1.0) : e.value;
    } catch (const RegimeError& err) {
      e.applicable = false;
      e.note = err.what();
    } catch (const InputError& err) {
      e.applicable = false;
      e.note = err.what();
    }
    report.entries.push_back(std::move(e));
  };

  const auto [n, p, k, q, t, x, g] = in;
  const std::size_t m = n - p + 1;
  const auto rp = resampling_probs(n, p, k);
  add("resampling.p_test", true, [&] { return rp.p_test; });
  add("resampling.neighbor_sum", false, [&] { return rp.neighbor_sum; });
  add("resampling.far_rank_sum", false, [&] { return rp.far_rank_sum; });
  add("bias_bound", false, [&] { return bias_bound(n, p, k); });
  add("mse_bound", false, [&] { return mse_bound(n, p, k); });
  add("stability_bound", true, [&] { return stability_bound(n, p, k); });
  add("mcdiarmid_tail", true, [&] { return mcdiarmid_tail(n, p, k, g, t); });
  add("concentration_tail_poly", true, [&] { return concentration_tail_poly(n, p, k, g, t); });
  add("concentration_tail_small_p", true, [&] { return concentration_tail_small_p(n, p, k, g, t); });
  add("concentration_tail_large_p", true, [&] { return concentration_tail_large_p(n, p, k, g, t); });
  add("deviation_large_p.sub_gaussian_term", false,
      [&] { return deviation_terms_large_p(n, p, k, g, x).sub_gaussian_term; });
  add("deviation_large_p.heavy_term", false,
      [&] { return deviation_terms_large_p(n, p, k, g, x).heavy_term; });
  add("deviation_large_p.probability", true, [&] {
    return deviation_terms_large_p(n, p, k, g, x).prefactor * std::exp(-x);
  });
  add("l1o_concentration_devroye", true, [&] { return l1o_concentration_devroye(n, k, g, t); });
  add("moment_bound_loo.q", false, [&] {
    if (k + 1 > m) throw RegimeError("kernel size m = n - p + 1 must exceed k");
    return moment_bound_loo(q, k, m, g);
  });
  add("moment_bound_lpo.variance", false, [&] { return moment_bound_lpo(2.0, n, p, k, g); });
  add("moment_bound_lpo.q", false, [&] { return moment_bound_lpo(q, n, p, k, g); });
  add("moment_bound_lpo_large_p.variance", false,
      [&] { return moment_bound_lpo_large_p(2.0, n, p, k, g); });
  add("moment_bound_lpo_large_p.q", false, [&] { return moment_bound_lpo_large_p(q, n, p, k, g); });
  add("rosenthal_constant", false, [&] {
    if (!(q > 2.0)) throw RegimeError("Rosenthal constant is defined for q > 2");
    return rosenthal_constant(q).scalar;
  });
  add("confidence_gap_bound", false, [&] { return confidence_gap_bound(n, p, k, g, x); });
  return report;
}

}  // namespace lpocv
