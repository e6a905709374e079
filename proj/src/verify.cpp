#include "lpocv/verify.hpp"

#include "lpocv/bounds.hpp"
#include "lpocv/errors.hpp"
#include "lpocv/lpo.hpp"
#include "lpocv/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace lpocv {

std::string_view to_string(DistributionKind kind) {
  switch (kind) {
    case DistributionKind::gaussian_mixture_1d: return "gaussian_mixture_1d";
    case DistributionKind::gaussian_mixture_md: return "gaussian_mixture_md";
    case DistributionKind::uniform_checker_1d: return "uniform_checker_1d";
  }
  return "unknown";
}

DistributionKind parse_distribution_kind(std::string_view name) {
  if (name == "gaussian_mixture_1d") return DistributionKind::gaussian_mixture_1d;
  if (name == "gaussian_mixture_md") return DistributionKind::gaussian_mixture_md;
  if (name == "uniform_checker_1d") return DistributionKind::uniform_checker_1d;
  throw InputError("unknown distribution kind '" + std::string(name) + "'");
}

void DistributionSpec::validate() const {
  if (!(class_prior > 0.0 && class_prior < 1.0)) throw InputError("class_prior must lie in (0,1)");
  switch (kind) {
    case DistributionKind::gaussian_mixture_1d:
    case DistributionKind::gaussian_mixture_md:
      if (!(sd0 > 0.0) || !(sd1 > 0.0)) throw InputError("class scales must be positive");
      if (!std::isfinite(mean0) || !std::isfinite(mean1)) throw InputError("class means must be finite");
      if (kind == DistributionKind::gaussian_mixture_md && dimension < 1) {
        throw InputError("dimension must be at least 1");
      }
      break;
    case DistributionKind::uniform_checker_1d:
      if (cells < 2) throw InputError("checker needs at least 2 cells");
      break;
  }
}

std::size_t DistributionSpec::dim() const {
  return kind == DistributionKind::gaussian_mixture_md ? dimension : 1;
}

namespace {

double normal_cdf(double x, double mean, double sd) {
  return 0.5 * std::erfc(-(x - mean) / (sd * std::sqrt(2.0)));
}

double normal_pdf(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * 3.14159265358979323846));
}

// Measure of [0, x] covered by cells of the given parity, cell j = [j/c, (j+1)/c).
double checker_measure(std::size_t cells, std::size_t parity, double x) {
  const double c = static_cast<double>(cells);
  const double clipped = std::clamp(x, 0.0, 1.0);
  const double scaled = clipped * c;
  const auto whole = static_cast<std::size_t>(std::floor(scaled));
  double measure = 0.0;
  for (std::size_t j = 0; j < std::min(whole, cells); ++j) {
    if (j % 2 == parity) measure += 1.0 / c;
  }
  if (whole < cells && whole % 2 == parity) measure += (scaled - static_cast<double>(whole)) / c;
  return measure;
}

double checker_total(std::size_t cells, std::size_t parity) {
  return checker_measure(cells, parity, 1.0);
}

}  // namespace

double DistributionSpec::eta(double x) const {
  switch (kind) {
    case DistributionKind::gaussian_mixture_1d: {
      const double f1 = class_prior * normal_pdf(x, mean1, sd1);
      const double f0 = (1.0 - class_prior) * normal_pdf(x, mean0, sd0);
      return f1 + f0 > 0.0 ? f1 / (f1 + f0) : (x > 0.5 * (mean0 + mean1) ? 1.0 : 0.0);
    }
    case DistributionKind::uniform_checker_1d: {
      if (x < 0.0 || x >= 1.0) return class_prior;
      const auto cell = static_cast<std::size_t>(std::floor(x * static_cast<double>(cells)));
      return cell % 2 == 1 ? 1.0 : 0.0;
    }
    case DistributionKind::gaussian_mixture_md: break;
  }
  throw InputError("eta is only available in closed form for 1-d kinds");
}

double DistributionSpec::class_cdf(Label y, double x) const {
  switch (kind) {
    case DistributionKind::gaussian_mixture_1d:
    case DistributionKind::gaussian_mixture_md:
      return y == 1 ? normal_cdf(x, mean1, sd1) : normal_cdf(x, mean0, sd0);
    case DistributionKind::uniform_checker_1d: {
      const std::size_t parity = y == 1 ? 1 : 0;
      return checker_measure(cells, parity, x) / checker_total(cells, parity);
    }
  }
  return 0.0;
}

LabeledPoint sample_point(const DistributionSpec& spec, Rng& rng) {
  LabeledPoint pt;
  pt.label = rng.bernoulli(spec.class_prior) ? 1 : 0;
  switch (spec.kind) {
    case DistributionKind::gaussian_mixture_1d:
    case DistributionKind::gaussian_mixture_md: {
      const std::size_t d = spec.dim();
      const double mean = pt.label == 1 ? spec.mean1 : spec.mean0;
      const double sd = pt.label == 1 ? spec.sd1 : spec.sd0;
      pt.features.resize(static_cast<Eigen::Index>(d));
      for (std::size_t c = 0; c < d; ++c) {
        pt.features(static_cast<Eigen::Index>(c)) = (c == 0 ? mean : 0.0) + sd * rng.normal();
      }
      break;
    }
    case DistributionKind::uniform_checker_1d: {
      // pick one of the cells with the label's parity uniformly, then a point inside it
      const std::size_t parity = pt.label == 1 ? 1 : 0;
      const std::size_t available = (spec.cells + 1 - parity) / 2;
      const std::size_t cell = 2 * static_cast<std::size_t>(rng.below(available)) + parity;
      pt.features.resize(1);
      pt.features(0) = (static_cast<double>(cell) + rng.uniform()) / static_cast<double>(spec.cells);
      break;
    }
  }
  return pt;
}

Dataset sample_dataset(const DistributionSpec& spec, std::size_t n, std::uint64_t seed) {
  spec.validate();
  if (n < 2) throw InputError("sample size must be at least 2");
  Rng rng(seed);
  std::vector<LabeledPoint> points;
  points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) points.push_back(sample_point(spec, rng));
  return Dataset::from_points(points);
}

namespace {

double closed_form_error_1d(const Dataset& dataset, std::size_t k, const DistributionSpec& spec) {
  const std::size_t n = dataset.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  const auto& x = dataset.features();
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const double xa = x(static_cast<Eigen::Index>(a), 0);
    const double xb = x(static_cast<Eigen::Index>(b), 0);
    return xa < xb || (xa == xb && a < b);
  });
  auto s = [&](std::size_t r) { return x(static_cast<Eigen::Index>(idx[r]), 0); };

  std::size_t ones = 0;
  for (std::size_t r = 0; r < k; ++r) ones += static_cast<std::size_t>(dataset.label(idx[r]));

  const double prior1 = spec.class_prior;
  const double prior0 = 1.0 - prior1;
  double lo = -std::numeric_limits<double>::infinity();
  double error = 0.0;
  for (std::size_t a = 0; a + k <= n; ++a) {
    const double hi = a + k < n ? 0.5 * (s(a) + s(a + k)) : std::numeric_limits<double>::infinity();
    const bool predict_one = majority_vote(ones, k);
    const Label wrong = predict_one ? 0 : 1;
    const double mass = spec.class_cdf(wrong, hi) - spec.class_cdf(wrong, lo);
    error += (wrong == 1 ? prior1 : prior0) * mass;
    if (a + k < n) {
      ones += static_cast<std::size_t>(dataset.label(idx[a + k]));
      ones -= static_cast<std::size_t>(dataset.label(idx[a]));
    }
    lo = hi;
  }
  return error;
}

double test_set_error(const Dataset& dataset, std::size_t k, const DistributionSpec& spec,
                      std::size_t test_size, std::uint64_t seed) {
  if (test_size == 0) throw InputError("test set size must be positive");
  Rng rng(seed);
  std::size_t wrong = 0;
  for (std::size_t t = 0; t < test_size; ++t) {
    const auto pt = sample_point(spec, rng);
    if (knn_predict(dataset, dataset.size(), pt.features, k) != pt.label) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(test_size);
}

}  // namespace

double conditional_error(const Dataset& dataset, std::size_t k, const DistributionSpec& spec,
                         const RiskOptions& options) {
  spec.validate();
  if (k < 1 || k > dataset.size()) throw InfeasibleError("k must lie in [1, n]");
  if (dataset.dimension() != spec.dim()) throw InputError("dataset and spec dimensions differ");
  if (options.method == RiskMethod::closed_form_1d) {
    if (spec.dim() != 1) throw InputError("closed-form conditional error needs a 1-d spec");
    return closed_form_error_1d(dataset, k, spec);
  }
  return test_set_error(dataset, k, spec, options.test_size, options.test_seed);
}

std::size_t stone_counter(const NeighborTable& table, std::size_t k) {
  const std::size_t n = table.size();
  if (k < 1 || k > n - 1) throw InfeasibleError("stone_counter needs 1 <= k <= n - 1");
  std::vector<std::size_t> indegree(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = table.row(i);
    for (std::size_t r = 0; r < k; ++r) ++indegree[static_cast<std::size_t>(row[r])];
  }
  return *std::max_element(indegree.begin(), indegree.end());
}

std::size_t stone_counter(const Dataset& dataset, std::size_t k) {
  return stone_counter(build_neighbor_table(dataset), k);
}

namespace {

constexpr std::uint64_t kDataStream = 0;
constexpr std::uint64_t kTestStream = 1;
constexpr std::uint64_t kQueryStream = 2;

std::uint64_t stream_seed(std::uint64_t master, std::size_t replicate, std::uint64_t role) {
  return derive_seed(master, 4 * static_cast<std::uint64_t>(replicate) + role);
}

bool disagree_at_query(const Dataset& data, std::size_t p, std::size_t k,
                       const DistributionSpec& spec, std::uint64_t seed) {
  Rng rng(seed);
  const auto query = sample_point(spec, rng);
  return knn_predict(data, data.size(), query.features, k) !=
         knn_predict(data, data.size() - p, query.features, k);
}

struct Moments {
  double mean = 0.0;
  double sd = 0.0;
};

Moments moments_of(const std::vector<double>& v) {
  const double count = static_cast<double>(v.size());
  double sum = 0.0;
  for (const double x : v) sum += x;
  const double mean = sum / count;
  double ss = 0.0;
  for (const double x : v) ss += (x - mean) * (x - mean);
  return {mean, v.size() > 1 ? std::sqrt(ss / (count - 1.0)) : 0.0};
}

double binomial_se(double freq, std::size_t count) {
  return std::sqrt(freq * (1.0 - freq) / static_cast<double>(count));
}

BoundCheck make_check(std::string id, double empirical, double se, double bound, double tol_factor = 3.0) {
  BoundCheck c;
  c.id = std::move(id);
  c.empirical = empirical;
  c.standard_error = se;
  c.bound = bound;
  c.tolerance = tol_factor * se;
  c.slack_ratio = empirical != 0.0 ? bound / std::abs(empirical) : std::numeric_limits<double>::infinity();
  c.violated = empirical > bound + c.tolerance;
  return c;
}

double resolve_gamma(const CampaignConfig& cfg) { return stone_gamma(cfg.spec.dim(), cfg.gamma_d); }

void validate_campaign(const CampaignConfig& cfg, std::size_t min_replicates) {
  cfg.spec.validate();
  check_feasible(cfg.n, cfg.p, cfg.k);
  if (cfg.replicates < min_replicates) {
    throw InputError("campaign needs at least " + std::to_string(min_replicates) + " replicates");
  }
  if (cfg.q_max < 2) throw InputError("q_max must be at least 2");
  for (const double t : cfg.t_grid) {
    if (!(t > 0.0)) throw InputError("t-grid values must be positive");
  }
}

std::vector<double> resolve_t_grid(const CampaignConfig& cfg, const std::vector<double>& estimates,
                                   double mean) {
  if (!cfg.t_grid.empty()) {
    auto grid = cfg.t_grid;
    std::sort(grid.begin(), grid.end());
    return grid;
  }
  double widest = 0.0;
  for (const double v : estimates) widest = std::max(widest, std::abs(v - mean));
  const double top = widest > 0.0 ? 1.1 * widest : 0.01;
  std::vector<double> grid(25);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid[i] = top * static_cast<double>(i + 1) / static_cast<double>(grid.size());
  }
  return grid;
}

std::vector<TailRow> build_tails(const CampaignConfig& cfg, double gamma_d,
                                 const std::vector<double>& estimates, double mean) {
  const auto grid = resolve_t_grid(cfg, estimates, mean);
  const std::size_t count = estimates.size();
  const bool large = is_large_p(cfg.n, cfg.p);
  std::vector<TailRow> rows;
  rows.reserve(grid.size());
  for (const double t : grid) {
    TailRow row;
    row.t = t;
    std::size_t exceed = 0;
    for (const double v : estimates) exceed += std::abs(v - mean) > t ? 1 : 0;
    row.empirical = static_cast<double>(exceed) / static_cast<double>(count);
    row.standard_error = binomial_se(row.empirical, count);
    const double s = cfg.bound_scale;
    row.envelopes.push_back({"mcdiarmid_tail", s * mcdiarmid_tail(cfg.n, cfg.p, cfg.k, gamma_d, t)});
    // one-sided envelopes, doubled for the two-sided frequency
    row.envelopes.push_back(
        {"concentration_tail_poly", s * 2.0 * concentration_tail_poly(cfg.n, cfg.p, cfg.k, gamma_d, t)});
    row.envelopes.push_back(
        {"concentration_tail_small_p", s * 2.0 * concentration_tail_small_p(cfg.n, cfg.p, cfg.k, gamma_d, t)});
    if (large) {
      row.envelopes.push_back(
          {"concentration_tail_large_p", s * concentration_tail_large_p(cfg.n, cfg.p, cfg.k, gamma_d, t)});
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void add_tail_checks(const std::vector<TailRow>& rows, std::vector<BoundCheck>& checks) {
  if (rows.empty()) return;
  for (std::size_t e = 0; e < rows.front().envelopes.size(); ++e) {
    // report the grid point closest to violation
    BoundCheck worst;
    bool have = false;
    for (const auto& row : rows) {
      auto c = make_check("tail." + rows.front().envelopes[e].bound_id, row.empirical,
                          row.standard_error, row.envelopes[e].value);
      const double margin = c.bound + c.tolerance - c.empirical;
      const double worst_margin = worst.bound + worst.tolerance - worst.empirical;
      if (!have || margin < worst_margin) {
        worst = c;
        have = true;
      }
    }
    checks.push_back(worst);
  }
}

}  // namespace

StabilityResult stability_experiment(const DistributionSpec& spec, std::size_t n, std::size_t p,
                                     std::size_t k, std::size_t replicates, std::uint64_t seed,
                                     unsigned workers) {
  spec.validate();
  check_feasible(n, p, k);
  if (replicates < 1) throw InputError("stability experiment needs at least 1 replicate");
  std::vector<std::uint8_t> flags(replicates);
  parallel_for(replicates, workers, [&](std::size_t r) {
    const auto data = sample_dataset(spec, n, stream_seed(seed, r, kDataStream));
    flags[r] = disagree_at_query(data, p, k, spec, stream_seed(seed, r, kQueryStream)) ? 1 : 0;
  });
  const auto hits = std::accumulate(flags.begin(), flags.end(), std::size_t{0});
  StabilityResult out;
  out.replicates = replicates;
  out.frequency = static_cast<double>(hits) / static_cast<double>(replicates);
  out.standard_error = binomial_se(out.frequency, replicates);
  out.bound = stability_bound(n, p, k);
  return out;
}

bool ReplicationReport::any_violation() const {
  return std::any_of(checks.begin(), checks.end(), [](const BoundCheck& c) { return c.violated; });
}

ReplicationReport empirical_campaign(const CampaignConfig& cfg) {
  validate_campaign(cfg, 100);
  const double gamma_d = resolve_gamma(cfg);
  const RiskMethod risk = cfg.risk_method.value_or(cfg.spec.dim() == 1 ? RiskMethod::closed_form_1d
                                                                       : RiskMethod::test_set);
  const std::size_t count = cfg.replicates;

  std::vector<double> estimate(count), error(count);
  std::vector<std::uint8_t> disagree(count);
  std::vector<std::size_t> stone(count);
  parallel_for(count, cfg.workers, [&](std::size_t r) {
    const auto data = sample_dataset(cfg.spec, cfg.n, stream_seed(cfg.seed, r, kDataStream));
    const auto table = build_neighbor_table(data);
    estimate[r] = lpo_exact(table, data.labels(), cfg.k, cfg.p).value;
    RiskOptions ro;
    ro.method = risk;
    ro.test_size = cfg.test_size;
    ro.test_seed = stream_seed(cfg.seed, r, kTestStream);
    error[r] = conditional_error(data, cfg.k, cfg.spec, ro);
    disagree[r] = disagree_at_query(data, cfg.p, cfg.k, cfg.spec, stream_seed(cfg.seed, r, kQueryStream)) ? 1 : 0;
    stone[r] = stone_counter(table, cfg.k);
  });

  ReplicationReport rep;
  rep.config = cfg;
  rep.gamma_d = gamma_d;
  rep.replicates = count;
  const auto est = moments_of(estimate);
  rep.mean_estimate = est.mean;
  rep.mean_error = moments_of(error).mean;
  const double s = cfg.bound_scale;
  const double root_count = std::sqrt(static_cast<double>(count));

  // central moments
  rep.central_moments.assign(static_cast<std::size_t>(cfg.q_max), 0.0);
  std::vector<std::vector<double>> powers(static_cast<std::size_t>(cfg.q_max), std::vector<double>(count));
  for (std::size_t r = 0; r < count; ++r) {
    const double dev = estimate[r] - est.mean;
    powers[0][r] = dev;
    for (int q = 2; q <= cfg.q_max; ++q) powers[static_cast<std::size_t>(q - 1)][r] = std::pow(std::abs(dev), q);
  }
  std::vector<Moments> power_moments;
  for (std::size_t q = 0; q < powers.size(); ++q) {
    power_moments.push_back(moments_of(powers[q]));
    rep.central_moments[q] = power_moments.back().mean;
  }
  // sample variance with its delta-method SE sqrt((m4 - m2^2) / B)
  const double m2 = rep.central_moments[1];
  double m4 = 0.0;
  for (const double dev : powers[0]) m4 += dev * dev * dev * dev;
  m4 /= static_cast<double>(count);
  const double variance = m2 * static_cast<double>(count) / static_cast<double>(count - 1);
  const double variance_se = std::sqrt(std::max(m4 - m2 * m2, 0.0) / static_cast<double>(count));

  std::vector<double> gap(count), gap_sq(count);
  for (std::size_t r = 0; r < count; ++r) {
    gap[r] = estimate[r] - error[r];
    gap_sq[r] = gap[r] * gap[r];
  }
  const auto gm = moments_of(gap);
  const auto gsm = moments_of(gap_sq);
  rep.bias = gm.mean;
  rep.bias_se = gm.sd / root_count;
  rep.mse = gsm.mean;
  rep.mse_se = gsm.sd / root_count;
  const auto hits = std::accumulate(disagree.begin(), disagree.end(), std::size_t{0});
  rep.stability_frequency = static_cast<double>(hits) / static_cast<double>(count);
  rep.stone_max = *std::max_element(stone.begin(), stone.end());

  auto& checks = rep.checks;
  {
    // the signed first central moment must vanish; tolerance 4 SE plus rounding
    auto c = make_check("first_central_moment", std::abs(rep.central_moments[0]), power_moments[0].sd / root_count,
                        0.0, 4.0);
    c.tolerance += 1e-12;
    c.violated = c.empirical > c.bound + c.tolerance;
    checks.push_back(c);
  }
  checks.push_back(make_check("bias_bound", std::abs(rep.bias), rep.bias_se, s * bias_bound(cfg.n, cfg.p, cfg.k)));
  checks.push_back(make_check("mse_bound", rep.mse, rep.mse_se, s * mse_bound(cfg.n, cfg.p, cfg.k)));
  checks.push_back(make_check("moment_bound_lpo.q2", variance, variance_se,
                              s * moment_bound_lpo(2.0, cfg.n, cfg.p, cfg.k, gamma_d)));
  for (int q = 3; q <= cfg.q_max; ++q) {
    const auto& pm = power_moments[static_cast<std::size_t>(q - 1)];
    checks.push_back(make_check("moment_bound_lpo.q" + std::to_string(q), pm.mean, pm.sd / root_count,
                                s * moment_bound_lpo(q, cfg.n, cfg.p, cfg.k, gamma_d)));
  }
  if (is_large_p(cfg.n, cfg.p)) {
    checks.push_back(make_check("moment_bound_lpo_large_p.q2", variance, variance_se,
                                s * moment_bound_lpo_large_p(2.0, cfg.n, cfg.p, cfg.k, gamma_d)));
    for (int q = 3; q <= cfg.q_max; ++q) {
      const auto& pm = power_moments[static_cast<std::size_t>(q - 1)];
      checks.push_back(make_check("moment_bound_lpo_large_p.q" + std::to_string(q), pm.mean,
                                  pm.sd / root_count,
                                  s * moment_bound_lpo_large_p(q, cfg.n, cfg.p, cfg.k, gamma_d)));
    }
  }
  checks.push_back(make_check("stability_bound", rep.stability_frequency,
                              binomial_se(rep.stability_frequency, count),
                              s * stability_bound(cfg.n, cfg.p, cfg.k)));
  checks.push_back(make_check("stone_ceiling", static_cast<double>(rep.stone_max), 0.0,
                              s * static_cast<double>(cfg.k) * gamma_d));

  rep.tails = build_tails(cfg, gamma_d, estimate, est.mean);
  add_tail_checks(rep.tails, checks);
  return rep;
}

std::vector<TailRow> tail_experiment(const CampaignConfig& cfg) {
  validate_campaign(cfg, 1);
  const double gamma_d = resolve_gamma(cfg);
  std::vector<double> estimate(cfg.replicates);
  parallel_for(cfg.replicates, cfg.workers, [&](std::size_t r) {
    const auto data = sample_dataset(cfg.spec, cfg.n, stream_seed(cfg.seed, r, kDataStream));
    estimate[r] = lpo_exact(data, cfg.k, cfg.p).value;
  });
  return build_tails(cfg, gamma_d, estimate, moments_of(estimate).mean);
}

}  // namespace lpocv
