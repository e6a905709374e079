#pragma once

#include "lpocv/dataset.hpp"
#include "lpocv/neighbors.hpp"
#include "lpocv/random.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lpocv {

enum class DistributionKind { gaussian_mixture_1d, gaussian_mixture_md, uniform_checker_1d };

std::string_view to_string(DistributionKind kind);
DistributionKind parse_distribution_kind(std::string_view name);

/// Synthetic binary classification problem.
///
/// Gaussian kinds: Y ~ Bernoulli(class_prior), X | Y = y ~ N(mean_y e_1, sd_y^2 I_d)
/// (only the first coordinate separates the classes in the md kind).
/// uniform_checker_1d: [0,1] is cut into `cells` equal cells; X | Y = 1 is
/// uniform on the odd cells and X | Y = 0 on the even cells, so the classes
/// have disjoint supports.
struct DistributionSpec {
  DistributionKind kind = DistributionKind::gaussian_mixture_1d;
  double class_prior = 0.5;
  double mean0 = -1.0;
  double mean1 = 1.0;
  double sd0 = 1.0;
  double sd1 = 1.0;
  std::size_t dimension = 1;
  std::size_t cells = 4;

  void validate() const;
  std::size_t dim() const;
  /// P(Y = 1 | X = x) for the 1-d kinds.
  double eta(double x) const;
  /// Class-conditional CDF of the first coordinate.
  double class_cdf(Label y, double x) const;
};

Dataset sample_dataset(const DistributionSpec& spec, std::size_t n, std::uint64_t seed);
LabeledPoint sample_point(const DistributionSpec& spec, Rng& rng);

enum class RiskMethod { closed_form_1d, test_set };

struct RiskOptions {
  RiskMethod method = RiskMethod::closed_form_1d;
  std::size_t test_size = 100'000;
  std::uint64_t test_seed = 0;
};

/// L(f_k) = P(f_k(X) != Y | sample) of the k-NN rule fitted on `dataset`.
///
/// closed_form_1d integrates the class densities over the decision regions;
/// in 1-d the k-neighborhood of a query is a window of consecutive sorted
/// training points, so regions are delimited by the midpoints
/// (s_a + s_{a+k}) / 2. test_set uses a fresh independent sample instead.
double conditional_error(const Dataset& dataset, std::size_t k, const DistributionSpec& spec,
                         const RiskOptions& options = {});

/// max_j #{i != j : j among the k nearest neighbors of i}.
std::size_t stone_counter(const NeighborTable& table, std::size_t k);
std::size_t stone_counter(const Dataset& dataset, std::size_t k);

struct StabilityResult {
  double frequency = 0.0;
  double standard_error = 0.0;
  double bound = 0.0;
  std::size_t replicates = 0;
};

/// Frequency with which the fits on all n points and on the first n - p
/// points disagree at an independent query point.
StabilityResult stability_experiment(const DistributionSpec& spec, std::size_t n, std::size_t p,
                                     std::size_t k, std::size_t replicates, std::uint64_t seed,
                                     unsigned workers = 1);

struct CampaignConfig {
  DistributionSpec spec;
  std::size_t n = 100;
  std::size_t p = 1;
  std::size_t k = 1;
  std::size_t replicates = 1000;
  std::vector<double> t_grid;  // empty: 25 points up to 1.1 x the largest observed deviation
  int q_max = 4;
  std::uint64_t seed = 1;
  std::optional<double> gamma_d;  // defaults to stone_gamma(d)
  std::optional<RiskMethod> risk_method;  // defaults to closed form in 1-d, test set otherwise
  std::size_t test_size = 100'000;
  unsigned workers = 1;
  /// Multiplies every envelope before comparison. Harness self-test only.
  double bound_scale = 1.0;
};

struct Envelope {
  std::string bound_id;
  double value = 0.0;  // compared value (already multiplied by the two-sided factor)
};

struct TailRow {
  double t = 0.0;
  double empirical = 0.0;
  double standard_error = 0.0;
  std::vector<Envelope> envelopes;
};

struct BoundCheck {
  std::string id;
  double empirical = 0.0;
  double standard_error = 0.0;
  double bound = 0.0;
  double tolerance = 0.0;  // allowed excess over the bound
  double slack_ratio = 0.0;  // bound / empirical (inf when empirical == 0)
  bool violated = false;
};

struct ReplicationReport {
  CampaignConfig config;
  double gamma_d = 0.0;
  std::size_t replicates = 0;
  double mean_estimate = 0.0;
  double mean_error = 0.0;  // mean L(f_k)
  /// Absolute central moments E|R - mean R|^q for q = 1 .. q_max (index q - 1),
  /// except entry 0 which is the signed first central moment.
  std::vector<double> central_moments;
  double bias = 0.0;
  double bias_se = 0.0;
  double mse = 0.0;
  double mse_se = 0.0;
  double stability_frequency = 0.0;
  std::size_t stone_max = 0;
  std::vector<TailRow> tails;
  std::vector<BoundCheck> checks;

  bool any_violation() const;
};

/// Fresh dataset per replicate, exact LpO value and conditional error, then
/// every measurable left-hand side compared with its envelope + 3 SE.
///
/// Replicate r draws its data from stream 4r, its test set from 4r+1 and its
/// stability query from 4r+2 of derive_seed(config.seed, .).
ReplicationReport empirical_campaign(const CampaignConfig& config);

/// Tail table only (no conditional error evaluation).
std::vector<TailRow> tail_experiment(const CampaignConfig& config);

}  // namespace lpocv
