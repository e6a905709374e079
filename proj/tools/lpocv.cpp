// lpocv: exact leave-p-out risk of k-NN, bounds and their Monte-Carlo checks.
//
// Exit codes: 0 ok, 1 bound violation or oracle mismatch, 2 malformed input,
// 3 infeasible parameters or enumeration cap exceeded, 4 internal error.

#include "lpocv/bounds.hpp"
#include "lpocv/csv.hpp"
#include "lpocv/errors.hpp"
#include "lpocv/lpo.hpp"
#include "lpocv/oracle.hpp"
#include "lpocv/parallel.hpp"
#include "lpocv/report.hpp"
#include "lpocv/select.hpp"
#include "lpocv/ustat.hpp"
#include "lpocv/verify.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

namespace fs = std::filesystem;
using namespace lpocv;

namespace {

enum Exit : int { kOk = 0, kViolation = 1, kBadInput = 2, kInfeasible = 3, kInternal = 4 };

struct Common {
  std::string output;
  std::string format = "table";
  unsigned workers = default_workers();
};

// Writes to a sibling temporary and renames it into place.
void write_atomic(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content << std::flush;
    return;
  }
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot open output file " + path);
    out << content;
    out.flush();
    if (!out) {
      out.close();
      fs::remove(tmp);
      throw InputError("failed writing output file " + path);
    }
  }
  fs::rename(tmp, target);
}

std::string render(const Common& common, std::string_view command, Json config, Json results,
                   const std::string& table) {
  if (common.format == "json") {
    return make_document(command, std::move(config), std::move(results)).dump(2) + "\n";
  }
  return table;
}

void add_common(CLI::App* cmd, Common& common) {
  cmd->add_option("-o,--output", common.output, "Output path (stdout when omitted)");
  cmd->add_option("--format", common.format, "Output format")
      ->check(CLI::IsMember({"table", "json"}));
  cmd->add_option("--workers", common.workers, "Worker threads (default from LPOCV_WORKERS)")
      ->check(CLI::PositiveNumber);
}

struct SpecOptions {
  std::string kind = "gaussian_mixture_1d";
  DistributionSpec spec;

  void attach(CLI::App* cmd) {
    cmd->add_option("--distribution", kind, "gaussian_mixture_1d | gaussian_mixture_md | uniform_checker_1d");
    cmd->add_option("--prior", spec.class_prior, "P(Y = 1)");
    cmd->add_option("--mean0", spec.mean0);
    cmd->add_option("--mean1", spec.mean1);
    cmd->add_option("--sd0", spec.sd0);
    cmd->add_option("--sd1", spec.sd1);
    cmd->add_option("--dimension", spec.dimension);
    cmd->add_option("--cells", spec.cells);
  }

  DistributionSpec resolve() {
    spec.kind = parse_distribution_kind(kind);
    spec.validate();
    return spec;
  }
};

// ---------------------------------------------------------------- estimate

struct EstimateArgs {
  Common common;
  std::string input;
  std::size_t k = 1;
  std::size_t p = 1;
  std::string method = "exact";
  std::size_t replicates = 10'000;
  std::uint64_t seed = 1;
};

int run_estimate(EstimateArgs& a) {
  const Dataset data = read_dataset_csv(fs::path(a.input));
  check_feasible(data.size(), a.p, a.k);

  const auto start = std::chrono::steady_clock::now();
  Json results;
  LpOEstimate est;
  std::string extra;
  if (a.method == "exact") {
    est = lpo_exact(data, a.k, a.p, ExactOptions{.workers = a.common.workers});
    results = to_json(est);
  } else if (a.method == "brute") {
    const auto bf = lpo_bruteforce(data, a.k, a.p);
    est = bf.estimate;
    results = to_json(est);
    results["numerator"] = bf.numerator;
    results["denominator"] = bf.denominator;
    results["splits"] = bf.splits;
    extra = "  exact fraction " + std::to_string(bf.numerator) + "/" + std::to_string(bf.denominator) + "\n";
  } else {
    const auto mc = incomplete_ustat_estimate(data, a.k, a.p, a.replicates, a.seed, a.common.workers);
    est = mc.estimate;
    results = to_json(mc);
    extra = "  standard error " + std::to_string(mc.standard_error) + " over " +
            std::to_string(mc.replicates) + " permutations\n";
  }
  const double ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  results["elapsed_ms"] = ms;

  char line[160];
  std::snprintf(line, sizeof line, "LpO risk (n=%zu, p=%zu, k=%zu, %s): %.6f\n", est.n, est.p, est.k,
                std::string(to_string(est.method)).c_str(), est.value);
  const std::string table = line + extra;

  Json config{{"input", a.input}, {"k", a.k}, {"p", a.p}, {"method", a.method}};
  if (a.method == "incomplete") {
    config["replicates"] = a.replicates;
    config["seed"] = a.seed;
  }
  write_atomic(a.common.output, render(a.common, "estimate", config, results, table));
  return kOk;
}

// ---------------------------------------------------------------- select

struct SelectArgs {
  Common common;
  std::string input;
  std::size_t p = 1;
  std::vector<std::size_t> k_grid;
  std::optional<double> gamma;
  double x = kDefaultConfidenceExponent;
  std::string curve_csv;
};

int run_select(SelectArgs& a) {
  const Dataset data = read_dataset_csv(fs::path(a.input));
  if (a.k_grid.empty()) throw InputError("--k-grid must not be empty");
  for (auto k : a.k_grid) check_feasible(data.size(), a.p, k);
  std::optional<double> gamma = a.gamma;
  if (!gamma && data.dimension() == 1) gamma = stone_gamma(1);

  const auto curve = select_k(data, a.p, a.k_grid, gamma, a.x, a.common.workers);
  Json config{{"input", a.input}, {"p", a.p}, {"k_grid", a.k_grid}, {"x", a.x}};
  config["gamma_d"] = gamma ? Json(*gamma) : Json(nullptr);
  const std::string out = render(a.common, "select", config, to_json(curve), format_table(curve));
  if (!a.curve_csv.empty()) write_atomic(a.curve_csv, selection_curve_csv(curve));
  write_atomic(a.common.output, out);
  return kOk;
}

// ---------------------------------------------------------------- verify

struct VerifyArgs {
  Common common;
  SpecOptions spec;
  std::size_t n = 100;
  std::size_t p = 1;
  std::size_t k = 1;
  std::size_t replicates = 1000;
  std::uint64_t seed = 1;
  std::vector<double> t_grid;
  int q_max = 4;
  std::optional<double> gamma;
  std::string risk = "auto";
  std::size_t test_size = 100'000;
  std::string tail_csv;
  std::string fault;
};

int run_verify(VerifyArgs& a) {
  CampaignConfig cfg;
  cfg.spec = a.spec.resolve();
  cfg.n = a.n;
  cfg.p = a.p;
  cfg.k = a.k;
  cfg.replicates = a.replicates;
  cfg.seed = a.seed;
  cfg.t_grid = a.t_grid;
  cfg.q_max = a.q_max;
  cfg.gamma_d = a.gamma;
  if (a.risk == "closed") cfg.risk_method = RiskMethod::closed_form_1d;
  if (a.risk == "test") cfg.risk_method = RiskMethod::test_set;
  cfg.test_size = a.test_size;
  cfg.workers = a.common.workers;
  if (a.fault == "bound-scale") cfg.bound_scale = 1e-3;
  check_feasible(cfg.n, cfg.p, cfg.k);
  if (!cfg.gamma_d) stone_gamma(cfg.spec.dim());  // fail fast when no constant is known

  const auto report = empirical_campaign(cfg);
  const std::string out =
      render(a.common, "verify", to_json(cfg), to_json(report), format_table(report));
  if (!a.tail_csv.empty()) write_atomic(a.tail_csv, tail_table_csv(report.tails));
  write_atomic(a.common.output, out);
  return report.any_violation() ? kViolation : kOk;
}

// ---------------------------------------------------------------- bounds

struct BoundsArgs {
  Common common;
  BoundInputs in;
};

int run_bounds(BoundsArgs& a) {
  const auto report = evaluate_bounds(a.in);
  const Json config{{"n", a.in.n}, {"p", a.in.p}, {"k", a.in.k}, {"q", a.in.q},
                    {"t", a.in.t}, {"x", a.in.x}, {"gamma_d", a.in.gamma_d}};
  write_atomic(a.common.output, render(a.common, "bounds", config, to_json(report), format_table(report)));
  return kOk;
}

// ---------------------------------------------------------------- oracle

struct OracleArgs {
  Common common;
  OracleSweepConfig cfg;
  std::string fault;
};

int run_oracle(OracleArgs& a) {
  a.cfg.workers = a.common.workers;
  if (a.fault == "dp-off-by-one") a.cfg.fault_rank_shift = -1;
  const auto result = run_oracle_sweep(a.cfg);

  const Json config{{"n_min", a.cfg.n_min},
                    {"n_max", a.cfg.n_max},
                    {"k_max", a.cfg.k_max},
                    {"datasets_per_dimension", a.cfg.datasets_per_dimension},
                    {"permutation_n_max", a.cfg.permutation_n_max},
                    {"seed", a.cfg.seed},
                    {"cap", a.cfg.cap},
                    {"tolerance", a.cfg.tolerance}};
  std::ostringstream table;
  table << "oracle sweep: " << result.cases << " cases, " << result.failures << " failures, max |diff| "
        << result.max_abs_discrepancy << "\n"
        << "permutation identity: " << result.permutation_cases << " cases, "
        << result.permutation_failures << " failures, max |diff| " << result.permutation_max_discrepancy
        << "\n"
        << (result.passed() ? "PASS" : "FAIL") << "\n";
  write_atomic(a.common.output, render(a.common, "oracle", config, to_json(result), table.str()));
  return result.passed() ? kOk : kViolation;
}

// ---------------------------------------------------------------- sample

struct SampleArgs {
  SpecOptions spec;
  std::size_t n = 100;
  std::uint64_t seed = 1;
  std::string output;
};

int run_sample(SampleArgs& a) {
  const Dataset data = sample_dataset(a.spec.resolve(), a.n, a.seed);
  std::ostringstream out;
  write_dataset_csv(out, data);
  write_atomic(a.output, out.str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact leave-p-out cross-validation for k-nearest neighbors"};
  app.set_version_flag("--version", std::string("lpocv ") + std::string(kVersion));
  app.require_subcommand(1);

  EstimateArgs est;
  auto* c_est = app.add_subcommand("estimate", "LpO risk of k-NN on a CSV dataset");
  add_common(c_est, est.common);
  c_est->add_option("-i,--input", est.input, "Dataset CSV")->required();
  c_est->add_option("--k", est.k)->required();
  c_est->add_option("--p", est.p)->required();
  c_est->add_option("--method", est.method)->check(CLI::IsMember({"exact", "brute", "incomplete"}));
  c_est->add_option("--replicates", est.replicates, "Permutations for --method incomplete");
  c_est->add_option("--seed", est.seed);

  SelectArgs sel;
  auto* c_sel = app.add_subcommand("select", "Choose k by minimizing the exact LpO risk");
  add_common(c_sel, sel.common);
  c_sel->add_option("-i,--input", sel.input, "Dataset CSV")->required();
  c_sel->add_option("--p", sel.p)->required();
  c_sel->add_option("--k-grid", sel.k_grid, "Comma separated k values")->delimiter(',')->required();
  c_sel->add_option("--gamma", sel.gamma, "Stone constant (defaults to 2 in one dimension)");
  c_sel->add_option("--x", sel.x, "Confidence exponent of the radius");
  c_sel->add_option("--curve-csv", sel.curve_csv, "Write k,estimate,confidence_radius table");

  VerifyArgs ver;
  auto* c_ver = app.add_subcommand("verify", "Monte-Carlo campaign against every bound");
  add_common(c_ver, ver.common);
  ver.spec.attach(c_ver);
  c_ver->add_option("--n", ver.n);
  c_ver->add_option("--p", ver.p);
  c_ver->add_option("--k", ver.k);
  c_ver->add_option("--replicates", ver.replicates);
  c_ver->add_option("--seed", ver.seed);
  c_ver->add_option("--t-grid", ver.t_grid, "Comma separated deviations")->delimiter(',');
  c_ver->add_option("--q-max", ver.q_max)->check(CLI::Range(2, 16));
  c_ver->add_option("--gamma", ver.gamma, "Stone constant (required for d >= 2)");
  c_ver->add_option("--risk", ver.risk, "Conditional risk method")
      ->check(CLI::IsMember({"auto", "closed", "test"}));
  c_ver->add_option("--test-size", ver.test_size);
  c_ver->add_option("--tail-csv", ver.tail_csv, "Write t,empirical,bound_id,bound_value table");
  c_ver->add_option("--inject-fault", ver.fault, "Harness self-test")->check(CLI::IsMember({"bound-scale"}));

  BoundsArgs bnd;
  auto* c_bnd = app.add_subcommand("bounds", "Evaluate every bound at one parameter point");
  add_common(c_bnd, bnd.common);
  c_bnd->add_option("--n", bnd.in.n)->required();
  c_bnd->add_option("--p", bnd.in.p)->required();
  c_bnd->add_option("--k", bnd.in.k)->required();
  c_bnd->add_option("--q", bnd.in.q);
  c_bnd->add_option("--t", bnd.in.t);
  c_bnd->add_option("--x", bnd.in.x);
  c_bnd->add_option("--gamma", bnd.in.gamma_d);

  OracleArgs orc;
  auto* c_orc = app.add_subcommand("oracle", "Exact recursion against split enumeration");
  add_common(c_orc, orc.common);
  c_orc->add_option("--n-min", orc.cfg.n_min);
  c_orc->add_option("--n-max", orc.cfg.n_max);
  c_orc->add_option("--k-max", orc.cfg.k_max);
  c_orc->add_option("--datasets", orc.cfg.datasets_per_dimension);
  c_orc->add_option("--permutation-n-max", orc.cfg.permutation_n_max);
  c_orc->add_option("--seed", orc.cfg.seed);
  c_orc->add_option("--cap", orc.cfg.cap, "Largest C(n, p) to enumerate");
  c_orc->add_option("--inject-fault", orc.fault, "Harness self-test")
      ->check(CLI::IsMember({"dp-off-by-one"}));

  SampleArgs smp;
  auto* c_smp = app.add_subcommand("sample", "Write a synthetic dataset as CSV");
  smp.spec.attach(c_smp);
  c_smp->add_option("--n", smp.n);
  c_smp->add_option("--seed", smp.seed);
  c_smp->add_option("-o,--output", smp.output);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kBadInput;
  }

  try {
    if (*c_est) return run_estimate(est);
    if (*c_sel) return run_select(sel);
    if (*c_ver) return run_verify(ver);
    if (*c_bnd) return run_bounds(bnd);
    if (*c_orc) return run_oracle(orc);
    if (*c_smp) return run_sample(smp);
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kInfeasible;
  } catch (const CapExceededError& e) {
    std::cerr << "cap exceeded: " << e.what() << "\n";
    return kInfeasible;
  } catch (const RegimeError& e) {
    std::cerr << "out of regime: " << e.what() << "\n";
    return kInfeasible;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kBadInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInternal;
  }
  return kInternal;
}
