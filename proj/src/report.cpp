#include "lpocv/report.hpp"

#include <cstdio>
#include <sstream>

namespace lpocv {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string_view to_string(RiskMethod m) {
  return m == RiskMethod::closed_form_1d ? "closed_form_1d" : "test_set";
}

}  // namespace

Json to_json(const LpOEstimate& e) {
  return {{"value", e.value}, {"n", e.n}, {"p", e.p}, {"k", e.k}, {"method", to_string(e.method)}};
}

Json to_json(const IncompleteUStatEstimate& e) {
  auto j = to_json(e.estimate);
  j["standard_error"] = e.standard_error;
  j["replicates"] = e.replicates;
  j["seed"] = e.seed;
  return j;
}

Json to_json(const BoundReport& r) {
  Json entries = Json::array();
  for (const auto& e : r.entries) {
    Json j{{"bound_id", e.id}, {"applicable", e.applicable}};
    if (e.applicable) {
      j["value"] = e.value;
      if (e.probability) j["clipped"] = e.clipped;
    } else {
      j["note"] = e.note;
    }
    entries.push_back(std::move(j));
  }
  const auto& c = r.constants;
  return {{"inputs",
           {{"n", r.inputs.n}, {"p", r.inputs.p}, {"k", r.inputs.k}, {"q", r.inputs.q}, {"t", r.inputs.t},
            {"x", r.inputs.x}, {"gamma_d", r.inputs.gamma_d}, {"kappa", kKappa}}},
          {"constants",
           {{"c1_loo", c.c1_loo}, {"c2", c.c2}, {"c1_lpo", c.c1_lpo}, {"delta", c.delta},
            {"gamma", c.gamma}, {"square", c.square}}},
          {"bounds", std::move(entries)}};
}

Json to_json(const DistributionSpec& s) {
  Json j{{"kind", to_string(s.kind)}, {"class_prior", s.class_prior}};
  if (s.kind == DistributionKind::uniform_checker_1d) {
    j["cells"] = s.cells;
  } else {
    j["mean0"] = s.mean0;
    j["mean1"] = s.mean1;
    j["sd0"] = s.sd0;
    j["sd1"] = s.sd1;
  }
  j["dimension"] = s.dim();
  return j;
}

Json to_json(const CampaignConfig& c) {
  Json j{{"spec", to_json(c.spec)}, {"n", c.n}, {"p", c.p}, {"k", c.k}, {"replicates", c.replicates},
         {"q_max", c.q_max}, {"seed", c.seed}, {"t_grid", c.t_grid}};
  j["gamma_d"] = c.gamma_d ? Json(*c.gamma_d) : Json(nullptr);
  j["risk_method"] = c.risk_method ? Json(to_string(*c.risk_method)) : Json("auto");
  j["test_size"] = c.test_size;
  if (c.bound_scale != 1.0) j["bound_scale"] = c.bound_scale;
  return j;
}

Json to_json(const ReplicationReport& r) {
  Json checks = Json::array();
  for (const auto& c : r.checks) {
    checks.push_back({{"id", c.id}, {"empirical", c.empirical}, {"standard_error", c.standard_error},
                      {"bound", c.bound}, {"tolerance", c.tolerance}, {"slack_ratio", c.slack_ratio},
                      {"violated", c.violated}});
  }
  Json tails = Json::array();
  for (const auto& row : r.tails) {
    Json env = Json::object();
    for (const auto& e : row.envelopes) env[e.bound_id] = e.value;
    tails.push_back({{"t", row.t}, {"empirical", row.empirical}, {"standard_error", row.standard_error},
                     {"envelopes", std::move(env)}});
  }
  return {{"gamma_d", r.gamma_d},
          {"replicates", r.replicates},
          {"mean_estimate", r.mean_estimate},
          {"mean_conditional_error", r.mean_error},
          {"central_moments", r.central_moments},
          {"bias", r.bias},
          {"bias_se", r.bias_se},
          {"mse", r.mse},
          {"mse_se", r.mse_se},
          {"stability_frequency", r.stability_frequency},
          {"stone_max", r.stone_max},
          {"violations", r.any_violation()},
          {"checks", std::move(checks)},
          {"tails", std::move(tails)}};
}

Json to_json(const StabilityResult& r) {
  return {{"frequency", r.frequency}, {"standard_error", r.standard_error}, {"bound", r.bound},
          {"replicates", r.replicates}};
}

Json to_json(const SelectionCurve& c) {
  Json rows = Json::array();
  for (std::size_t g = 0; g < c.grid.size(); ++g) {
    Json row{{"k", c.grid[g]}, {"estimate", c.estimates[g].value}};
    row["confidence_radius"] = c.confidence_radius[g] ? Json(*c.confidence_radius[g]) : Json(nullptr);
    rows.push_back(std::move(row));
  }
  return {{"p", c.p}, {"chosen_k", c.chosen_k}, {"confidence_exponent", c.confidence_exponent},
          {"curve", std::move(rows)}};
}

Json to_json(const OracleSweepResult& r) {
  return {{"cases", r.cases},
          {"failures", r.failures},
          {"max_abs_discrepancy", r.max_abs_discrepancy},
          {"permutation_cases", r.permutation_cases},
          {"permutation_failures", r.permutation_failures},
          {"permutation_max_discrepancy", r.permutation_max_discrepancy},
          {"passed", r.passed()}};
}

Json make_document(std::string_view command, Json config, Json results) {
  return {{"tool", "lpocv"},
          {"version", kVersion},
          {"command", command},
          {"config", std::move(config)},
          {"results", std::move(results)}};
}

std::string tail_table_csv(const std::vector<TailRow>& rows) {
  std::ostringstream out;
  out << "t,empirical,bound_id,bound_value\n";
  for (const auto& row : rows) {
    for (const auto& e : row.envelopes) {
      out << fmt(row.t) << ',' << fmt(row.empirical) << ',' << e.bound_id << ',' << fmt(e.value) << '\n';
    }
  }
  return out.str();
}

std::string selection_curve_csv(const SelectionCurve& curve) {
  std::ostringstream out;
  out << "k,estimate,confidence_radius\n";
  for (std::size_t g = 0; g < curve.grid.size(); ++g) {
    out << curve.grid[g] << ',' << fmt(curve.estimates[g].value) << ',';
    if (curve.confidence_radius[g]) out << fmt(*curve.confidence_radius[g]);
    out << '\n';
  }
  return out.str();
}

std::string format_table(const BoundReport& r) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "bounds at n=%zu p=%zu k=%zu q=%g t=%g x=%g gamma_d=%g\n", r.inputs.n,
                r.inputs.p, r.inputs.k, r.inputs.q, r.inputs.t, r.inputs.x, r.inputs.gamma_d);
  out << line;
  for (const auto& e : r.entries) {
    if (e.applicable) {
      std::snprintf(line, sizeof line, "  %-38s %s%s\n", e.id.c_str(), fmt(e.value).c_str(),
                    e.probability && e.value > 1.0 ? "  (clipped 1)" : "");
    } else {
      std::snprintf(line, sizeof line, "  %-38s out of regime\n", e.id.c_str());
    }
    out << line;
  }
  return out.str();
}

std::string format_table(const ReplicationReport& r) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "campaign n=%zu p=%zu k=%zu replicates=%zu gamma_d=%g\n", r.config.n,
                r.config.p, r.config.k, r.replicates, r.gamma_d);
  out << line;
  std::snprintf(line, sizeof line, "  mean LpO %.6f  mean L %.6f  bias %.6f  mse %.6f  stone max %zu\n",
                r.mean_estimate, r.mean_error, r.bias, r.mse, r.stone_max);
  out << line;
  for (const auto& c : r.checks) {
    std::snprintf(line, sizeof line, "  %-4s %-36s empirical %-12s bound %-12s slack %s\n",
                  c.violated ? "FAIL" : "ok", c.id.c_str(), fmt(c.empirical).c_str(), fmt(c.bound).c_str(),
                  fmt(c.slack_ratio).c_str());
    out << line;
  }
  return out.str();
}

std::string format_table(const SelectionCurve& c) {
  std::ostringstream out;
  out << "p = " << c.p << ", chosen k = " << c.chosen_k << '\n';
  for (std::size_t g = 0; g < c.grid.size(); ++g) {
    out << "  k=" << c.grid[g] << "  LpO=" << fmt(c.estimates[g].value);
    if (c.confidence_radius[g]) out << "  radius=" << fmt(*c.confidence_radius[g]);
    out << (c.grid[g] == c.chosen_k ? "  <- chosen" : "") << '\n';
  }
  return out.str();
}

}  // namespace lpocv
