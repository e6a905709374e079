#pragma once

#include "lpocv/bounds.hpp"
#include "lpocv/lpo.hpp"
#include "lpocv/oracle.hpp"
#include "lpocv/select.hpp"
#include "lpocv/ustat.hpp"
#include "lpocv/verify.hpp"

#include <json.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace lpocv {

inline constexpr std::string_view kVersion = "0.1.0";

using Json = nlohmann::ordered_json;

Json to_json(const LpOEstimate& e);
Json to_json(const IncompleteUStatEstimate& e);
Json to_json(const BoundReport& r);
Json to_json(const DistributionSpec& s);
Json to_json(const CampaignConfig& c);
Json to_json(const ReplicationReport& r);
Json to_json(const StabilityResult& r);
Json to_json(const SelectionCurve& c);
Json to_json(const OracleSweepResult& r);

/// Run document: {"tool", "version", "command", "config", "results"}.
Json make_document(std::string_view command, Json config, Json results);

/// Plot-ready long table: t,empirical,bound_id,bound_value.
std::string tail_table_csv(const std::vector<TailRow>& rows);

/// k,estimate,confidence_radius (empty when unavailable).
std::string selection_curve_csv(const SelectionCurve& curve);

/// Human-readable renderings.
std::string format_table(const BoundReport& r);
std::string format_table(const ReplicationReport& r);
std::string format_table(const SelectionCurve& c);

}  // namespace lpocv
