#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "exactrd/numsolve.hpp"
#include "exactrd/report.hpp"
#include "exactrd/scenario.hpp"

namespace exactrd {

// Non-finite numbers serialize as null.
nlohmann::json to_json(const ResidualReport& r);
nlohmann::json to_json(const ConvergenceStudy& s);
nlohmann::json to_json(const MolResult& r);
nlohmann::json to_json(const ScenarioReport& r);

/// Top-level run report: overall pass flag, counts and the scenario entries
/// in the given order. Contains no timestamps or host data.
nlohmann::json run_report(const std::vector<ScenarioReport>& reports, const RunOptions& opts);

/// Stable text form (2-space indent, trailing newline).
std::string dump_report(const nlohmann::json& j);

}  // namespace exactrd
