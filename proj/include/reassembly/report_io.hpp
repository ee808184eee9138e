#pragma once

// JSON forms of puzzle specs, reassemblies, solver reports and evaluation
// results, as written by the command-line tool.

#include "reassembly/core.hpp"
#include "reassembly/metrics.hpp"
#include "reassembly/solver.hpp"

#include <string>

#include <json.hpp>

namespace reassembly {

nlohmann::json spec_to_json(const PuzzleSpec& spec);
/// Throws DataError(Schema) naming the field under `path`.
PuzzleSpec spec_from_json(const nlohmann::json& value, const std::string& path = "spec");

nlohmann::json reassembly_to_json(const Reassembly& reassembly);
Reassembly reassembly_from_json(const nlohmann::json& value, const std::string& path = "reassembly");

nlohmann::json solver_report_to_json(const SolverReport& report);

nlohmann::json evaluation_to_json(const EvaluationResult& result);

}  // namespace reassembly
