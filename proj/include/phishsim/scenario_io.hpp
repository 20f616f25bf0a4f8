#pragma once

#include "phishsim/campaign.hpp"

#include <filesystem>
#include <string>

namespace phishsim {

/// Parses and validates a scenario document (JSON). Generator-specified
/// agents are materialized deterministically from the document's generation
/// seed before any simulation draw happens. Unknown fields and every violated
/// invariant are rejected with field-addressed messages, e.g.
/// "agents[3].baseline[0] must be > 0".
ScenarioConfig load_scenario(const std::filesystem::path& path);

/// Same, from an in-memory document string (used by tests and round-trips).
ScenarioConfig parse_scenario(const std::string& text, const std::string& origin = "<string>");

/// Writes a materialized scenario back out as a document that load_scenario
/// accepts and that reproduces the config field for field.
void save_scenario(const ScenarioConfig& scenario, const std::filesystem::path& path);

struct ResultFiles {
  std::filesystem::path replications_csv;
  std::filesystem::path aggregates_csv;
};

/// Writes `replications.csv` (one record per replication) and
/// `aggregates.csv` (metric,value,ci_halfwidth) into `out_dir`. Numeric
/// fields carry 17 significant digits so values round-trip exactly.
ResultFiles write_results(const SimulationResult& result, const std::filesystem::path& out_dir);

}  // namespace phishsim
