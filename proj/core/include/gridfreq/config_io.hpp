#pragma once

// YAML scenario files.
//
// Parsing is strict: unknown keys, wrong types and missing required fields are
// collected and reported together with their field paths. Serialization writes
// every field explicitly, so serialize -> parse reproduces an equal config.

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gridfreq/model.hpp"
#include "gridfreq/tactics.hpp"

namespace gridfreq {

/// A scenario plus the tactics it defines for `compare`.
struct ScenarioFile {
    ScenarioConfig config;
    std::vector<TacticSpec> tactics;

    bool operator==(const ScenarioFile&) const = default;
};

/// Throws ConfigError (syntax: line/column; schema: field paths). The result is
/// structurally complete but not validated; call validate_scenario for invariants.
ScenarioFile parse_scenario_file(std::string_view text);
ScenarioConfig parse_config(std::string_view text);

std::string serialize_config(const ScenarioConfig& config);
std::string serialize_scenario_file(const ScenarioFile& file);

/// Canonical text of a built fleet; used to check determinism of fleet assembly.
std::string serialize_fleet(const Fleet& fleet);

/// Reads and parses a file; IoError when unreadable, ConfigError messages carry the path.
ScenarioFile load_scenario_file(const std::filesystem::path& path);

/// One numeric assignment addressed by a field path, e.g. "fleet[*].droop_pu",
/// "storage[0].p_max_mw" or "contingency.magnitude_mw".
///
/// `storage[i].discharge_duration_s` is derived: it sets p_max_mw to
/// e_limit_mws / value and is applied after all plain assignments.
struct FieldOverride {
    std::string path;
    double value = 0.0;
};

/// Applies the overrides and re-parses strictly. Throws ConfigError naming the
/// path when it does not address an existing numeric field.
ScenarioConfig apply_overrides(const ScenarioConfig& config, const std::vector<FieldOverride>& overrides);

}  // namespace gridfreq
