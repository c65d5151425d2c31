#pragma once

// Frequency-response tactics as sparse overrides on a base scenario.
//
//   SG1       governor droop on every group
//   SG2       governor deadband (and optionally its style) on every group
//   SG3       governor ratio
//   FRL       fast responsive load relay block
//   ES1       high-energy storage (battery) units appended to the scenario
//   ES2       high-power, energy-limited storage (supercapacitor) units appended
//   baseline  no change

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gridfreq/model.hpp"

namespace gridfreq {

enum class TacticKind { baseline, SG1, SG2, SG3, FRL, ES1, ES2 };

std::string_view to_string(TacticKind kind);
std::optional<TacticKind> parse_tactic_kind(std::string_view text);

struct TacticSpec {
    std::string name;
    TacticKind kind = TacticKind::baseline;
    std::optional<double> droop_pu;                  // SG1
    std::optional<double> deadband_hz;               // SG2
    std::optional<DeadbandStyle> deadband_style;     // SG2
    std::optional<double> governor_ratio;            // SG3
    std::optional<FrlParams> frl;                    // FRL
    std::vector<StorageUnit> storage;                // ES1 / ES2

    bool operator==(const TacticSpec&) const = default;
};

/// Issues for overrides that are missing for the kind or not legal for it.
/// `path` prefixes the reported field paths.
std::vector<Issue> tactic_issues(const TacticSpec& tactic, const std::string& path = "tactic");

/// Returns the base config with the tactic applied. Throws ValidationError if
/// the tactic itself is malformed; the result is not validated here.
ScenarioConfig apply_tactic(const ScenarioConfig& base, const TacticSpec& tactic);

TacticSpec baseline_tactic();

}  // namespace gridfreq
