#pragma once

// Tactic comparisons, parameter sweeps and bundled-scenario lookup.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gridfreq/config_io.hpp"
#include "gridfreq/csv_io.hpp"
#include "gridfreq/metrics.hpp"
#include "gridfreq/tactics.hpp"
#include "gridfreq/trace.hpp"

namespace gridfreq {

struct CompareRow {
    std::string tactic;
    ScenarioConfig config;
    Trace trace;
    FrequencyMetrics metrics;
};

/// Simulates the baseline and every tactic. The baseline row always comes
/// first (a baseline-kind entry in `tactics` takes its place rather than
/// repeating it); the rest keep their input order. Rows are independent and
/// run on up to `jobs` threads. The first failure, in row order, is rethrown
/// as Error prefixed with the tactic name.
std::vector<CompareRow> run_compare(const ScenarioConfig& base, const std::vector<TacticSpec>& tactics,
                                    unsigned jobs = 1);

std::vector<MetricsRow> metrics_rows(const std::vector<CompareRow>& rows);

struct SweepAxis {
    std::string field;  // see FieldOverride
    std::vector<double> values;
};

struct SweepSpec {
    ScenarioConfig base;
    std::optional<TacticSpec> tactic;  // applied before the axis overrides
    std::vector<SweepAxis> axes;
    std::vector<std::string> metrics;  // names from metric_columns()
};

struct SweepCell {
    std::vector<double> axis_values;
    std::optional<FrequencyMetrics> metrics;
    std::string error;  // empty on success
};

struct SweepResult {
    std::vector<std::string> axis_fields;
    std::vector<std::string> metric_names;
    std::vector<SweepCell> cells;  // row-major, last axis fastest

    bool all_ok() const;
};

/// Throws ValidationError for a malformed spec (no axes, empty axis, unknown metric).
void validate_sweep(const SweepSpec& spec);

/// The config a sweep cell simulates.
ScenarioConfig sweep_cell_config(const SweepSpec& spec, const std::vector<double>& axis_values);

/// Full-factorial evaluation; a failing cell records its message and leaves the others unaffected.
SweepResult run_sweep(const SweepSpec& spec, unsigned jobs = 1);

/// Columns: axis fields, requested metrics, error.
std::string sweep_csv(const SweepResult& result);

/// Sweep file schema:
///   base: ei80.cfg            # relative to the sweep file, else a bundled scenario
///   tactic: supercap          # optional, a tactic defined in the base file
///   axes:
///     - field: storage[0].discharge_duration_s
///       values: [1, 2, 5]     # or range: [start, stop, step], stop inclusive
///   metrics: [f_c_hz, t_c_s]
SweepSpec parse_sweep_spec(std::string_view text, const std::filesystem::path& sweep_dir);
SweepSpec load_sweep_spec(const std::filesystem::path& path);

/// Directory holding the bundled scenarios: $GRIDFREQ_SEED_SCENARIOS if set,
/// otherwise the directory configured at build time.
std::filesystem::path bundled_scenario_dir();

/// An existing path is returned as is; otherwise `name` or `name.cfg` inside
/// bundled_scenario_dir(). Throws IoError when nothing matches.
std::filesystem::path resolve_scenario(const std::string& name_or_path);

}  // namespace gridfreq
