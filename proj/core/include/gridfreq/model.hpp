#pragma once

// Domain types, per-unit helpers and fleet construction.
//
// Conventions: powers in MW unless suffixed _pu; per-unit powers are on the
// system base S_base (MVA); speed deviations are pu of nominal frequency.

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "gridfreq/error.hpp"

namespace gridfreq {

enum class DeadbandStyle { offset, step };
enum class NetworkMode { coi, multimachine };

/// Energy limit used for batteries, whose stored energy outlasts any study horizon.
inline constexpr double kUnlimitedEnergyMws = 1e12;

struct SystemParams {
    double f_nominal_hz = 60.0;
    double load_mw = 0.0;
    double s_base_mva = 0.0;
    double load_damping_pu = 0.0;  // pu power per pu frequency
    double ufls_threshold_hz = 59.3;

    bool operator==(const SystemParams&) const = default;
};

struct GeneratorGroup {
    std::string name;
    double capacity_mw = 0.0;
    double inertia_s = 0.0;  // on the group's own capacity base
    // In a template this marks governor eligibility; build_fleet rewrites it
    // to mean "in service" according to the governor ratio.
    bool governor_enabled = true;
    double droop_pu = 0.05;
    double deadband_hz = 0.0;  // one-sided half-width
    DeadbandStyle deadband_style = DeadbandStyle::offset;
    double t_gov_s = 0.5;
    double t_lead_s = 3.0;  // lead-lag numerator (reheat)
    double t_lag_s = 10.0;  // lead-lag denominator
    double headroom_mw = 0.0;

    bool operator==(const GeneratorGroup&) const = default;
};

struct FrlParams {
    double block_mw = 0.0;
    double threshold_hz = 59.7;
    double delay_s = 0.5;
    bool reset_on_recovery = true;

    bool operator==(const FrlParams&) const = default;
};

struct DroopCtl {
    double droop_pu = 0.03;
    double deadband_hz = 0.017;
    double t_filter_s = 0.1;

    bool operator==(const DroopCtl&) const = default;
};

struct StepCtl {
    double threshold_hz = 59.85;
    double delay_s = 0.5;
    double alpha = 0.85;
    double rocof_window_s = 0.5;
    // Unset means "use the true system values" (exact-knowledge case).
    std::optional<double> h_sys_assumed_s;
    std::optional<double> p_sys_assumed_mw;

    bool operator==(const StepCtl&) const = default;
};

using StorageController = std::variant<DroopCtl, StepCtl>;

struct StorageUnit {
    std::string name;
    double p_max_mw = 0.0;
    double e_limit_mws = kUnlimitedEnergyMws;
    int n_locations = 1;  // metadata only; output is aggregated
    double withdrawal_ramp_s = 0.0;
    StorageController controller = DroopCtl{};

    bool operator==(const StorageUnit&) const = default;
};

struct Contingency {
    double magnitude_mw = 0.0;
    double time_s = 1.0;
    // Inertia (MW*s) removed from the system together with the lost generation.
    double removed_inertia_mws = 0.0;

    bool operator==(const Contingency&) const = default;
};

struct SimulationSettings {
    double dt_s = 0.005;
    double horizon_s = 60.0;
    NetworkMode network_mode = NetworkMode::coi;
    // Synchronizing coefficients K_ij, pu torque per rad on S_base. Empty means no coupling.
    std::vector<std::vector<double>> coupling;

    bool operator==(const SimulationSettings&) const = default;
};

struct MetricsSettings {
    std::array<double, 2> settle_window_s{20.0, 52.0};  // offsets after the contingency

    bool operator==(const MetricsSettings&) const = default;
};

struct ScenarioConfig {
    std::string name;
    SystemParams system;
    std::vector<GeneratorGroup> fleet_template;
    double pv_penetration = 0.0;
    double wind_penetration = 0.0;
    double governor_ratio = 1.0;
    Contingency contingency;
    std::optional<FrlParams> frl;
    std::vector<StorageUnit> storage;
    SimulationSettings sim;
    MetricsSettings metrics;

    bool operator==(const ScenarioConfig&) const = default;
};

struct Fleet {
    std::vector<GeneratorGroup> groups;
    double s_base_mva = 0.0;
    double h_sys_s = 0.0;  // sum(H_i * capacity_i) / S_base

    double synchronous_capacity_mw() const;
    double enabled_capacity_mw() const;
    double governor_ratio() const;
};

/// Checks every invariant of the scenario and its nested types. Throws ValidationError
/// listing all violations; returns the config unchanged otherwise.
const ScenarioConfig& validate_scenario(const ScenarioConfig& config);
std::vector<Issue> scenario_issues(const ScenarioConfig& config);

/// Scales the template by the synchronous share (1 - pv - wind) and assigns governors.
///
/// Governor-eligible groups are filled largest capacity first (ties keep template
/// order); a group is switched on while doing so keeps the enabled share at most
/// half a group above the target, so the result is the nearest attainable share
/// and the enabled set only grows with the ratio. A ratio above the eligible
/// capacity share is a validation error.
Fleet build_fleet(const ScenarioConfig& config);

double system_inertia_s(const std::vector<GeneratorGroup>& groups, double s_base_mva);

double to_pu(double value_mw, double base_mva);
double from_pu(double value_pu, double base_mva);

std::string_view to_string(DeadbandStyle style);
std::string_view to_string(NetworkMode mode);

}  // namespace gridfreq
