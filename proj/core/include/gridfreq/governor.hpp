#pragma once

// Turbine-governor response, fast responsive load relays and UFLS monitoring.

#include <optional>
#include <span>

#include "gridfreq/model.hpp"
#include "gridfreq/trace.hpp"

namespace gridfreq {

enum class DeadbandBranch { inside, below, above };

/// |dev| <= deadband gives 0. Outside the band the offset style subtracts the
/// band edge, the step style passes the deviation through unchanged.
double apply_deadband(double deviation_hz, double deadband_hz, DeadbandStyle style);

DeadbandBranch classify_deadband(double deviation_hz, double deadband_hz);

/// Deadband evaluated on a fixed branch. The integrator freezes the branch for a
/// whole step so the right-hand side stays smooth inside the step.
double apply_deadband(double deviation_hz, double deadband_hz, DeadbandStyle style, DeadbandBranch branch);

struct GovernorState {
    double lag = 0.0;       // first-order lag output, pu of group capacity
    double lead_lag = 0.0;  // lead-lag internal state, pu of group capacity
    DeadbandBranch branch = DeadbandBranch::inside;
};

struct GovernorRates {
    double d_lag = 0.0;
    double d_lead_lag = 0.0;
    double mech_power_pu = 0.0;  // pu of group capacity, clamped to [0, headroom]
};

/// Mechanical power deviation of a governor from its internal state (pu of group capacity).
double governor_output(const GovernorState& gov, const GeneratorGroup& group);

/// Signal chain: speed deviation -> Hz -> deadband -> -1/(R f_N) -> lag T_g ->
/// lead-lag (1 + s T_lead)/(1 + s T_lag) -> clamp [0, headroom]. A group without
/// an enabled governor returns all zeros.
GovernorRates governor_derivatives(const GovernorState& gov, double speed_dev_pu, const GeneratorGroup& group,
                                   double f_nominal_hz);

struct FrlState {
    std::optional<double> armed_time_s;
    bool tripped = false;
    std::optional<double> trip_time_s;
};

struct FrlUpdate {
    FrlState state;
    double relief_mw = 0.0;
    bool tripped_now = false;
};

/// Definite-time under-frequency relay, evaluated once per step boundary. Arms
/// below the threshold, trips after delay_s of continuous arming; once tripped
/// the block stays shed.
FrlUpdate frl_update(const FrlState& state, double f_coi_hz, double t_s, const FrlParams& params);

/// First time f drops strictly below the threshold, linearly interpolated between samples.
std::optional<double> ufls_crossing(std::span<const double> time_s, std::span<const double> f_hz, double threshold_hz);
std::optional<double> ufls_crossing(const Trace& trace, double threshold_hz);

}  // namespace gridfreq
