#pragma once

// Battery and supercapacitor frequency support: droop control, ROCOF-based
// step response control, and energy accounting with withdrawal at exhaustion.

#include <deque>
#include <optional>
#include <span>
#include <utility>

#include "gridfreq/governor.hpp"
#include "gridfreq/model.hpp"

namespace gridfreq {

/// Least-squares slope of f against t (Hz/s). Throws Error for fewer than two
/// samples or a window of zero duration.
double estimate_rocof(std::span<const double> time_s, std::span<const double> f_hz);

struct DroopCommand {
    double d_filter = 0.0;  // Hz/s
    double power_mw = 0.0;  // from the current filter state, clamped to [0, P_max]
};

/// Deviation -> deadband (offset) -> low-pass 1/(1 + s T_f) -> -P_max/(droop f_N).
/// filter_hz is the low-pass state; discharge only.
DroopCommand droop_command(const DroopCtl& ctl, double filter_hz, double f_coi_hz, const StorageUnit& unit,
                           double f_nominal_hz);
DroopCommand droop_command(const DroopCtl& ctl, double filter_hz, double f_coi_hz, const StorageUnit& unit,
                           double f_nominal_hz, DeadbandBranch branch);

/// P_step = alpha * 2 * H_sys * |ROCOF| / f_N * P_sys, clamped to [0, P_max].
double step_magnitude_mw(double alpha, double h_sys_s, double rocof_hz_per_s, double f_nominal_hz, double p_sys_mw,
                         double p_max_mw);

struct StepState {
    std::deque<std::pair<double, double>> history;  // (t, f) samples covering the ROCOF window
    std::optional<double> triggered_time_s;
    std::optional<double> fire_time_s;
    std::optional<double> measured_rocof;
    std::optional<double> p_step_mw;
};

struct StepUpdate {
    double power_mw = 0.0;
    bool triggered_now = false;
    bool fired_now = false;
};

/// Boundary update of the step response controller. Latches a trigger when f
/// drops below the threshold; after the ride-through delay estimates ROCOF over
/// the rocof_window_s seconds ending at the fire time and holds P_step from then
/// on. ctl.h_sys_assumed_s and ctl.p_sys_assumed_mw must be set.
StepUpdate step_command(StepState& state, const StepCtl& ctl, double f_coi_hz, double t_s, const StorageUnit& unit,
                        double f_nominal_hz);

enum class StorageMode { active, withdrawing, exhausted };

struct EnergyState {
    double used_mws = 0.0;
    StorageMode mode = StorageMode::active;
    double power_cap_mw = 0.0;  // frozen for the step that follows a boundary
    double withdraw_start_s = 0.0;
    double withdraw_from_mw = 0.0;
};

/// Boundary bookkeeping for the energy limit. Sets the power cap for the coming
/// step so the step cannot overdraw, and moves to withdrawing/exhausted once the
/// remaining energy is used up. Returns true when support is withdrawn at this boundary.
bool energy_limit(const StorageUnit& unit, EnergyState& state, double commanded_mw, double dt_s, double t_s);

/// Output inside a step given the uncapped controller command.
double storage_delivered(const StorageUnit& unit, const EnergyState& state, double commanded_mw, double t_s);

struct EnergyUpdate {
    double delivered_mw = 0.0;
    bool exhausted_now = false;
};

/// Constant-command step: applies the limit, then accounts delivered * dt.
EnergyUpdate energy_update(const StorageUnit& unit, EnergyState& state, double commanded_mw, double dt_s, double t_s);

}  // namespace gridfreq
