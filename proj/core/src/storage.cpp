#include "gridfreq/storage.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <fmt/core.h>

namespace gridfreq {

namespace {

constexpr double kTimeEps = 1e-9;
constexpr double kEnergyRelTol = 1e-9;

}  // namespace

double estimate_rocof(std::span<const double> time_s, std::span<const double> f_hz)
{
    const auto n = std::min(time_s.size(), f_hz.size());
    if (n < 2) {
        throw Error(fmt::format("ROCOF window needs at least 2 samples (got {})", n));
    }
    double t_mean = 0.0;
    double f_mean = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        t_mean += time_s[k];
        f_mean += f_hz[k];
    }
    t_mean /= static_cast<double>(n);
    f_mean /= static_cast<double>(n);
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double dt = time_s[k] - t_mean;
        sxx += dt * dt;
        sxy += dt * (f_hz[k] - f_mean);
    }
    if (!(sxx > 0.0)) {
        throw Error("ROCOF window has zero duration");
    }
    return sxy / sxx;
}

DroopCommand droop_command(const DroopCtl& ctl, double filter_hz, double f_coi_hz, const StorageUnit& unit,
                           double f_nominal_hz, DeadbandBranch branch)
{
    const double effective = apply_deadband(f_coi_hz - f_nominal_hz, ctl.deadband_hz, DeadbandStyle::offset, branch);
    DroopCommand out;
    out.d_filter = (effective - filter_hz) / ctl.t_filter_s;
    const double raw = -filter_hz * unit.p_max_mw / (ctl.droop_pu * f_nominal_hz);
    out.power_mw = std::clamp(raw, 0.0, unit.p_max_mw);
    return out;
}

DroopCommand droop_command(const DroopCtl& ctl, double filter_hz, double f_coi_hz, const StorageUnit& unit,
                           double f_nominal_hz)
{
    return droop_command(ctl, filter_hz, f_coi_hz, unit, f_nominal_hz,
                         classify_deadband(f_coi_hz - f_nominal_hz, ctl.deadband_hz));
}

double step_magnitude_mw(double alpha, double h_sys_s, double rocof_hz_per_s, double f_nominal_hz, double p_sys_mw,
                         double p_max_mw)
{
    const double p = alpha * 2.0 * h_sys_s * std::abs(rocof_hz_per_s) / f_nominal_hz * p_sys_mw;
    return std::clamp(p, 0.0, p_max_mw);
}

StepUpdate step_command(StepState& state, const StepCtl& ctl, double f_coi_hz, double t_s, const StorageUnit& unit,
                        double f_nominal_hz)
{
    if (!ctl.h_sys_assumed_s || !ctl.p_sys_assumed_mw) {
        throw Error("step controller of '" + unit.name + "' has no assumed H_sys / P_sys");
    }
    StepUpdate out;
    state.history.emplace_back(t_s, f_coi_hz);
    while (state.history.size() > 2 && state.history.front().first < t_s - ctl.rocof_window_s - kTimeEps) {
        state.history.pop_front();
    }

    if (!state.triggered_time_s && f_coi_hz < ctl.threshold_hz) {
        state.triggered_time_s = t_s;
        out.triggered_now = true;
    }
    if (state.triggered_time_s && !state.fire_time_s && t_s >= *state.triggered_time_s + ctl.delay_s - kTimeEps) {
        std::vector<double> ts;
        std::vector<double> fs;
        ts.reserve(state.history.size());
        fs.reserve(state.history.size());
        for (const auto& [t, f] : state.history) {
            ts.push_back(t);
            fs.push_back(f);
        }
        state.measured_rocof = estimate_rocof(ts, fs);
        state.p_step_mw = step_magnitude_mw(ctl.alpha, *ctl.h_sys_assumed_s, *state.measured_rocof, f_nominal_hz,
                                            *ctl.p_sys_assumed_mw, unit.p_max_mw);
        state.fire_time_s = t_s;
        out.fired_now = true;
    }
    out.power_mw = state.p_step_mw.value_or(0.0);
    return out;
}

bool energy_limit(const StorageUnit& unit, EnergyState& state, double commanded_mw, double dt_s, double t_s)
{
    switch (state.mode) {
    case StorageMode::exhausted:
        state.power_cap_mw = 0.0;
        return false;
    case StorageMode::withdrawing:
        if (t_s >= state.withdraw_start_s + unit.withdrawal_ramp_s - kTimeEps) {
            state.mode = StorageMode::exhausted;
        }
        state.power_cap_mw = 0.0;
        return false;
    case StorageMode::active:
        break;
    }

    const double remaining = unit.e_limit_mws - state.used_mws;
    if (remaining <= kEnergyRelTol * unit.e_limit_mws) {
        state.mode = StorageMode::exhausted;
        state.power_cap_mw = 0.0;
        return true;
    }
    const double command = std::clamp(commanded_mw, 0.0, unit.p_max_mw);
    if (unit.withdrawal_ramp_s > 0.0 && command * (dt_s + 0.5 * unit.withdrawal_ramp_s) >= remaining) {
        state.mode = StorageMode::withdrawing;
        state.withdraw_start_s = t_s;
        state.withdraw_from_mw = std::min(command, 2.0 * remaining / unit.withdrawal_ramp_s);
        state.power_cap_mw = 0.0;
        return true;
    }
    state.power_cap_mw = std::min(unit.p_max_mw, remaining / dt_s);
    return false;
}

double storage_delivered(const StorageUnit& unit, const EnergyState& state, double commanded_mw, double t_s)
{
    switch (state.mode) {
    case StorageMode::active:
        return std::clamp(commanded_mw, 0.0, state.power_cap_mw);
    case StorageMode::withdrawing: {
        const double frac = 1.0 - (t_s - state.withdraw_start_s) / unit.withdrawal_ramp_s;
        return std::clamp(commanded_mw, 0.0, state.withdraw_from_mw * std::clamp(frac, 0.0, 1.0));
    }
    case StorageMode::exhausted:
        return 0.0;
    }
    return 0.0;
}

EnergyUpdate energy_update(const StorageUnit& unit, EnergyState& state, double commanded_mw, double dt_s, double t_s)
{
    EnergyUpdate out;
    out.exhausted_now = energy_limit(unit, state, commanded_mw, dt_s, t_s);
    if (state.mode == StorageMode::withdrawing) {
        // Trapezoid over the step is exact for the linear ramp.
        const double p0 = storage_delivered(unit, state, commanded_mw, t_s);
        const double p1 = storage_delivered(unit, state, commanded_mw, t_s + dt_s);
        out.delivered_mw = p0;
        state.used_mws += 0.5 * (p0 + p1) * dt_s;
    }
    else {
        out.delivered_mw = storage_delivered(unit, state, commanded_mw, t_s);
        state.used_mws += out.delivered_mw * dt_s;
    }
    state.used_mws = std::min(state.used_mws, unit.e_limit_mws);
    return out;
}

}  // namespace gridfreq
