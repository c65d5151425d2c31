#include "gridfreq/governor.hpp"

#include <algorithm>
#include <cmath>

namespace gridfreq {

namespace {

// Relay timers compare times built from integer step counts; this absorbs the rounding.
constexpr double kTimeEps = 1e-9;

}  // namespace

DeadbandBranch classify_deadband(double deviation_hz, double deadband_hz)
{
    if (deviation_hz < -deadband_hz) {
        return DeadbandBranch::below;
    }
    if (deviation_hz > deadband_hz) {
        return DeadbandBranch::above;
    }
    return DeadbandBranch::inside;
}

double apply_deadband(double deviation_hz, double deadband_hz, DeadbandStyle style, DeadbandBranch branch)
{
    switch (branch) {
    case DeadbandBranch::inside:
        return 0.0;
    case DeadbandBranch::below:
        return style == DeadbandStyle::offset ? deviation_hz + deadband_hz : deviation_hz;
    case DeadbandBranch::above:
        return style == DeadbandStyle::offset ? deviation_hz - deadband_hz : deviation_hz;
    }
    return 0.0;
}

double apply_deadband(double deviation_hz, double deadband_hz, DeadbandStyle style)
{
    return apply_deadband(deviation_hz, deadband_hz, style, classify_deadband(deviation_hz, deadband_hz));
}

double governor_output(const GovernorState& gov, const GeneratorGroup& group)
{
    if (!group.governor_enabled) {
        return 0.0;
    }
    const double unclamped = gov.lead_lag + (group.t_lead_s / group.t_lag_s) * (gov.lag - gov.lead_lag);
    return std::clamp(unclamped, 0.0, group.headroom_mw / group.capacity_mw);
}

GovernorRates governor_derivatives(const GovernorState& gov, double speed_dev_pu, const GeneratorGroup& group,
                                   double f_nominal_hz)
{
    GovernorRates rates;
    if (!group.governor_enabled) {
        return rates;
    }
    const double deviation_hz = speed_dev_pu * f_nominal_hz;
    const double effective = apply_deadband(deviation_hz, group.deadband_hz, group.deadband_style, gov.branch);
    const double command = -effective / (group.droop_pu * f_nominal_hz);
    rates.d_lag = (command - gov.lag) / group.t_gov_s;
    rates.d_lead_lag = (gov.lag - gov.lead_lag) / group.t_lag_s;
    rates.mech_power_pu = governor_output(gov, group);
    return rates;
}

FrlUpdate frl_update(const FrlState& state, double f_coi_hz, double t_s, const FrlParams& params)
{
    FrlUpdate out{state, 0.0, false};
    if (state.tripped) {
        out.relief_mw = params.block_mw;
        return out;
    }
    if (f_coi_hz < params.threshold_hz) {
        if (!out.state.armed_time_s) {
            out.state.armed_time_s = t_s;
        }
    }
    else if (params.reset_on_recovery) {
        out.state.armed_time_s.reset();
    }
    if (out.state.armed_time_s && t_s - *out.state.armed_time_s >= params.delay_s - kTimeEps) {
        out.state.tripped = true;
        out.state.trip_time_s = t_s;
        out.tripped_now = true;
        out.relief_mw = params.block_mw;
    }
    return out;
}

std::optional<double> ufls_crossing(std::span<const double> time_s, std::span<const double> f_hz, double threshold_hz)
{
    const auto n = std::min(time_s.size(), f_hz.size());
    for (std::size_t k = 0; k < n; ++k) {
        if (!(f_hz[k] < threshold_hz)) {
            continue;
        }
        if (k == 0) {
            return time_s[0];
        }
        const double above = f_hz[k - 1] - threshold_hz;
        const double span = f_hz[k - 1] - f_hz[k];
        const double frac = span > 0.0 ? above / span : 1.0;
        return time_s[k - 1] + frac * (time_s[k] - time_s[k - 1]);
    }
    return std::nullopt;
}

std::optional<double> ufls_crossing(const Trace& trace, double threshold_hz)
{
    return ufls_crossing(trace.time_s, trace.f_coi_hz, threshold_hz);
}

}  // namespace gridfreq
