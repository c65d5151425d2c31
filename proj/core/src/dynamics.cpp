#include "gridfreq/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/core.h>

#include "gridfreq/metrics.hpp"

namespace gridfreq {

namespace {

constexpr double kTimeEps = 1e-9;

double group_inertia_pu(const GeneratorGroup& g, double s_base)
{
    return g.inertia_s * g.capacity_mw / s_base;
}

double speed_of(const std::vector<double>& y, const StateLayout& layout, std::size_t i)
{
    return y[layout.speed(i)];
}

double coi_frequency_from(const std::vector<double>& y, const StateLayout& layout, const Model& model)
{
    const double f_nominal = model.system.f_nominal_hz;
    if (!layout.multimachine) {
        return f_nominal * (1.0 + y[0]);
    }
    double weighted = 0.0;
    double weights = 0.0;
    for (std::size_t i = 0; i < layout.groups; ++i) {
        const double h = model.fleet.groups[i].inertia_s * model.fleet.groups[i].capacity_mw;
        weighted += h * f_nominal * (1.0 + y[layout.speed(i)]);
        weights += h;
    }
    return weighted / weights;
}

// Right-hand side with discrete states taken from `state`.
void rhs(double t, const std::vector<double>& y, const SimState& state, const Model& model, const StateLayout& layout,
         std::vector<double>& dy)
{
    std::fill(dy.begin(), dy.end(), 0.0);
    const double f_nominal = model.system.f_nominal_hz;
    const double s_base = model.fleet.s_base_mva;
    const double f_coi = coi_frequency_from(y, layout, model);

    std::vector<double> mech_pu(layout.groups, 0.0);
    double mech_total = 0.0;
    for (std::size_t i = 0; i < layout.groups; ++i) {
        const auto& group = model.fleet.groups[i];
        GovernorState gov{y[layout.lag(i)], y[layout.lead_lag(i)], state.governors[i].branch};
        const auto rates = governor_derivatives(gov, speed_of(y, layout, i), group, f_nominal);
        dy[layout.lag(i)] = rates.d_lag;
        dy[layout.lead_lag(i)] = rates.d_lead_lag;
        mech_pu[i] = rates.mech_power_pu * group.capacity_mw / s_base;
        mech_total += mech_pu[i];
    }

    double storage_pu = 0.0;
    for (std::size_t j = 0; j < layout.storage_units; ++j) {
        const auto& unit = model.storage[j];
        const auto& runtime = state.storage[j];
        double command_mw = 0.0;
        if (const auto* droop = std::get_if<DroopCtl>(&unit.controller)) {
            const auto cmd = droop_command(*droop, y[layout.filter(j)], f_coi, unit, f_nominal, runtime.branch);
            dy[layout.filter(j)] = cmd.d_filter;
            command_mw = cmd.power_mw;
        }
        else {
            command_mw = runtime.step.p_step_mw.value_or(0.0);
        }
        const double delivered = storage_delivered(unit, runtime.energy, command_mw, t);
        dy[layout.energy(j)] = delivered;
        storage_pu += delivered / s_base;
    }

    const double net_load = state.net_load_pu();
    const double damping = model.system.load_damping_pu;
    if (!layout.multimachine) {
        const double h_sys = model.fleet.h_sys_s * state.inertia_scale;
        dy[0] = (mech_total + storage_pu - net_load - damping * y[0]) / (2.0 * h_sys);
        return;
    }

    const auto& coupling = model.sim.coupling;
    const double omega_base = 2.0 * std::numbers::pi * f_nominal;
    for (std::size_t i = 0; i < layout.groups; ++i) {
        const double share = model.load_share[i];
        double sync = 0.0;
        if (!coupling.empty()) {
            for (std::size_t k = 0; k < layout.groups; ++k) {
                if (k != i) {
                    sync += coupling[i][k] * (y[layout.angle(i)] - y[layout.angle(k)]);
                }
            }
        }
        const double electrical = sync + share * (net_load - storage_pu);
        const double h_i = group_inertia_pu(model.fleet.groups[i], s_base) * state.inertia_scale;
        const double w_i = y[layout.speed(i)];
        dy[layout.speed(i)] = (mech_pu[i] - electrical - share * damping * w_i) / (2.0 * h_i);
        dy[layout.angle(i)] = omega_base * w_i;
    }
}

void rk4_advance(SimState& state, double dt, double t_next, const Model& model)
{
    const StateLayout layout(model);
    const auto n = layout.size();
    const double t = state.t_s;
    const auto y0 = pack_state(state, model);
    std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);

    rhs(t, y0, state, model, layout, k1);
    for (std::size_t i = 0; i < n; ++i) {
        tmp[i] = y0[i] + 0.5 * dt * k1[i];
    }
    rhs(t + 0.5 * dt, tmp, state, model, layout, k2);
    for (std::size_t i = 0; i < n; ++i) {
        tmp[i] = y0[i] + 0.5 * dt * k2[i];
    }
    rhs(t + 0.5 * dt, tmp, state, model, layout, k3);
    for (std::size_t i = 0; i < n; ++i) {
        tmp[i] = y0[i] + dt * k3[i];
    }
    rhs(t + dt, tmp, state, model, layout, k4);
    for (std::size_t i = 0; i < n; ++i) {
        tmp[i] = y0[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }

    for (double v : tmp) {
        if (!std::isfinite(v)) {
            throw SimulationError("non-finite state (integration blow-up)", t_next);
        }
    }
    unpack_state(tmp, state, model);
    for (std::size_t j = 0; j < layout.storage_units; ++j) {
        auto& energy = state.storage[j].energy;
        energy.used_mws = std::clamp(energy.used_mws, 0.0, model.storage[j].e_limit_mws);
    }
    state.t_s = t_next;
}

std::string mw(double v) { return fmt::format("{:.6g}", v); }

void record(const SimState& state, const Model& model, Trace& trace)
{
    const double f_nominal = model.system.f_nominal_hz;
    const double s_base = model.fleet.s_base_mva;
    trace.time_s.push_back(state.t_s);
    trace.f_coi_hz.push_back(coi_frequency_hz(state, model));
    for (std::size_t i = 0; i < model.group_count(); ++i) {
        const double w = state.speed_dev_pu[model.multimachine() ? i : 0];
        trace.group_frequency_hz[i].values.push_back(f_nominal * (1.0 + w));
    }
    std::size_t col = 0;
    for (std::size_t i = 0; i < model.group_count(); ++i) {
        const auto& group = model.fleet.groups[i];
        trace.device_power_mw[col++].values.push_back(governor_output(state.governors[i], group) * group.capacity_mw);
    }
    const double f_coi = trace.f_coi_hz.back();
    for (std::size_t j = 0; j < model.storage.size(); ++j) {
        const auto& unit = model.storage[j];
        const auto& runtime = state.storage[j];
        double command_mw = 0.0;
        if (const auto* droop = std::get_if<DroopCtl>(&unit.controller)) {
            command_mw = droop_command(*droop, runtime.filter_hz, f_coi, unit, f_nominal, runtime.branch).power_mw;
        }
        else {
            command_mw = runtime.step.p_step_mw.value_or(0.0);
        }
        trace.device_power_mw[col++].values.push_back(
            storage_delivered(unit, runtime.energy, command_mw, state.t_s));
    }
    if (model.frl) {
        trace.device_power_mw[col++].values.push_back(state.frl_relief_pu * s_base);
    }
}

}  // namespace

StateLayout::StateLayout(const Model& model)
    : groups(model.group_count()), storage_units(model.storage.size()), multimachine(model.multimachine())
{
}

Model make_model(const Fleet& fleet, const ScenarioConfig& config)
{
    Model model;
    model.fleet = fleet;
    model.system = config.system;
    model.contingency = config.contingency;
    model.frl = config.frl;
    model.sim = config.sim;
    model.storage = config.storage;
    for (auto& unit : model.storage) {
        if (auto* step = std::get_if<StepCtl>(&unit.controller)) {
            if (!step->h_sys_assumed_s) {
                step->h_sys_assumed_s = fleet.h_sys_s * fleet.s_base_mva / config.system.load_mw;
            }
            if (!step->p_sys_assumed_mw) {
                step->p_sys_assumed_mw = config.system.load_mw;
            }
        }
    }
    const double total = fleet.synchronous_capacity_mw();
    for (const auto& g : fleet.groups) {
        model.load_share.push_back(g.capacity_mw / total);
    }
    if (!model.sim.coupling.empty() && model.sim.coupling.size() != fleet.groups.size()) {
        throw Error(fmt::format("coupling matrix has {} rows for {} groups", model.sim.coupling.size(),
                                fleet.groups.size()));
    }
    return model;
}

SimState initial_state(const Model& model)
{
    SimState state;
    const auto n = model.group_count();
    state.speed_dev_pu.assign(model.multimachine() ? n : 1, 0.0);
    if (model.multimachine()) {
        state.angle_rad.assign(n, 0.0);
    }
    state.governors.assign(n, GovernorState{});
    state.storage.assign(model.storage.size(), StorageRuntime{});
    return state;
}

std::vector<double> pack_state(const SimState& state, const Model& model)
{
    const StateLayout layout(model);
    std::vector<double> y(layout.size(), 0.0);
    if (layout.multimachine) {
        for (std::size_t i = 0; i < layout.groups; ++i) {
            y[layout.speed(i)] = state.speed_dev_pu[i];
            y[layout.angle(i)] = state.angle_rad[i];
        }
    }
    else {
        y[0] = state.speed_dev_pu[0];
    }
    for (std::size_t i = 0; i < layout.groups; ++i) {
        y[layout.lag(i)] = state.governors[i].lag;
        y[layout.lead_lag(i)] = state.governors[i].lead_lag;
    }
    for (std::size_t j = 0; j < layout.storage_units; ++j) {
        y[layout.filter(j)] = state.storage[j].filter_hz;
        y[layout.energy(j)] = state.storage[j].energy.used_mws;
    }
    return y;
}

void unpack_state(const std::vector<double>& y, SimState& state, const Model& model)
{
    const StateLayout layout(model);
    if (layout.multimachine) {
        for (std::size_t i = 0; i < layout.groups; ++i) {
            state.speed_dev_pu[i] = y[layout.speed(i)];
            state.angle_rad[i] = y[layout.angle(i)];
        }
    }
    else {
        state.speed_dev_pu[0] = y[0];
    }
    for (std::size_t i = 0; i < layout.groups; ++i) {
        state.governors[i].lag = y[layout.lag(i)];
        state.governors[i].lead_lag = y[layout.lead_lag(i)];
    }
    for (std::size_t j = 0; j < layout.storage_units; ++j) {
        state.storage[j].filter_hz = y[layout.filter(j)];
        state.storage[j].energy.used_mws = y[layout.energy(j)];
    }
}

std::vector<double> derivatives(const SimState& state, const Model& model)
{
    const StateLayout layout(model);
    std::vector<double> dy(layout.size(), 0.0);
    rhs(state.t_s, pack_state(state, model), state, model, layout, dy);
    return dy;
}

PowerBalance power_balance(const SimState& state, const Model& model)
{
    PowerBalance out;
    const double s_base = model.fleet.s_base_mva;
    const double f_nominal = model.system.f_nominal_hz;
    for (std::size_t i = 0; i < model.group_count(); ++i) {
        const auto& g = model.fleet.groups[i];
        out.mechanical_pu += governor_output(state.governors[i], g) * g.capacity_mw / s_base;
    }
    const double f_coi = coi_frequency_hz(state, model);
    for (std::size_t j = 0; j < model.storage.size(); ++j) {
        const auto& unit = model.storage[j];
        const auto& runtime = state.storage[j];
        double command_mw = runtime.step.p_step_mw.value_or(0.0);
        if (const auto* droop = std::get_if<DroopCtl>(&unit.controller)) {
            command_mw = droop_command(*droop, runtime.filter_hz, f_coi, unit, f_nominal, runtime.branch).power_mw;
        }
        out.storage_pu += storage_delivered(unit, runtime.energy, command_mw, state.t_s) / s_base;
    }
    out.net_load_pu = state.net_load_pu();
    double speed = 0.0;
    if (model.multimachine()) {
        for (std::size_t i = 0; i < model.group_count(); ++i) {
            speed += model.load_share[i] * state.speed_dev_pu[i];
        }
    }
    else {
        speed = state.speed_dev_pu[0];
    }
    out.damping_pu = model.system.load_damping_pu * speed;
    return out;
}

double effective_inertia_s(const SimState& state, const Model& model)
{
    return model.fleet.h_sys_s * state.inertia_scale;
}

double coi_frequency_hz(const SimState& state, const Model& model)
{
    const double f_nominal = model.system.f_nominal_hz;
    if (!model.multimachine()) {
        return f_nominal * (1.0 + state.speed_dev_pu[0]);
    }
    std::vector<double> f(model.group_count());
    std::vector<double> h(model.group_count());
    for (std::size_t i = 0; i < model.group_count(); ++i) {
        f[i] = f_nominal * (1.0 + state.speed_dev_pu[i]);
        h[i] = model.fleet.groups[i].inertia_s * model.fleet.groups[i].capacity_mw;
    }
    return coi_frequency(f, h);
}

void update_discrete(SimState& state, const Model& model, std::vector<TraceEvent>& events)
{
    const double t = state.t_s;
    const double f_nominal = model.system.f_nominal_hz;
    const double s_base = model.fleet.s_base_mva;

    if (!state.contingency_applied && t >= model.contingency.time_s - kTimeEps) {
        state.contingency_applied = true;
        state.contingency_pu = model.contingency.magnitude_mw / s_base;
        if (model.contingency.removed_inertia_mws > 0.0) {
            state.inertia_scale = 1.0 - model.contingency.removed_inertia_mws / (model.fleet.h_sys_s * s_base);
        }
        events.push_back({t, "contingency", "magnitude_mw=" + mw(model.contingency.magnitude_mw)});
    }

    const double f_coi = coi_frequency_hz(state, model);
    if (model.frl) {
        const auto upd = frl_update(state.frl, f_coi, t, *model.frl);
        state.frl = upd.state;
        state.frl_relief_pu = upd.relief_mw / s_base;
        if (upd.tripped_now) {
            events.push_back({t, "frl_trip", "relief_mw=" + mw(upd.relief_mw)});
        }
    }

    for (std::size_t j = 0; j < model.storage.size(); ++j) {
        const auto& unit = model.storage[j];
        auto& runtime = state.storage[j];
        double command_mw = 0.0;
        if (const auto* droop = std::get_if<DroopCtl>(&unit.controller)) {
            command_mw = droop_command(*droop, runtime.filter_hz, f_coi, unit, f_nominal, runtime.branch).power_mw;
        }
        else {
            const auto upd = step_command(runtime.step, std::get<StepCtl>(unit.controller), f_coi, t, unit, f_nominal);
            if (upd.triggered_now) {
                events.push_back({t, "storage_trigger", fmt::format("unit={} f_hz={:.6f}", unit.name, f_coi)});
            }
            if (upd.fired_now) {
                events.push_back({t, "storage_step",
                                  fmt::format("unit={} rocof_hz_per_s={:.6g} p_step_mw={}", unit.name,
                                              *runtime.step.measured_rocof, mw(upd.power_mw))});
            }
            command_mw = upd.power_mw;
        }
        if (energy_limit(unit, runtime.energy, command_mw, model.sim.dt_s, t)) {
            events.push_back({t, "storage_exhausted",
                              fmt::format("unit={} energy_mws={}", unit.name, mw(runtime.energy.used_mws))});
        }
    }

    // Deadband branches for the coming step, judged at its midpoint so a
    // trajectory leaving the band from its edge is caught immediately. The speed
    // derivative does not depend on the branches.
    const auto rate = derivatives(state, model);
    const StateLayout layout(model);
    const double half = 0.5 * model.sim.dt_s;
    for (std::size_t i = 0; i < model.group_count(); ++i) {
        const auto k = layout.speed(i);
        const double w_mid = state.speed_dev_pu[k] + half * rate[k];
        state.governors[i].branch = classify_deadband(w_mid * f_nominal, model.fleet.groups[i].deadband_hz);
    }
    double rate_coi = 0.0;
    if (model.multimachine()) {
        double h_total = 0.0;
        for (std::size_t i = 0; i < model.group_count(); ++i) {
            const double h = model.fleet.groups[i].inertia_s * model.fleet.groups[i].capacity_mw;
            rate_coi += h * rate[layout.speed(i)];
            h_total += h;
        }
        rate_coi /= h_total;
    }
    else {
        rate_coi = rate[0];
    }
    const double f_mid = f_coi + half * rate_coi * f_nominal;
    for (std::size_t j = 0; j < model.storage.size(); ++j) {
        if (const auto* droop = std::get_if<DroopCtl>(&model.storage[j].controller)) {
            state.storage[j].branch = classify_deadband(f_mid - f_nominal, droop->deadband_hz);
        }
    }
}

void step(SimState& state, double dt_s, const Model& model, std::vector<TraceEvent>& events)
{
    if (!(dt_s > 0.0)) {
        throw SimulationError("step size must be > 0", state.t_s);
    }
    rk4_advance(state, dt_s, state.t_s + dt_s, model);
    update_discrete(state, model, events);
}

Trace simulate(const Fleet& fleet, const ScenarioConfig& config)
{
    validate_scenario(config);
    const Model model = make_model(fleet, config);
    SimState state = initial_state(model);

    for (double rate : derivatives(state, model)) {
        if (rate != 0.0) {
            throw SimulationError("pre-contingency state is not an equilibrium", 0.0);
        }
    }

    const double dt = config.sim.dt_s;
    const auto steps = static_cast<std::size_t>(std::ceil(config.sim.horizon_s / dt - 1e-9));

    Trace trace;
    trace.time_s.reserve(steps + 1);
    trace.f_coi_hz.reserve(steps + 1);
    for (const auto& g : model.fleet.groups) {
        trace.group_frequency_hz.push_back({g.name, {}});
        trace.group_frequency_hz.back().values.reserve(steps + 1);
    }
    for (const auto& g : model.fleet.groups) {
        trace.device_power_mw.push_back({"pm_" + g.name, {}});
    }
    for (const auto& unit : model.storage) {
        trace.device_power_mw.push_back({"storage_" + unit.name, {}});
    }
    if (model.frl) {
        trace.device_power_mw.push_back({"frl", {}});
    }
    for (auto& series : trace.device_power_mw) {
        series.values.reserve(steps + 1);
    }

    update_discrete(state, model, trace.events);
    record(state, model, trace);
    for (std::size_t k = 1; k <= steps; ++k) {
        rk4_advance(state, dt, static_cast<double>(k) * dt, model);
        update_discrete(state, model, trace.events);
        record(state, model, trace);
    }
    return trace;
}

Trace simulate(const ScenarioConfig& config)
{
    validate_scenario(config);
    return simulate(build_fleet(config), config);
}

}  // namespace gridfreq
