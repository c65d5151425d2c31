#pragma once

// Fixed-step RK4 integration of the swing / governor / storage state with
// discrete events (contingency, relays, controller latches, energy exhaustion,
// deadband branches) evaluated once per step boundary.

#include <cstddef>
#include <optional>
#include <vector>

#include "gridfreq/governor.hpp"
#include "gridfreq/model.hpp"
#include "gridfreq/storage.hpp"
#include "gridfreq/trace.hpp"

namespace gridfreq {

/// Immutable simulation context assembled from a fleet and a validated scenario.
struct Model {
    Fleet fleet;
    SystemParams system;
    Contingency contingency;
    std::vector<StorageUnit> storage;  // step controllers carry resolved H_sys/P_sys
    std::optional<FrlParams> frl;
    SimulationSettings sim;
    std::vector<double> load_share;  // a_i, proportional to capacity

    std::size_t group_count() const noexcept { return fleet.groups.size(); }
    bool multimachine() const noexcept { return sim.network_mode == NetworkMode::multimachine; }
};

Model make_model(const Fleet& fleet, const ScenarioConfig& config);

struct StorageRuntime {
    double filter_hz = 0.0;
    DeadbandBranch branch = DeadbandBranch::inside;
    StepState step;
    EnergyState energy;
};

struct SimState {
    double t_s = 0.0;
    std::vector<double> speed_dev_pu;  // one entry in coi mode, one per group otherwise
    std::vector<double> angle_rad;     // multimachine only
    std::vector<GovernorState> governors;
    std::vector<StorageRuntime> storage;
    FrlState frl;
    double frl_relief_pu = 0.0;
    bool contingency_applied = false;
    double contingency_pu = 0.0;
    double inertia_scale = 1.0;  // < 1 after a contingency that removes inertia

    /// Net load-side imbalance (contingency minus shed load), pu on S_base.
    double net_load_pu() const noexcept { return contingency_pu - frl_relief_pu; }
};

/// Offsets of each continuous state inside the flattened vector used by RK4.
struct StateLayout {
    std::size_t groups = 0;
    std::size_t storage_units = 0;
    bool multimachine = false;

    explicit StateLayout(const Model& model);
    std::size_t speed(std::size_t i) const noexcept { return multimachine ? i : 0; }
    std::size_t angle(std::size_t i) const noexcept { return groups + i; }
    std::size_t lag(std::size_t i) const noexcept { return governor_base() + 2 * i; }
    std::size_t lead_lag(std::size_t i) const noexcept { return governor_base() + 2 * i + 1; }
    std::size_t filter(std::size_t j) const noexcept { return storage_base() + 2 * j; }
    std::size_t energy(std::size_t j) const noexcept { return storage_base() + 2 * j + 1; }
    std::size_t size() const noexcept { return storage_base() + 2 * storage_units; }

private:
    std::size_t governor_base() const noexcept { return multimachine ? 2 * groups : 1; }
    std::size_t storage_base() const noexcept { return governor_base() + 2 * groups; }
};

/// All-zero deviations, no contingency applied yet.
SimState initial_state(const Model& model);

std::vector<double> pack_state(const SimState& state, const Model& model);
void unpack_state(const std::vector<double>& y, SimState& state, const Model& model);

/// Time derivative of the continuous states (StateLayout order) with the
/// discrete part of `state` held fixed.
std::vector<double> derivatives(const SimState& state, const Model& model);

/// Power terms of the aggregate swing equation, pu on S_base.
struct PowerBalance {
    double mechanical_pu = 0.0;
    double storage_pu = 0.0;
    double net_load_pu = 0.0;
    double damping_pu = 0.0;
    double net_pu() const noexcept { return mechanical_pu + storage_pu - net_load_pu - damping_pu; }
};

/// Evaluated independently of derivatives(); in coi mode 2 H_sys dw/dt equals net_pu().
PowerBalance power_balance(const SimState& state, const Model& model);

/// Effective system inertia, s on S_base, after any contingency inertia removal.
double effective_inertia_s(const SimState& state, const Model& model);

double coi_frequency_hz(const SimState& state, const Model& model);

/// Applies the discrete transitions due at state.t_s, appending events.
void update_discrete(SimState& state, const Model& model, std::vector<TraceEvent>& events);

/// One RK4 step of length dt with discrete states frozen, followed by the
/// discrete update at the new boundary. Throws SimulationError on non-finite state.
void step(SimState& state, double dt_s, const Model& model, std::vector<TraceEvent>& events);

/// Runs the scenario over [0, horizon] on the grid k * dt. Validates the config
/// first; deterministic for identical inputs.
Trace simulate(const Fleet& fleet, const ScenarioConfig& config);

/// Convenience: build_fleet followed by simulate.
Trace simulate(const ScenarioConfig& config);

}  // namespace gridfreq
