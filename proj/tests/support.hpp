#pragma once

// Scenario builders shared by the unit and acceptance tests.

#include <filesystem>
#include <string>

#include "gridfreq/config_io.hpp"
#include "gridfreq/model.hpp"
#include "gridfreq/tactics.hpp"

namespace gridfreq::testing {

inline std::filesystem::path scenario_dir()
{
    return GRIDFREQ_TEST_SCENARIO_DIR;
}

inline ScenarioFile bundled(const std::string& name)
{
    return load_scenario_file(scenario_dir() / (name + ".cfg"));
}

inline TacticSpec tactic(const std::string& name, TacticKind kind)
{
    TacticSpec t;
    t.name = name;
    t.kind = kind;
    return t;
}

/// One aggregate group carrying the whole system base, no deadband, contingency at 1 s.
inline ScenarioConfig single_group(double load_mw, double contingency_mw, double inertia_s, double droop_pu,
                                   double damping_pu, bool governor)
{
    ScenarioConfig c;
    c.name = "single_group";
    c.system.load_mw = load_mw;
    c.system.s_base_mva = load_mw;
    c.system.load_damping_pu = damping_pu;
    GeneratorGroup g;
    g.name = "aggregate";
    g.capacity_mw = load_mw;
    g.inertia_s = inertia_s;
    g.governor_enabled = governor;
    g.droop_pu = droop_pu;
    g.deadband_hz = 0.0;
    g.headroom_mw = load_mw;
    c.fleet_template = {g};
    c.governor_ratio = governor ? 1.0 : 0.0;
    c.contingency.magnitude_mw = contingency_mw;
    c.contingency.time_s = 1.0;
    c.sim.dt_s = 0.005;
    c.sim.horizon_s = 60.0;
    return c;
}

}  // namespace gridfreq::testing
