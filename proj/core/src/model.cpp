#include "gridfreq/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <fmt/core.h>

namespace gridfreq {

namespace {

class IssueCollector {
public:
    void require(bool ok, std::string path, std::string message)
    {
        if (!ok) {
            issues_.push_back({std::move(path), std::move(message)});
        }
    }
    std::vector<Issue> take() { return std::move(issues_); }

private:
    std::vector<Issue> issues_;
};

bool positive(double x) { return std::isfinite(x) && x > 0.0; }
bool non_negative(double x) { return std::isfinite(x) && x >= 0.0; }

void check_group(IssueCollector& c, const GeneratorGroup& g, const std::string& p)
{
    c.require(!g.name.empty(), p + ".name", "must not be empty");
    c.require(positive(g.capacity_mw), p + ".capacity_mw", "must be > 0");
    c.require(positive(g.inertia_s), p + ".inertia_s", "must be > 0");
    c.require(positive(g.droop_pu), p + ".droop_pu", "must be > 0");
    c.require(non_negative(g.deadband_hz), p + ".deadband_hz", "must be >= 0");
    c.require(positive(g.t_gov_s), p + ".t_gov_s", "must be > 0");
    c.require(non_negative(g.t_lead_s), p + ".t_lead_s", "must be >= 0");
    c.require(positive(g.t_lag_s), p + ".t_lag_s", "must be > 0");
    c.require(non_negative(g.headroom_mw) && g.headroom_mw <= g.capacity_mw, p + ".headroom_mw",
              "must lie in [0, capacity_mw]");
}

void check_storage(IssueCollector& c, const StorageUnit& s, const std::string& p, double f_nominal)
{
    c.require(!s.name.empty(), p + ".name", "must not be empty");
    c.require(positive(s.p_max_mw), p + ".p_max_mw", "must be > 0");
    c.require(s.e_limit_mws > 0.0 && !std::isnan(s.e_limit_mws), p + ".e_limit_mws", "must be > 0");
    c.require(s.n_locations >= 1, p + ".n_locations", "must be >= 1");
    c.require(non_negative(s.withdrawal_ramp_s), p + ".withdrawal_ramp_s", "must be >= 0");
    if (const auto* droop = std::get_if<DroopCtl>(&s.controller)) {
        const auto cp = p + ".controller";
        c.require(positive(droop->droop_pu), cp + ".droop_pu", "must be > 0");
        c.require(non_negative(droop->deadband_hz), cp + ".deadband_hz", "must be >= 0");
        c.require(positive(droop->t_filter_s), cp + ".t_filter_s", "must be > 0");
    }
    else {
        const auto& step = std::get<StepCtl>(s.controller);
        const auto cp = p + ".controller";
        c.require(positive(step.threshold_hz) && step.threshold_hz < f_nominal, cp + ".threshold_hz",
                  "must lie in (0, f_nominal_hz)");
        c.require(non_negative(step.delay_s), cp + ".delay_s", "must be >= 0");
        c.require(positive(step.alpha) && step.alpha <= 1.0, cp + ".alpha", "must lie in (0, 1]");
        c.require(positive(step.rocof_window_s), cp + ".rocof_window_s", "must be > 0");
        c.require(!step.h_sys_assumed_s || positive(*step.h_sys_assumed_s), cp + ".h_sys_assumed_s",
                  "must be > 0");
        c.require(!step.p_sys_assumed_mw || positive(*step.p_sys_assumed_mw), cp + ".p_sys_assumed_mw",
                  "must be > 0");
    }
}

struct GovernorAssignment {
    std::vector<bool> enabled;
    double eligible_share = 0.0;
};

GovernorAssignment assign_governors(const std::vector<GeneratorGroup>& groups, double ratio)
{
    GovernorAssignment out;
    out.enabled.assign(groups.size(), false);
    const double total = std::accumulate(groups.begin(), groups.end(), 0.0,
                                         [](double acc, const GeneratorGroup& g) { return acc + g.capacity_mw; });
    if (!(total > 0.0)) {
        return out;
    }
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < groups.size(); ++i) {
        if (groups[i].governor_enabled) {
            order.push_back(i);
            out.eligible_share += groups[i].capacity_mw / total;
        }
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return groups[a].capacity_mw > groups[b].capacity_mw; });

    const double target = ratio * total;
    const double tol = 1e-9 * total;
    double enabled = 0.0;
    for (std::size_t idx : order) {
        if (enabled + 0.5 * groups[idx].capacity_mw > target + tol) {
            break;
        }
        out.enabled[idx] = true;
        enabled += groups[idx].capacity_mw;
    }
    return out;
}

}  // namespace

double Fleet::synchronous_capacity_mw() const
{
    double total = 0.0;
    for (const auto& g : groups) {
        total += g.capacity_mw;
    }
    return total;
}

double Fleet::enabled_capacity_mw() const
{
    double total = 0.0;
    for (const auto& g : groups) {
        if (g.governor_enabled) {
            total += g.capacity_mw;
        }
    }
    return total;
}

double Fleet::governor_ratio() const
{
    const double total = synchronous_capacity_mw();
    return total > 0.0 ? enabled_capacity_mw() / total : 0.0;
}

std::vector<Issue> scenario_issues(const ScenarioConfig& config)
{
    IssueCollector c;
    const auto& sys = config.system;
    c.require(positive(sys.f_nominal_hz), "system.f_nominal_hz", "must be > 0");
    c.require(positive(sys.load_mw), "system.load_mw", "must be > 0");
    c.require(positive(sys.s_base_mva), "system.s_base_mva", "must be > 0");
    c.require(non_negative(sys.load_damping_pu), "system.load_damping_pu", "must be >= 0");
    c.require(positive(sys.ufls_threshold_hz) && sys.ufls_threshold_hz < sys.f_nominal_hz,
              "system.ufls_threshold_hz", "must lie in (0, f_nominal_hz)");

    c.require(!config.fleet_template.empty(), "fleet", "at least one generator group is required");
    std::set<std::string> names;
    for (std::size_t i = 0; i < config.fleet_template.size(); ++i) {
        const auto& g = config.fleet_template[i];
        const auto p = fmt::format("fleet[{}]", i);
        check_group(c, g, p);
        c.require(names.insert(g.name).second, p + ".name", "duplicate group name '" + g.name + "'");
    }

    const double pv = config.pv_penetration;
    const double wind = config.wind_penetration;
    c.require(non_negative(pv), "penetration.pv", "must be >= 0");
    c.require(non_negative(wind), "penetration.wind", "must be >= 0");
    c.require(!(pv + wind >= 1.0), "penetration", "pv + wind must be < 1");
    const double ratio = config.governor_ratio;
    c.require(non_negative(ratio) && ratio <= 1.0, "governor_ratio", "must lie in [0, 1]");

    const auto& ctg = config.contingency;
    c.require(non_negative(ctg.magnitude_mw), "contingency.magnitude_mw", "must be >= 0");
    c.require(non_negative(ctg.time_s), "contingency.time_s", "must be >= 0");
    c.require(non_negative(ctg.removed_inertia_mws), "contingency.removed_inertia_mws", "must be >= 0");

    if (config.frl) {
        const auto& frl = *config.frl;
        c.require(positive(frl.block_mw), "frl.block_mw", "must be > 0");
        c.require(positive(frl.threshold_hz) && frl.threshold_hz < sys.f_nominal_hz, "frl.threshold_hz",
                  "must lie in (0, f_nominal_hz)");
        c.require(non_negative(frl.delay_s), "frl.delay_s", "must be >= 0");
    }

    std::set<std::string> storage_names;
    for (std::size_t i = 0; i < config.storage.size(); ++i) {
        const auto p = fmt::format("storage[{}]", i);
        check_storage(c, config.storage[i], p, sys.f_nominal_hz);
        c.require(storage_names.insert(config.storage[i].name).second, p + ".name",
                  "duplicate storage name '" + config.storage[i].name + "'");
    }

    const auto& sim = config.sim;
    c.require(positive(sim.dt_s), "simulation.dt_s", "must be > 0");
    c.require(std::isfinite(sim.horizon_s) && sim.horizon_s > sim.dt_s, "simulation.horizon_s",
              "must be > dt_s");
    if (std::isfinite(sim.horizon_s)) {
        c.require(!(ctg.time_s >= sim.horizon_s), "contingency.time_s", "must be before the horizon");
    }
    if (!sim.coupling.empty()) {
        const auto n = config.fleet_template.size();
        bool square = sim.coupling.size() == n;
        bool finite = true;
        for (const auto& row : sim.coupling) {
            square = square && row.size() == n;
            for (double k : row) {
                finite = finite && non_negative(k);
            }
        }
        c.require(square, "simulation.coupling", fmt::format("must be a {0}x{0} matrix", n));
        c.require(finite, "simulation.coupling", "entries must be finite and >= 0");
    }

    const auto& win = config.metrics.settle_window_s;
    c.require(non_negative(win[0]) && win[1] > win[0], "metrics.settle_window_s", "must satisfy 0 <= start < end");
    if (std::isfinite(sim.horizon_s) && std::isfinite(win[1])) {
        c.require(!(ctg.time_s + win[1] > sim.horizon_s + 1e-9), "metrics.settle_window_s",
                  "window end must not exceed the horizon");
    }

    // Checks that depend on a well-formed template.
    auto all = c.take();
    if (all.empty()) {
        const auto assignment = assign_governors(config.fleet_template, ratio);
        if (ratio > assignment.eligible_share + 1e-9) {
            all.push_back({"governor_ratio",
                           fmt::format("unattainable: {:.6g} exceeds the governor-eligible capacity share {:.6g}",
                                       ratio, assignment.eligible_share)});
        }
        double template_inertia = 0.0;
        for (const auto& g : config.fleet_template) {
            template_inertia += g.inertia_s * g.capacity_mw;
        }
        if (ctg.removed_inertia_mws >= template_inertia * (1.0 - pv - wind)) {
            all.push_back({"contingency.removed_inertia_mws", "must be less than the fleet inertia"});
        }
    }
    return all;
}

const ScenarioConfig& validate_scenario(const ScenarioConfig& config)
{
    auto issues = scenario_issues(config);
    if (!issues.empty()) {
        throw ValidationError(std::move(issues));
    }
    return config;
}

double system_inertia_s(const std::vector<GeneratorGroup>& groups, double s_base_mva)
{
    double sum = 0.0;
    for (const auto& g : groups) {
        sum += g.inertia_s * g.capacity_mw;
    }
    return sum / s_base_mva;
}

Fleet build_fleet(const ScenarioConfig& config)
{
    const double share = 1.0 - config.pv_penetration - config.wind_penetration;
    Fleet fleet;
    fleet.s_base_mva = config.system.s_base_mva;
    fleet.groups = config.fleet_template;

    const auto assignment = assign_governors(config.fleet_template, config.governor_ratio);
    if (config.governor_ratio > assignment.eligible_share + 1e-9) {
        throw Error(fmt::format("governor ratio {} exceeds the governor-eligible capacity share {:.6g}",
                                config.governor_ratio, assignment.eligible_share));
    }
    for (std::size_t i = 0; i < fleet.groups.size(); ++i) {
        auto& g = fleet.groups[i];
        if (share != 1.0) {
            g.capacity_mw *= share;
            g.headroom_mw *= share;
        }
        g.governor_enabled = assignment.enabled[i];
    }
    fleet.h_sys_s = system_inertia_s(fleet.groups, fleet.s_base_mva);
    return fleet;
}

double to_pu(double value_mw, double base_mva)
{
    if (!(base_mva > 0.0)) {
        throw Error(fmt::format("per-unit base must be > 0 (got {})", base_mva));
    }
    return value_mw / base_mva;
}

double from_pu(double value_pu, double base_mva)
{
    if (!(base_mva > 0.0)) {
        throw Error(fmt::format("per-unit base must be > 0 (got {})", base_mva));
    }
    return value_pu * base_mva;
}

std::string_view to_string(DeadbandStyle style)
{
    return style == DeadbandStyle::offset ? "offset" : "step";
}

std::string_view to_string(NetworkMode mode)
{
    return mode == NetworkMode::coi ? "coi" : "multimachine";
}

}  // namespace gridfreq
