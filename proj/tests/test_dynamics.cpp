#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "gridfreq/dynamics.hpp"
#include "gridfreq/metrics.hpp"
#include "support.hpp"

using namespace gridfreq;
using gridfreq::testing::bundled;
using gridfreq::testing::single_group;

namespace {

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b, std::size_t stride_b = 1)
{
    double worst = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        worst = std::max(worst, std::abs(a[k] - b[k * stride_b]));
    }
    return worst;
}

ScenarioConfig three_area(double coupling)
{
    auto c = single_group(30000.0, 1000.0, 4.0, 0.05, 1.0, true);
    c.fleet_template.clear();
    const double caps[] = {15000.0, 10000.0, 5000.0};
    const double h[] = {5.0, 4.0, 3.0};
    for (int i = 0; i < 3; ++i) {
        GeneratorGroup g;
        g.name = "area" + std::to_string(i);
        g.capacity_mw = caps[i];
        g.inertia_s = h[i];
        g.headroom_mw = caps[i] * 0.1;
        g.t_lead_s = 1.0;
        g.t_lag_s = 5.0;
        c.fleet_template.push_back(g);
    }
    c.sim.horizon_s = 30.0;
    c.metrics.settle_window_s = {15.0, 28.0};
    c.sim.network_mode = NetworkMode::multimachine;
    c.sim.coupling.assign(3, std::vector<double>(3, coupling));
    for (int i = 0; i < 3; ++i) {
        c.sim.coupling[i][i] = 0.0;
    }
    return c;
}

}  // namespace

TEST(Dynamics, NoContingencyStaysAtNominal)
{
    auto c = single_group(1000.0, 0.0, 4.0, 0.05, 1.0, true);
    c.sim.horizon_s = 10.0;
    c.metrics.settle_window_s = {2.0, 8.0};
    const auto tr = simulate(c);
    for (double f : tr.f_coi_hz) {
        EXPECT_EQ(f, 60.0);
    }
}

TEST(Dynamics, InitialRocofMatchesSwingEquation)
{
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> h(1.5, 8.0);
    std::uniform_real_distribution<double> loss(0.005, 0.08);
    for (int trial = 0; trial < 20; ++trial) {
        const double hs = h(rng);
        const double dp = loss(rng);
        auto c = single_group(10000.0, dp * 10000.0, hs, 0.05, 0.0, false);
        c.sim.horizon_s = 3.0;
        c.metrics.settle_window_s = {0.5, 1.5};
        const auto m = compute_metrics(simulate(c), c);
        EXPECT_NEAR(m.rocof_hz_per_s, -dp * 60.0 / (2.0 * hs), 1e-9 * 60.0);
    }
}

TEST(Dynamics, DampingOnlySettlesAtClosedForm)
{
    // 2H dw/dt = -dP - D w  ->  w(inf) = -dP / D.
    auto c = single_group(10000.0, 100.0, 4.0, 0.05, 2.0, false);
    c.sim.horizon_s = 120.0;
    const auto tr = simulate(c);
    EXPECT_NEAR(tr.f_coi_hz.back() - 60.0, -0.01 / 2.0 * 60.0, 1e-6);
}

TEST(Dynamics, HeadroomLimitsGovernorOutput)
{
    auto c = single_group(1000.0, 50.0, 4.0, 0.05, 1.0, true);
    c.fleet_template[0].headroom_mw = 30.0;
    c.sim.horizon_s = 200.0;
    const auto tr = simulate(c);
    const auto* pm = tr.find_power("pm_aggregate");
    ASSERT_NE(pm, nullptr);
    EXPECT_LE(*std::max_element(pm->values.begin(), pm->values.end()), 30.0 + 1e-9);
    EXPECT_NEAR(tr.f_coi_hz.back() - 60.0, -(0.05 - 0.03) / 1.0 * 60.0, 1e-4);
}

TEST(Dynamics, Rk4ConvergesAtFourthOrder)
{
    auto c = single_group(75000.0, 2750.0, 4.0, 0.05, 1.0, true);
    c.sim.horizon_s = 20.0;
    c.metrics.settle_window_s = {10.0, 18.0};
    auto run = [&](double dt) {
        auto cc = c;
        cc.sim.dt_s = dt;
        return simulate(cc).f_coi_hz;
    };
    const auto f1 = run(0.04);
    const auto f2 = run(0.02);
    const auto f4 = run(0.01);
    const double e1 = max_abs_diff(f1, f2, 2);
    const double e2 = max_abs_diff(f2, f4, 2);
    ASSERT_GT(e2, 0.0);
    EXPECT_GT(e1 / e2, 12.0);
    EXPECT_LT(e2, 1e-7);
}

TEST(Dynamics, EnergyBalanceResidualOnBundledScenario)
{
    const auto file = bundled("ercot60");
    for (const auto& t : file.tactics) {
        const auto config = apply_tactic(file.config, t);
        const auto model = make_model(build_fleet(config), config);
        auto s = initial_state(model);
        std::vector<TraceEvent> events;
        update_discrete(s, model, events);
        for (int k = 0; k < 4000; ++k) {
            const double lhs = 2.0 * effective_inertia_s(s, model) * derivatives(s, model)[0];
            ASSERT_NEAR(lhs, power_balance(s, model).net_pu(), 1e-12) << t.name << " t=" << s.t_s;
            step(s, config.sim.dt_s, model, events);
        }
    }
}

TEST(Dynamics, PackUnpackRoundTrip)
{
    const auto file = bundled("ei80");
    const auto config = apply_tactic(file.config, file.tactics.back());
    const auto model = make_model(build_fleet(config), config);
    auto s = initial_state(model);
    std::vector<TraceEvent> events;
    update_discrete(s, model, events);
    for (int k = 0; k < 600; ++k) {
        step(s, config.sim.dt_s, model, events);
    }
    const auto y = pack_state(s, model);
    EXPECT_EQ(y.size(), StateLayout(model).size());
    auto copy = s;
    std::fill(copy.speed_dev_pu.begin(), copy.speed_dev_pu.end(), 0.0);
    unpack_state(y, copy, model);
    EXPECT_EQ(pack_state(copy, model), y);
}

TEST(Dynamics, StiffCouplingApproachesCoi)
{
    auto mm = three_area(200.0);
    auto coi = mm;
    coi.sim.network_mode = NetworkMode::coi;
    coi.sim.coupling.clear();
    const auto a = simulate(mm);
    const auto b = simulate(coi);
    ASSERT_EQ(a.size(), b.size());
    EXPECT_LT(max_abs_diff(a.f_coi_hz, b.f_coi_hz), 2e-3);
    ASSERT_EQ(a.group_frequency_hz.size(), 3u);
    // Areas swing against each other but share the same mean trajectory.
    const auto ma = compute_metrics(a, mm);
    const auto mb = compute_metrics(b, coi);
    EXPECT_NEAR(ma.nadir_hz, mb.nadir_hz, 2e-3);
    EXPECT_NEAR(ma.settle_hz, mb.settle_hz, 1e-4);
}

TEST(Dynamics, WeakCouplingLetsAreasDiverge)
{
    const auto tr = simulate(three_area(0.5));
    double spread = 0.0;
    for (std::size_t k = 0; k < tr.size(); ++k) {
        double lo = 1e9;
        double hi = -1e9;
        for (const auto& g : tr.group_frequency_hz) {
            lo = std::min(lo, g.values[k]);
            hi = std::max(hi, g.values[k]);
        }
        spread = std::max(spread, hi - lo);
    }
    EXPECT_GT(spread, 1e-3);
}

TEST(Dynamics, Deterministic)
{
    const auto file = bundled("ei80");
    const auto config = apply_tactic(file.config, file.tactics.back());
    const auto a = simulate(config);
    const auto b = simulate(config);
    EXPECT_EQ(a.f_coi_hz, b.f_coi_hz);
    ASSERT_EQ(a.device_power_mw.size(), b.device_power_mw.size());
    for (std::size_t i = 0; i < a.device_power_mw.size(); ++i) {
        EXPECT_EQ(a.device_power_mw[i].values, b.device_power_mw[i].values);
    }
}

TEST(Dynamics, InvalidConfigRejectedBeforeRunning)
{
    auto c = single_group(1000.0, 50.0, 4.0, 0.05, 1.0, true);
    c.sim.dt_s = -1.0;
    EXPECT_THROW(simulate(c), ValidationError);
}
