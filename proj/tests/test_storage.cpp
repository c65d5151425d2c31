#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "gridfreq/storage.hpp"

using namespace gridfreq;

namespace {

StorageUnit unit(double p_max, double e_limit = kUnlimitedEnergyMws, double ramp = 0.0)
{
    StorageUnit u;
    u.name = "u";
    u.p_max_mw = p_max;
    u.e_limit_mws = e_limit;
    u.withdrawal_ramp_s = ramp;
    return u;
}

StepCtl known_system(double h, double p_sys)
{
    StepCtl c;
    c.threshold_hz = 59.85;
    c.delay_s = 0.5;
    c.alpha = 0.85;
    c.h_sys_assumed_s = h;
    c.p_sys_assumed_mw = p_sys;
    return c;
}

}  // namespace

TEST(Rocof, ExactOnRandomLines)
{
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> slope(-2.0, 2.0);
    std::uniform_real_distribution<double> jitter(0.0, 0.004);
    for (int trial = 0; trial < 200; ++trial) {
        const double a = slope(rng);
        std::vector<double> t;
        std::vector<double> f;
        double now = 3.0;
        for (int k = 0; k < 50; ++k) {
            now += 0.001 + jitter(rng);
            t.push_back(now);
            f.push_back(60.0 + a * (now - 3.0));
        }
        EXPECT_NEAR(estimate_rocof(t, f), a, 1e-8);
    }
}

TEST(Rocof, RejectsDegenerateWindows)
{
    const std::vector<double> one{1.0};
    EXPECT_THROW(estimate_rocof(one, one), Error);
    const std::vector<double> t{1.0, 1.0};
    const std::vector<double> f{60.0, 59.0};
    EXPECT_THROW(estimate_rocof(t, f), Error);
}

TEST(Droop, CommandFromFilterState)
{
    DroopCtl ctl{0.03, 0.017, 0.1};
    const auto u = unit(3100.0);
    // Filter settled at the deadbanded deviation of -0.1 Hz.
    const double filt = -(0.1 - 0.017);
    const auto cmd = droop_command(ctl, filt, 59.9, u, 60.0);
    EXPECT_NEAR(cmd.d_filter, 0.0, 1e-12);
    EXPECT_NEAR(cmd.power_mw, 0.083 * 3100.0 / (0.03 * 60.0), 1e-9);
    // Over-frequency never charges.
    EXPECT_EQ(droop_command(ctl, 0.05, 60.05, u, 60.0).power_mw, 0.0);
    // Saturates at P_max.
    EXPECT_EQ(droop_command(ctl, -5.0, 55.0, u, 60.0).power_mw, 3100.0);
}

TEST(Step, MagnitudeFormulaAndClamp)
{
    EXPECT_NEAR(step_magnitude_mw(0.85, 4.0, -0.275, 60.0, 75000.0, 1e9), 0.85 * 2750.0, 1e-9);
    EXPECT_EQ(step_magnitude_mw(0.85, 4.0, -0.275, 60.0, 75000.0, 1000.0), 1000.0);
}

TEST(Step, FiresAfterDelayWithWindowRocof)
{
    const auto ctl = known_system(4.0, 75000.0);
    const auto u = unit(1e5);
    StepState s;
    const double dt = 0.005;
    const double rocof = -0.2;
    std::optional<double> trig;
    std::optional<double> fire;
    double last_power = 0.0;
    for (int k = 0; k <= 1000; ++k) {
        const double t = k * dt;
        const double f = t < 1.0 ? 60.0 : 60.0 + rocof * (t - 1.0);
        const auto out = step_command(s, ctl, f, t, u, 60.0);
        if (out.triggered_now) {
            trig = t;
        }
        if (out.fired_now) {
            fire = t;
        }
        last_power = out.power_mw;
    }
    ASSERT_TRUE(trig && fire);
    EXPECT_NEAR(*trig, 1.0 + 0.15 / 0.2 + dt, dt);
    EXPECT_NEAR(*fire - *trig, 0.5, 1e-9);
    EXPECT_NEAR(*s.measured_rocof, rocof, 1e-9);
    EXPECT_NEAR(last_power, 0.85 * 2.0 * 4.0 * 0.2 / 60.0 * 75000.0, 1e-6);
}

TEST(Step, RequiresAssumedSystem)
{
    StepState s;
    EXPECT_THROW(step_command(s, StepCtl{}, 59.0, 1.0, unit(10.0), 60.0), Error);
}

TEST(Energy, DeliveredEnergyNeverExceedsLimit)
{
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> pmax(10.0, 5000.0);
    std::uniform_real_distribution<double> secs(0.1, 20.0);
    std::uniform_real_distribution<double> ramp(0.0, 2.0);
    for (int trial = 0; trial < 100; ++trial) {
        const auto u = unit(pmax(rng), 0.0, trial % 2 ? ramp(rng) : 0.0);
        auto v = u;
        v.e_limit_mws = u.p_max_mw * secs(rng);
        EnergyState st;
        double delivered = 0.0;
        int exhausted_events = 0;
        const double dt = 0.005;
        for (int k = 0; k < 6000; ++k) {
            const auto r = energy_update(v, st, v.p_max_mw, dt, k * dt);
            delivered += r.delivered_mw * dt;
            exhausted_events += r.exhausted_now ? 1 : 0;
            EXPECT_LE(r.delivered_mw, v.p_max_mw + 1e-9);
        }
        EXPECT_LE(st.used_mws, v.e_limit_mws * (1.0 + 1e-9));
        EXPECT_EQ(exhausted_events, 1);
        EXPECT_EQ(st.mode, StorageMode::exhausted);
        if (v.withdrawal_ramp_s == 0.0) {
            EXPECT_NEAR(delivered, v.e_limit_mws, 1e-6 * v.e_limit_mws);
        }
    }
}

TEST(Energy, ExhaustionTimeMatchesDuration)
{
    auto u = unit(3100.0, 3100.0 * 5.0);
    EnergyState st;
    const double dt = 0.005;
    double t_ex = -1.0;
    for (int k = 0; k < 4000 && t_ex < 0.0; ++k) {
        if (energy_update(u, st, 3100.0, dt, k * dt).exhausted_now) {
            t_ex = k * dt;
        }
    }
    EXPECT_NEAR(t_ex, 5.0, dt + 1e-9);
}

TEST(Energy, UnlimitedBatteryNeverExhausts)
{
    auto u = unit(3100.0);
    EnergyState st;
    for (int k = 0; k < 20000; ++k) {
        EXPECT_FALSE(energy_update(u, st, 3100.0, 0.005, k * 0.005).exhausted_now);
    }
    EXPECT_EQ(st.mode, StorageMode::active);
}
