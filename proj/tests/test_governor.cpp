#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "gridfreq/governor.hpp"

using namespace gridfreq;

namespace {

GeneratorGroup unit_group()
{
    GeneratorGroup g;
    g.name = "g";
    g.capacity_mw = 1000.0;
    g.inertia_s = 4.0;
    g.droop_pu = 0.05;
    g.deadband_hz = 0.0;
    g.t_gov_s = 0.5;
    g.t_lead_s = 3.0;
    g.t_lag_s = 10.0;
    g.headroom_mw = 1000.0;
    return g;
}

// Forward-Euler run of the governor under a constant speed deviation.
GovernorState hold(GovernorState s, const GeneratorGroup& g, double speed_dev_pu, double seconds, double dt)
{
    for (double t = 0.0; t < seconds; t += dt) {
        s.branch = classify_deadband(speed_dev_pu * 60.0, g.deadband_hz);
        const auto r = governor_derivatives(s, speed_dev_pu, g, 60.0);
        s.lag += dt * r.d_lag;
        s.lead_lag += dt * r.d_lead_lag;
    }
    return s;
}

}  // namespace

TEST(Deadband, PropertiesHoldForRandomInputs)
{
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> dev(-0.5, 0.5);
    std::uniform_real_distribution<double> band(0.0, 0.1);
    for (int i = 0; i < 2000; ++i) {
        const double x = dev(rng);
        const double db = band(rng);
        const double off = apply_deadband(x, db, DeadbandStyle::offset);
        const double stp = apply_deadband(x, db, DeadbandStyle::step);
        if (std::abs(x) <= db) {
            EXPECT_EQ(off, 0.0);
            EXPECT_EQ(stp, 0.0);
            EXPECT_EQ(classify_deadband(x, db), DeadbandBranch::inside);
        }
        else {
            EXPECT_NEAR(off, x - std::copysign(db, x), 1e-15);
            EXPECT_EQ(stp, x);
            EXPECT_EQ(classify_deadband(x, db), x < 0 ? DeadbandBranch::below : DeadbandBranch::above);
        }
        // Odd symmetry and the offset style never exceeding the input.
        EXPECT_DOUBLE_EQ(apply_deadband(-x, db, DeadbandStyle::offset), -off);
        EXPECT_LE(std::abs(off), std::abs(x));
        const auto branch = classify_deadband(x, db);
        EXPECT_DOUBLE_EQ(apply_deadband(x, db, DeadbandStyle::offset, branch), off);
    }
}

TEST(Deadband, OffsetIsContinuousAtEdge)
{
    const double db = 0.036;
    EXPECT_NEAR(apply_deadband(-db - 1e-9, db, DeadbandStyle::offset), 0.0, 1e-8);
    EXPECT_NEAR(apply_deadband(-db - 1e-9, db, DeadbandStyle::step), -db, 1e-8);
}

TEST(Governor, DisabledGroupIsInert)
{
    auto g = unit_group();
    g.governor_enabled = false;
    const auto r = governor_derivatives({0.3, 0.2, DeadbandBranch::below}, -0.01, g, 60.0);
    EXPECT_EQ(r.d_lag, 0.0);
    EXPECT_EQ(r.d_lead_lag, 0.0);
    EXPECT_EQ(r.mech_power_pu, 0.0);
}

TEST(Governor, SteadyStateIsDroopGain)
{
    auto g = unit_group();
    const double dev_pu = -0.001;
    const auto s = hold({}, g, dev_pu, 120.0, 1e-3);
    const double expected = -dev_pu / g.droop_pu;  // pu of capacity
    EXPECT_NEAR(governor_output(s, g), expected, 1e-4);
}

TEST(Governor, LeadLagMatchesClosedForm)
{
    // With T_g much smaller than T_lag the lead-lag step response is
    // K (1 - (1 - T_lead/T_lag) exp(-t/T_lag)).
    auto g = unit_group();
    g.t_gov_s = 1e-3;
    const double dev_pu = -0.0005;
    const double k = -dev_pu / g.droop_pu;
    for (double t : {1.0, 5.0, 10.0, 30.0}) {
        const auto s = hold({}, g, dev_pu, t, 1e-4);
        const double expected = k * (1.0 - (1.0 - g.t_lead_s / g.t_lag_s) * std::exp(-t / g.t_lag_s));
        EXPECT_NEAR(governor_output(s, g), expected, 2e-3 * k) << "t=" << t;
    }
}

TEST(Governor, OutputClampedToHeadroom)
{
    auto g = unit_group();
    g.headroom_mw = 50.0;
    const auto s = hold({}, g, -0.01, 100.0, 1e-3);
    EXPECT_NEAR(governor_output(s, g), 0.05, 1e-12);
    const auto over = hold({}, g, 0.01, 100.0, 1e-3);
    EXPECT_EQ(governor_output(over, g), 0.0);
}

TEST(Frl, TripsAfterContinuousDelay)
{
    FrlParams p{2500.0, 59.7, 0.5, true};
    FrlState s;
    double relief = 0.0;
    std::optional<double> tripped_at;
    for (int k = 0; k <= 400; ++k) {
        const double t = k * 0.005;
        const double f = t < 1.0 ? 60.0 : 59.6;
        const auto u = frl_update(s, f, t, p);
        s = u.state;
        relief = u.relief_mw;
        if (u.tripped_now) {
            EXPECT_FALSE(tripped_at.has_value());
            tripped_at = t;
        }
    }
    ASSERT_TRUE(tripped_at.has_value());
    EXPECT_NEAR(*tripped_at, 1.5, 1e-9);
    EXPECT_EQ(relief, 2500.0);
}

TEST(Frl, ResetsWhenFrequencyRecoversBeforeDelay)
{
    FrlParams p{100.0, 59.7, 0.5, true};
    FrlState s;
    bool tripped = false;
    for (int k = 0; k <= 400; ++k) {
        const double t = k * 0.005;
        // Dips below threshold for 0.3 s at a time.
        const double f = std::fmod(t, 0.6) < 0.3 ? 59.6 : 59.8;
        const auto u = frl_update(s, f, t, p);
        s = u.state;
        tripped = tripped || u.tripped_now;
    }
    EXPECT_FALSE(tripped);
}

TEST(Ufls, InterpolatedStrictCrossing)
{
    const std::vector<double> t{0.0, 1.0, 2.0, 3.0};
    const std::vector<double> f{60.0, 59.5, 59.1, 59.0};
    const auto x = ufls_crossing(t, f, 59.3);
    ASSERT_TRUE(x.has_value());
    EXPECT_NEAR(*x, 1.5, 1e-12);
    EXPECT_FALSE(ufls_crossing(t, f, 58.0).has_value());
    const std::vector<double> touching{60.0, 59.3, 60.0, 60.0};
    EXPECT_FALSE(ufls_crossing(t, touching, 59.3).has_value());
}
