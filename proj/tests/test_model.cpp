#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "gridfreq/model.hpp"
#include "support.hpp"

using namespace gridfreq;
using gridfreq::testing::bundled;
using gridfreq::testing::single_group;

namespace {

bool has_issue(const std::vector<Issue>& issues, const std::string& path)
{
    return std::any_of(issues.begin(), issues.end(), [&](const Issue& i) { return i.path == path; });
}

ScenarioConfig three_groups()
{
    auto c = single_group(1000.0, 50.0, 4.0, 0.05, 1.0, true);
    c.fleet_template.clear();
    const double caps[] = {500.0, 300.0, 200.0};
    for (int i = 0; i < 3; ++i) {
        GeneratorGroup g;
        g.name = "g" + std::to_string(i);
        g.capacity_mw = caps[i];
        g.inertia_s = 2.0 + i;
        g.headroom_mw = caps[i] * 0.1;
        c.fleet_template.push_back(g);
    }
    return c;
}

}  // namespace

TEST(Validation, AcceptsSingleGroup)
{
    EXPECT_TRUE(scenario_issues(single_group(1000.0, 50.0, 4.0, 0.05, 1.0, true)).empty());
}

TEST(Validation, ReportsEveryIssueWithPath)
{
    auto c = three_groups();
    c.system.load_mw = -1.0;
    c.fleet_template[1].droop_pu = 0.0;
    c.fleet_template[2].headroom_mw = c.fleet_template[2].capacity_mw * 2.0;
    c.pv_penetration = 0.9;
    c.wind_penetration = 0.2;
    c.sim.dt_s = 0.0;
    const auto issues = scenario_issues(c);
    EXPECT_TRUE(has_issue(issues, "system.load_mw"));
    EXPECT_TRUE(has_issue(issues, "fleet[1].droop_pu"));
    EXPECT_TRUE(has_issue(issues, "fleet[2].headroom_mw"));
    EXPECT_TRUE(has_issue(issues, "simulation.dt_s"));
    try {
        validate_scenario(c);
        FAIL() << "expected ValidationError";
    }
    catch (const ValidationError& e) {
        EXPECT_EQ(e.issues().size(), issues.size());
        EXPECT_NE(std::string(e.what()).find("fleet[1].droop_pu"), std::string::npos);
    }
}

TEST(Validation, DuplicateGroupNamesRejected)
{
    auto c = three_groups();
    c.fleet_template[2].name = "g0";
    EXPECT_THROW(validate_scenario(c), ValidationError);
}

TEST(Validation, EmptyFleetRejected)
{
    auto c = three_groups();
    c.fleet_template.clear();
    EXPECT_THROW(validate_scenario(c), ValidationError);
}

TEST(Validation, AllBundledScenariosValid)
{
    for (const char* sys : {"ei", "ercot"}) {
        for (int p : {20, 40, 60, 80}) {
            const auto name = std::string(sys) + std::to_string(p);
            EXPECT_NO_THROW(validate_scenario(bundled(name).config)) << name;
        }
    }
}

TEST(PerUnit, RoundTrip)
{
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> mw(-1e5, 1e5);
    std::uniform_real_distribution<double> base(1.0, 1e6);
    for (int i = 0; i < 200; ++i) {
        const double v = mw(rng);
        const double b = base(rng);
        EXPECT_NEAR(from_pu(to_pu(v, b), b), v, 1e-9 * std::max(1.0, std::abs(v)));
    }
}

TEST(Fleet, ScalesBySynchronousShare)
{
    auto c = three_groups();
    c.pv_penetration = 0.3;
    c.wind_penetration = 0.2;
    const auto f = build_fleet(c);
    ASSERT_EQ(f.groups.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_DOUBLE_EQ(f.groups[i].capacity_mw, c.fleet_template[i].capacity_mw * 0.5);
        EXPECT_DOUBLE_EQ(f.groups[i].headroom_mw, c.fleet_template[i].headroom_mw * 0.5);
    }
    EXPECT_DOUBLE_EQ(f.s_base_mva, c.system.s_base_mva);
    const double h = (2.0 * 250.0 + 3.0 * 150.0 + 4.0 * 100.0) / 1000.0;
    EXPECT_NEAR(f.h_sys_s, h, 1e-12);
    EXPECT_NEAR(system_inertia_s(f.groups, f.s_base_mva), h, 1e-12);
}

TEST(Fleet, GovernorRatioNearestAttainable)
{
    auto c = three_groups();
    c.governor_ratio = 0.5;
    auto f = build_fleet(c);
    EXPECT_TRUE(f.groups[0].governor_enabled);
    EXPECT_FALSE(f.groups[1].governor_enabled);
    EXPECT_FALSE(f.groups[2].governor_enabled);
    EXPECT_DOUBLE_EQ(f.governor_ratio(), 0.5);

    c.governor_ratio = 1.0;
    f = build_fleet(c);
    EXPECT_DOUBLE_EQ(f.governor_ratio(), 1.0);
    EXPECT_DOUBLE_EQ(f.enabled_capacity_mw(), f.synchronous_capacity_mw());
}

TEST(Fleet, RatioBeyondEligibleCapacityFails)
{
    auto c = three_groups();
    c.fleet_template[0].governor_enabled = false;
    c.governor_ratio = 1.0;
    EXPECT_THROW(build_fleet(c), Error);
}

TEST(Fleet, EnabledSetGrowsWithRatio)
{
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> cap(50.0, 800.0);
    for (int trial = 0; trial < 50; ++trial) {
        auto c = single_group(1000.0, 50.0, 4.0, 0.05, 1.0, true);
        c.fleet_template.clear();
        const int n = 2 + trial % 6;
        for (int i = 0; i < n; ++i) {
            GeneratorGroup g;
            g.name = "g" + std::to_string(i);
            g.capacity_mw = cap(rng);
            g.inertia_s = 3.0;
            g.headroom_mw = g.capacity_mw * 0.1;
            c.fleet_template.push_back(g);
        }
        std::vector<bool> prev(n, false);
        double prev_ratio = 0.0;
        for (double r = 0.0; r <= 1.0 + 1e-12; r += 0.05) {
            c.governor_ratio = std::min(r, 1.0);
            const auto f = build_fleet(c);
            for (int i = 0; i < n; ++i) {
                if (prev[i]) {
                    EXPECT_TRUE(f.groups[i].governor_enabled) << "trial " << trial << " ratio " << r;
                }
                prev[i] = f.groups[i].governor_enabled;
            }
            EXPECT_GE(f.governor_ratio(), prev_ratio - 1e-12);
            prev_ratio = f.governor_ratio();
        }
        EXPECT_NEAR(prev_ratio, 1.0, 1e-12);
    }
}
