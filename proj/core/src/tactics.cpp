#include "gridfreq/tactics.hpp"

#include <array>
#include <utility>

#include <fmt/core.h>

namespace gridfreq {

namespace {

constexpr std::array<std::pair<TacticKind, std::string_view>, 7> kKindNames{{
    {TacticKind::baseline, "baseline"},
    {TacticKind::SG1, "SG1"},
    {TacticKind::SG2, "SG2"},
    {TacticKind::SG3, "SG3"},
    {TacticKind::FRL, "FRL"},
    {TacticKind::ES1, "ES1"},
    {TacticKind::ES2, "ES2"},
}};

}  // namespace

std::string_view to_string(TacticKind kind)
{
    for (const auto& [k, name] : kKindNames) {
        if (k == kind) {
            return name;
        }
    }
    return "unknown";
}

std::optional<TacticKind> parse_tactic_kind(std::string_view text)
{
    for (const auto& [k, name] : kKindNames) {
        if (name == text) {
            return k;
        }
    }
    return std::nullopt;
}

std::vector<Issue> tactic_issues(const TacticSpec& t, const std::string& path)
{
    std::vector<Issue> out;
    // Each override is required for its own kind and forbidden for the others.
    auto expect = [&](bool wanted, bool present, const char* field) {
        if (wanted && !present) {
            out.push_back({path + "." + field, fmt::format("required for a {} tactic", to_string(t.kind))});
        }
        else if (!wanted && present) {
            out.push_back({path + "." + field, fmt::format("not allowed for a {} tactic", to_string(t.kind))});
        }
    };
    const bool sg1 = t.kind == TacticKind::SG1;
    const bool sg2 = t.kind == TacticKind::SG2;
    const bool sg3 = t.kind == TacticKind::SG3;
    const bool frl = t.kind == TacticKind::FRL;
    const bool es = t.kind == TacticKind::ES1 || t.kind == TacticKind::ES2;

    if (t.name.empty()) {
        out.push_back({path + ".name", "must not be empty"});
    }
    expect(sg1, t.droop_pu.has_value(), "droop_pu");
    expect(sg2, t.deadband_hz.has_value(), "deadband_hz");
    if (!sg2 && t.deadband_style) {
        expect(false, true, "deadband_style");
    }
    expect(sg3, t.governor_ratio.has_value(), "governor_ratio");
    expect(frl, t.frl.has_value(), "frl");
    expect(es, !t.storage.empty(), "storage");

    if (t.kind == TacticKind::ES2) {
        for (std::size_t j = 0; j < t.storage.size(); ++j) {
            if (!(t.storage[j].e_limit_mws < kUnlimitedEnergyMws)) {
                out.push_back({fmt::format("{}.storage[{}].e_limit_mws", path, j),
                               "an ES2 unit needs a finite energy limit"});
            }
        }
    }
    return out;
}

ScenarioConfig apply_tactic(const ScenarioConfig& base, const TacticSpec& t)
{
    if (auto issues = tactic_issues(t, "tactic '" + t.name + "'"); !issues.empty()) {
        throw ValidationError(std::move(issues));
    }
    ScenarioConfig out = base;
    switch (t.kind) {
    case TacticKind::baseline:
        break;
    case TacticKind::SG1:
        for (auto& g : out.fleet_template) {
            g.droop_pu = *t.droop_pu;
        }
        break;
    case TacticKind::SG2:
        for (auto& g : out.fleet_template) {
            g.deadband_hz = *t.deadband_hz;
            if (t.deadband_style) {
                g.deadband_style = *t.deadband_style;
            }
        }
        break;
    case TacticKind::SG3:
        out.governor_ratio = *t.governor_ratio;
        break;
    case TacticKind::FRL:
        out.frl = *t.frl;
        break;
    case TacticKind::ES1:
    case TacticKind::ES2:
        out.storage.insert(out.storage.end(), t.storage.begin(), t.storage.end());
        break;
    }
    return out;
}

TacticSpec baseline_tactic()
{
    TacticSpec t;
    t.name = "baseline";
    t.kind = TacticKind::baseline;
    return t;
}

}  // namespace gridfreq
