#include "gridfreq/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

#include <fmt/core.h>
#include <yaml-cpp/yaml.h>

#include "gridfreq/dynamics.hpp"

#ifndef GRIDFREQ_DEFAULT_SCENARIO_DIR
#define GRIDFREQ_DEFAULT_SCENARIO_DIR "scenarios"
#endif

namespace gridfreq {

namespace {

// Runs fn(i) for i in [0, n) on up to `jobs` threads. fn must not throw.
template <class Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn&& fn)
{
    const auto workers = std::min<std::size_t>(std::max(1u, jobs), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (auto i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                fn(i);
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
}

std::string current_message(const std::exception_ptr& ep)
{
    try {
        std::rethrow_exception(ep);
    }
    catch (const std::exception& e) {
        return e.what();
    }
    catch (...) {
        return "unknown error";
    }
}

}  // namespace

std::vector<CompareRow> run_compare(const ScenarioConfig& base, const std::vector<TacticSpec>& tactics, unsigned jobs)
{
    std::vector<TacticSpec> order;
    const auto baseline = std::find_if(tactics.begin(), tactics.end(),
                                       [](const TacticSpec& t) { return t.kind == TacticKind::baseline; });
    order.push_back(baseline != tactics.end() ? *baseline : baseline_tactic());
    for (auto it = tactics.begin(); it != tactics.end(); ++it) {
        if (it != baseline) {
            order.push_back(*it);
        }
    }

    std::vector<CompareRow> rows(order.size());
    std::vector<std::exception_ptr> failures(order.size());
    parallel_for(order.size(), jobs, [&](std::size_t i) {
        try {
            auto& row = rows[i];
            row.tactic = order[i].name;
            row.config = apply_tactic(base, order[i]);
            row.trace = simulate(row.config);
            row.metrics = compute_metrics(row.trace, row.config);
        }
        catch (...) {
            failures[i] = std::current_exception();
        }
    });
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (failures[i]) {
            throw Error(fmt::format("tactic '{}': {}", order[i].name, current_message(failures[i])));
        }
    }
    return rows;
}

std::vector<MetricsRow> metrics_rows(const std::vector<CompareRow>& rows)
{
    std::vector<MetricsRow> out;
    out.reserve(rows.size());
    for (const auto& r : rows) {
        out.push_back({r.tactic, r.metrics});
    }
    return out;
}

bool SweepResult::all_ok() const
{
    return std::all_of(cells.begin(), cells.end(), [](const SweepCell& c) { return c.error.empty(); });
}

void validate_sweep(const SweepSpec& spec)
{
    std::vector<Issue> issues;
    if (spec.axes.empty()) {
        issues.push_back({"axes", "at least one axis is required"});
    }
    for (std::size_t a = 0; a < spec.axes.size(); ++a) {
        if (spec.axes[a].field.empty()) {
            issues.push_back({fmt::format("axes[{}].field", a), "must not be empty"});
        }
        if (spec.axes[a].values.empty()) {
            issues.push_back({fmt::format("axes[{}].values", a), "must not be empty"});
        }
    }
    if (spec.metrics.empty()) {
        issues.push_back({"metrics", "at least one metric is required"});
    }
    const auto& known = metric_columns();
    for (std::size_t m = 0; m < spec.metrics.size(); ++m) {
        if (std::find(known.begin(), known.end(), spec.metrics[m]) == known.end()) {
            issues.push_back({fmt::format("metrics[{}]", m), "unknown metric '" + spec.metrics[m] + "'"});
        }
    }
    if (spec.tactic) {
        auto t = tactic_issues(*spec.tactic, "tactic");
        issues.insert(issues.end(), t.begin(), t.end());
    }
    if (!issues.empty()) {
        throw ValidationError(std::move(issues));
    }
}

ScenarioConfig sweep_cell_config(const SweepSpec& spec, const std::vector<double>& axis_values)
{
    const auto base = spec.tactic ? apply_tactic(spec.base, *spec.tactic) : spec.base;
    std::vector<FieldOverride> overrides;
    for (std::size_t a = 0; a < spec.axes.size(); ++a) {
        overrides.push_back({spec.axes[a].field, axis_values.at(a)});
    }
    return apply_overrides(base, overrides);
}

SweepResult run_sweep(const SweepSpec& spec, unsigned jobs)
{
    validate_sweep(spec);
    SweepResult result;
    result.metric_names = spec.metrics;
    std::size_t total = 1;
    for (const auto& axis : spec.axes) {
        result.axis_fields.push_back(axis.field);
        total *= axis.values.size();
    }
    result.cells.resize(total);
    for (std::size_t i = 0; i < total; ++i) {
        auto rem = i;
        auto& values = result.cells[i].axis_values;
        values.resize(spec.axes.size());
        for (std::size_t a = spec.axes.size(); a-- > 0;) {
            values[a] = spec.axes[a].values[rem % spec.axes[a].values.size()];
            rem /= spec.axes[a].values.size();
        }
    }
    parallel_for(total, jobs, [&](std::size_t i) {
        auto& cell = result.cells[i];
        try {
            const auto config = sweep_cell_config(spec, cell.axis_values);
            cell.metrics = compute_metrics(simulate(config), config);
        }
        catch (...) {
            cell.error = current_message(std::current_exception());
        }
    });
    return result;
}

std::string sweep_csv(const SweepResult& result)
{
    std::string out;
    for (const auto& f : result.axis_fields) {
        out += csv_field(f) + ",";
    }
    for (const auto& m : result.metric_names) {
        out += m + ",";
    }
    out += "error\n";
    for (const auto& cell : result.cells) {
        for (double v : cell.axis_values) {
            out += format_number(v) + ",";
        }
        for (const auto& m : result.metric_names) {
            if (cell.metrics) {
                if (const auto v = metric_value(*cell.metrics, m)) {
                    out += format_number(*v);
                }
            }
            out += ",";
        }
        out += csv_field(cell.error) + "\n";
    }
    return out;
}

SweepSpec parse_sweep_spec(std::string_view text, const std::filesystem::path& sweep_dir)
{
    YAML::Node root;
    try {
        root = YAML::Load(std::string(text));
    }
    catch (const YAML::ParserException& e) {
        throw ConfigError(e.msg, e.mark.line + 1, e.mark.column + 1);
    }
    std::vector<Issue> issues;
    if (!root.IsMap()) {
        throw ConfigError(std::vector<Issue>{{"", "sweep file must be a mapping with base, axes and metrics"}});
    }
    for (auto it = root.begin(); it != root.end(); ++it) {
        const auto key = it->first.Scalar();
        if (key != "base" && key != "tactic" && key != "axes" && key != "metrics") {
            issues.push_back({key, "unknown key"});
        }
    }
    for (const char* key : {"base", "axes", "metrics"}) {
        if (!root[key]) {
            issues.push_back({key, "missing required field"});
        }
    }
    if (!issues.empty()) {
        throw ConfigError(std::move(issues));
    }

    SweepSpec spec;
    ScenarioFile file;
    try {
        const auto base_name = root["base"].as<std::string>();
        const auto local = sweep_dir / base_name;
        file = load_scenario_file(std::filesystem::exists(local) ? local : resolve_scenario(base_name));
    }
    catch (const YAML::Exception&) {
        throw ConfigError(std::vector<Issue>{{"base", "expected a scenario file name"}});
    }
    spec.base = file.config;

    if (const auto t = root["tactic"]) {
        const auto name = t.Scalar();
        const auto found = std::find_if(file.tactics.begin(), file.tactics.end(),
                                        [&](const TacticSpec& s) { return s.name == name; });
        if (found == file.tactics.end()) {
            throw ConfigError(std::vector<Issue>{{"tactic", "'" + name + "' is not defined in the base scenario"}});
        }
        spec.tactic = *found;
    }

    const auto axes = root["axes"];
    if (!axes.IsSequence()) {
        throw ConfigError(std::vector<Issue>{{"axes", "expected a list"}});
    }
    for (std::size_t a = 0; a < axes.size(); ++a) {
        const auto p = fmt::format("axes[{}]", a);
        const auto ax = axes[a];
        SweepAxis axis;
        try {
            if (!ax.IsMap() || !ax["field"]) {
                throw ConfigError(std::vector<Issue>{{p, "expected {field, values} or {field, range}"}});
            }
            for (auto it = ax.begin(); it != ax.end(); ++it) {
                const auto key = it->first.Scalar();
                if (key != "field" && key != "values" && key != "range") {
                    throw ConfigError(std::vector<Issue>{{p + "." + key, "unknown key"}});
                }
            }
            axis.field = ax["field"].as<std::string>();
            if (ax["values"] && ax["range"]) {
                throw ConfigError(std::vector<Issue>{{p, "give either values or range, not both"}});
            }
            if (ax["values"]) {
                axis.values = ax["values"].as<std::vector<double>>();
            }
            else if (ax["range"]) {
                const auto r = ax["range"].as<std::vector<double>>();
                if (r.size() != 3 || !(r[2] > 0.0) || r[1] < r[0]) {
                    throw ConfigError(std::vector<Issue>{{p + ".range", "expected [start, stop, step] with step > 0 and stop >= start"}});
                }
                const auto n = static_cast<std::size_t>(std::floor((r[1] - r[0]) / r[2] + 1e-9));
                for (std::size_t k = 0; k <= n; ++k) {
                    axis.values.push_back(r[0] + static_cast<double>(k) * r[2]);
                }
            }
            else {
                throw ConfigError(std::vector<Issue>{{p, "missing values or range"}});
            }
        }
        catch (const YAML::Exception& e) {
            throw ConfigError(std::vector<Issue>{{p, e.msg}});
        }
        spec.axes.push_back(std::move(axis));
    }

    try {
        spec.metrics = root["metrics"].as<std::vector<std::string>>();
    }
    catch (const YAML::Exception&) {
        throw ConfigError(std::vector<Issue>{{"metrics", "expected a list of metric names"}});
    }
    validate_sweep(spec);
    return spec;
}

SweepSpec load_sweep_spec(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open sweep file", path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_sweep_spec(buf.str(), path.parent_path());
}

std::filesystem::path bundled_scenario_dir()
{
    if (const char* env = std::getenv("GRIDFREQ_SEED_SCENARIOS"); env && *env) {
        return env;
    }
    return GRIDFREQ_DEFAULT_SCENARIO_DIR;
}

std::filesystem::path resolve_scenario(const std::string& name_or_path)
{
    namespace fs = std::filesystem;
    if (fs::is_regular_file(name_or_path)) {
        return name_or_path;
    }
    const auto dir = bundled_scenario_dir();
    for (const auto& candidate : {dir / name_or_path, dir / (name_or_path + ".cfg")}) {
        if (fs::is_regular_file(candidate)) {
            return candidate;
        }
    }
    throw IoError(fmt::format("no such scenario (also searched {})", dir.string()), name_or_path);
}

}  // namespace gridfreq
