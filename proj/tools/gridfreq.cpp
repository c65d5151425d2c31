// gridfreq command line: simulate, compare and sweep scenario files.
//
// Exit codes: 0 success, 1 error, 2 usage error, 3 sweep finished with failed cells.

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gridfreq/config_io.hpp"
#include "gridfreq/csv_io.hpp"
#include "gridfreq/dynamics.hpp"
#include "gridfreq/experiment.hpp"
#include "gridfreq/metrics.hpp"

namespace fs = std::filesystem;
using namespace gridfreq;

namespace {

constexpr int kExitError = 1;
constexpr int kExitUsage = 2;
constexpr int kExitPartial = 3;

std::vector<std::string> split_list(const std::string& text)
{
    std::vector<std::string> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

// Tactic names may contain characters that are awkward in file names.
std::string file_stem(const std::string& name)
{
    std::string out = name;
    std::replace_if(
        out.begin(), out.end(), [](char c) { return !(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_'); },
        '_');
    return out;
}

int run_simulate(const std::string& cfg, const fs::path& out_dir, std::optional<double> dt, std::optional<double> horizon)
{
    auto config = load_scenario_file(resolve_scenario(cfg)).config;
    if (dt) {
        config.sim.dt_s = *dt;
    }
    if (horizon) {
        config.sim.horizon_s = *horizon;
        // A shortened run keeps whatever part of the settling window it still covers.
        auto& window = config.metrics.settle_window_s;
        const double room = *horizon - config.contingency.time_s;
        if (room > 0.0 && window[1] > room) {
            window = {window[0] < room ? window[0] : 0.0, room};
            std::cerr << "note: settling window clipped to [" << format_number(window[0]) << ", "
                      << format_number(window[1]) << "] s after the contingency\n";
        }
    }
    const auto trace = simulate(config);
    const auto metrics = compute_metrics(trace, config);
    fs::create_directories(out_dir);
    write_trace_csv(trace, out_dir / "trace.csv");
    write_events_csv(trace, out_dir / "events.csv");
    write_metrics_csv({{"baseline", metrics}}, out_dir / "metrics.csv");
    std::cout << "f_c_hz=" << format_number(metrics.nadir_hz) << " t_c_s=" << format_number(metrics.nadir_time_s)
              << " f_settle_hz=" << format_number(metrics.settle_hz)
              << " t_ufls_s=" << (metrics.ufls_time_s ? format_number(*metrics.ufls_time_s) : "none") << "\n";
    return 0;
}

int run_compare_cmd(const std::string& cfg, const std::string& tactic_list, const fs::path& out_dir, unsigned jobs)
{
    const auto file = load_scenario_file(resolve_scenario(cfg));
    std::vector<TacticSpec> chosen;
    const auto names = split_list(tactic_list);
    if (names.empty()) {
        throw Error("--tactics needs at least one name");
    }
    for (const auto& name : names) {
        if (name == "all") {
            chosen.insert(chosen.end(), file.tactics.begin(), file.tactics.end());
            continue;
        }
        if (name == "baseline") {
            chosen.push_back(baseline_tactic());
            continue;
        }
        const auto it = std::find_if(file.tactics.begin(), file.tactics.end(),
                                     [&](const TacticSpec& t) { return t.name == name; });
        if (it == file.tactics.end()) {
            std::string known = "baseline";
            for (const auto& t : file.tactics) {
                known += ", " + t.name;
            }
            throw Error("unknown tactic '" + name + "' (defined: " + known + ")");
        }
        chosen.push_back(*it);
    }

    const auto rows = run_compare(file.config, chosen, jobs);
    fs::create_directories(out_dir);
    write_metrics_csv(metrics_rows(rows), out_dir / "metrics.csv");
    for (const auto& row : rows) {
        write_trace_csv(row.trace, out_dir / ("trace_" + file_stem(row.tactic) + ".csv"));
        write_events_csv(row.trace, out_dir / ("events_" + file_stem(row.tactic) + ".csv"));
    }
    for (const auto& row : rows) {
        std::cout << row.tactic << ": f_c_hz=" << format_number(row.metrics.nadir_hz)
                  << " t_ufls_s=" << (row.metrics.ufls_time_s ? format_number(*row.metrics.ufls_time_s) : "none")
                  << "\n";
    }
    return 0;
}

int run_sweep_cmd(const fs::path& sweep_file, const fs::path& out_dir, unsigned jobs)
{
    const auto spec = load_sweep_spec(sweep_file);
    const auto result = run_sweep(spec, jobs);
    fs::create_directories(out_dir);
    write_text_file(out_dir / "sweep.csv", sweep_csv(result));
    const auto failed = std::count_if(result.cells.begin(), result.cells.end(),
                                      [](const SweepCell& c) { return !c.error.empty(); });
    std::cout << result.cells.size() << " cells, " << failed << " failed\n";
    if (failed > 0) {
        for (const auto& c : result.cells) {
            if (!c.error.empty()) {
                std::cerr << "gridfreq: cell failed: " << c.error << "\n";
            }
        }
        return kExitPartial;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Primary frequency response simulator"};
    app.require_subcommand(1);

    std::string cfg;
    std::string out_dir;
    std::optional<double> dt;
    std::optional<double> horizon;
    std::string tactics;
    unsigned jobs = 1;

    auto* sim = app.add_subcommand("simulate", "Run one scenario and write trace, events and metrics CSVs");
    sim->add_option("cfg", cfg, "Scenario file or bundled scenario name")->required();
    sim->add_option("--out", out_dir, "Output directory")->required();
    sim->add_option("--dt", dt, "Integration step, s")->check(CLI::PositiveNumber);
    sim->add_option("--horizon", horizon, "Simulated time, s")->check(CLI::PositiveNumber);

    auto* cmp = app.add_subcommand("compare", "Run the baseline and a list of tactics");
    cmp->add_option("cfg", cfg, "Scenario file or bundled scenario name")->required();
    cmp->add_option("--tactics", tactics, "Comma-separated tactic names, or 'all'")->required();
    cmp->add_option("--out", out_dir, "Output directory")->required();
    cmp->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

    auto* swp = app.add_subcommand("sweep", "Evaluate a full-factorial parameter grid");
    swp->add_option("sweepcfg", cfg, "Sweep file")->required()->check(CLI::ExistingFile);
    swp->add_option("--out", out_dir, "Output directory")->required();
    swp->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (sim->parsed()) {
            return run_simulate(cfg, out_dir, dt, horizon);
        }
        if (cmp->parsed()) {
            return run_compare_cmd(cfg, tactics, out_dir, jobs);
        }
        return run_sweep_cmd(cfg, out_dir, jobs);
    }
    catch (const std::exception& e) {
        std::cerr << "gridfreq: " << e.what() << "\n";
        return kExitError;
    }
}
