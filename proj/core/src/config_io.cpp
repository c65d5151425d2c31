#include "gridfreq/config_io.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <initializer_list>
#include <sstream>

#include <fmt/core.h>
#include <yaml-cpp/yaml.h>

namespace gridfreq {

namespace {

std::string where(const YAML::Node& n)
{
    const auto m = n.Mark();
    return m.is_null() ? std::string{} : fmt::format(" (line {})", m.line + 1);
}

// Collects schema issues while walking a YAML tree.
class Reader {
public:
    void issue(const std::string& path, const std::string& message) { issues_.push_back({path, message}); }
    std::vector<Issue>& issues() { return issues_; }

    bool is_map(const YAML::Node& n, const std::string& path)
    {
        if (n.IsMap()) {
            return true;
        }
        issue(path, "expected a mapping" + where(n));
        return false;
    }

    bool is_seq(const YAML::Node& n, const std::string& path)
    {
        if (n.IsSequence()) {
            return true;
        }
        issue(path, "expected a list" + where(n));
        return false;
    }

    void allow_keys(const YAML::Node& n, const std::string& path, std::initializer_list<std::string_view> allowed)
    {
        for (auto it = n.begin(); it != n.end(); ++it) {
            const auto key = it->first.Scalar();
            bool known = false;
            for (auto a : allowed) {
                known = known || a == key;
            }
            if (!known) {
                issue(join(path, key), "unknown key" + where(it->first));
            }
        }
    }

    template <class T>
    void read(const YAML::Node& map, const std::string& path, const char* key, T& dst, bool required = false)
    {
        const YAML::Node n = map[key];
        const auto p = join(path, key);
        if (!n) {
            if (required) {
                issue(p, "missing required field");
            }
            return;
        }
        if (!n.IsScalar()) {
            issue(p, "expected a scalar" + where(n));
            return;
        }
        try {
            dst = n.as<T>();
        }
        catch (const YAML::BadConversion&) {
            issue(p, fmt::format("cannot read '{}' as {}{}", n.Scalar(), type_name<T>(), where(n)));
        }
    }

    template <class E>
    void read_enum(const YAML::Node& map, const std::string& path, const char* key, E& dst,
                   std::initializer_list<std::pair<std::string_view, E>> names)
    {
        std::string text;
        read(map, path, key, text);
        if (text.empty()) {
            return;
        }
        for (const auto& [name, value] : names) {
            if (name == text) {
                dst = value;
                return;
            }
        }
        std::string options;
        for (const auto& [name, value] : names) {
            options += (options.empty() ? "" : ", ") + std::string(name);
        }
        issue(join(path, key), fmt::format("'{}' is not one of {}{}", text, options, where(map[key])));
    }

    static std::string join(const std::string& path, std::string_view key)
    {
        return path.empty() ? std::string(key) : path + "." + std::string(key);
    }

private:
    template <class T>
    static const char* type_name()
    {
        if constexpr (std::is_same_v<T, double>) {
            return "a number";
        }
        else if constexpr (std::is_same_v<T, int>) {
            return "an integer";
        }
        else if constexpr (std::is_same_v<T, bool>) {
            return "a boolean";
        }
        else {
            return "a string";
        }
    }

    std::vector<Issue> issues_;
};

const std::initializer_list<std::pair<std::string_view, DeadbandStyle>> kStyles{
    {"offset", DeadbandStyle::offset}, {"step", DeadbandStyle::step}};

SystemParams read_system(Reader& r, const YAML::Node& n, const std::string& p)
{
    SystemParams s;
    if (!r.is_map(n, p)) {
        return s;
    }
    r.allow_keys(n, p, {"f_nominal_hz", "load_mw", "s_base_mva", "load_damping_pu", "ufls_threshold_hz"});
    r.read(n, p, "f_nominal_hz", s.f_nominal_hz);
    r.read(n, p, "load_mw", s.load_mw, true);
    s.s_base_mva = s.load_mw;
    r.read(n, p, "s_base_mva", s.s_base_mva);
    r.read(n, p, "load_damping_pu", s.load_damping_pu);
    r.read(n, p, "ufls_threshold_hz", s.ufls_threshold_hz, true);
    return s;
}

// Governor fields shared by fleet groups and group_defaults.
void read_governor_fields(Reader& r, const YAML::Node& n, const std::string& p, GeneratorGroup& g)
{
    r.read(n, p, "governor_enabled", g.governor_enabled);
    r.read(n, p, "droop_pu", g.droop_pu);
    r.read(n, p, "deadband_hz", g.deadband_hz);
    r.read_enum(n, p, "deadband_style", g.deadband_style, kStyles);
    r.read(n, p, "t_gov_s", g.t_gov_s);
    r.read(n, p, "t_lead_s", g.t_lead_s);
    r.read(n, p, "t_lag_s", g.t_lag_s);
}

GeneratorGroup read_group_defaults(Reader& r, const YAML::Node& n, const std::string& p)
{
    GeneratorGroup g;
    if (!n || !r.is_map(n, p)) {
        return g;
    }
    r.allow_keys(n, p,
                 {"governor_enabled", "droop_pu", "deadband_hz", "deadband_style", "t_gov_s", "t_lead_s", "t_lag_s"});
    read_governor_fields(r, n, p, g);
    return g;
}

GeneratorGroup read_group(Reader& r, const YAML::Node& n, const std::string& p, const GeneratorGroup& defaults)
{
    GeneratorGroup g = defaults;
    if (!r.is_map(n, p)) {
        return g;
    }
    r.allow_keys(n, p,
                 {"name", "capacity_mw", "inertia_s", "governor_enabled", "droop_pu", "deadband_hz", "deadband_style",
                  "t_gov_s", "t_lead_s", "t_lag_s", "headroom_mw"});
    r.read(n, p, "name", g.name, true);
    r.read(n, p, "capacity_mw", g.capacity_mw, true);
    r.read(n, p, "inertia_s", g.inertia_s, true);
    read_governor_fields(r, n, p, g);
    g.headroom_mw = g.capacity_mw;
    r.read(n, p, "headroom_mw", g.headroom_mw);
    return g;
}

FrlParams read_frl(Reader& r, const YAML::Node& n, const std::string& p)
{
    FrlParams f;
    if (!r.is_map(n, p)) {
        return f;
    }
    r.allow_keys(n, p, {"block_mw", "threshold_hz", "delay_s", "reset_on_recovery"});
    r.read(n, p, "block_mw", f.block_mw, true);
    r.read(n, p, "threshold_hz", f.threshold_hz);
    r.read(n, p, "delay_s", f.delay_s);
    r.read(n, p, "reset_on_recovery", f.reset_on_recovery);
    return f;
}

StorageController read_controller(Reader& r, const YAML::Node& n, const std::string& p)
{
    if (!n) {
        r.issue(p, "missing required field");
        return DroopCtl{};
    }
    if (!r.is_map(n, p)) {
        return DroopCtl{};
    }
    std::string kind;
    r.read(n, p, "kind", kind, true);
    if (kind == "droop") {
        DroopCtl c;
        r.allow_keys(n, p, {"kind", "droop_pu", "deadband_hz", "t_filter_s"});
        r.read(n, p, "droop_pu", c.droop_pu);
        r.read(n, p, "deadband_hz", c.deadband_hz);
        r.read(n, p, "t_filter_s", c.t_filter_s);
        return c;
    }
    if (kind == "step") {
        StepCtl c;
        r.allow_keys(n, p,
                     {"kind", "threshold_hz", "delay_s", "alpha", "rocof_window_s", "h_sys_assumed_s",
                      "p_sys_assumed_mw"});
        r.read(n, p, "threshold_hz", c.threshold_hz);
        r.read(n, p, "delay_s", c.delay_s);
        r.read(n, p, "alpha", c.alpha);
        r.read(n, p, "rocof_window_s", c.rocof_window_s);
        double v = 0.0;
        if (n["h_sys_assumed_s"]) {
            r.read(n, p, "h_sys_assumed_s", v);
            c.h_sys_assumed_s = v;
        }
        if (n["p_sys_assumed_mw"]) {
            r.read(n, p, "p_sys_assumed_mw", v);
            c.p_sys_assumed_mw = v;
        }
        return c;
    }
    if (!kind.empty()) {
        r.issue(Reader::join(p, "kind"), fmt::format("'{}' is not one of droop, step{}", kind, where(n["kind"])));
    }
    return DroopCtl{};
}

StorageUnit read_storage_unit(Reader& r, const YAML::Node& n, const std::string& p)
{
    StorageUnit s;
    if (!r.is_map(n, p)) {
        return s;
    }
    r.allow_keys(n, p, {"name", "p_max_mw", "e_limit_mws", "n_locations", "withdrawal_ramp_s", "controller"});
    r.read(n, p, "name", s.name, true);
    r.read(n, p, "p_max_mw", s.p_max_mw, true);
    r.read(n, p, "e_limit_mws", s.e_limit_mws);
    r.read(n, p, "n_locations", s.n_locations);
    r.read(n, p, "withdrawal_ramp_s", s.withdrawal_ramp_s);
    s.controller = read_controller(r, n["controller"], Reader::join(p, "controller"));
    return s;
}

std::vector<StorageUnit> read_storage_list(Reader& r, const YAML::Node& n, const std::string& p)
{
    std::vector<StorageUnit> out;
    if (!n || !r.is_seq(n, p)) {
        return out;
    }
    for (std::size_t j = 0; j < n.size(); ++j) {
        out.push_back(read_storage_unit(r, n[j], fmt::format("{}[{}]", p, j)));
    }
    return out;
}

SimulationSettings read_simulation(Reader& r, const YAML::Node& n, const std::string& p)
{
    SimulationSettings s;
    if (!n || !r.is_map(n, p)) {
        return s;
    }
    r.allow_keys(n, p, {"dt_s", "horizon_s", "network_mode", "coupling"});
    r.read(n, p, "dt_s", s.dt_s);
    r.read(n, p, "horizon_s", s.horizon_s);
    r.read_enum(n, p, "network_mode", s.network_mode,
                {{"coi", NetworkMode::coi}, {"multimachine", NetworkMode::multimachine}});
    const YAML::Node k = n["coupling"];
    const auto kp = Reader::join(p, "coupling");
    if (k && r.is_seq(k, kp)) {
        for (std::size_t i = 0; i < k.size(); ++i) {
            const auto rp = fmt::format("{}[{}]", kp, i);
            std::vector<double> row;
            if (r.is_seq(k[i], rp)) {
                for (std::size_t j = 0; j < k[i].size(); ++j) {
                    try {
                        row.push_back(k[i][j].as<double>());
                    }
                    catch (const YAML::Exception&) {
                        r.issue(fmt::format("{}[{}]", rp, j), "expected a number" + where(k[i][j]));
                    }
                }
            }
            s.coupling.push_back(std::move(row));
        }
    }
    return s;
}

MetricsSettings read_metrics(Reader& r, const YAML::Node& n, const std::string& p)
{
    MetricsSettings m;
    if (!n || !r.is_map(n, p)) {
        return m;
    }
    r.allow_keys(n, p, {"settle_window_s"});
    const YAML::Node w = n["settle_window_s"];
    const auto wp = Reader::join(p, "settle_window_s");
    if (w) {
        if (!w.IsSequence() || w.size() != 2) {
            r.issue(wp, "expected a list of two offsets [start, end]" + where(w));
        }
        else {
            try {
                m.settle_window_s = {w[0].as<double>(), w[1].as<double>()};
            }
            catch (const YAML::Exception&) {
                r.issue(wp, "expected numbers" + where(w));
            }
        }
    }
    return m;
}

TacticSpec read_tactic(Reader& r, const YAML::Node& n, const std::string& p)
{
    TacticSpec t;
    if (!r.is_map(n, p)) {
        return t;
    }
    r.allow_keys(n, p, {"name", "kind", "droop_pu", "deadband_hz", "deadband_style", "governor_ratio", "frl",
                        "storage"});
    r.read(n, p, "name", t.name, true);
    std::string kind;
    r.read(n, p, "kind", kind, true);
    if (const auto k = parse_tactic_kind(kind)) {
        t.kind = *k;
    }
    else if (!kind.empty()) {
        r.issue(Reader::join(p, "kind"),
                fmt::format("'{}' is not one of baseline, SG1, SG2, SG3, FRL, ES1, ES2{}", kind, where(n["kind"])));
        return t;
    }
    double v = 0.0;
    if (n["droop_pu"]) {
        r.read(n, p, "droop_pu", v);
        t.droop_pu = v;
    }
    if (n["deadband_hz"]) {
        r.read(n, p, "deadband_hz", v);
        t.deadband_hz = v;
    }
    if (n["deadband_style"]) {
        DeadbandStyle style = DeadbandStyle::offset;
        r.read_enum(n, p, "deadband_style", style, kStyles);
        t.deadband_style = style;
    }
    if (n["governor_ratio"]) {
        r.read(n, p, "governor_ratio", v);
        t.governor_ratio = v;
    }
    if (n["frl"]) {
        t.frl = read_frl(r, n["frl"], Reader::join(p, "frl"));
    }
    t.storage = read_storage_list(r, n["storage"], Reader::join(p, "storage"));
    for (auto& issue : tactic_issues(t, p)) {
        r.issue(issue.path, issue.message);
    }
    return t;
}

ScenarioFile read_file(const YAML::Node& root)
{
    Reader r;
    ScenarioFile file;
    auto& c = file.config;
    if (!root || root.IsNull()) {
        r.issue("", "empty configuration: missing required sections system, fleet, contingency");
        throw ConfigError(std::move(r.issues()));
    }
    if (!r.is_map(root, "")) {
        throw ConfigError(std::move(r.issues()));
    }
    r.allow_keys(root, "",
                 {"name", "system", "group_defaults", "fleet", "penetration", "governor_ratio", "contingency", "frl",
                  "storage", "simulation", "metrics", "tactics"});
    for (const char* section : {"system", "fleet", "contingency"}) {
        if (!root[section]) {
            r.issue(section, "missing required section");
        }
    }
    r.read(root, "", "name", c.name);
    if (root["system"]) {
        c.system = read_system(r, root["system"], "system");
    }

    const auto defaults = read_group_defaults(r, root["group_defaults"], "group_defaults");
    if (const YAML::Node fleet = root["fleet"]; fleet && r.is_seq(fleet, "fleet")) {
        for (std::size_t i = 0; i < fleet.size(); ++i) {
            c.fleet_template.push_back(read_group(r, fleet[i], fmt::format("fleet[{}]", i), defaults));
        }
    }

    if (const YAML::Node pen = root["penetration"]; pen && r.is_map(pen, "penetration")) {
        r.allow_keys(pen, "penetration", {"pv", "wind"});
        r.read(pen, "penetration", "pv", c.pv_penetration);
        r.read(pen, "penetration", "wind", c.wind_penetration);
    }
    r.read(root, "", "governor_ratio", c.governor_ratio);

    if (const YAML::Node con = root["contingency"]; con && r.is_map(con, "contingency")) {
        r.allow_keys(con, "contingency", {"magnitude_mw", "time_s", "removed_inertia_mws"});
        r.read(con, "contingency", "magnitude_mw", c.contingency.magnitude_mw, true);
        r.read(con, "contingency", "time_s", c.contingency.time_s);
        r.read(con, "contingency", "removed_inertia_mws", c.contingency.removed_inertia_mws);
    }
    if (root["frl"]) {
        c.frl = read_frl(r, root["frl"], "frl");
    }
    c.storage = read_storage_list(r, root["storage"], "storage");
    c.sim = read_simulation(r, root["simulation"], "simulation");
    c.metrics = read_metrics(r, root["metrics"], "metrics");

    if (const YAML::Node tactics = root["tactics"]; tactics && r.is_seq(tactics, "tactics")) {
        for (std::size_t i = 0; i < tactics.size(); ++i) {
            file.tactics.push_back(read_tactic(r, tactics[i], fmt::format("tactics[{}]", i)));
        }
    }

    if (!r.issues().empty()) {
        throw ConfigError(std::move(r.issues()));
    }
    return file;
}

YAML::Node load_yaml(std::string_view text)
{
    try {
        return YAML::Load(std::string(text));
    }
    catch (const YAML::ParserException& e) {
        throw ConfigError(e.msg, e.mark.line + 1, e.mark.column + 1);
    }
}

// ---- serialization -------------------------------------------------------

std::string num(double v)
{
    if (std::isnan(v)) {
        return ".nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? ".inf" : "-.inf";
    }
    return fmt::format("{}", v);
}

YAML::Node group_node(const GeneratorGroup& g)
{
    YAML::Node n;
    n["name"] = g.name;
    n["capacity_mw"] = num(g.capacity_mw);
    n["inertia_s"] = num(g.inertia_s);
    n["governor_enabled"] = g.governor_enabled;
    n["droop_pu"] = num(g.droop_pu);
    n["deadband_hz"] = num(g.deadband_hz);
    n["deadband_style"] = std::string(to_string(g.deadband_style));
    n["t_gov_s"] = num(g.t_gov_s);
    n["t_lead_s"] = num(g.t_lead_s);
    n["t_lag_s"] = num(g.t_lag_s);
    n["headroom_mw"] = num(g.headroom_mw);
    return n;
}

YAML::Node frl_node(const FrlParams& f)
{
    YAML::Node n;
    n["block_mw"] = num(f.block_mw);
    n["threshold_hz"] = num(f.threshold_hz);
    n["delay_s"] = num(f.delay_s);
    n["reset_on_recovery"] = f.reset_on_recovery;
    return n;
}

YAML::Node storage_node(const StorageUnit& s)
{
    YAML::Node n;
    n["name"] = s.name;
    n["p_max_mw"] = num(s.p_max_mw);
    if (s.e_limit_mws != kUnlimitedEnergyMws) {
        n["e_limit_mws"] = num(s.e_limit_mws);
    }
    n["n_locations"] = s.n_locations;
    n["withdrawal_ramp_s"] = num(s.withdrawal_ramp_s);
    YAML::Node c;
    if (const auto* d = std::get_if<DroopCtl>(&s.controller)) {
        c["kind"] = "droop";
        c["droop_pu"] = num(d->droop_pu);
        c["deadband_hz"] = num(d->deadband_hz);
        c["t_filter_s"] = num(d->t_filter_s);
    }
    else {
        const auto& st = std::get<StepCtl>(s.controller);
        c["kind"] = "step";
        c["threshold_hz"] = num(st.threshold_hz);
        c["delay_s"] = num(st.delay_s);
        c["alpha"] = num(st.alpha);
        c["rocof_window_s"] = num(st.rocof_window_s);
        if (st.h_sys_assumed_s) {
            c["h_sys_assumed_s"] = num(*st.h_sys_assumed_s);
        }
        if (st.p_sys_assumed_mw) {
            c["p_sys_assumed_mw"] = num(*st.p_sys_assumed_mw);
        }
    }
    n["controller"] = c;
    return n;
}

YAML::Node storage_list_node(const std::vector<StorageUnit>& units)
{
    YAML::Node n(YAML::NodeType::Sequence);
    for (const auto& s : units) {
        n.push_back(storage_node(s));
    }
    return n;
}

YAML::Node tactic_node(const TacticSpec& t)
{
    YAML::Node n;
    n["name"] = t.name;
    n["kind"] = std::string(to_string(t.kind));
    if (t.droop_pu) {
        n["droop_pu"] = num(*t.droop_pu);
    }
    if (t.deadband_hz) {
        n["deadband_hz"] = num(*t.deadband_hz);
    }
    if (t.deadband_style) {
        n["deadband_style"] = std::string(to_string(*t.deadband_style));
    }
    if (t.governor_ratio) {
        n["governor_ratio"] = num(*t.governor_ratio);
    }
    if (t.frl) {
        n["frl"] = frl_node(*t.frl);
    }
    if (!t.storage.empty()) {
        n["storage"] = storage_list_node(t.storage);
    }
    return n;
}

YAML::Node config_node(const ScenarioConfig& c)
{
    YAML::Node root;
    root["name"] = c.name;

    YAML::Node sys;
    sys["f_nominal_hz"] = num(c.system.f_nominal_hz);
    sys["load_mw"] = num(c.system.load_mw);
    sys["s_base_mva"] = num(c.system.s_base_mva);
    sys["load_damping_pu"] = num(c.system.load_damping_pu);
    sys["ufls_threshold_hz"] = num(c.system.ufls_threshold_hz);
    root["system"] = sys;

    YAML::Node fleet(YAML::NodeType::Sequence);
    for (const auto& g : c.fleet_template) {
        fleet.push_back(group_node(g));
    }
    root["fleet"] = fleet;

    YAML::Node pen;
    pen["pv"] = num(c.pv_penetration);
    pen["wind"] = num(c.wind_penetration);
    root["penetration"] = pen;
    root["governor_ratio"] = num(c.governor_ratio);

    YAML::Node con;
    con["magnitude_mw"] = num(c.contingency.magnitude_mw);
    con["time_s"] = num(c.contingency.time_s);
    con["removed_inertia_mws"] = num(c.contingency.removed_inertia_mws);
    root["contingency"] = con;

    if (c.frl) {
        root["frl"] = frl_node(*c.frl);
    }
    root["storage"] = storage_list_node(c.storage);

    YAML::Node sim;
    sim["dt_s"] = num(c.sim.dt_s);
    sim["horizon_s"] = num(c.sim.horizon_s);
    sim["network_mode"] = std::string(to_string(c.sim.network_mode));
    YAML::Node k(YAML::NodeType::Sequence);
    for (const auto& row : c.sim.coupling) {
        YAML::Node r(YAML::NodeType::Sequence);
        for (double v : row) {
            r.push_back(num(v));
        }
        r.SetStyle(YAML::EmitterStyle::Flow);
        k.push_back(r);
    }
    sim["coupling"] = k;
    root["simulation"] = sim;

    YAML::Node met;
    YAML::Node w(YAML::NodeType::Sequence);
    w.push_back(num(c.metrics.settle_window_s[0]));
    w.push_back(num(c.metrics.settle_window_s[1]));
    w.SetStyle(YAML::EmitterStyle::Flow);
    met["settle_window_s"] = w;
    root["metrics"] = met;
    return root;
}

std::string emit(const YAML::Node& n)
{
    YAML::Emitter out;
    out << n;
    return std::string(out.c_str()) + "\n";
}

// ---- field-path overrides --------------------------------------------------

struct PathStep {
    enum class Kind { key, index, all } kind = Kind::key;
    std::string key;
    std::size_t index = 0;
};

std::vector<PathStep> parse_path(const std::string& path)
{
    auto bad = [&](const std::string& why) { return ConfigError(std::vector<Issue>{{path, why}}); };
    std::vector<PathStep> steps;
    std::size_t i = 0;
    while (i < path.size()) {
        if (path[i] == '.') {
            if (steps.empty() || i + 1 == path.size()) {
                throw bad("malformed field path");
            }
            ++i;
            continue;
        }
        if (path[i] == '[') {
            const auto close = path.find(']', i);
            if (close == std::string::npos || steps.empty()) {
                throw bad("malformed field path");
            }
            const auto inner = path.substr(i + 1, close - i - 1);
            PathStep s;
            if (inner == "*") {
                s.kind = PathStep::Kind::all;
            }
            else {
                s.kind = PathStep::Kind::index;
                std::size_t used = 0;
                try {
                    s.index = std::stoul(inner, &used);
                }
                catch (const std::exception&) {
                    used = 0;
                }
                if (inner.empty() || used != inner.size()) {
                    throw bad("index '" + inner + "' is not a non-negative integer");
                }
            }
            steps.push_back(s);
            i = close + 1;
            continue;
        }
        const auto end = path.find_first_of(".[", i);
        PathStep s;
        s.key = path.substr(i, end == std::string::npos ? std::string::npos : end - i);
        steps.push_back(s);
        i = end == std::string::npos ? path.size() : end;
    }
    if (steps.empty()) {
        throw bad("empty field path");
    }
    return steps;
}

// Calls fn(parent, last_step) for every node addressed by steps[0 .. n-1).
void for_each_target(YAML::Node node, const std::vector<PathStep>& steps, std::size_t i, const std::string& path,
                     const std::function<void(YAML::Node, const PathStep&)>& fn)
{
    const auto& s = steps[i];
    if (i + 1 == steps.size()) {
        if (s.kind == PathStep::Kind::all) {
            if (!node.IsSequence()) {
                throw ConfigError(std::vector<Issue>{{path, "[*] applied to a non-list field"}});
            }
            for (std::size_t j = 0; j < node.size(); ++j) {
                fn(node, PathStep{PathStep::Kind::index, {}, j});
            }
            return;
        }
        fn(node, s);
        return;
    }
    const YAML::Node& view = node;
    switch (s.kind) {
    case PathStep::Kind::key:
        if (!view.IsMap() || !view[s.key]) {
            throw ConfigError(std::vector<Issue>{{path, "'" + s.key + "' does not exist in the scenario"}});
        }
        for_each_target(node[s.key], steps, i + 1, path, fn);
        return;
    case PathStep::Kind::index:
        if (!view.IsSequence() || s.index >= view.size()) {
            throw ConfigError(std::vector<Issue>{{path, fmt::format("index {} is out of range", s.index)}});
        }
        for_each_target(node[s.index], steps, i + 1, path, fn);
        return;
    case PathStep::Kind::all:
        if (!view.IsSequence()) {
            throw ConfigError(std::vector<Issue>{{path, "[*] applied to a non-list field"}});
        }
        for (std::size_t j = 0; j < view.size(); ++j) {
            for_each_target(node[j], steps, i + 1, path, fn);
        }
        return;
    }
}

void assign_number(YAML::Node parent, const PathStep& last, const std::string& value, const std::string& path)
{
    const YAML::Node& view = parent;
    YAML::Node target;
    if (last.kind == PathStep::Kind::key) {
        if (!view.IsMap() || !view[last.key]) {
            throw ConfigError(std::vector<Issue>{{path, "'" + last.key + "' does not exist in the scenario"}});
        }
        target = parent[last.key];
    }
    else {
        if (!view.IsSequence() || last.index >= view.size()) {
            throw ConfigError(std::vector<Issue>{{path, fmt::format("index {} is out of range", last.index)}});
        }
        target = parent[last.index];
    }
    double current = 0.0;
    if (!target.IsScalar() || !YAML::convert<double>::decode(target, current)) {
        throw ConfigError(std::vector<Issue>{{path, "does not address a numeric field"}});
    }
    target = value;
}

constexpr std::string_view kDurationKey = "discharge_duration_s";

}  // namespace

ScenarioFile parse_scenario_file(std::string_view text)
{
    return read_file(load_yaml(text));
}

ScenarioConfig parse_config(std::string_view text)
{
    return parse_scenario_file(text).config;
}

std::string serialize_config(const ScenarioConfig& config)
{
    return emit(config_node(config));
}

std::string serialize_scenario_file(const ScenarioFile& file)
{
    auto root = config_node(file.config);
    if (!file.tactics.empty()) {
        YAML::Node tactics(YAML::NodeType::Sequence);
        for (const auto& t : file.tactics) {
            tactics.push_back(tactic_node(t));
        }
        root["tactics"] = tactics;
    }
    return emit(root);
}

std::string serialize_fleet(const Fleet& fleet)
{
    YAML::Node root;
    root["s_base_mva"] = num(fleet.s_base_mva);
    root["h_sys_s"] = num(fleet.h_sys_s);
    YAML::Node groups(YAML::NodeType::Sequence);
    for (const auto& g : fleet.groups) {
        groups.push_back(group_node(g));
    }
    root["groups"] = groups;
    return emit(root);
}

ScenarioFile load_scenario_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open scenario file", path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) {
        throw IoError("cannot read scenario file", path.string());
    }
    try {
        return parse_scenario_file(buf.str());
    }
    catch (const ConfigError& e) {
        if (e.line() > 0) {
            throw ConfigError(path.string() + ": " + e.what(), 0, 0);
        }
        auto issues = e.issues();
        for (auto& issue : issues) {
            issue.path = path.filename().string() + (issue.path.empty() ? "" : ":" + issue.path);
        }
        throw ConfigError(std::move(issues));
    }
}

ScenarioConfig apply_overrides(const ScenarioConfig& config, const std::vector<FieldOverride>& overrides)
{
    YAML::Node root = config_node(config);
    std::vector<const FieldOverride*> derived;
    for (const auto& o : overrides) {
        const auto steps = parse_path(o.path);
        if (steps.back().kind == PathStep::Kind::key && steps.back().key == kDurationKey) {
            derived.push_back(&o);
            continue;
        }
        for_each_target(root, steps, 0, o.path,
                        [&](YAML::Node parent, const PathStep& last) { assign_number(parent, last, num(o.value), o.path); });
    }
    for (const auto* o : derived) {
        const auto steps = parse_path(o->path);
        if (steps.size() < 3 || steps[0].key != "storage") {
            throw ConfigError(std::vector<Issue>{{o->path, "discharge_duration_s applies to storage[i] or storage[*]"}});
        }
        if (!(o->value > 0.0)) {
            throw ConfigError(std::vector<Issue>{{o->path, "discharge duration must be > 0"}});
        }
        for_each_target(root, steps, 0, o->path, [&](YAML::Node unit, const PathStep&) {
            const YAML::Node& view = unit;
            if (!view["e_limit_mws"]) {
                throw ConfigError(std::vector<Issue>{{o->path, "needs a finite e_limit_mws on the storage unit"}});
            }
            const double e_limit = view["e_limit_mws"].as<double>();
            unit["p_max_mw"] = num(e_limit / o->value);
        });
    }
    return read_file(root).config;
}

}  // namespace gridfreq
