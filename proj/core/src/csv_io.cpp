#include "gridfreq/csv_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/core.h>

namespace gridfreq {

namespace {

std::string opt_number(const std::optional<double>& v)
{
    return v ? format_number(*v) : std::string{};
}

// Splits one CSV record, honouring RFC 4180 quotes.
std::vector<std::string> split_record(std::string_view line)
{
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            }
            else if (ch == '"') {
                quoted = false;
            }
            else {
                cur += ch;
            }
        }
        else if (ch == '"') {
            quoted = true;
        }
        else if (ch == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        }
        else {
            cur += ch;
        }
    }
    out.push_back(std::move(cur));
    return out;
}

std::vector<std::string_view> lines_of(std::string_view text)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        auto line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (!line.empty()) {
            out.push_back(line);
        }
        start = end + 1;
    }
    return out;
}

double parse_double(const std::string& s, std::size_t row, const std::string& column)
{
    double v = 0.0;
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || ptr != end) {
        throw Error(fmt::format("row {}, column '{}': '{}' is not a number", row, column, s));
    }
    return v;
}

bool ends_with(std::string_view s, std::string_view suffix)
{
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

}  // namespace

std::string format_number(double v)
{
    return fmt::format("{}", v);
}

std::string csv_field(std::string_view text)
{
    if (text.find_first_of(",\"\n\r") == std::string_view::npos) {
        return std::string(text);
    }
    std::string out = "\"";
    for (char ch : text) {
        if (ch == '"') {
            out += '"';
        }
        out += ch;
    }
    out += '"';
    return out;
}

std::string trace_csv(const Trace& trace)
{
    std::string out = "t_s,f_coi_hz";
    for (const auto& g : trace.group_frequency_hz) {
        out += "," + csv_field("f_" + g.name + "_hz");
    }
    for (const auto& d : trace.device_power_mw) {
        out += "," + csv_field(d.name + "_mw");
    }
    out += '\n';
    for (std::size_t k = 0; k < trace.size(); ++k) {
        out += format_number(trace.time_s[k]);
        out += ',';
        out += format_number(trace.f_coi_hz[k]);
        for (const auto& g : trace.group_frequency_hz) {
            out += ',';
            out += format_number(g.values[k]);
        }
        for (const auto& d : trace.device_power_mw) {
            out += ',';
            out += format_number(d.values[k]);
        }
        out += '\n';
    }
    return out;
}

std::string events_csv(const Trace& trace)
{
    std::string out = "t_s,kind,detail\n";
    for (const auto& e : trace.events) {
        out += format_number(e.time_s) + "," + csv_field(e.kind) + "," + csv_field(e.detail) + "\n";
    }
    return out;
}

void write_text_file(const std::filesystem::path& path, std::string_view text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open for writing", path.string());
    }
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.flush();
    if (!out) {
        throw IoError("write failed", path.string());
    }
}

void write_trace_csv(const Trace& trace, const std::filesystem::path& path)
{
    write_text_file(path, trace_csv(trace));
}

void write_events_csv(const Trace& trace, const std::filesystem::path& path)
{
    write_text_file(path, events_csv(trace));
}

Trace parse_trace_csv(std::string_view text)
{
    const auto lines = lines_of(text);
    if (lines.empty()) {
        throw Error("trace CSV is empty");
    }
    const auto header = split_record(lines[0]);
    if (header.size() < 2 || header[0] != "t_s" || header[1] != "f_coi_hz") {
        throw Error("trace CSV header must start with t_s,f_coi_hz");
    }
    Trace trace;
    enum class Col { group, device };
    std::vector<Col> kinds;
    for (std::size_t c = 2; c < header.size(); ++c) {
        const auto& h = header[c];
        if (h.rfind("f_", 0) == 0 && ends_with(h, "_hz") && trace.device_power_mw.empty()) {
            trace.group_frequency_hz.push_back({h.substr(2, h.size() - 5), {}});
            kinds.push_back(Col::group);
        }
        else if (ends_with(h, "_mw")) {
            trace.device_power_mw.push_back({h.substr(0, h.size() - 3), {}});
            kinds.push_back(Col::device);
        }
        else {
            throw Error(fmt::format("unexpected trace column '{}'", h));
        }
    }
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const auto fields = split_record(lines[r]);
        if (fields.size() != header.size()) {
            throw Error(fmt::format("row {} has {} fields, expected {}", r, fields.size(), header.size()));
        }
        trace.time_s.push_back(parse_double(fields[0], r, header[0]));
        trace.f_coi_hz.push_back(parse_double(fields[1], r, header[1]));
        std::size_t g = 0;
        std::size_t d = 0;
        for (std::size_t c = 2; c < fields.size(); ++c) {
            const double v = parse_double(fields[c], r, header[c]);
            if (kinds[c - 2] == Col::group) {
                trace.group_frequency_hz[g++].values.push_back(v);
            }
            else {
                trace.device_power_mw[d++].values.push_back(v);
            }
        }
    }
    return trace;
}

std::vector<TraceEvent> parse_events_csv(std::string_view text)
{
    const auto lines = lines_of(text);
    if (lines.empty() || split_record(lines[0]) != std::vector<std::string>{"t_s", "kind", "detail"}) {
        throw Error("events CSV header must be t_s,kind,detail");
    }
    std::vector<TraceEvent> out;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        auto f = split_record(lines[r]);
        if (f.size() != 3) {
            throw Error(fmt::format("events row {} has {} fields, expected 3", r, f.size()));
        }
        out.push_back({parse_double(f[0], r, "t_s"), std::move(f[1]), std::move(f[2])});
    }
    return out;
}

Trace read_trace_csv(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open trace CSV", path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_trace_csv(buf.str());
    }
    catch (const IoError&) {
        throw;
    }
    catch (const Error& e) {
        throw IoError(e.what(), path.string());
    }
}

const std::vector<std::string>& metric_columns()
{
    static const std::vector<std::string> columns{
        "delta_p_mw", "f0_hz",       "f_c_hz",          "t_c_s",           "t_ufls_s",
        "rocof_hz_per_s", "f_settle_hz", "fr_mw_per_0p1hz", "fr_n_mw_per_0p1hz",
    };
    return columns;
}

std::optional<double> metric_value(const FrequencyMetrics& m, std::string_view column)
{
    if (column == "delta_p_mw") return m.delta_p_mw;
    if (column == "f0_hz") return m.f0_hz;
    if (column == "f_c_hz") return m.nadir_hz;
    if (column == "t_c_s") return m.nadir_time_s;
    if (column == "t_ufls_s") return m.ufls_time_s;
    if (column == "rocof_hz_per_s") return m.rocof_hz_per_s;
    if (column == "f_settle_hz") return m.settle_hz;
    if (column == "fr_mw_per_0p1hz") return m.fr_mw_per_0p1hz;
    if (column == "fr_n_mw_per_0p1hz") return m.fr_nadir_mw_per_0p1hz;
    throw Error(fmt::format("unknown metric '{}'", column));
}

std::string metrics_csv(const std::vector<MetricsRow>& rows)
{
    std::string out = "tactic";
    for (const auto& c : metric_columns()) {
        out += "," + c;
    }
    out += '\n';
    for (const auto& row : rows) {
        out += csv_field(row.label);
        for (const auto& c : metric_columns()) {
            out += "," + opt_number(metric_value(row.metrics, c));
        }
        out += '\n';
    }
    return out;
}

void write_metrics_csv(const std::vector<MetricsRow>& rows, const std::filesystem::path& path)
{
    write_text_file(path, metrics_csv(rows));
}

}  // namespace gridfreq
