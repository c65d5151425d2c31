#pragma once

// CSV emission for traces, event logs and metric tables.
//
// Numbers use the shortest representation that parses back to the same double,
// so written traces are lossless. Output is UTF-8 with LF line endings and a
// mandatory header row. Absent values are empty fields.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gridfreq/metrics.hpp"
#include "gridfreq/trace.hpp"

namespace gridfreq {

/// Columns: t_s, f_coi_hz, f_<group>_hz..., <device>_mw...
std::string trace_csv(const Trace& trace);
/// Columns: t_s, kind, detail
std::string events_csv(const Trace& trace);

void write_trace_csv(const Trace& trace, const std::filesystem::path& path);
void write_events_csv(const Trace& trace, const std::filesystem::path& path);

/// Inverse of write_trace_csv (events are not part of the trace file).
Trace read_trace_csv(const std::filesystem::path& path);
Trace parse_trace_csv(std::string_view text);
std::vector<TraceEvent> parse_events_csv(std::string_view text);

/// Metric columns shared by the metrics and sweep tables, in output order.
const std::vector<std::string>& metric_columns();
/// Value of a named metric column; nullopt when the metric is absent.
/// Throws Error for an unknown name.
std::optional<double> metric_value(const FrequencyMetrics& m, std::string_view column);

struct MetricsRow {
    std::string label;  // tactic name
    FrequencyMetrics metrics;
};

/// Columns: tactic, then metric_columns().
std::string metrics_csv(const std::vector<MetricsRow>& rows);
void write_metrics_csv(const std::vector<MetricsRow>& rows, const std::filesystem::path& path);

/// Writes text to a file, replacing it; IoError with the path on failure.
void write_text_file(const std::filesystem::path& path, std::string_view text);

std::string format_number(double v);
/// RFC 4180 quoting when the field contains a comma, quote or newline.
std::string csv_field(std::string_view text);

}  // namespace gridfreq
