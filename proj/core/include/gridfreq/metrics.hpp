#pragma once

// Centre-of-inertia frequency and primary frequency response metrics.

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "gridfreq/model.hpp"
#include "gridfreq/trace.hpp"

namespace gridfreq {

/// sum(H_i f_i) / sum(H_i). Throws Error on empty input, length mismatch or a
/// non-positive weight.
double coi_frequency(std::span<const double> f_hz, std::span<const double> inertia_weights);

struct FrequencyMetrics {
    double delta_p_mw = 0.0;
    double f0_hz = 0.0;            // starting frequency, at the contingency
    double nadir_hz = 0.0;         // f_C
    double nadir_time_s = 0.0;     // t_C, simulation time of the first minimum
    std::optional<double> ufls_time_s;
    double rocof_hz_per_s = 0.0;
    double settle_hz = 0.0;
    std::optional<double> fr_mw_per_0p1hz;        // absent without a net decline
    std::optional<double> fr_nadir_mw_per_0p1hz;  // FR_N
};

struct MetricsRequest {
    double delta_p_mw = 0.0;
    double contingency_time_s = 0.0;
    std::array<double, 2> settle_window_s{20.0, 52.0};  // offsets after the contingency
    double ufls_threshold_hz = 59.3;
    double rocof_window_s = 0.5;
};

FrequencyMetrics compute_metrics(const Trace& trace, const MetricsRequest& request);

/// Uses the scenario's contingency, settle window and UFLS threshold.
FrequencyMetrics compute_metrics(const Trace& trace, const ScenarioConfig& config);

/// FR_N <= FR whenever the nadir is at or below the settling frequency.
bool metrics_consistent(const FrequencyMetrics& m);

/// Indices of strict local minima; a flat run counts once (at its first sample)
/// when both neighbours are higher. End points are never minima.
std::vector<std::size_t> local_minima(std::span<const double> values);

}  // namespace gridfreq
