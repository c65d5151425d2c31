#pragma once

#include <string>
#include <vector>

namespace gridfreq {

struct NamedSeries {
    std::string name;
    std::vector<double> values;
};

struct TraceEvent {
    double time_s = 0.0;
    std::string kind;  // contingency | frl_trip | storage_trigger | storage_step | storage_exhausted
    std::string detail;
};

/// Sampled simulation output on a uniform time grid.
///
/// All series have one value per entry of time_s. group_frequency_hz holds one
/// series per generator group; device_power_mw holds governor mechanical
/// deviations, storage outputs and FRL relief, in that order.
struct Trace {
    std::vector<double> time_s;
    std::vector<double> f_coi_hz;
    std::vector<NamedSeries> group_frequency_hz;
    std::vector<NamedSeries> device_power_mw;
    std::vector<TraceEvent> events;

    std::size_t size() const noexcept { return time_s.size(); }
    const NamedSeries* find_power(const std::string& name) const;
    std::vector<const TraceEvent*> events_of_kind(const std::string& kind) const;
};

}  // namespace gridfreq
