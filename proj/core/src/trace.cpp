#include "gridfreq/trace.hpp"

namespace gridfreq {

const NamedSeries* Trace::find_power(const std::string& name) const
{
    for (const auto& series : device_power_mw) {
        if (series.name == name) {
            return &series;
        }
    }
    return nullptr;
}

std::vector<const TraceEvent*> Trace::events_of_kind(const std::string& kind) const
{
    std::vector<const TraceEvent*> out;
    for (const auto& e : events) {
        if (e.kind == kind) {
            out.push_back(&e);
        }
    }
    return out;
}

}  // namespace gridfreq
