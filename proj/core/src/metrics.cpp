#include "gridfreq/metrics.hpp"

#include <cmath>

#include <fmt/core.h>

#include "gridfreq/governor.hpp"
#include "gridfreq/storage.hpp"

namespace gridfreq {

namespace {

constexpr double kTimeEps = 1e-9;

}  // namespace

double coi_frequency(std::span<const double> f_hz, std::span<const double> inertia_weights)
{
    if (f_hz.empty() || f_hz.size() != inertia_weights.size()) {
        throw Error(fmt::format("COI frequency needs matching non-empty inputs (got {} frequencies, {} weights)",
                                f_hz.size(), inertia_weights.size()));
    }
    double weighted = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < f_hz.size(); ++i) {
        if (!(inertia_weights[i] > 0.0)) {
            throw Error(fmt::format("inertia weight {} must be > 0 (got {})", i, inertia_weights[i]));
        }
        weighted += inertia_weights[i] * f_hz[i];
        total += inertia_weights[i];
    }
    return weighted / total;
}

FrequencyMetrics compute_metrics(const Trace& trace, const MetricsRequest& request)
{
    const auto& t = trace.time_s;
    const auto& f = trace.f_coi_hz;
    if (t.empty() || t.size() != f.size()) {
        throw Error("metrics need a non-empty trace");
    }
    const double tc = request.contingency_time_s;
    std::size_t start = 0;
    while (start < t.size() && t[start] < tc - kTimeEps) {
        ++start;
    }
    if (start == t.size()) {
        throw Error(fmt::format("trace ends before the contingency at {} s", tc));
    }

    FrequencyMetrics m;
    m.delta_p_mw = request.delta_p_mw;
    m.f0_hz = f[start];
    m.nadir_hz = f[start];
    m.nadir_time_s = t[start];
    for (std::size_t k = start + 1; k < t.size(); ++k) {
        if (f[k] < m.nadir_hz) {
            m.nadir_hz = f[k];
            m.nadir_time_s = t[k];
        }
    }

    std::vector<double> rt;
    std::vector<double> rf;
    for (std::size_t k = start; k < t.size() && t[k] <= tc + request.rocof_window_s + kTimeEps; ++k) {
        rt.push_back(t[k]);
        rf.push_back(f[k]);
    }
    m.rocof_hz_per_s = estimate_rocof(rt, rf);

    const double w0 = tc + request.settle_window_s[0];
    const double w1 = tc + request.settle_window_s[1];
    if (t.back() < w1 - kTimeEps) {
        throw Error(fmt::format("trace ends at {} s, before the settling window end {} s", t.back(), w1));
    }
    double area = 0.0;
    double span = 0.0;
    for (std::size_t k = start + 1; k < t.size(); ++k) {
        if (t[k - 1] < w0 - kTimeEps || t[k] > w1 + kTimeEps) {
            continue;
        }
        const double h = t[k] - t[k - 1];
        area += 0.5 * (f[k] + f[k - 1]) * h;
        span += h;
    }
    if (!(span > 0.0)) {
        throw Error("settling window contains fewer than two samples");
    }
    m.settle_hz = area / span;

    m.ufls_time_s = ufls_crossing(trace, request.ufls_threshold_hz);

    if (m.f0_hz - m.settle_hz > 0.0) {
        m.fr_mw_per_0p1hz = request.delta_p_mw * 0.1 / (m.f0_hz - m.settle_hz);
    }
    if (m.f0_hz - m.nadir_hz > 0.0) {
        m.fr_nadir_mw_per_0p1hz = request.delta_p_mw * 0.1 / (m.f0_hz - m.nadir_hz);
    }
    return m;
}

FrequencyMetrics compute_metrics(const Trace& trace, const ScenarioConfig& config)
{
    MetricsRequest request;
    request.delta_p_mw = config.contingency.magnitude_mw;
    request.contingency_time_s = config.contingency.time_s;
    request.settle_window_s = config.metrics.settle_window_s;
    request.ufls_threshold_hz = config.system.ufls_threshold_hz;
    return compute_metrics(trace, request);
}

bool metrics_consistent(const FrequencyMetrics& m)
{
    if (!(m.nadir_hz <= m.f0_hz)) {
        return false;
    }
    if (m.nadir_hz <= m.settle_hz && m.fr_mw_per_0p1hz && m.fr_nadir_mw_per_0p1hz) {
        return *m.fr_nadir_mw_per_0p1hz <= *m.fr_mw_per_0p1hz;
    }
    return true;
}

std::vector<std::size_t> local_minima(std::span<const double> values)
{
    std::vector<std::size_t> out;
    const auto n = values.size();
    std::size_t s = 0;
    while (s < n) {
        std::size_t e = s;
        while (e + 1 < n && values[e + 1] == values[s]) {
            ++e;
        }
        if (s > 0 && e + 1 < n && values[s - 1] > values[s] && values[e + 1] > values[s]) {
            out.push_back(s);
        }
        s = e + 1;
    }
    return out;
}

}  // namespace gridfreq
