#include "gridfreq/error.hpp"

#include <fmt/core.h>

namespace gridfreq {

std::string format_issues(const std::vector<Issue>& issues)
{
    std::string out;
    for (const auto& issue : issues) {
        if (!out.empty()) {
            out += "; ";
        }
        out += issue.path.empty() ? issue.message : issue.path + ": " + issue.message;
    }
    return out;
}

ValidationError::ValidationError(std::vector<Issue> issues)
    : Error("invalid scenario: " + format_issues(issues)), issues_(std::move(issues))
{
}

ConfigError::ConfigError(const std::string& message, int line, int column)
    : Error(line > 0 ? fmt::format("line {}, column {}: {}", line, column, message) : message),
      line_(line),
      column_(column)
{
}

ConfigError::ConfigError(std::vector<Issue> issues)
    : Error("config schema error: " + format_issues(issues)), issues_(std::move(issues))
{
}

SimulationError::SimulationError(const std::string& message, double time_s)
    : Error(fmt::format("t = {} s: {}", time_s, message)), time_s_(time_s)
{
}

IoError::IoError(const std::string& message, std::string path)
    : Error(message + ": " + path), path_(std::move(path))
{
}

}  // namespace gridfreq
