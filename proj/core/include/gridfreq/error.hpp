#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace gridfreq {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One violated constraint, addressed by a field path such as "fleet[2].droop_pu".
struct Issue {
    std::string path;
    std::string message;
};

std::string format_issues(const std::vector<Issue>& issues);

/// Raised when a scenario violates one or more invariants. All issues are reported at once.
class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<Issue> issues);
    const std::vector<Issue>& issues() const noexcept { return issues_; }

private:
    std::vector<Issue> issues_;
};

/// Malformed configuration text. line/column are 1-based; 0 when not applicable.
class ConfigError : public Error {
public:
    ConfigError(const std::string& message, int line, int column);
    explicit ConfigError(std::vector<Issue> issues);
    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }
    const std::vector<Issue>& issues() const noexcept { return issues_; }

private:
    int line_ = 0;
    int column_ = 0;
    std::vector<Issue> issues_;
};

/// Integration failure; carries the simulation time at which it was detected.
class SimulationError : public Error {
public:
    SimulationError(const std::string& message, double time_s);
    double time_s() const noexcept { return time_s_; }

private:
    double time_s_;
};

class IoError : public Error {
public:
    IoError(const std::string& message, std::string path);
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

}  // namespace gridfreq
