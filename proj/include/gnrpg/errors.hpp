#pragma once

#include <stdexcept>
#include <string>

namespace gnrpg {

// Device-model errors
class InvalidGeometryError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Channel-potential solver did not converge
class SolverFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// DC operating point did not converge (after source-stepping fallback)
class DcFailure : public std::runtime_error {
public:
    DcFailure(const std::string& msg, std::string worst_node, double residual)
        : std::runtime_error(msg), worst_node(std::move(worst_node)), residual_a(residual) {}
    std::string worst_node;
    double residual_a;
};

class TransientFailure : public std::runtime_error {
public:
    TransientFailure(const std::string& msg, double t)
        : std::runtime_error(msg), time_s(t) {}
    double time_s;
};

class NoCrossingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class TimeoutError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SizingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class BenchErrorKind {
    Syntax,
    DuplicateDriver,
    UndefinedFanin,
    CycleDetected,
    UnsupportedGate,
};

class BenchParseError : public std::runtime_error {
public:
    BenchParseError(BenchErrorKind kind, int line, int column, const std::string& msg)
        : std::runtime_error("line " + std::to_string(line) + ", col " + std::to_string(column) +
                             ": " + msg),
          kind(kind), line(line), column(column) {}
    BenchErrorKind kind;
    int line;
    int column;
};

class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& path, int line, const std::string& msg)
        : std::runtime_error(path + ":" + std::to_string(line) + ": " + msg),
          path(path), line(line) {}
    std::string path;
    int line;
};

}  // namespace gnrpg
