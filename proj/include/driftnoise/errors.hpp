#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace driftnoise {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GridMisalignmentError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct QuadratureError : std::runtime_error {
    QuadratureError(const std::string& what, double achieved_tol)
        : std::runtime_error(what), achieved(achieved_tol) {}
    double achieved;
};

struct AcceptanceStarvationError : std::runtime_error {
    AcceptanceStarvationError(const std::string& what, double empirical_rate)
        : std::runtime_error(what), rate(empirical_rate) {}
    double rate;
};

struct DriftDegeneracyError : std::runtime_error {
    DriftDegeneracyError(const std::string& what, std::vector<std::int64_t> indices)
        : std::runtime_error(what), affected(std::move(indices)) {}
    std::vector<std::int64_t> affected;
};

struct SeamCollisionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace driftnoise
