#pragma once

#include <stdexcept>
#include <string>

namespace perthro {

/// Degenerate or unconstrained calibration fit.
struct CalibrationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Non-finite loss during optimization; carries the epoch where it happened.
struct TrainingError : std::runtime_error {
    std::size_t epoch;
    TrainingError(std::string msg, std::size_t epoch_index)
        : std::runtime_error(std::move(msg)), epoch(epoch_index) {}
};

/// Malformed input file (CSV row, schedule JSON, circuit JSON).
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace perthro
