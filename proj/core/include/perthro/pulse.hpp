#pragma once

#include <vector>

#include "perthro/linalg.hpp"

namespace perthro {

/// Gaussian drive-pulse parameterization. The envelope only matters for
/// schedule export; block-level simulation works directly on amplitudes.
struct GaussianPulse {
    double amplitude = 1.0;       // dimensionless, 1.0 = pi-pulse after calibration
    double frequency = 4.97e9;    // Hz, carrier
    double duration_center = 0.0; // seconds, envelope center
    double width = 1.0;           // seconds, Gaussian sigma; must be > 0
};

/// envelope(omega) = A * exp(-(omega - center)^2 / (2 width^2)).
/// Throws std::invalid_argument if the pulse width is not positive.
double envelope(const GaussianPulse& pulse, double omega);

/// Ordered amplitude sequence; index i drives the i-th measured probability.
struct PulseTrain {
    Vec amplitudes;
    GaussianPulse pulse_template;

    std::size_t size() const { return amplitudes.size(); }
};

}  // namespace perthro
