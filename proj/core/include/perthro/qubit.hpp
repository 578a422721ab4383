#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "perthro/rng.hpp"

namespace perthro {

/// Pure single-qubit state as Bloch-sphere angles.
/// theta in [0, pi], phi in [0, 2*pi). Amplitudes are derived:
/// alpha = cos(theta/2), |beta| = sin(theta/2).
struct QubitState {
    double theta = 0.0;
    double phi = 0.0;

    static QubitState ground() { return {}; }

    double alpha() const;     // cos(theta/2)
    double beta_mag() const;  // sin(theta/2)

    /// P(|1>) = sin^2(theta/2).
    double prob_excited() const;
};

/// Excitation sinusoid parameters: g(A) = a*sin(eta*A) + c.
/// Defaults eta = a = 1, c = 0.
struct ExcitationModel {
    double eta = 1.0;
    double a = 1.0;
    double c = 0.0;
};

struct MeasurementConfig {
    std::size_t shots = 1024;
    std::uint64_t rng_seed = 0;
    std::array<double, 2> iq_ground_mean = {-1.0, 0.0};
    std::array<double, 2> iq_excited_mean = {1.0, 0.0};
    double iq_cloud_sigma = 0.25;
};

/// P(|1>) = sin^2((pi/2) * A). Defined for any finite real A by periodicity.
/// Throws std::invalid_argument on non-finite input.
double probability_excited(double cumulative_amplitude);

/// Rotate the state by pi*amplitude radians about the drive axis.
/// Amplitude 1.0 is a pi-pulse, 0.5 a Hadamard-like half rotation.
QubitState apply_pulse(const QubitState& state, double amplitude);

struct ShotResult {
    std::size_t count_excited = 0;
    double estimate = 0.0;
};

/// Binomial(shots, p) under the seeded generator.
ShotResult sample_shots(double p, const MeasurementConfig& cfg);

struct IqPoint {
    double i;
    double q;
    int label;  // 0 ground, 1 excited
};

/// Per shot: Bernoulli(p) label, then a 2-D Gaussian point around the
/// corresponding cluster mean.
std::vector<IqPoint> emulate_iq_readout(double p, const MeasurementConfig& cfg);

/// CSV with header `i,q,label,shot_index`.
void write_iq_csv(std::ostream& os, const std::vector<IqPoint>& points);

}  // namespace perthro
