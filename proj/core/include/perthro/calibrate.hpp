#pragma once

#include <cstdint>
#include <string>

#include "perthro/linalg.hpp"
#include "perthro/qubit.hpp"

namespace perthro {

struct CalibrationResult {
    double resonant_frequency = 0.0;  // Hz; 0 when only a Rabi fit was run
    double pi_amplitude = 0.0;        // dimensionless; > 0
    ExcitationModel fit;              // recovered sinusoid parameters
    double fit_phase = 0.0;           // radians; free parameter of the fit
    double fit_residual = 0.0;        // RMS residual, >= 0
};

/// Result of fitting y ~= a*sin(eta*x + phase) + c by damped least squares.
struct SinusoidFit {
    double a = 0.0;
    double eta = 0.0;
    double phase = 0.0;
    double c = 0.0;
    double rms_residual = 0.0;
};

/// Coarse frequency scan for initialization, then damped Gauss-Newton
/// refinement (update tolerance 1e-9, max 200 iterations).
/// Throws CalibrationError when the data cannot constrain the fit
/// (near-constant data, or the x range covers less than one oscillation).
SinusoidFit fit_sinusoid(const Vec& xs, const Vec& ys);

/// Simulated absorption-curve sweep: a Gaussian response of width `linewidth`
/// centered on the true qubit frequency plus seeded Gaussian noise, located
/// by matched-filter correlation with parabolic peak refinement.
/// Fills only resonant_frequency. Grid must be non-empty and sorted.
CalibrationResult frequency_sweep(double true_qubit_freq, const Vec& grid,
                                  double noise_sigma, std::uint64_t seed,
                                  double linewidth = 8e6);

/// Response curve of the sweep (for CSV emission): one value per grid point.
Vec frequency_sweep_response(double true_qubit_freq, const Vec& grid,
                             double noise_sigma, std::uint64_t seed,
                             double linewidth = 8e6);

/// Simulated Rabi experiment: measures P(|1>) over the amplitude grid
/// (exactly when shots == 0, binomially sampled otherwise) and fits the
/// excitation sinusoid. pi_amplitude = pi / eta (half the fitted period).
CalibrationResult rabi_experiment(const Vec& amplitude_grid, std::size_t shots,
                                  std::uint64_t seed);

/// Measured Rabi curve (for CSV emission), same sampling as rabi_experiment.
Vec rabi_response(const Vec& amplitude_grid, std::size_t shots, std::uint64_t seed);

/// JSON: {resonant_frequency_hz, pi_amplitude, fit:{eta,a,c}, residual}.
std::string calibration_to_json(const CalibrationResult& result);
CalibrationResult calibration_from_json(const std::string& text);

}  // namespace perthro
