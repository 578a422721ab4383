#pragma once

#include <cmath>
#include <functional>
#include <numbers>

#include "perthro/circuit.hpp"
#include "perthro/rng.hpp"

namespace perthro::testing {

inline constexpr double kPi = std::numbers::pi;

/// Hand-derived block solving XOR exactly:
/// w1 = (pi/2, pi/2), b1 = pi/2; w2 = (0, 0), b2 = pi/2.
inline PerthroBlock xor_solution_block() {
    return PerthroBlock(Matrix(2, 2, {kPi / 2, kPi / 2, 0.0, 0.0}), {kPi / 2, kPi / 2});
}

inline Circuit xor_solution_circuit() {
    return Circuit({xor_solution_block()}, ThresholdHead{});
}

/// Independent forward oracle: explicit cumulative-phase evaluation,
/// rho_i = sum_{j<i}(<w_j,x> + b_j), z_i = sin^2(<w_i,x> + b_i + rho_i).
/// Deliberately not the prefix-sum route the implementation uses.
inline Vec forward_oracle(const PerthroBlock& block, const Vec& x) {
    const std::size_t n = block.pulse_count();
    Vec z(n);
    for (std::size_t i = 0; i < n; ++i) {
        double rho = 0.0;
        for (std::size_t j = 0; j < i; ++j)
            rho += dot(block.weights.row(j), x) + block.biases[j];
        const double arg = dot(block.weights.row(i), x) + block.biases[i] + rho;
        z[i] = std::sin(arg) * std::sin(arg);
    }
    return z;
}

inline PerthroBlock random_block(Rng& rng, std::size_t n, std::size_t d, double scale = 1.5) {
    Matrix w(n, d);
    for (double& v : w.data()) v = rng.uniform(-scale, scale);
    Vec b(n);
    for (double& v : b) v = rng.uniform(-scale, scale);
    return PerthroBlock(std::move(w), std::move(b));
}

inline Vec random_vec(Rng& rng, std::size_t d, double scale = 1.5) {
    Vec x(d);
    for (double& v : x) v = rng.uniform(-scale, scale);
    return x;
}

/// Central finite difference of a scalar function of one perturbed value.
inline double central_diff(const std::function<double(double)>& f, double at,
                           double h = 1e-6) {
    return (f(at + h) - f(at - h)) / (2.0 * h);
}

inline bool close_rel(double got, double want, double tol) {
    return std::abs(got - want) <= tol * std::max(1.0, std::abs(want));
}

}  // namespace perthro::testing
