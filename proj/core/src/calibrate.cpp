#include "perthro/calibrate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

#include "perthro/errors.hpp"
#include "perthro/rng.hpp"

namespace perthro {

namespace {

constexpr double kPi = std::numbers::pi;

// Gaussian elimination with partial pivoting, N x N.
template <std::size_t N>
std::array<double, N> solve(std::array<std::array<double, N>, N> A, std::array<double, N> b) {
    for (std::size_t col = 0; col < N; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < N; ++r)
            if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        std::swap(A[col], A[piv]);
        std::swap(b[col], b[piv]);
        if (A[col][col] == 0.0) throw CalibrationError("singular system in sinusoid fit");
        for (std::size_t r = col + 1; r < N; ++r) {
            const double f = A[r][col] / A[col][col];
            for (std::size_t c = col; c < N; ++c) A[r][c] -= f * A[col][c];
            b[r] -= f * b[col];
        }
    }
    std::array<double, N> x{};
    for (std::size_t i = N; i-- > 0;) {
        double s = b[i];
        for (std::size_t j = i + 1; j < N; ++j) s -= A[i][j] * x[j];
        x[i] = s / A[i][i];
    }
    return x;
}

// Linear least squares for y ~ p*sin(eta*x) + q*cos(eta*x) + c at fixed eta.
// Returns (p, q, c) and the sum of squared residuals.
struct LinearFit {
    double p, q, c, ssr;
};

LinearFit fit_linear_at_eta(const Vec& xs, const Vec& ys, double eta) {
    std::array<std::array<double, 3>, 3> ata{};
    std::array<double, 3> atb{};
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const std::array<double, 3> row = {std::sin(eta * xs[k]), std::cos(eta * xs[k]), 1.0};
        for (std::size_t i = 0; i < 3; ++i) {
            atb[i] += row[i] * ys[k];
            for (std::size_t j = 0; j < 3; ++j) ata[i][j] += row[i] * row[j];
        }
    }
    const auto sol = solve<3>(ata, atb);
    double ssr = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const double r = sol[0] * std::sin(eta * xs[k]) + sol[1] * std::cos(eta * xs[k]) +
                         sol[2] - ys[k];
        ssr += r * r;
    }
    return {sol[0], sol[1], sol[2], ssr};
}

double sum_sq_residual(const Vec& xs, const Vec& ys, double p, double q, double eta, double c) {
    double ssr = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const double r = p * std::sin(eta * xs[k]) + q * std::cos(eta * xs[k]) + c - ys[k];
        ssr += r * r;
    }
    return ssr;
}

}  // namespace

SinusoidFit fit_sinusoid(const Vec& xs, const Vec& ys) {
    if (xs.size() != ys.size()) throw std::invalid_argument("fit_sinusoid: size mismatch");
    if (xs.size() < 6) throw CalibrationError("too few points to constrain a sinusoid");

    const auto [y_min, y_max] = std::minmax_element(ys.begin(), ys.end());
    if (*y_max - *y_min < 1e-12)
        throw CalibrationError("constant data cannot constrain a sinusoid");

    const auto [x_min, x_max] = std::minmax_element(xs.begin(), xs.end());
    const double range = *x_max - *x_min;
    if (!(range > 0.0)) throw CalibrationError("degenerate amplitude grid");

    double dx_min = range;
    {
        Vec sorted = xs;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t k = 1; k < sorted.size(); ++k)
            dx_min = std::min(dx_min, std::max(sorted[k] - sorted[k - 1], 1e-300));
    }

    // Coarse frequency scan between "one oscillation over twice the range"
    // and the sampling Nyquist limit.
    const double eta_lo = kPi / range;
    const double eta_hi = kPi / dx_min;
    const std::size_t scan_points = 512;
    double best_eta = eta_lo, best_ssr = std::numeric_limits<double>::infinity();
    LinearFit best_lin{};
    for (std::size_t s = 0; s < scan_points; ++s) {
        const double eta = eta_lo + (eta_hi - eta_lo) * static_cast<double>(s) /
                                        static_cast<double>(scan_points - 1);
        const auto lin = fit_linear_at_eta(xs, ys, eta);
        if (lin.ssr < best_ssr) {
            best_ssr = lin.ssr;
            best_eta = eta;
            best_lin = lin;
        }
    }

    // Damped Gauss-Newton on (p, q, eta, c).
    double p = best_lin.p, q = best_lin.q, eta = best_eta, c = best_lin.c;
    double ssr = best_ssr;
    double lambda = 1e-3;
    for (int iter = 0; iter < 200; ++iter) {
        std::array<std::array<double, 4>, 4> jtj{};
        std::array<double, 4> jtr{};
        for (std::size_t k = 0; k < xs.size(); ++k) {
            const double s = std::sin(eta * xs[k]), co = std::cos(eta * xs[k]);
            const double r = p * s + q * co + c - ys[k];
            const std::array<double, 4> row = {s, co, xs[k] * (p * co - q * s), 1.0};
            for (std::size_t i = 0; i < 4; ++i) {
                jtr[i] += row[i] * r;
                for (std::size_t j = 0; j < 4; ++j) jtj[i][j] += row[i] * row[j];
            }
        }
        auto damped = jtj;
        for (std::size_t i = 0; i < 4; ++i)
            damped[i][i] += lambda * std::max(jtj[i][i], 1e-12);
        std::array<double, 4> step{};
        try {
            step = solve<4>(damped, jtr);
        } catch (const CalibrationError&) {
            break;
        }
        const double np = p - step[0], nq = q - step[1], neta = eta - step[2], nc = c - step[3];
        const double nssr = sum_sq_residual(xs, ys, np, nq, neta, nc);
        if (nssr < ssr) {
            p = np;
            q = nq;
            eta = neta;
            c = nc;
            ssr = nssr;
            lambda = std::max(lambda * 0.5, 1e-12);
            const double step_norm = std::sqrt(step[0] * step[0] + step[1] * step[1] +
                                               step[2] * step[2] + step[3] * step[3]);
            if (step_norm < 1e-9) break;
        } else {
            lambda *= 10.0;
            if (lambda > 1e12) break;
        }
    }

    if (eta < 0.0) {
        eta = -eta;
        const auto lin = fit_linear_at_eta(xs, ys, eta);
        p = lin.p;
        q = lin.q;
        c = lin.c;
        ssr = lin.ssr;
    }
    if (!(eta > 0.0) || !std::isfinite(eta))
        throw CalibrationError("sinusoid fit diverged");
    if (2.0 * kPi / eta > range * (1.0 + 1e-9))
        throw CalibrationError("amplitude grid covers less than one full oscillation");

    SinusoidFit fit;
    fit.a = std::hypot(p, q);
    fit.eta = eta;
    fit.phase = std::atan2(q, p);
    fit.c = c;
    fit.rms_residual = std::sqrt(ssr / static_cast<double>(xs.size()));
    return fit;
}

Vec frequency_sweep_response(double true_qubit_freq, const Vec& grid, double noise_sigma,
                             std::uint64_t seed, double linewidth) {
    if (grid.empty()) throw std::invalid_argument("frequency grid must be non-empty");
    if (!std::is_sorted(grid.begin(), grid.end()))
        throw std::invalid_argument("frequency grid must be sorted");
    Rng rng(seed);
    Vec response(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double d = grid[k] - true_qubit_freq;
        response[k] = std::exp(-(d * d) / (2.0 * linewidth * linewidth));
        if (noise_sigma > 0.0) response[k] += noise_sigma * rng.normal();
    }
    return response;
}

CalibrationResult frequency_sweep(double true_qubit_freq, const Vec& grid, double noise_sigma,
                                  std::uint64_t seed, double linewidth) {
    const Vec response = frequency_sweep_response(true_qubit_freq, grid, noise_sigma, seed,
                                                  linewidth);

    if (noise_sigma == 0.0) {
        // Noiseless curve: the argmax is already within half a grid step.
        CalibrationResult result;
        result.resonant_frequency =
            grid[std::max_element(response.begin(), response.end()) - response.begin()];
        return result;
    }

    // Matched filter against the known Gaussian line shape, then a 3-point
    // parabolic refinement of the correlation peak.
    Vec corr(grid.size(), 0.0);
    for (std::size_t j = 0; j < grid.size(); ++j)
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const double d = grid[k] - grid[j];
            corr[j] += response[k] * std::exp(-(d * d) / (2.0 * linewidth * linewidth));
        }

    std::size_t peak = static_cast<std::size_t>(
        std::max_element(corr.begin(), corr.end()) - corr.begin());
    double estimate = grid[peak];
    if (peak > 0 && peak + 1 < grid.size()) {
        const double y0 = corr[peak - 1], y1 = corr[peak], y2 = corr[peak + 1];
        const double denom = y0 - 2.0 * y1 + y2;
        if (denom < 0.0) {
            const double shift = 0.5 * (y0 - y2) / denom;
            const double step = 0.5 * (grid[peak + 1] - grid[peak - 1]);
            estimate = grid[peak] + shift * step;
        }
    }

    CalibrationResult result;
    result.resonant_frequency = estimate;
    return result;
}

Vec rabi_response(const Vec& amplitude_grid, std::size_t shots, std::uint64_t seed) {
    Rng master(seed);
    Vec measured(amplitude_grid.size());
    for (std::size_t k = 0; k < amplitude_grid.size(); ++k) {
        const double p = probability_excited(amplitude_grid[k]);
        if (shots == 0) {
            measured[k] = p;
        } else {
            MeasurementConfig cfg;
            cfg.shots = shots;
            cfg.rng_seed = master.fork_seed();
            measured[k] = sample_shots(p, cfg).estimate;
        }
    }
    return measured;
}

CalibrationResult rabi_experiment(const Vec& amplitude_grid, std::size_t shots,
                                  std::uint64_t seed) {
    const Vec measured = rabi_response(amplitude_grid, shots, seed);
    const SinusoidFit fit = fit_sinusoid(amplitude_grid, measured);

    CalibrationResult result;
    result.pi_amplitude = kPi / fit.eta;  // half the fitted period
    result.fit.eta = fit.eta;
    result.fit.a = fit.a;
    result.fit.c = fit.c;
    result.fit_phase = fit.phase;
    result.fit_residual = fit.rms_residual;
    return result;
}

std::string calibration_to_json(const CalibrationResult& result) {
    nlohmann::json j = {
        {"resonant_frequency_hz", result.resonant_frequency},
        {"pi_amplitude", result.pi_amplitude},
        {"fit", {{"eta", result.fit.eta}, {"a", result.fit.a}, {"c", result.fit.c}}},
        {"residual", result.fit_residual},
    };
    return j.dump(2) + "\n";
}

CalibrationResult calibration_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("calibration JSON parse failed: ") + e.what());
    }
    CalibrationResult result;
    try {
        result.resonant_frequency = j.at("resonant_frequency_hz").get<double>();
        result.pi_amplitude = j.at("pi_amplitude").get<double>();
        result.fit.eta = j.at("fit").at("eta").get<double>();
        result.fit.a = j.at("fit").at("a").get<double>();
        result.fit.c = j.at("fit").at("c").get<double>();
        result.fit_residual = j.at("residual").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("calibration JSON missing field: ") + e.what());
    }
    if (!(result.pi_amplitude > 0.0))
        throw ValidationError("calibration pi_amplitude must be > 0");
    return result;
}

}  // namespace perthro
