#include "perthro/qubit.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace perthro {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + " must be finite");
}

}  // namespace

double QubitState::alpha() const { return std::cos(theta / 2.0); }
double QubitState::beta_mag() const { return std::sin(theta / 2.0); }
double QubitState::prob_excited() const {
    const double b = beta_mag();
    return b * b;
}

double probability_excited(double cumulative_amplitude) {
    require_finite(cumulative_amplitude, "cumulative amplitude");
    const double s = std::sin(kPi / 2.0 * cumulative_amplitude);
    return s * s;
}

QubitState apply_pulse(const QubitState& state, double amplitude) {
    require_finite(amplitude, "pulse amplitude");
    require_finite(state.theta, "state theta");
    require_finite(state.phi, "state phi");

    // Rotate the Bloch vector about the drive axis (x). Composing rotations
    // about a fixed axis keeps pulse additivity exact, which tracking only
    // (theta, phi) with ad-hoc reflection would not.
    const double st = std::sin(state.theta);
    const double x = st * std::cos(state.phi);
    const double y = st * std::sin(state.phi);
    const double z = std::cos(state.theta);

    const double angle = kPi * amplitude;
    const double c = std::cos(angle), s = std::sin(angle);
    const double y2 = y * c + z * s;
    const double z2 = -y * s + z * c;

    QubitState out;
    out.theta = std::atan2(std::hypot(x, y2), z2);  // in [0, pi]
    out.phi = std::atan2(y2, x);
    if (out.phi < 0.0) out.phi += kTwoPi;
    // atan2(0,0) at the poles: pin phi to 0 for a canonical representation.
    if (std::hypot(x, y2) == 0.0) out.phi = 0.0;
    return out;
}

ShotResult sample_shots(double p, const MeasurementConfig& cfg) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("probability must be in [0,1]");
    if (cfg.shots < 1) throw std::invalid_argument("shots must be >= 1");

    Rng rng(cfg.rng_seed);
    ShotResult r;
    for (std::size_t s = 0; s < cfg.shots; ++s)
        if (rng.bernoulli(p)) ++r.count_excited;
    r.estimate = static_cast<double>(r.count_excited) / static_cast<double>(cfg.shots);
    return r;
}

std::vector<IqPoint> emulate_iq_readout(double p, const MeasurementConfig& cfg) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("probability must be in [0,1]");
    if (!(cfg.iq_cloud_sigma > 0.0)) throw std::invalid_argument("iq_cloud_sigma must be > 0");
    if (cfg.shots < 1) throw std::invalid_argument("shots must be >= 1");

    Rng rng(cfg.rng_seed);
    std::vector<IqPoint> points;
    points.reserve(cfg.shots);
    for (std::size_t s = 0; s < cfg.shots; ++s) {
        const bool excited = rng.bernoulli(p);
        const auto& mean = excited ? cfg.iq_excited_mean : cfg.iq_ground_mean;
        IqPoint pt;
        pt.i = mean[0] + cfg.iq_cloud_sigma * rng.normal();
        pt.q = mean[1] + cfg.iq_cloud_sigma * rng.normal();
        pt.label = excited ? 1 : 0;
        points.push_back(pt);
    }
    return points;
}

void write_iq_csv(std::ostream& os, const std::vector<IqPoint>& points) {
    os << "i,q,label,shot_index\n";
    for (std::size_t k = 0; k < points.size(); ++k)
        os << points[k].i << ',' << points[k].q << ',' << points[k].label << ',' << k << '\n';
}

}  // namespace perthro
