#include "perthro/pulse.hpp"

#include <cmath>
#include <stdexcept>

namespace perthro {

double envelope(const GaussianPulse& pulse, double omega) {
    if (!(pulse.width > 0.0)) throw std::invalid_argument("pulse width must be > 0");
    const double d = omega - pulse.duration_center;
    return pulse.amplitude * std::exp(-(d * d) / (2.0 * pulse.width * pulse.width));
}

}  // namespace perthro
