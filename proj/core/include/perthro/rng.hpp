#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace perthro {

/// Seeded random source used for every stochastic path in the project.
///
/// The engine is std::mt19937_64 and all distributions are derived from it
/// by fixed arithmetic (53-bit uniform, Box-Muller normal, Bernoulli by
/// comparison), so a given seed reproduces the same stream bit-for-bit on
/// any conforming implementation. The std:: distribution adaptors are
/// deliberately not used; their output is implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1) with 53 bits of precision.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller (pairs cached).
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        while (u1 == 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double two_pi = 6.283185307179586476925286766559;
        spare_ = r * std::sin(two_pi * u2);
        have_spare_ = true;
        return r * std::cos(two_pi * u2);
    }

    bool bernoulli(double p) { return uniform() < p; }

    /// Uniform integer in [0, n).
    std::size_t index(std::size_t n) {
        return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Derive an independent child seed (for per-epoch shuffles etc.).
    std::uint64_t fork_seed() { return engine_(); }

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// Fisher-Yates shuffle driven by Rng::index, fixed algorithm.
template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = rng.index(i);
        std::swap(v[i - 1], v[j]);
    }
}

}  // namespace perthro
