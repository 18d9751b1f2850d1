#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>

namespace cavsim {

/// SplitMix64 step; used to derive per-trajectory seeds from a base seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Documented seed-splitting rule: seed_k = splitmix64(seed0 ^ splitmix64(k+1)).
inline std::uint64_t trajectory_seed(std::uint64_t seed0, std::uint64_t k) {
    return splitmix64(seed0 ^ splitmix64(k + 1));
}

/// Deterministic per-trajectory stream. Gaussian draws use Box-Muller on
/// raw mt19937_64 output so replay is bit-exact independent of the
/// standard library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    /// Uniform on [0,1) with 53 random bits.
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    /// Standard normal.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * M_PI * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    /// Two independent Wiener increments of variance dt. The binary mode
    /// replaces the Gaussians by +-1 for robustness checks.
    std::pair<double, double> wiener_pair(double dt, bool binary = false) {
        const double sd = std::sqrt(dt);
        if (binary) {
            const double w1 = uniform() < 0.5 ? -sd : sd;
            const double w2 = uniform() < 0.5 ? -sd : sd;
            return {w1, w2};
        }
        const double g1 = gaussian();
        const double g2 = gaussian();
        return {sd * g1, sd * g2};
    }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace cavsim
