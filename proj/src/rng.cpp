#include "panelhet/rng.hpp"

#include <cmath>

#include "panelhet/errors.hpp"

namespace panelhet {

namespace {

// splitmix64 output function; decorrelates nearby (seed, stream) pairs.
std::uint64_t mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

Rng Rng::for_stream(std::uint64_t seed, std::uint64_t stream) {
    return Rng(mix(mix(seed) ^ (0xA5A5A5A5A5A5A5A5ULL + stream)));
}

double Rng::uniform() {
    // 53 random bits centered in (0,1); never returns 0 or 1.
    return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1p-53;
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

double Rng::gamma(double shape) {
    if (!(shape > 0.0)) throw OutOfDomain("gamma shape must be positive");
    if (shape < 1.0) {
        // Boost a Gamma(shape+1) draw down by u^(1/shape).
        double g = gamma(shape + 1.0);
        return g * std::pow(uniform(), 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double z, v;
        do {
            z = normal();
            v = 1.0 + c * z;
        } while (v <= 0.0);
        v = v * v * v;
        double u = uniform();
        double z2 = z * z;
        if (u < 1.0 - 0.0331 * z2 * z2) return d * v;
        if (std::log(u) < 0.5 * z2 + d * (1.0 - v + std::log(v))) return d * v;
    }
}

double Rng::beta(double a, double b) {
    double x = gamma(a);
    double y = gamma(b);
    return x / (x + y);
}

}  // namespace panelhet
