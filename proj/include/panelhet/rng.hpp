#pragma once

#include <cstdint>
#include <random>

namespace panelhet {

// Deterministic random source.  All variates are generated from explicit
// algorithms on top of mt19937_64 (never std::*_distribution), so the same
// seed yields the same stream on every platform and toolchain.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // Independent stream for (seed, stream); used to give each Monte Carlo
    // replication its own reproducible source regardless of thread schedule.
    static Rng for_stream(std::uint64_t seed, std::uint64_t stream);

    // Uniform on the open interval (0,1).
    double uniform();

    // Standard normal via Box-Muller (second variate cached).
    double normal();
    double normal(double mean, double sd) { return mean + sd * normal(); }

    // Gamma(shape, 1) via Marsaglia-Tsang squeeze; shape > 0.
    double gamma(double shape);

    // Beta(a, b) as Ga/(Ga+Gb).
    double beta(double a, double b);

private:
    std::mt19937_64 gen_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace panelhet
