#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace panelhet {

// Neumaier-compensated accumulator: keeps long sums (unit statistics, Monte
// Carlo aggregation) accurate to ~1 ulp independent of summation length.
struct NeumaierSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double x) {
        double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }

    double value() const { return sum + comp; }
};

inline double mean_of(const std::vector<double>& v) {
    NeumaierSum s;
    for (double x : v) s.add(x);
    return s.value() / static_cast<double>(v.size());
}

// Unbiased (n-1 divisor) sample standard deviation.
inline double sample_sd(const std::vector<double>& v) {
    std::size_t n = v.size();
    if (n < 2) return 0.0;
    double m = mean_of(v);
    NeumaierSum s;
    for (double x : v) s.add((x - m) * (x - m));
    return std::sqrt(s.value() / static_cast<double>(n - 1));
}

// Linear-interpolation quantile (the common "type 7" definition) of an
// already-sorted sample; p in [0,1].
inline double quantile_sorted(const std::vector<double>& sorted, double p) {
    std::size_t n = sorted.size();
    if (n == 1) return sorted[0];
    double pos = p * static_cast<double>(n - 1);
    auto lo = static_cast<std::size_t>(pos);
    if (lo >= n - 1) return sorted[n - 1];
    double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace panelhet
