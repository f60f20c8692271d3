#pragma once

#include "panelhet/kernels.hpp"
#include "panelhet/unit_stats.hpp"

namespace panelhet {

// Either a normal-reference rule-of-thumb (optionally rescaled) or a fixed,
// user-supplied bandwidth.
struct BandwidthPolicy {
    enum class Mode { RuleOfThumb, Fixed };

    Mode mode = Mode::RuleOfThumb;
    double fixed_h = 0.0;
    double scale = 1.0;

    static BandwidthPolicy rule_of_thumb(double scale = 1.0);
    static BandwidthPolicy fixed(double h);
};

// h = C_K * s * N^(-1/5) with s = min(sample sd, IQR/1.349),
// C = 1.06 (Gaussian) or 2.34 (Epanechnikov).
// Throws TooFewUnits (N < 2) and DegenerateDispersion (s = 0).
double rot_bandwidth(const UnitEstimates& xi, const KernelSpec& kernel);

double resolve(const BandwidthPolicy& policy, const UnitEstimates& xi,
               const KernelSpec& kernel);

}  // namespace panelhet
