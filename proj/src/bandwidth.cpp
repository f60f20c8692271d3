#include "panelhet/bandwidth.hpp"

#include <algorithm>
#include <cmath>

#include "panelhet/errors.hpp"
#include "panelhet/numeric.hpp"

namespace panelhet {

BandwidthPolicy BandwidthPolicy::rule_of_thumb(double scale) {
    if (!(scale > 0.0) || !std::isfinite(scale))
        throw InvalidBandwidth("bandwidth scale must be positive, got " + std::to_string(scale));
    BandwidthPolicy p;
    p.mode = Mode::RuleOfThumb;
    p.scale = scale;
    return p;
}

BandwidthPolicy BandwidthPolicy::fixed(double h) {
    if (!(h > 0.0) || !std::isfinite(h))
        throw InvalidBandwidth("fixed bandwidth must be positive, got " + std::to_string(h));
    BandwidthPolicy p;
    p.mode = Mode::Fixed;
    p.fixed_h = h;
    return p;
}

double rot_bandwidth(const UnitEstimates& xi, const KernelSpec& kernel) {
    const std::size_t N = xi.values.size();
    if (N < 2) throw TooFewUnits("rule-of-thumb bandwidth needs N >= 2");

    double sd = sample_sd(xi.values);
    std::vector<double> sorted = xi.values;
    std::sort(sorted.begin(), sorted.end());
    double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
    double s = std::min(sd, iqr / 1.349);
    if (!(s > 0.0))
        throw DegenerateDispersion("unit estimates have zero dispersion (sd = " +
                                   std::to_string(sd) + ", iqr = " + std::to_string(iqr) + ")");

    const double C = kernel.id == KernelId::Gaussian ? 1.06 : 2.34;
    return C * s * std::pow(static_cast<double>(N), -0.2);
}

double resolve(const BandwidthPolicy& policy, const UnitEstimates& xi,
               const KernelSpec& kernel) {
    if (policy.mode == BandwidthPolicy::Mode::Fixed) {
        if (!(policy.fixed_h > 0.0) || !std::isfinite(policy.fixed_h))
            throw InvalidBandwidth("fixed bandwidth must be positive, got " +
                                   std::to_string(policy.fixed_h));
        return policy.fixed_h;
    }
    if (!(policy.scale > 0.0) || !std::isfinite(policy.scale))
        throw InvalidBandwidth("bandwidth scale must be positive, got " +
                               std::to_string(policy.scale));
    return policy.scale * rot_bandwidth(xi, kernel);
}

}  // namespace panelhet
