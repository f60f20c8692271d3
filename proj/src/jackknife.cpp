#include "panelhet/jackknife.hpp"

#include <cmath>
#include <string>

#include "panelhet/errors.hpp"

namespace panelhet {

JackknifeWeights JackknifeWeights::hpj() { return {2.0, -1.0, 0.0}; }

JackknifeWeights JackknifeWeights::toj() {
    // Closed-form solution of the 3x3 order-cancellation system.
    const double s2 = std::sqrt(2.0), s3 = std::sqrt(3.0);
    const double w_third = (2.0 * s2 - 2.0) / (3.0 * s3 + 1.0 - 4.0 * s2);
    const double w_half = -1.0 - 2.0 * w_third;
    const double w_full = 1.0 - w_half - w_third;
    return {w_full, w_half, w_third};
}

namespace {

void check_lengths(std::size_t a, std::size_t b, std::size_t c, const char* what) {
    if (a != b || a != c)
        throw LengthMismatch(std::string(what) + ": lengths " + std::to_string(a) + ", " +
                             std::to_string(b) + ", " + std::to_string(c) + " differ");
}

}  // namespace

std::vector<double> hpj_combine(const std::vector<double>& full,
                                const std::vector<double>& half1,
                                const std::vector<double>& half2) {
    check_lengths(full.size(), half1.size(), half2.size(), "hpj_combine");
    std::vector<double> out(full.size());
    for (std::size_t i = 0; i < full.size(); ++i)
        out[i] = 2.0 * full[i] - 0.5 * (half1[i] + half2[i]);
    return out;
}

std::vector<double> toj_combine(const std::vector<double>& full,
                                const std::vector<double>& half_avg,
                                const std::vector<double>& third_avg) {
    check_lengths(full.size(), half_avg.size(), third_avg.size(), "toj_combine");
    const auto w = JackknifeWeights::toj();
    std::vector<double> out(full.size());
    for (std::size_t i = 0; i < full.size(); ++i)
        out[i] = w.w_full * full[i] + w.w_half * half_avg[i] + w.w_third * third_avg[i];
    return out;
}

SubpanelEstimates compute_subpanel_estimates(const PanelData& p, HeterogeneityKind kind,
                                             JackknifeOrder order) {
    SubpanelEstimates out;
    out.full = estimate_units(p, kind);
    auto halves = split_half(p);
    out.halves = {estimate_units(halves.first, kind, Subpanel::Half1),
                  estimate_units(halves.second, kind, Subpanel::Half2)};
    if (order == JackknifeOrder::TOJ) {
        auto thirds = split_thirds(p);
        out.thirds = {estimate_units(thirds.first, kind, Subpanel::Third1),
                      estimate_units(thirds.second, kind, Subpanel::Third2),
                      estimate_units(thirds.third, kind, Subpanel::Third3)};
    }
    return out;
}

EstimateGrid jackknife_density(const PanelData& p, HeterogeneityKind kind,
                               const EvalGrid& grid, double h, const KernelSpec& kernel,
                               JackknifeOrder order) {
    const std::size_t T = p.n_times();
    // Shortest subpanel the order will produce; it must still support the kind.
    const std::size_t shortest =
        order == JackknifeOrder::TOJ ? (T + 2) / 3 : (T % 2 == 0 ? T / 2 : (T + 1) / 2);
    if (T < (order == JackknifeOrder::TOJ ? std::size_t{3} : std::size_t{2}) ||
        shortest < kind.min_series_length())
        throw PanelTooShort("T = " + std::to_string(T) + " gives subpanels of length " +
                            std::to_string(shortest) + ", too short for " + kind.name());

    auto sub = compute_subpanel_estimates(p, kind, order);
    std::vector<double> ne = kde(sub.full, grid, h, kernel);
    std::vector<double> f1 = kde((*sub.halves)[0], grid, h, kernel);
    std::vector<double> f2 = kde((*sub.halves)[1], grid, h, kernel);

    EstimateGrid out;
    out.grid = grid;
    out.h = h;
    out.kernel = kernel;
    out.target = Target::Density;
    out.kind = kind;
    out.values[Estimator::NE] = ne;
    out.values[Estimator::HPJ] = hpj_combine(ne, f1, f2);

    if (order == JackknifeOrder::TOJ) {
        std::vector<double> half_avg(grid.size()), third_avg(grid.size());
        for (std::size_t g = 0; g < grid.size(); ++g) half_avg[g] = 0.5 * (f1[g] + f2[g]);
        std::vector<double> t1 = kde((*sub.thirds)[0], grid, h, kernel);
        std::vector<double> t2 = kde((*sub.thirds)[1], grid, h, kernel);
        std::vector<double> t3 = kde((*sub.thirds)[2], grid, h, kernel);
        for (std::size_t g = 0; g < grid.size(); ++g)
            third_avg[g] = (t1[g] + t2[g] + t3[g]) / 3.0;
        out.values[Estimator::TOJ] = toj_combine(ne, half_avg, third_avg);
    }
    return out;
}

}  // namespace panelhet
