#include "panelhet/density.hpp"

#include <algorithm>
#include <cmath>

#include "panelhet/errors.hpp"

namespace panelhet {

EvalGrid EvalGrid::linspace(double lo, double hi, std::size_t n) {
    if (n < 2) throw InvalidGrid("grid needs at least 2 points, got " + std::to_string(n));
    if (!(lo < hi)) throw InvalidGrid("grid bounds must satisfy lo < hi");
    std::vector<double> pts(n);
    for (std::size_t i = 0; i < n; ++i)
        pts[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return EvalGrid{std::move(pts)};
}

EvalGrid EvalGrid::from_points(std::vector<double> pts) {
    if (pts.empty()) throw InvalidGrid("grid is empty");
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (!std::isfinite(pts[i])) throw InvalidGrid("grid point is not finite");
        if (i > 0 && !(pts[i - 1] < pts[i]))
            throw InvalidGrid("grid points must be strictly increasing");
    }
    return EvalGrid{std::move(pts)};
}

const char* estimator_name(Estimator e) {
    switch (e) {
        case Estimator::NE: return "ne";
        case Estimator::HPJ: return "hpj";
        case Estimator::TOJ: return "toj";
        case Estimator::IE: return "ie";
    }
    return "?";
}

Estimator estimator_from_name(const std::string& token) {
    if (token == "ne") return Estimator::NE;
    if (token == "hpj") return Estimator::HPJ;
    if (token == "toj") return Estimator::TOJ;
    if (token == "ie") return Estimator::IE;
    throw OutOfDomain("unknown estimator '" + token + "'; expected ne, hpj, toj, or ie");
}

namespace {

void check_bandwidth(double h) {
    if (!(h > 0.0) || !std::isfinite(h))
        throw InvalidBandwidth("bandwidth must be a positive finite number, got " +
                               std::to_string(h));
}

}  // namespace

double kde_at(const UnitEstimates& xi, double x, double h, const KernelSpec& kernel) {
    check_bandwidth(h);
    const std::size_t N = xi.values.size();
    double s = 0.0;
    for (double v : xi.values) s += k_eval(kernel, (x - v) / h);
    return s / (static_cast<double>(N) * h);
}

std::vector<double> kde(const UnitEstimates& xi, const EvalGrid& grid, double h,
                        const KernelSpec& kernel) {
    check_bandwidth(h);
    std::vector<double> out(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g) out[g] = kde_at(xi, grid.points[g], h, kernel);
    return out;
}

double kcdf_at(const UnitEstimates& xi, double x, double h, const KernelSpec& kernel) {
    check_bandwidth(h);
    const std::size_t N = xi.values.size();
    double s = 0.0;
    for (double v : xi.values) s += k_cdf(kernel, (x - v) / h);
    return s / static_cast<double>(N);
}

std::vector<double> kcdf(const UnitEstimates& xi, const EvalGrid& grid, double h,
                         const KernelSpec& kernel) {
    check_bandwidth(h);
    std::vector<double> out(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g)
        out[g] = kcdf_at(xi, grid.points[g], h, kernel);
    return out;
}

std::vector<double> ecdf(const UnitEstimates& xi, const EvalGrid& grid) {
    std::vector<double> sorted = xi.values;
    std::sort(sorted.begin(), sorted.end());
    const auto N = static_cast<double>(sorted.size());
    std::vector<double> out(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g) {
        auto it = std::upper_bound(sorted.begin(), sorted.end(), grid.points[g]);
        out[g] = static_cast<double>(it - sorted.begin()) / N;
    }
    return out;
}

EvalGrid default_grid(const UnitEstimates& xi, double h, std::size_t n_points) {
    check_bandwidth(h);
    if (xi.values.empty()) throw TooFewUnits("cannot build a grid from zero unit estimates");
    auto [mn, mx] = std::minmax_element(xi.values.begin(), xi.values.end());
    return EvalGrid::linspace(*mn - 3.0 * h, *mx + 3.0 * h, n_points);
}

}  // namespace panelhet
