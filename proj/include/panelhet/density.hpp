#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <vector>

#include "panelhet/kernels.hpp"
#include "panelhet/unit_stats.hpp"

namespace panelhet {

struct EvalGrid {
    std::vector<double> points;  // finite, strictly increasing, nonempty

    static EvalGrid linspace(double lo, double hi, std::size_t n);
    // Validates and takes ownership; throws InvalidGrid.
    static EvalGrid from_points(std::vector<double> pts);

    std::size_t size() const { return points.size(); }
};

enum class Estimator { NE, HPJ, TOJ, IE };

const char* estimator_name(Estimator e);
Estimator estimator_from_name(const std::string& token);

enum class Target { Density, KernelCdf, EmpiricalCdf };

struct RbcBand {
    Estimator estimator;                  // which curve the band belongs to
    double alpha = 0.05;
    std::vector<double> debiased, sigma, lo, hi;
};

struct EstimateGrid {
    EvalGrid grid;
    std::map<Estimator, std::vector<double>> values;
    double h = 0.0;
    KernelSpec kernel;
    Target target = Target::Density;
    HeterogeneityKind kind;
    std::optional<RbcBand> ci;
};

// Kernel density estimate (N h)^-1 sum_i K((x - xi_i)/h) at one point / grid.
double kde_at(const UnitEstimates& xi, double x, double h, const KernelSpec& kernel);
std::vector<double> kde(const UnitEstimates& xi, const EvalGrid& grid, double h,
                        const KernelSpec& kernel);

// Smoothed CDF N^-1 sum_i Kcdf((x - xi_i)/h); values in [0,1], nondecreasing.
double kcdf_at(const UnitEstimates& xi, double x, double h, const KernelSpec& kernel);
std::vector<double> kcdf(const UnitEstimates& xi, const EvalGrid& grid, double h,
                         const KernelSpec& kernel);

// Empirical CDF N^-1 #{i : xi_i <= x}.
std::vector<double> ecdf(const UnitEstimates& xi, const EvalGrid& grid);

// Equally spaced grid on [min xi - 3h, max xi + 3h].
EvalGrid default_grid(const UnitEstimates& xi, double h, std::size_t n_points = 512);

}  // namespace panelhet
