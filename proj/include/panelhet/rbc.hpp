#pragma once

#include <array>
#include <vector>

#include "panelhet/jackknife.hpp"
#include "panelhet/kernels.hpp"
#include "panelhet/unit_stats.hpp"

namespace panelhet {

// Configuration of the robust bias-corrected interval: the curvature kernel L
// (Gaussian) is evaluated at bandwidth b = h/lambda, and the estimated
// smoothing bias bias_factor * kappa1 * h^2 * f''(x) is subtracted from the
// point estimate while its sampling noise stays inside the variance.
struct RbcConfig {
    double alpha = 0.05;        // 1 - confidence level
    double lambda = 1.0;        // h / b
    double bias_factor = 0.5;   // multiplier c on the curvature term (1/2 or 1)
    KernelSpec curvature_kernel; // L; defaults to Gaussian

    RbcConfig();
};

struct RbcInterval {
    double x = 0.0;
    double debiased = 0.0;  // (N h)^-1 sum_i Kcomb_i
    double sigma = 0.0;
    double lo = 0.0, hi = 0.0;
};

// Kcomb_i(x) = K((x - xi_i)/h) - c * kappa1 * lambda^3 * L''((x - xi_i)/b).
std::vector<double> combined_kernel_ne(const UnitEstimates& xi, double x, double h,
                                       const KernelSpec& kernel, const RbcConfig& cfg);

// HPJ analogue: 2 K(full) - 1/2 [K(half1) + K(half2)] - curvature term (full).
std::vector<double> combined_kernel_hpj(const UnitEstimates& full,
                                        const UnitEstimates& half1,
                                        const UnitEstimates& half2, double x, double h,
                                        const KernelSpec& kernel, const RbcConfig& cfg);

// TOJ analogue with weights over full / half-average / third-average terms.
std::vector<double> combined_kernel_toj(const UnitEstimates& full,
                                        const std::array<UnitEstimates, 2>& halves,
                                        const std::array<UnitEstimates, 3>& thirds,
                                        double x, double h, const KernelSpec& kernel,
                                        const RbcConfig& cfg);

// debiased = (N h)^-1 sum K_i,
// sigma^2  = (N h^2)^-1 [ N^-1 sum K_i^2 - (N^-1 sum K_i)^2 ],
// interval = debiased +/- z_{1-alpha/2} sigma.  Throws TooFewUnits for N < 2.
RbcInterval rbc_interval(const std::vector<double>& per_unit_kernel, double h,
                         double alpha, double x = 0.0);

// Phi^-1(p) to absolute error <= 1e-9 (rational approximation plus one
// Newton refinement).  Throws OutOfDomain outside (0,1).
double normal_quantile(double p);

}  // namespace panelhet
