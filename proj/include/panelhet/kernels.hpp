#pragma once

#include <string>
#include <string_view>

namespace panelhet {

enum class KernelId { Epanechnikov, Gaussian };

// A smoothing kernel together with its moment constants
//   kappa1 = integral of s^2 K(s) ds   (smoothing-bias constant)
//   kappa2 = integral of K(s)^2 ds     (variance constant)
struct KernelSpec {
    KernelId id;
    double kappa1;
    double kappa2;

    static KernelSpec epanechnikov();
    static KernelSpec gaussian();
    // Accepts "epanechnikov" or "gaussian" (case-insensitive); throws OutOfDomain.
    static KernelSpec from_name(std::string_view name);

    const char* name() const;
};

// K(u).  Epanechnikov: 0.75 (1 - u^2) on |u| <= 1; Gaussian: phi(u).
double k_eval(const KernelSpec& spec, double u);

// Integral of K from -inf to u (exact closed forms, clamped to [0, 1]).
double k_cdf(const KernelSpec& spec, double u);

// Second derivative K''(u); only the Gaussian is smooth enough to serve as a
// curvature kernel, so Epanechnikov throws UnsupportedDerivativeKernel.
double k_d2(const KernelSpec& spec, double u);

}  // namespace panelhet
