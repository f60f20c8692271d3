#include "panelhet/rbc.hpp"

#include <cmath>
#include <string>

#include "panelhet/errors.hpp"
#include "panelhet/numeric.hpp"

namespace panelhet {

RbcConfig::RbcConfig() : curvature_kernel(KernelSpec::gaussian()) {}

namespace {

void check_bandwidth(double h) {
    if (!(h > 0.0) || !std::isfinite(h))
        throw InvalidBandwidth("bandwidth must be a positive finite number, got " +
                               std::to_string(h));
}

void check_cfg(const RbcConfig& cfg) {
    if (!(cfg.lambda > 0.0) || !std::isfinite(cfg.lambda))
        throw InvalidBandwidth("lambda must be positive, got " + std::to_string(cfg.lambda));
    if (!(cfg.bias_factor >= 0.0) || !std::isfinite(cfg.bias_factor))
        throw OutOfDomain("bias factor must be a nonnegative number");
}

// c * kappa1(K) * lambda^3 * L''((x - v)/b)
double curvature_term(double x, double v, double h, const KernelSpec& kernel,
                      const RbcConfig& cfg) {
    const double b = h / cfg.lambda;
    const double lam3 = cfg.lambda * cfg.lambda * cfg.lambda;
    return cfg.bias_factor * kernel.kappa1 * lam3 * k_d2(cfg.curvature_kernel, (x - v) / b);
}

}  // namespace

std::vector<double> combined_kernel_ne(const UnitEstimates& xi, double x, double h,
                                       const KernelSpec& kernel, const RbcConfig& cfg) {
    check_bandwidth(h);
    check_cfg(cfg);
    std::vector<double> out(xi.values.size());
    for (std::size_t i = 0; i < xi.values.size(); ++i) {
        double v = xi.values[i];
        out[i] = k_eval(kernel, (x - v) / h) - curvature_term(x, v, h, kernel, cfg);
    }
    return out;
}

std::vector<double> combined_kernel_hpj(const UnitEstimates& full,
                                        const UnitEstimates& half1,
                                        const UnitEstimates& half2, double x, double h,
                                        const KernelSpec& kernel, const RbcConfig& cfg) {
    check_bandwidth(h);
    check_cfg(cfg);
    const std::size_t N = full.values.size();
    if (half1.values.size() != N || half2.values.size() != N)
        throw LengthMismatch("combined_kernel_hpj: estimate sequences have lengths " +
                             std::to_string(N) + ", " + std::to_string(half1.values.size()) +
                             ", " + std::to_string(half2.values.size()));
    std::vector<double> out(N);
    for (std::size_t i = 0; i < N; ++i) {
        double kf = k_eval(kernel, (x - full.values[i]) / h);
        double k1 = k_eval(kernel, (x - half1.values[i]) / h);
        double k2 = k_eval(kernel, (x - half2.values[i]) / h);
        out[i] = 2.0 * kf - 0.5 * (k1 + k2) - curvature_term(x, full.values[i], h, kernel, cfg);
    }
    return out;
}

std::vector<double> combined_kernel_toj(const UnitEstimates& full,
                                        const std::array<UnitEstimates, 2>& halves,
                                        const std::array<UnitEstimates, 3>& thirds,
                                        double x, double h, const KernelSpec& kernel,
                                        const RbcConfig& cfg) {
    check_bandwidth(h);
    check_cfg(cfg);
    const std::size_t N = full.values.size();
    for (const auto& u : halves)
        if (u.values.size() != N)
            throw LengthMismatch("combined_kernel_toj: half estimates have length " +
                                 std::to_string(u.values.size()) + ", expected " +
                                 std::to_string(N));
    for (const auto& u : thirds)
        if (u.values.size() != N)
            throw LengthMismatch("combined_kernel_toj: third estimates have length " +
                                 std::to_string(u.values.size()) + ", expected " +
                                 std::to_string(N));

    const auto w = JackknifeWeights::toj();
    std::vector<double> out(N);
    for (std::size_t i = 0; i < N; ++i) {
        double kf = k_eval(kernel, (x - full.values[i]) / h);
        double kh = 0.5 * (k_eval(kernel, (x - halves[0].values[i]) / h) +
                           k_eval(kernel, (x - halves[1].values[i]) / h));
        double kt = (k_eval(kernel, (x - thirds[0].values[i]) / h) +
                     k_eval(kernel, (x - thirds[1].values[i]) / h) +
                     k_eval(kernel, (x - thirds[2].values[i]) / h)) / 3.0;
        out[i] = w.w_full * kf + w.w_half * kh + w.w_third * kt -
                 curvature_term(x, full.values[i], h, kernel, cfg);
    }
    return out;
}

RbcInterval rbc_interval(const std::vector<double>& per_unit_kernel, double h, double alpha,
                         double x) {
    check_bandwidth(h);
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw OutOfDomain("alpha must lie in (0,1), got " + std::to_string(alpha));
    const std::size_t N = per_unit_kernel.size();
    if (N < 2)
        throw TooFewUnits("variance estimation needs N >= 2, got N = " + std::to_string(N));

    NeumaierSum s1, s2;
    for (double v : per_unit_kernel) {
        s1.add(v);
        s2.add(v * v);
    }
    const double n = static_cast<double>(N);
    const double m1 = s1.value() / n;
    const double m2 = s2.value() / n;
    const double var = std::max(0.0, m2 - m1 * m1) / (n * h * h);

    RbcInterval out;
    out.x = x;
    out.debiased = s1.value() / (n * h);
    out.sigma = std::sqrt(var);
    const double z = normal_quantile(1.0 - alpha / 2.0);
    out.lo = out.debiased - z * out.sigma;
    out.hi = out.debiased + z * out.sigma;
    return out;
}

double normal_quantile(double p) {
    if (!(p > 0.0) || !(p < 1.0))
        throw OutOfDomain("normal quantile needs p in (0,1), got " + std::to_string(p));

    // Rational approximation (relative error ~1e-9) ...
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double p_low = 0.02425, p_high = 1.0 - p_low;

    double xv;
    if (p < p_low) {
        double q = std::sqrt(-2.0 * std::log(p));
        xv = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
             ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= p_high) {
        double q = p - 0.5, r = q * q;
        xv = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
             (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        double q = std::sqrt(-2.0 * std::log(1.0 - p));
        xv = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
             ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }

    // ... then one Halley refinement against Phi computed from erfc.
    const double e = 0.5 * std::erfc(-xv / std::sqrt(2.0)) - p;
    const double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * xv * xv);
    xv -= u / (1.0 + 0.5 * xv * u);
    return xv;
}

}  // namespace panelhet
