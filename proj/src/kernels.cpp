#include "panelhet/kernels.hpp"

#include <cctype>
#include <cmath>

#include "panelhet/errors.hpp"

namespace panelhet {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014326779;  // 1/sqrt(2*pi)

double gauss_pdf(double u) { return kInvSqrt2Pi * std::exp(-0.5 * u * u); }

double gauss_cdf(double u) { return 0.5 * std::erfc(-u / std::sqrt(2.0)); }

}  // namespace

KernelSpec KernelSpec::epanechnikov() {
    return {KernelId::Epanechnikov, 1.0 / 5.0, 3.0 / 5.0};
}

KernelSpec KernelSpec::gaussian() {
    return {KernelId::Gaussian, 1.0, 0.5 * kInvSqrt2Pi * std::sqrt(2.0)};  // 1/(2 sqrt(pi))
}

KernelSpec KernelSpec::from_name(std::string_view name) {
    std::string low;
    low.reserve(name.size());
    for (char c : name) low.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (low == "epanechnikov" || low == "epa") return epanechnikov();
    if (low == "gaussian" || low == "normal") return gaussian();
    throw OutOfDomain("unknown kernel '" + std::string(name) +
                      "'; expected epanechnikov or gaussian");
}

const char* KernelSpec::name() const {
    return id == KernelId::Epanechnikov ? "epanechnikov" : "gaussian";
}

double k_eval(const KernelSpec& spec, double u) {
    if (spec.id == KernelId::Epanechnikov)
        return std::abs(u) <= 1.0 ? 0.75 * (1.0 - u * u) : 0.0;
    return gauss_pdf(u);
}

double k_cdf(const KernelSpec& spec, double u) {
    if (spec.id == KernelId::Epanechnikov) {
        if (u <= -1.0) return 0.0;
        if (u >= 1.0) return 1.0;
        return 0.75 * (u - u * u * u / 3.0) + 0.5;
    }
    return gauss_cdf(u);
}

double k_d2(const KernelSpec& spec, double u) {
    if (spec.id != KernelId::Gaussian)
        throw UnsupportedDerivativeKernel(
            "second derivative requires the gaussian kernel; the epanechnikov "
            "second derivative is not usable at the support edges");
    return (u * u - 1.0) * gauss_pdf(u);
}

}  // namespace panelhet
