#include "panelhet/unit_stats.hpp"

#include <algorithm>

#include "panelhet/errors.hpp"
#include "panelhet/numeric.hpp"

namespace panelhet {

HeterogeneityKind HeterogeneityKind::Mean() { return {Tag::Mean, 0}; }

HeterogeneityKind HeterogeneityKind::Autocovariance(int k) {
    if (k < 0) throw OutOfDomain("autocovariance lag must be >= 0, got " + std::to_string(k));
    return {Tag::Autocovariance, k};
}

HeterogeneityKind HeterogeneityKind::Autocorrelation(int k) {
    if (k < 1) throw OutOfDomain("autocorrelation lag must be >= 1, got " + std::to_string(k));
    return {Tag::Autocorrelation, k};
}

std::string HeterogeneityKind::name() const {
    switch (tag) {
        case Tag::Mean: return "mean";
        case Tag::Autocovariance: return "acov" + std::to_string(lag);
        case Tag::Autocorrelation: return "acor" + std::to_string(lag);
    }
    return "?";
}

HeterogeneityKind HeterogeneityKind::from_name(const std::string& token) {
    if (token == "mean" || token == "mu") return Mean();
    auto tail_int = [&](std::size_t off) {
        return std::stoi(token.substr(off));
    };
    try {
        if (token.rfind("acov", 0) == 0)
            return Autocovariance(token.size() == 4 ? 0 : tail_int(4));
        if (token.rfind("acor", 0) == 0)
            return Autocorrelation(token.size() == 4 ? 1 : tail_int(4));
    } catch (const std::logic_error&) {
        // fall through to the domain error below
    }
    throw OutOfDomain("unknown heterogeneity kind '" + token +
                      "'; expected mean, acov<k>, or acor<k>");
}

std::size_t HeterogeneityKind::min_series_length() const {
    return tag == Tag::Mean ? 1 : static_cast<std::size_t>(lag) + 1;
}

namespace {

double series_mean(const double* y, std::size_t T) {
    NeumaierSum s;
    for (std::size_t t = 0; t < T; ++t) s.add(y[t]);
    return s.value() / static_cast<double>(T);
}

// (T-k)^-1 sum_{t=k..T-1} (y_t - m)(y_{t-k} - m)
double autocov(const double* y, std::size_t T, std::size_t k, double m) {
    NeumaierSum s;
    for (std::size_t t = k; t < T; ++t) s.add((y[t] - m) * (y[t - k] - m));
    return s.value() / static_cast<double>(T - k);
}

bool all_equal(const double* y, std::size_t T) {
    for (std::size_t t = 1; t < T; ++t)
        if (y[t] != y[0]) return false;
    return true;
}

}  // namespace

UnitEstimates estimate_units(const PanelData& p, HeterogeneityKind kind, Subpanel tag) {
    const std::size_t N = p.n_units(), T = p.n_times();
    const auto k = static_cast<std::size_t>(kind.lag);
    if (kind.tag != HeterogeneityKind::Tag::Mean && T <= k)
        throw LagTooLarge("lag " + std::to_string(kind.lag) + " needs T >= " +
                          std::to_string(kind.lag + 1) + ", panel has T = " + std::to_string(T));

    UnitEstimates out;
    out.kind = kind;
    out.subpanel = tag;
    out.source_T = T;
    out.values.resize(N);

    std::vector<std::string> degenerate;
    for (std::size_t i = 0; i < N; ++i) {
        const double* y = p.values.data() + i * T;
        switch (kind.tag) {
            case HeterogeneityKind::Tag::Mean:
                out.values[i] = series_mean(y, T);
                break;
            case HeterogeneityKind::Tag::Autocovariance: {
                double m = series_mean(y, T);
                out.values[i] = autocov(y, T, k, m);
                break;
            }
            case HeterogeneityKind::Tag::Autocorrelation: {
                double m = series_mean(y, T);
                double g0 = autocov(y, T, 0, m);
                if (g0 == 0.0 || all_equal(y, T)) {
                    degenerate.push_back(p.unit_ids[i]);
                    out.values[i] = 0.0;
                } else {
                    out.values[i] = autocov(y, T, k, m) / g0;
                }
                break;
            }
        }
    }

    if (!degenerate.empty()) {
        std::string msg = "constant series (zero lag-0 autocovariance) for units:";
        std::size_t shown = std::min<std::size_t>(degenerate.size(), 10);
        for (std::size_t i = 0; i < shown; ++i) msg += " " + degenerate[i];
        if (degenerate.size() > shown)
            msg += " (+" + std::to_string(degenerate.size() - shown) + " more)";
        throw DegenerateUnit(msg);
    }
    return out;
}

}  // namespace panelhet
