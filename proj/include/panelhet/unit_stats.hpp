#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "panelhet/panel.hpp"

namespace panelhet {

// Which per-unit quantity is being estimated: the time-series mean, the
// lag-k autocovariance, or the lag-k autocorrelation.
struct HeterogeneityKind {
    enum class Tag { Mean, Autocovariance, Autocorrelation };

    Tag tag = Tag::Mean;
    int lag = 0;

    static HeterogeneityKind Mean();
    static HeterogeneityKind Autocovariance(int k);  // k >= 0
    static HeterogeneityKind Autocorrelation(int k); // k >= 1

    // "mean", "acov<k>", "acor<k>" — stable tokens used in CSV output and CLI.
    std::string name() const;
    static HeterogeneityKind from_name(const std::string& token);

    // Shortest series the kind can be computed from.
    std::size_t min_series_length() const;

    bool operator==(const HeterogeneityKind&) const = default;
};

enum class Subpanel { Full, Half1, Half2, Third1, Third2, Third3 };

struct UnitEstimates {
    HeterogeneityKind kind;
    std::vector<double> values;  // one estimate per unit, panel order
    Subpanel subpanel = Subpanel::Full;
    std::size_t source_T = 0;    // series length the estimates came from
};

// Per-unit sample analogues:
//   mean_i   = T^-1 sum_t y_it
//   acov_k,i = (T-k)^-1 sum_{t=k+1..T} (y_it - mean_i)(y_i,t-k - mean_i)
//   acor_k,i = acov_k,i / acov_0,i
// Throws LagTooLarge when T <= k, DegenerateUnit (listing unit ids) when an
// autocorrelation is requested for a constant series.
UnitEstimates estimate_units(const PanelData& p, HeterogeneityKind kind,
                             Subpanel tag = Subpanel::Full);

}  // namespace panelhet
