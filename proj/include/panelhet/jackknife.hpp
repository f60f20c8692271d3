#pragma once

#include <array>
#include <optional>
#include <vector>

#include "panelhet/density.hpp"
#include "panelhet/panel.hpp"
#include "panelhet/unit_stats.hpp"

namespace panelhet {

enum class JackknifeOrder { HPJ, TOJ };

// Weights applied to (full-panel estimate, average of halves, average of
// thirds).  HPJ = (2, -1, 0).  TOJ weights cancel the T^-1 and T^-3/2 bias
// orders: they solve
//   w_f +       w_h +       w_t = 1
//   w_f +     2 w_h +     3 w_t = 0
//   w_f + 2^1.5 w_h + 3^1.5 w_t = 0
struct JackknifeWeights {
    double w_full, w_half, w_third;

    static JackknifeWeights hpj();
    static JackknifeWeights toj();
};

// Pointwise 2*full - (half1 + half2)/2.
std::vector<double> hpj_combine(const std::vector<double>& full,
                                const std::vector<double>& half1,
                                const std::vector<double>& half2);

// Pointwise w_full*full + w_half*half_avg + w_third*third_avg.
std::vector<double> toj_combine(const std::vector<double>& full,
                                const std::vector<double>& half_avg,
                                const std::vector<double>& third_avg);

// Per-unit estimates on the full panel and on the subpanels a given jackknife
// order needs.  Shared by density combination and RBC interval construction.
struct SubpanelEstimates {
    UnitEstimates full;
    std::optional<std::array<UnitEstimates, 2>> halves;
    std::optional<std::array<UnitEstimates, 3>> thirds;
};

SubpanelEstimates compute_subpanel_estimates(const PanelData& p, HeterogeneityKind kind,
                                             JackknifeOrder order);

// Estimates the density on the grid with the naive estimator and the
// requested jackknife correction(s); every subpanel KDE reuses the full-panel
// bandwidth h.  Returns NE plus HPJ (and TOJ when order == TOJ).
EstimateGrid jackknife_density(const PanelData& p, HeterogeneityKind kind,
                               const EvalGrid& grid, double h, const KernelSpec& kernel,
                               JackknifeOrder order);

}  // namespace panelhet
