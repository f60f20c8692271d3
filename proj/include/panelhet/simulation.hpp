#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "panelhet/bandwidth.hpp"
#include "panelhet/density.hpp"
#include "panelhet/kernels.hpp"
#include "panelhet/panel.hpp"
#include "panelhet/rbc.hpp"
#include "panelhet/rng.hpp"
#include "panelhet/unit_stats.hpp"

namespace panelhet {

// Unit-level parameters of the heterogeneous AR(1) design:
//   varsigma ~ N(-1, 1)           (unit mean)
//   phi      = 2 Beta(2,4) - 1    (AR coefficient, |phi| < 1)
//   sigma2   = 3 Beta(3,2)        (stationary variance)
struct DgpDraw {
    double varsigma;
    double phi;
    double sigma2;
};

DgpDraw draw_unit_params(Rng& rng);

struct SimulatedPanel {
    PanelData panel;
    std::vector<DgpDraw> params;  // one per unit
};

// y_i0 ~ N(varsigma, sigma2); for t = 1..T:
//   y_it = (1 - phi) varsigma + phi y_i,t-1 + sqrt((1 - phi^2) sigma2) u_it,
// u_it iid N(0,1).  Only t = 1..T is emitted.
SimulatedPanel simulate_panel(std::size_t N, std::size_t T, Rng& rng);

// Closed-form cross-sectional density/CDF of the unit-level quantity:
//   mean:  N(-1,1);  acov0: 3*Beta(3,2) on (0,3);  acor1: 2*Beta(2,4)-1 on (-1,1).
// Only these three kinds have closed forms; others throw OutOfSupport.
double true_density(HeterogeneityKind kind, double x);
double true_cdf(HeterogeneityKind kind, double x);
// Quantile by bisection on the closed-form CDF, |error| <= 1e-10.
double true_quantile(HeterogeneityKind kind, double p);

struct McConfig {
    std::size_t N = 1000;
    std::size_t T = 96;
    std::size_t R = 500;
    std::uint64_t seed = 1;
    std::vector<HeterogeneityKind> kinds = {HeterogeneityKind::Mean()};
    std::vector<double> quantiles = {0.2, 0.4, 0.6, 0.8};
    std::vector<Estimator> estimators = {Estimator::NE, Estimator::HPJ};
    KernelSpec kernel = KernelSpec::epanechnikov();
    // Bandwidth for the feasible estimators (NE/HPJ/TOJ share one h per
    // replication) and for the infeasible estimator (selected from true xi).
    BandwidthPolicy feasible_bw = BandwidthPolicy::rule_of_thumb();
    BandwidthPolicy infeasible_bw = BandwidthPolicy::rule_of_thumb();
    RbcConfig rbc;
    unsigned threads = 0;  // 0 = hardware concurrency
};

struct McCell {
    HeterogeneityKind kind;
    double quantile = 0.0;
    Estimator estimator = Estimator::NE;
    double x = 0.0;           // evaluation point (true quantile)
    double true_value = 0.0;  // true density at x
    double bias = 0.0;
    double sd = 0.0;
    double coverage = 0.0;    // RBC interval coverage of true_value
    double h_mean = 0.0;
    double h_sd = 0.0;
};

struct McStudyResult {
    McConfig cfg;
    std::vector<McCell> cells;  // kind-major, then quantile, then estimator
};

// Runs R replications.  Replication r draws from Rng::for_stream(seed, r),
// so the result is identical for any thread count and any run.
McStudyResult run_study(const McConfig& cfg);

// CSV with header kind,quantile,estimator,true,bias,std,cp,h_mean,h_std.
void write_study_csv(const McStudyResult& res, std::ostream& out);

}  // namespace panelhet
