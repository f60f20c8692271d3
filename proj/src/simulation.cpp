#include "panelhet/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <ostream>
#include <thread>

#include "panelhet/errors.hpp"
#include "panelhet/jackknife.hpp"
#include "panelhet/numeric.hpp"

namespace panelhet {

DgpDraw draw_unit_params(Rng& rng) {
    DgpDraw d;
    d.varsigma = rng.normal(-1.0, 1.0);
    d.phi = 2.0 * rng.beta(2.0, 4.0) - 1.0;
    d.sigma2 = 3.0 * rng.beta(3.0, 2.0);
    return d;
}

SimulatedPanel simulate_panel(std::size_t N, std::size_t T, Rng& rng) {
    if (N < 1 || T < 1) throw OutOfDomain("simulated panel needs N >= 1 and T >= 1");

    SimulatedPanel out;
    out.params.reserve(N);
    out.panel.values.resize(N * T);

    std::size_t width = std::to_string(N).size();
    out.panel.unit_ids.reserve(N);
    for (std::size_t i = 1; i <= N; ++i) {
        std::string num = std::to_string(i);
        out.panel.unit_ids.push_back("u" + std::string(width - num.size(), '0') + num);
    }
    out.panel.time_ids.reserve(T);
    for (std::size_t t = 1; t <= T; ++t) out.panel.time_ids.push_back(std::to_string(t));

    for (std::size_t i = 0; i < N; ++i) {
        DgpDraw d = draw_unit_params(rng);
        out.params.push_back(d);
        double y = rng.normal(d.varsigma, std::sqrt(d.sigma2));
        const double drift = (1.0 - d.phi) * d.varsigma;
        const double inno_sd = std::sqrt((1.0 - d.phi * d.phi) * d.sigma2);
        for (std::size_t t = 0; t < T; ++t) {
            y = drift + d.phi * y + inno_sd * rng.normal();
            out.panel.values[i * T + t] = y;
        }
    }
    return out;
}

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014326779;

bool is_mean(HeterogeneityKind k) { return k.tag == HeterogeneityKind::Tag::Mean; }
bool is_acov0(HeterogeneityKind k) {
    return k.tag == HeterogeneityKind::Tag::Autocovariance && k.lag == 0;
}
bool is_acor1(HeterogeneityKind k) {
    return k.tag == HeterogeneityKind::Tag::Autocorrelation && k.lag == 1;
}

[[noreturn]] void no_closed_form(HeterogeneityKind kind) {
    throw OutOfSupport("no closed-form distribution for kind '" + kind.name() +
                       "'; available: mean, acov0, acor1");
}

}  // namespace

double true_density(HeterogeneityKind kind, double x) {
    if (is_mean(kind)) {
        double z = x + 1.0;
        return kInvSqrt2Pi * std::exp(-0.5 * z * z);
    }
    if (is_acov0(kind)) {
        if (x < 0.0 || x > 3.0)
            throw OutOfSupport("acov0 density has support [0,3], got x = " + std::to_string(x));
        double u = x / 3.0;
        return 4.0 * u * u * (1.0 - u);  // Beta(3,2) density / 3
    }
    if (is_acor1(kind)) {
        if (x < -1.0 || x > 1.0)
            throw OutOfSupport("acor1 density has support [-1,1], got x = " + std::to_string(x));
        double u = (x + 1.0) / 2.0;
        double w = 1.0 - u;
        return 10.0 * u * w * w * w;  // Beta(2,4) density / 2
    }
    no_closed_form(kind);
}

double true_cdf(HeterogeneityKind kind, double x) {
    if (is_mean(kind)) return 0.5 * std::erfc(-(x + 1.0) / std::sqrt(2.0));
    if (is_acov0(kind)) {
        if (x <= 0.0) return 0.0;
        if (x >= 3.0) return 1.0;
        double u = x / 3.0;
        return u * u * u * (4.0 - 3.0 * u);
    }
    if (is_acor1(kind)) {
        if (x <= -1.0) return 0.0;
        if (x >= 1.0) return 1.0;
        double u = (x + 1.0) / 2.0;
        double w = 1.0 - u;
        return 1.0 - w * w * w * w * (1.0 + 4.0 * u);
    }
    no_closed_form(kind);
}

double true_quantile(HeterogeneityKind kind, double p) {
    if (!(p > 0.0) || !(p < 1.0))
        throw OutOfDomain("quantile level must lie in (0,1), got " + std::to_string(p));
    double lo, hi;
    if (is_mean(kind)) {
        lo = -42.0;
        hi = 40.0;
    } else if (is_acov0(kind)) {
        lo = 0.0;
        hi = 3.0;
    } else if (is_acor1(kind)) {
        lo = -1.0;
        hi = 1.0;
    } else {
        no_closed_form(kind);
    }
    for (int iter = 0; iter < 200 && hi - lo > 1e-12; ++iter) {
        double mid = 0.5 * (lo + hi);
        (true_cdf(kind, mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

namespace {

struct RepResult {
    std::vector<double> est;     // per cell
    std::vector<char> covered;   // per cell
    std::vector<double> h_used;  // per cell
};

struct Point {
    double x;
    double f_true;
};

bool wants(const McConfig& cfg, Estimator e) {
    return std::find(cfg.estimators.begin(), cfg.estimators.end(), e) != cfg.estimators.end();
}

UnitEstimates true_units(const std::vector<DgpDraw>& params, HeterogeneityKind kind,
                         std::size_t T) {
    UnitEstimates out;
    out.kind = kind;
    out.subpanel = Subpanel::Full;
    out.source_T = T;
    out.values.reserve(params.size());
    for (const auto& d : params) {
        if (is_mean(kind))
            out.values.push_back(d.varsigma);
        else if (is_acov0(kind))
            out.values.push_back(d.sigma2);
        else if (is_acor1(kind))
            out.values.push_back(d.phi);
        else
            no_closed_form(kind);
    }
    return out;
}

RepResult run_replication(const McConfig& cfg, std::size_t r,
                          const std::vector<std::vector<Point>>& points) {
    const bool need_hpj = wants(cfg, Estimator::HPJ);
    const bool need_toj = wants(cfg, Estimator::TOJ);
    const bool need_feas = wants(cfg, Estimator::NE) || need_hpj || need_toj;
    const bool need_ie = wants(cfg, Estimator::IE);

    Rng rng = Rng::for_stream(cfg.seed, r);
    SimulatedPanel sim = simulate_panel(cfg.N, cfg.T, rng);

    std::optional<SplitPair> halves;
    std::optional<SplitTriple> thirds;
    if (need_hpj || need_toj) halves = split_half(sim.panel);
    if (need_toj) thirds = split_thirds(sim.panel);

    const std::size_t n_cells = cfg.kinds.size() * cfg.quantiles.size() * cfg.estimators.size();
    RepResult rep;
    rep.est.resize(n_cells);
    rep.covered.resize(n_cells);
    rep.h_used.resize(n_cells);

    const auto tw = JackknifeWeights::toj();
    std::size_t cell = 0;
    for (std::size_t ki = 0; ki < cfg.kinds.size(); ++ki) {
        const HeterogeneityKind kind = cfg.kinds[ki];

        UnitEstimates xi_full, xi_h1, xi_h2, xi_t1, xi_t2, xi_t3, xi_true;
        double h = 0.0, h_ie = 0.0;
        if (need_feas) {
            xi_full = estimate_units(sim.panel, kind);
            if (halves) {
                xi_h1 = estimate_units(halves->first, kind, Subpanel::Half1);
                xi_h2 = estimate_units(halves->second, kind, Subpanel::Half2);
            }
            if (thirds) {
                xi_t1 = estimate_units(thirds->first, kind, Subpanel::Third1);
                xi_t2 = estimate_units(thirds->second, kind, Subpanel::Third2);
                xi_t3 = estimate_units(thirds->third, kind, Subpanel::Third3);
            }
            h = resolve(cfg.feasible_bw, xi_full, cfg.kernel);
        }
        if (need_ie) {
            xi_true = true_units(sim.params, kind, cfg.T);
            h_ie = resolve(cfg.infeasible_bw, xi_true, cfg.kernel);
        }

        for (std::size_t qi = 0; qi < cfg.quantiles.size(); ++qi) {
            const Point pt = points[ki][qi];
            for (Estimator e : cfg.estimators) {
                double est = 0.0, hu = h;
                std::vector<double> kvals;
                switch (e) {
                    case Estimator::NE:
                        est = kde_at(xi_full, pt.x, h, cfg.kernel);
                        kvals = combined_kernel_ne(xi_full, pt.x, h, cfg.kernel, cfg.rbc);
                        break;
                    case Estimator::HPJ: {
                        double f = kde_at(xi_full, pt.x, h, cfg.kernel);
                        double f1 = kde_at(xi_h1, pt.x, h, cfg.kernel);
                        double f2 = kde_at(xi_h2, pt.x, h, cfg.kernel);
                        est = 2.0 * f - 0.5 * (f1 + f2);
                        kvals = combined_kernel_hpj(xi_full, xi_h1, xi_h2, pt.x, h,
                                                    cfg.kernel, cfg.rbc);
                        break;
                    }
                    case Estimator::TOJ: {
                        double f = kde_at(xi_full, pt.x, h, cfg.kernel);
                        double fh = 0.5 * (kde_at(xi_h1, pt.x, h, cfg.kernel) +
                                           kde_at(xi_h2, pt.x, h, cfg.kernel));
                        double ft = (kde_at(xi_t1, pt.x, h, cfg.kernel) +
                                     kde_at(xi_t2, pt.x, h, cfg.kernel) +
                                     kde_at(xi_t3, pt.x, h, cfg.kernel)) / 3.0;
                        est = tw.w_full * f + tw.w_half * fh + tw.w_third * ft;
                        kvals = combined_kernel_toj(xi_full, {xi_h1, xi_h2},
                                                    {xi_t1, xi_t2, xi_t3}, pt.x, h,
                                                    cfg.kernel, cfg.rbc);
                        break;
                    }
                    case Estimator::IE:
                        est = kde_at(xi_true, pt.x, h_ie, cfg.kernel);
                        kvals = combined_kernel_ne(xi_true, pt.x, h_ie, cfg.kernel, cfg.rbc);
                        hu = h_ie;
                        break;
                }
                RbcInterval ci = rbc_interval(kvals, hu, cfg.rbc.alpha, pt.x);
                rep.est[cell] = est;
                rep.covered[cell] =
                    static_cast<char>(ci.lo <= pt.f_true && pt.f_true <= ci.hi);
                rep.h_used[cell] = hu;
                ++cell;
            }
        }
    }
    return rep;
}

}  // namespace

McStudyResult run_study(const McConfig& cfg) {
    if (cfg.R < 1) throw OutOfDomain("replication count must be >= 1");
    if (cfg.N < 1 || cfg.T < 1) throw OutOfDomain("study needs N >= 1 and T >= 1");
    if (cfg.kinds.empty()) throw OutOfDomain("study needs at least one heterogeneity kind");
    if (cfg.estimators.empty()) throw OutOfDomain("study needs at least one estimator");
    for (double q : cfg.quantiles)
        if (!(q > 0.0) || !(q < 1.0))
            throw OutOfDomain("quantile levels must lie in (0,1), got " + std::to_string(q));

    std::vector<std::vector<Point>> points(cfg.kinds.size());
    for (std::size_t ki = 0; ki < cfg.kinds.size(); ++ki)
        for (double q : cfg.quantiles) {
            double x = true_quantile(cfg.kinds[ki], q);
            points[ki].push_back({x, true_density(cfg.kinds[ki], x)});
        }

    const std::size_t R = cfg.R;
    std::vector<RepResult> reps(R);
    unsigned n_threads = cfg.threads ? cfg.threads : std::thread::hardware_concurrency();
    n_threads = std::max(1u, std::min<unsigned>(n_threads, static_cast<unsigned>(R)));

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;
    auto worker = [&] {
        for (;;) {
            std::size_t r = next.fetch_add(1);
            if (r >= R) break;
            try {
                reps[r] = run_replication(cfg, r, points);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mu);
                if (!failure) failure = std::current_exception();
                next.store(R);
                break;
            }
        }
    };
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);

    McStudyResult res;
    res.cfg = cfg;
    std::size_t cell = 0;
    for (std::size_t ki = 0; ki < cfg.kinds.size(); ++ki)
        for (std::size_t qi = 0; qi < cfg.quantiles.size(); ++qi)
            for (Estimator e : cfg.estimators) {
                std::vector<double> ests(R), hs(R);
                NeumaierSum cov;
                for (std::size_t r = 0; r < R; ++r) {
                    ests[r] = reps[r].est[cell];
                    hs[r] = reps[r].h_used[cell];
                    cov.add(reps[r].covered[cell]);
                }
                McCell c;
                c.kind = cfg.kinds[ki];
                c.quantile = cfg.quantiles[qi];
                c.estimator = e;
                c.x = points[ki][qi].x;
                c.true_value = points[ki][qi].f_true;
                c.bias = mean_of(ests) - c.true_value;
                c.sd = sample_sd(ests);
                c.coverage = cov.value() / static_cast<double>(R);
                c.h_mean = mean_of(hs);
                c.h_sd = sample_sd(hs);
                res.cells.push_back(c);
                ++cell;
            }
    return res;
}

void write_study_csv(const McStudyResult& res, std::ostream& out) {
    out << "kind,quantile,estimator,true,bias,std,cp,h_mean,h_std\n";
    char buf[256];
    for (const auto& c : res.cells) {
        std::snprintf(buf, sizeof buf, "%s,%.9g,%s,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n",
                      c.kind.name().c_str(), c.quantile, estimator_name(c.estimator),
                      c.true_value, c.bias, c.sd, c.coverage, c.h_mean, c.h_sd);
        out << buf;
    }
}

}  // namespace panelhet
