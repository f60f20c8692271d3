#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "panelhet/bandwidth.hpp"
#include "panelhet/density.hpp"
#include "panelhet/errors.hpp"
#include "panelhet/jackknife.hpp"
#include "panelhet/kernels.hpp"
#include "panelhet/panel.hpp"
#include "panelhet/rbc.hpp"
#include "panelhet/simulation.hpp"
#include "panelhet/unit_stats.hpp"
#include "panelhet/version.hpp"

namespace ph = panelhet;
using nlohmann::json;

namespace {

std::vector<std::string> split_list(const std::string& csv) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream ss(csv);
    while (std::getline(ss, cur, ','))
        if (!cur.empty()) out.push_back(cur);
    return out;
}

std::string fmt(double v, const char* spec = "%.9g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

ph::CsvLayout parse_layout(const std::string& s) {
    if (s == "long") return ph::CsvLayout::Long;
    if (s == "wide") return ph::CsvLayout::Wide;
    throw ph::OutOfDomain("unknown layout '" + s + "'; expected long or wide");
}

// --kind accepts either a bare family (mean|acov|acor, aliases mu|gamma|rho)
// combined with --lag, or a fused token like acov0 / acor1.
ph::HeterogeneityKind parse_kind(const std::string& kind, std::optional<int> lag) {
    if (kind == "mean" || kind == "mu") return ph::HeterogeneityKind::Mean();
    if (kind == "acov" || kind == "gamma")
        return ph::HeterogeneityKind::Autocovariance(lag.value_or(0));
    if (kind == "acor" || kind == "rho")
        return ph::HeterogeneityKind::Autocorrelation(lag.value_or(1));
    if (lag)
        throw ph::OutOfDomain("kind '" + kind + "' already encodes a lag; drop --lag");
    return ph::HeterogeneityKind::from_name(kind);
}

struct CommonRbcFlags {
    double ci_level = 0.95;
    std::string bias_factor = "half";
    double lambda = 1.0;

    ph::RbcConfig to_config() const {
        if (!(ci_level > 0.0) || !(ci_level < 1.0))
            throw ph::OutOfDomain("--ci-level must lie in (0,1), got " + fmt(ci_level));
        ph::RbcConfig cfg;
        cfg.alpha = 1.0 - ci_level;
        cfg.lambda = lambda;
        if (bias_factor == "half")
            cfg.bias_factor = 0.5;
        else if (bias_factor == "one")
            cfg.bias_factor = 1.0;
        else
            throw ph::OutOfDomain("--rbc-bias-factor must be 'half' or 'one', got '" +
                                  bias_factor + "'");
        return cfg;
    }
};

ph::BandwidthPolicy make_policy(std::optional<double> fixed_h, double scale) {
    if (fixed_h) return ph::BandwidthPolicy::fixed(*fixed_h);
    return ph::BandwidthPolicy::rule_of_thumb(scale);
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::ios_base::failure("cannot open '" + path + "' for writing");
    return out;
}

void write_sidecar(const std::string& output_path, const json& meta) {
    auto out = open_output(output_path + ".meta.json");
    out << meta.dump(2) << "\n";
}

// ---------------------------------------------------------------- estimate

struct EstimateArgs {
    std::string input, output = "estimate.csv";
    std::string layout = "long";
    std::string kind = "mean";
    std::optional<int> lag;
    std::string kernel = "epanechnikov";
    std::string estimators = "ne,hpj";
    std::string target = "density";
    std::optional<double> bandwidth;
    double bw_scale = 1.0;
    std::size_t grid_n = 512;
    std::string at;
    bool no_ci = false;
    CommonRbcFlags rbc;
};

int cmd_estimate(const EstimateArgs& a) {
    ph::PanelData panel = ph::load_csv_file(a.input, parse_layout(a.layout));
    ph::HeterogeneityKind kind = parse_kind(a.kind, a.lag);
    ph::KernelSpec kernel = ph::KernelSpec::from_name(a.kernel);

    std::vector<ph::Estimator> ests;
    for (const auto& tok : split_list(a.estimators)) {
        ph::Estimator e = ph::estimator_from_name(tok);
        if (e == ph::Estimator::IE)
            throw ph::UnsupportedEstimator(
                "the infeasible estimator needs true unit parameters; use the simulate command");
        ests.push_back(e);
    }
    if (ests.empty()) throw ph::OutOfDomain("--estimators list is empty");

    const bool want_hpj = std::count(ests.begin(), ests.end(), ph::Estimator::HPJ) > 0;
    const bool want_toj = std::count(ests.begin(), ests.end(), ph::Estimator::TOJ) > 0;

    ph::Target target;
    if (a.target == "density")
        target = ph::Target::Density;
    else if (a.target == "kcdf")
        target = ph::Target::KernelCdf;
    else if (a.target == "ecdf")
        target = ph::Target::EmpiricalCdf;
    else
        throw ph::OutOfDomain("unknown target '" + a.target +
                              "'; expected density, kcdf, or ecdf");
    if (target != ph::Target::Density && (want_hpj || want_toj))
        throw ph::UnsupportedEstimator(
            "jackknife corrections are defined for the density target only; CDF targets "
            "support --estimators ne");

    ph::UnitEstimates xi = ph::estimate_units(panel, kind);
    ph::BandwidthPolicy policy = make_policy(a.bandwidth, a.bw_scale);
    double h = ph::resolve(policy, xi, kernel);

    ph::EvalGrid grid{{}};
    if (!a.at.empty()) {
        std::vector<double> pts;
        for (const auto& tok : split_list(a.at)) {
            try {
                pts.push_back(std::stod(tok));
            } catch (const std::logic_error&) {
                throw ph::OutOfDomain("--at entry '" + tok + "' is not a number");
            }
        }
        std::sort(pts.begin(), pts.end());
        pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
        grid = ph::EvalGrid::from_points(std::move(pts));
    } else {
        grid = ph::default_grid(xi, h, a.grid_n);
    }

    ph::EstimateGrid result;
    if (target == ph::Target::Density) {
        if (want_hpj || want_toj) {
            result = ph::jackknife_density(
                panel, kind, grid, h, kernel,
                want_toj ? ph::JackknifeOrder::TOJ : ph::JackknifeOrder::HPJ);
        } else {
            result.grid = grid;
            result.h = h;
            result.kernel = kernel;
            result.target = target;
            result.kind = kind;
            result.values[ph::Estimator::NE] = ph::kde(xi, grid, h, kernel);
        }
        if (!a.no_ci) {
            ph::RbcConfig rbc = a.rbc.to_config();
            ph::Estimator ci_est = want_toj   ? ph::Estimator::TOJ
                                   : want_hpj ? ph::Estimator::HPJ
                                              : ph::Estimator::NE;
            ph::SubpanelEstimates sub;
            if (ci_est == ph::Estimator::NE)
                sub.full = xi;
            else
                sub = ph::compute_subpanel_estimates(
                    panel, kind,
                    ci_est == ph::Estimator::TOJ ? ph::JackknifeOrder::TOJ
                                                 : ph::JackknifeOrder::HPJ);
            ph::RbcBand band;
            band.estimator = ci_est;
            band.alpha = rbc.alpha;
            for (double x : grid.points) {
                std::vector<double> kv;
                if (ci_est == ph::Estimator::NE)
                    kv = ph::combined_kernel_ne(sub.full, x, h, kernel, rbc);
                else if (ci_est == ph::Estimator::HPJ)
                    kv = ph::combined_kernel_hpj(sub.full, (*sub.halves)[0],
                                                 (*sub.halves)[1], x, h, kernel, rbc);
                else
                    kv = ph::combined_kernel_toj(sub.full, *sub.halves, *sub.thirds, x, h,
                                                 kernel, rbc);
                ph::RbcInterval ci = ph::rbc_interval(kv, h, rbc.alpha, x);
                band.debiased.push_back(ci.debiased);
                band.sigma.push_back(ci.sigma);
                band.lo.push_back(ci.lo);
                band.hi.push_back(ci.hi);
            }
            result.ci = std::move(band);
        }
    } else {
        result.grid = grid;
        result.h = h;
        result.kernel = kernel;
        result.target = target;
        result.kind = kind;
        result.values[ph::Estimator::NE] = target == ph::Target::KernelCdf
                                               ? ph::kcdf(xi, grid, h, kernel)
                                               : ph::ecdf(xi, grid);
    }

    auto out = open_output(a.output);
    out << "x";
    for (ph::Estimator e : ests) out << ",f_" << ph::estimator_name(e);
    if (result.ci) out << ",ci_lo,ci_hi";
    out << "\n";
    for (std::size_t g = 0; g < grid.size(); ++g) {
        out << fmt(grid.points[g], "%.12g");
        for (ph::Estimator e : ests) out << ',' << fmt(result.values.at(e)[g], "%.12g");
        if (result.ci)
            out << ',' << fmt(result.ci->lo[g], "%.12g") << ','
                << fmt(result.ci->hi[g], "%.12g");
        out << "\n";
    }
    out.close();

    json meta{{"command", "estimate"},
              {"version", PANELHET_VERSION},
              {"input", a.input},
              {"layout", a.layout},
              {"kind", kind.name()},
              {"kernel", kernel.name()},
              {"target", a.target},
              {"n_units", panel.n_units()},
              {"n_times", panel.n_times()},
              {"bandwidth", h},
              {"bandwidth_mode", a.bandwidth ? "fixed" : "rule-of-thumb"},
              {"bw_scale", a.bw_scale},
              {"grid_points", grid.size()},
              {"grid_lo", grid.points.front()},
              {"grid_hi", grid.points.back()},
              {"output", a.output}};
    {
        json je = json::array();
        for (ph::Estimator e : ests) je.push_back(ph::estimator_name(e));
        meta["estimators"] = je;
    }
    if (result.ci)
        meta["ci"] = json{{"level", a.rbc.ci_level},
                          {"estimator", ph::estimator_name(result.ci->estimator)},
                          {"bias_factor", a.rbc.bias_factor},
                          {"lambda", a.rbc.lambda}};
    else
        meta["ci"] = nullptr;
    write_sidecar(a.output, meta);
    return 0;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
    std::size_t N = 1000, T = 96, R = 500;
    std::uint64_t seed = 1;
    std::string kinds = "mean";
    std::string quantiles = "0.2,0.4,0.6,0.8";
    std::string estimators = "ne,hpj";
    std::string kernel = "epanechnikov";
    std::optional<double> bandwidth;
    std::optional<double> ie_bandwidth;
    double bw_scale = 1.0;
    std::optional<unsigned> threads;
    std::string output = "simulate.csv";
    CommonRbcFlags rbc;
};

int cmd_simulate(const SimulateArgs& a) {
    ph::McConfig cfg;
    cfg.N = a.N;
    cfg.T = a.T;
    cfg.R = a.R;
    cfg.seed = a.seed;
    cfg.kernel = ph::KernelSpec::from_name(a.kernel);
    cfg.rbc = a.rbc.to_config();

    cfg.kinds.clear();
    for (const auto& tok : split_list(a.kinds))
        cfg.kinds.push_back(ph::HeterogeneityKind::from_name(tok));

    cfg.quantiles.clear();
    for (const auto& tok : split_list(a.quantiles)) {
        try {
            cfg.quantiles.push_back(std::stod(tok));
        } catch (const std::logic_error&) {
            throw ph::OutOfDomain("--quantiles entry '" + tok + "' is not a number");
        }
    }

    cfg.estimators.clear();
    for (const auto& tok : split_list(a.estimators))
        cfg.estimators.push_back(ph::estimator_from_name(tok));

    cfg.feasible_bw = make_policy(a.bandwidth, a.bw_scale);
    cfg.infeasible_bw = make_policy(a.ie_bandwidth ? a.ie_bandwidth : a.bandwidth, a.bw_scale);

    if (a.threads) {
        cfg.threads = *a.threads;
    } else if (const char* env = std::getenv("PANELHET_THREADS")) {
        try {
            cfg.threads = static_cast<unsigned>(std::stoul(env));
        } catch (const std::logic_error&) {
            throw ph::OutOfDomain("PANELHET_THREADS='" + std::string(env) +
                                  "' is not a thread count");
        }
    }

    ph::McStudyResult res = ph::run_study(cfg);
    auto out = open_output(a.output);
    ph::write_study_csv(res, out);
    out.close();

    json meta{{"command", "simulate"},
              {"version", PANELHET_VERSION},
              {"N", cfg.N},
              {"T", cfg.T},
              {"R", cfg.R},
              {"seed", cfg.seed},
              {"kernel", cfg.kernel.name()},
              {"quantiles", cfg.quantiles},
              {"bw_scale", a.bw_scale},
              {"threads", cfg.threads},
              {"ci_level", a.rbc.ci_level},
              {"rbc_bias_factor", a.rbc.bias_factor},
              {"rbc_lambda", a.rbc.lambda},
              {"output", a.output}};
    {
        json jk = json::array();
        for (const auto& k : cfg.kinds) jk.push_back(k.name());
        meta["kinds"] = jk;
        json je = json::array();
        for (ph::Estimator e : cfg.estimators) je.push_back(ph::estimator_name(e));
        meta["estimators"] = je;
    }
    if (a.bandwidth) meta["bandwidth"] = *a.bandwidth;
    if (a.ie_bandwidth) meta["ie_bandwidth"] = *a.ie_bandwidth;
    write_sidecar(a.output, meta);
    return 0;
}

// ---------------------------------------------------------------- bandwidth

struct BandwidthArgs {
    std::string input;
    std::string layout = "long";
    std::string kind = "mean";
    std::optional<int> lag;
    std::string kernel = "epanechnikov";
    std::optional<double> bandwidth;
    double bw_scale = 1.0;
};

int cmd_bandwidth(const BandwidthArgs& a) {
    ph::PanelData panel = ph::load_csv_file(a.input, parse_layout(a.layout));
    ph::UnitEstimates xi = ph::estimate_units(panel, parse_kind(a.kind, a.lag));
    double h = ph::resolve(make_policy(a.bandwidth, a.bw_scale), xi,
                           ph::KernelSpec::from_name(a.kernel));
    std::printf("%.6g\n", h);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"panelhet " PANELHET_VERSION
                 " — cross-sectional distributions of per-unit panel statistics "
                 "(kernel density/CDF, split-panel jackknife corrections, robust "
                 "bias-corrected intervals, simulation studies)"};
    app.require_subcommand(1);

    EstimateArgs ea;
    auto* est = app.add_subcommand("estimate",
                                   "Estimate the density or CDF of per-unit statistics "
                                   "from a panel CSV");
    est->add_option("--input", ea.input, "panel CSV path")->required();
    est->add_option("--layout", ea.layout, "CSV layout: long|wide (default long)");
    est->add_option("--kind", ea.kind, "mean|acov|acor (aliases mu|gamma|rho, or acov<k>/acor<k>)");
    est->add_option("--lag", ea.lag, "lag k for acov/acor");
    est->add_option("--kernel", ea.kernel, "epanechnikov|gaussian");
    est->add_option("--estimators", ea.estimators, "comma list from ne,hpj,toj (default ne,hpj)");
    est->add_option("--target", ea.target, "density|kcdf|ecdf (default density)");
    est->add_option("--bandwidth", ea.bandwidth, "fixed bandwidth h > 0");
    est->add_option("--bw-scale", ea.bw_scale, "multiplier on the rule-of-thumb bandwidth");
    est->add_option("--grid", ea.grid_n, "number of grid points (default 512)");
    est->add_option("--at", ea.at, "comma list of evaluation points (overrides --grid)");
    est->add_flag("--no-ci", ea.no_ci, "skip confidence intervals");
    est->add_option("--ci-level", ea.rbc.ci_level, "CI level (default 0.95)");
    est->add_option("--rbc-bias-factor", ea.rbc.bias_factor, "half|one (default half)");
    est->add_option("--rbc-lambda", ea.rbc.lambda, "h/b ratio (default 1)");
    est->add_option("--output", ea.output, "output CSV path (default estimate.csv)");

    SimulateArgs sa;
    auto* sim = app.add_subcommand("simulate", "Run a seeded Monte Carlo study");
    auto* o_n = sim->add_option("--N", sa.N, "units per replication");
    auto* o_t = sim->add_option("--T", sa.T, "time periods");
    auto* o_r = sim->add_option("--R", sa.R, "replications");
    auto* o_seed = sim->add_option("--seed", sa.seed, "64-bit seed");
    auto* o_kinds = sim->add_option("--kinds", sa.kinds, "comma list from mean,acov<k>,acor<k>");
    auto* o_q = sim->add_option("--quantiles", sa.quantiles, "target quantiles (default 0.2,0.4,0.6,0.8)");
    auto* o_est = sim->add_option("--estimators", sa.estimators, "comma list from ne,hpj,toj,ie");
    auto* o_kern = sim->add_option("--kernel", sa.kernel, "epanechnikov|gaussian");
    auto* o_bw = sim->add_option("--bandwidth", sa.bandwidth, "fixed h for all estimators");
    sim->add_option("--ie-bandwidth", sa.ie_bandwidth, "fixed h for the infeasible estimator");
    sim->add_option("--bw-scale", sa.bw_scale, "multiplier on rule-of-thumb bandwidths");
    sim->add_option("--threads", sa.threads, "worker threads (default: PANELHET_THREADS or all cores)");
    sim->add_option("--ci-level", sa.rbc.ci_level, "CI level (default 0.95)");
    sim->add_option("--rbc-bias-factor", sa.rbc.bias_factor, "half|one (default half)");
    sim->add_option("--rbc-lambda", sa.rbc.lambda, "h/b ratio (default 1)");
    sim->add_option("--output", sa.output, "output CSV path (default simulate.csv)");
    std::string preset;
    sim->add_option("--preset", preset, "table1-cell|table2-cell: canned study configurations");

    BandwidthArgs ba;
    auto* bw = app.add_subcommand("bandwidth", "Report the bandwidth the estimators would use");
    bw->add_option("--input", ba.input, "panel CSV path")->required();
    bw->add_option("--layout", ba.layout, "CSV layout: long|wide");
    bw->add_option("--kind", ba.kind, "mean|acov|acor");
    bw->add_option("--lag", ba.lag, "lag k");
    bw->add_option("--kernel", ba.kernel, "epanechnikov|gaussian");
    bw->add_option("--bandwidth", ba.bandwidth, "fixed bandwidth passthrough");
    bw->add_option("--bw-scale", ba.bw_scale, "rule-of-thumb multiplier");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*sim && !preset.empty()) {
            // Preset fills every field the user did not set explicitly.
            auto fill = [&](auto* opt, auto& field, auto value) {
                if (opt->count() == 0) field = value;
            };
            if (preset == "table1-cell") {
                fill(o_kinds, sa.kinds, std::string("mean"));
                fill(o_q, sa.quantiles, std::string("0.2"));
                fill(o_est, sa.estimators, std::string("ne,hpj,ie"));
                fill(o_n, sa.N, std::size_t{1000});
                fill(o_t, sa.T, std::size_t{96});
                fill(o_r, sa.R, std::size_t{500});
                fill(o_bw, sa.bandwidth, std::optional<double>{0.650});
                fill(o_kern, sa.kernel, std::string("epanechnikov"));
                fill(o_seed, sa.seed, std::uint64_t{20260815});
            } else if (preset == "table2-cell") {
                fill(o_kinds, sa.kinds, std::string("acov0"));
                fill(o_q, sa.quantiles, std::string("0.8"));
                fill(o_est, sa.estimators, std::string("ne,hpj,toj,ie"));
                fill(o_n, sa.N, std::size_t{1000});
                fill(o_t, sa.T, std::size_t{24});
                fill(o_r, sa.R, std::size_t{500});
                fill(o_bw, sa.bandwidth, std::optional<double>{0.274});
                fill(o_kern, sa.kernel, std::string("epanechnikov"));
                fill(o_seed, sa.seed, std::uint64_t{31415});
            } else {
                throw ph::OutOfDomain("unknown preset '" + preset +
                                      "'; expected table1-cell or table2-cell");
            }
        }
        if (*est) return cmd_estimate(ea);
        if (*sim) return cmd_simulate(sa);
        if (*bw) return cmd_bandwidth(ba);
        return 2;
    } catch (const ph::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
