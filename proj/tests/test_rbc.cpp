#include <doctest.h>

#include <array>
#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "panelhet/errors.hpp"
#include "panelhet/rbc.hpp"

using namespace panelhet;

namespace {

UnitEstimates make_xi(std::vector<double> v, Subpanel tag = Subpanel::Full) {
    UnitEstimates xi;
    xi.kind = HeterogeneityKind::Mean();
    xi.values = std::move(v);
    xi.subpanel = tag;
    return xi;
}

double mean_of_vec(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

// Second derivative of the Gaussian-kernel density estimate at x, bandwidth b.
double fpp_reference(const std::vector<double>& xi, double x, double b) {
    double s = 0.0;
    for (double v : xi) s += oracle::gauss_d2((x - v) / b);
    return s / (static_cast<double>(xi.size()) * b * b * b);
}

}  // namespace

TEST_SUITE("rbc") {

TEST_CASE("combined kernel at the data point") {
    // K(0) - c * kappa1 * L''(0) = 0.75 + 0.5 * 0.2 * phi(0).
    RbcConfig cfg;
    auto out = combined_kernel_ne(make_xi({1.3}), 1.3, 1.0, KernelSpec::epanechnikov(), cfg);
    CHECK(out[0] == doctest::Approx(0.7898942280401433).epsilon(1e-14));

    RbcConfig plain;
    plain.bias_factor = 0.0;  // curvature term off -> the raw kernel
    auto raw = combined_kernel_ne(make_xi({0.0}), 0.4, 1.0, KernelSpec::epanechnikov(), plain);
    CHECK(raw[0] == doctest::Approx(oracle::epan_k(0.4)).epsilon(1e-15));
}

TEST_CASE("combined kernel vanishes far from the data") {
    RbcConfig cfg;
    auto out = combined_kernel_ne(make_xi({0.0}), 100.0, 1.0, KernelSpec::epanechnikov(), cfg);
    CHECK(std::abs(out[0]) <= 1e-300);
}

TEST_CASE("configuration validation") {
    auto xi = make_xi({0.0, 1.0});
    RbcConfig bad_lambda;
    bad_lambda.lambda = 0.0;
    CHECK_THROWS_AS(combined_kernel_ne(xi, 0.0, 1.0, KernelSpec::epanechnikov(), bad_lambda),
                    InvalidBandwidth);
    RbcConfig bad_c;
    bad_c.bias_factor = -0.5;
    CHECK_THROWS_AS(combined_kernel_ne(xi, 0.0, 1.0, KernelSpec::epanechnikov(), bad_c),
                    OutOfDomain);
    RbcConfig epan_curv;
    epan_curv.curvature_kernel = KernelSpec::epanechnikov();
    CHECK_THROWS_AS(combined_kernel_ne(xi, 0.0, 1.0, KernelSpec::epanechnikov(), epan_curv),
                    UnsupportedDerivativeKernel);
    CHECK_THROWS_AS(combined_kernel_ne(xi, 0.0, -1.0, KernelSpec::epanechnikov(), RbcConfig{}),
                    InvalidBandwidth);
}

TEST_CASE("interval hand values") {
    auto out = rbc_interval({0.0, 2.0}, 1.0, 0.05);
    CHECK(out.debiased == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(out.sigma == doctest::Approx(0.7071067811865476).epsilon(1e-12));
    CHECK(out.hi - out.debiased == doctest::Approx(1.3859038243496777).epsilon(1e-9));
    CHECK(out.lo == doctest::Approx(1.0 - 1.3859038243496777).epsilon(1e-9));

    auto flat = rbc_interval({0.6, 0.6, 0.6}, 0.5, 0.05);
    CHECK(flat.sigma <= 1e-7);
    CHECK(flat.debiased == doctest::Approx(0.6 * 3 / (3 * 0.5)).epsilon(1e-12));

    CHECK_THROWS_AS(rbc_interval({1.0}, 1.0, 0.05), TooFewUnits);
    CHECK_THROWS_AS(rbc_interval({}, 1.0, 0.05), TooFewUnits);
    CHECK_THROWS_AS(rbc_interval({0.0, 1.0}, 1.0, 0.0), OutOfDomain);
    CHECK_THROWS_AS(rbc_interval({0.0, 1.0}, 1.0, 1.0), OutOfDomain);
    CHECK_THROWS_AS(rbc_interval({0.0, 1.0}, 0.0, 0.05), InvalidBandwidth);
}

TEST_CASE("interval midpoint is the debiased estimate and sigma is nonnegative") {
    oracle::TestRand rnd(21);
    for (int rep = 0; rep < 50; ++rep) {
        int N = rnd.randint(2, 100);
        std::vector<double> k(N);
        for (auto& v : k) v = rnd.uniform(-0.5, 2.0);
        auto out = rbc_interval(k, rnd.uniform(0.05, 1.5), 0.05);
        CHECK(out.sigma >= 0.0);
        CHECK(0.5 * (out.lo + out.hi) == doctest::Approx(out.debiased).epsilon(1e-12));
        CHECK(out.hi >= out.lo);
    }
}

TEST_CASE("HPJ combined kernel collapses to NE when halves equal the full panel") {
    oracle::TestRand rnd(99);
    std::vector<double> v(20);
    for (auto& x : v) x = rnd.uniform(-1, 1);
    auto full = make_xi(v);
    auto h1 = make_xi(v, Subpanel::Half1);
    auto h2 = make_xi(v, Subpanel::Half2);
    RbcConfig cfg;
    double x = 0.3, h = 0.5;
    auto ne = combined_kernel_ne(full, x, h, KernelSpec::epanechnikov(), cfg);
    auto hp = combined_kernel_hpj(full, h1, h2, x, h, KernelSpec::epanechnikov(), cfg);
    for (std::size_t i = 0; i < ne.size(); ++i)
        CHECK(hp[i] == doctest::Approx(ne[i]).epsilon(1e-13));

    CHECK_THROWS_AS(combined_kernel_hpj(full, make_xi({1.0}), h2, x, h,
                                        KernelSpec::epanechnikov(), cfg),
                    LengthMismatch);
}

TEST_CASE("per-unit kernels average to the debiased density identity") {
    // mean(Kcomb)/h must equal f_hat(x) - c*kappa1*h^2*f''_b(x) for NE, and the
    // jackknife-weighted analogue for HPJ/TOJ.
    oracle::TestRand rnd(1234);
    auto w = JackknifeWeights::toj();
    for (double lambda : {1.0, 0.8}) {
        for (double c : {0.5, 1.0}) {
            for (bool epan : {true, false}) {
                const int N = 40;
                std::vector<double> vf(N), v1(N), v2(N), t1(N), t2(N), t3(N);
                for (int i = 0; i < N; ++i) {
                    vf[i] = rnd.uniform(-1, 1);
                    v1[i] = vf[i] + rnd.uniform(-0.2, 0.2);
                    v2[i] = vf[i] + rnd.uniform(-0.2, 0.2);
                    t1[i] = vf[i] + rnd.uniform(-0.3, 0.3);
                    t2[i] = vf[i] + rnd.uniform(-0.3, 0.3);
                    t3[i] = vf[i] + rnd.uniform(-0.3, 0.3);
                }
                auto spec = epan ? KernelSpec::epanechnikov() : KernelSpec::gaussian();
                RbcConfig cfg;
                cfg.lambda = lambda;
                cfg.bias_factor = c;
                double h = 0.45, x = rnd.uniform(-0.5, 0.5), b = h / lambda;
                double kap = epan ? 0.2 : 1.0;

                double f = oracle::kde_point(vf, x, h, epan);
                double fpp = fpp_reference(vf, x, b);

                auto kn = combined_kernel_ne(make_xi(vf), x, h, spec, cfg);
                CHECK(std::abs(mean_of_vec(kn) / h - (f - c * kap * h * h * fpp)) <= 1e-12);

                auto kh = combined_kernel_hpj(make_xi(vf), make_xi(v1, Subpanel::Half1),
                                              make_xi(v2, Subpanel::Half2), x, h, spec, cfg);
                double f1 = oracle::kde_point(v1, x, h, epan);
                double f2 = oracle::kde_point(v2, x, h, epan);
                CHECK(std::abs(mean_of_vec(kh) / h -
                               (2 * f - 0.5 * (f1 + f2) - c * kap * h * h * fpp)) <= 1e-12);

                std::array<UnitEstimates, 2> halves = {make_xi(v1, Subpanel::Half1),
                                                       make_xi(v2, Subpanel::Half2)};
                std::array<UnitEstimates, 3> thirds = {make_xi(t1, Subpanel::Third1),
                                                       make_xi(t2, Subpanel::Third2),
                                                       make_xi(t3, Subpanel::Third3)};
                auto kt = combined_kernel_toj(make_xi(vf), halves, thirds, x, h, spec, cfg);
                double g1 = oracle::kde_point(t1, x, h, epan);
                double g2 = oracle::kde_point(t2, x, h, epan);
                double g3 = oracle::kde_point(t3, x, h, epan);
                double want = w.w_full * f + w.w_half * 0.5 * (f1 + f2) +
                              w.w_third * (g1 + g2 + g3) / 3.0 - c * kap * h * h * fpp;
                CHECK(std::abs(mean_of_vec(kt) / h - want) <= 1e-12);
            }
        }
    }
}

TEST_CASE("normal quantile") {
    CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-9));
    CHECK(normal_quantile(0.9) == doctest::Approx(1.2815515655446004).epsilon(1e-9));
    CHECK_THROWS_AS(normal_quantile(0.0), OutOfDomain);
    CHECK_THROWS_AS(normal_quantile(1.0), OutOfDomain);
    CHECK_THROWS_AS(normal_quantile(-0.2), OutOfDomain);

    // Against bisection on the CDF, across the branch points of the rational
    // approximation and into both tails.
    oracle::TestRand rnd(808);
    std::vector<double> ps = {1e-6, 1e-4, 0.0242, 0.0243, 0.5, 0.9, 0.97575, 0.999999};
    for (int i = 0; i < 200; ++i) ps.push_back(rnd.uniform(0.0005, 0.9995));
    for (double p : ps) {
        double q = normal_quantile(p);
        CHECK(std::abs(q - oracle::phi_inv_bisect(p)) <= 1e-9);
        // Central p only: in the tails the rounding of 1-p itself moves the
        // quantile by more than the approximation error.
        if (p >= 0.01 && p <= 0.99)
            CHECK(std::abs(q + normal_quantile(1.0 - p)) <= 1e-11);
    }
}

}  // TEST_SUITE
