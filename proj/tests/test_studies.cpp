#include <doctest.h>

#include "bec/quasifree.hpp"
#include "bec/studies.hpp"

using namespace bec;

TEST_CASE("log-log fit") {
    std::vector<double> x = {1, 2, 4, 8}, y;
    for (double v : x) y.push_back(3.0 * std::pow(v, -1.5));
    LogLogFit f = loglog_fit(x, y);
    CHECK(f.slope == doctest::Approx(-1.5).epsilon(1e-13));
    CHECK(f.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-13));
    CHECK(f.r2 == doctest::Approx(1.0).epsilon(1e-13));
    // nonpositive values are skipped
    y[1] = 0.0;
    CHECK(loglog_fit(x, y).slope == doctest::Approx(-1.5).epsilon(1e-13));
    CHECK(loglog_fit({1.0}, {1.0}).slope == 0.0);
}

TEST_CASE("phase selectors") {
    for (auto s : {PhaseSelector::Zero, PhaseSelector::F_Zero, PhaseSelector::F_MinusF, PhaseSelector::F1_F2})
        CHECK(parse_phase_selector(to_string(s)) == s);
    CHECK_THROWS_AS(parse_phase_selector("F,F"), ValidationError);
}

TEST_CASE("Poisson scan") {
    PoissonScan g = poisson_error_scan(RadialChi::gaussian(1.0), {1, 2, 4, 8}, 4);
    REQUIRE(g.rows.size() == 4u);
    CHECK(g.rows[3].error < 1e-10);
    CHECK(g.predicted_rate == 2.0);
    // exact continuum value (2 pi)^{-3/2}
    CHECK(g.rows[0].continuum == doctest::Approx(std::pow(2.0 * kPi, -1.5)).epsilon(1e-12));
    CHECK(g.rows[0].reference_err < 1e-12);

    // L = 1 row: plain sum over (2 pi) Z^3 inside the support radius
    double acc = 0.0;
    const RadialChi chi = RadialChi::gaussian(1.0);
    for (int x = -3; x <= 3; ++x)
        for (int y = -3; y <= 3; ++y)
            for (int z = -3; z <= 3; ++z) {
                double r = 2.0 * kPi * std::sqrt(double(x * x + y * y + z * z));
                if (r <= chi.support) acc += std::exp(-0.5 * r * r);
            }
    CHECK(g.rows[0].lattice == acc);
    CHECK(g.rows[0].error == std::abs(acc - g.rows[0].continuum));

    PoissonScan b = poisson_error_scan(RadialChi::c2_bump(4.0), {1, 2, 4, 8}, 4);
    MESSAGE("bump fit slope " << b.fit.slope);
    CHECK(-b.fit.slope >= 1.0);

    CHECK_THROWS_AS(poisson_error_scan(chi, {}, 4), ValidationError);
    CHECK_THROWS_AS(poisson_error_scan(chi, {0.5}, 4), ValidationError);
    CHECK_THROWS_AS(RadialChi::c2_bump(0.0), ValidationError);
}

TEST_CASE("oscillatory discretization: constant phase reduces to the Poisson scan") {
    DispersionContext ctx{RadialProfile::gaussian_bump(1, 1), 0.3};
    const double T = 1.3;
    auto rows = oscillatory_disc_error(PairKernel::gaussian(), PhaseSelector::Zero, ctx, T, {1, 2});
    // the Gaussian kernel factorizes, so the lattice value is (T^2 / 2) (sum of the 3-D Gaussian)^2
    RadialChi g = RadialChi::gaussian(1.0);
    g.support = PairKernel::gaussian().support;
    PoissonScan p = poisson_error_scan(g, {1, 2}, 4);
    for (int i = 0; i < 2; ++i) {
        CHECK(rows[i].lattice.real() == doctest::Approx(0.5 * T * T * p.rows[i].lattice * p.rows[i].lattice).epsilon(1e-12));
        CHECK(rows[i].lattice.imag() == 0.0);
    }
    CHECK(rows[0].continuum.real() ==
          doctest::Approx(0.5 * T * T * std::pow(2.0 * kPi, -3.0)).epsilon(1e-9));
}

TEST_CASE("oscillatory discretization: trends") {
    DispersionContext ctx{RadialProfile::gaussian_bump(1, 1), 0.3};
    auto rows = oscillatory_disc_error(PairKernel::gaussian(), PhaseSelector::F_MinusF, ctx, 1.0, {1, 2, 4, 8});
    for (std::size_t i = 1; i < rows.size(); ++i) {
        INFO("L = " << rows[i].L);
        CHECK(rows[i].eps < rows[i - 1].eps);
    }
    for (const auto& r : rows) CHECK(r.reference_err < 0.1 * rows.back().eps + 1e-14);

    // smaller lambda, larger gap at fixed L
    std::vector<double> eps;
    for (double l : {0.3, 0.2, 0.1}) {
        DispersionContext c{RadialProfile::gaussian_bump(1, 1), l};
        eps.push_back(oscillatory_disc_error(PairKernel::gaussian(), PhaseSelector::F_MinusF, c, 1.0, {2})[0].eps);
    }
    MESSAGE("L=2 gaps: " << eps[0] << " " << eps[1] << " " << eps[2]);
    CHECK(eps[1] > eps[0]);
    CHECK(eps[2] > eps[1]);

    CHECK_THROWS_AS(oscillatory_disc_error(PairKernel::gaussian(), PhaseSelector::Zero, ctx, 0.0, {1}),
                    ValidationError);
}

TEST_CASE("Talbot scan") {
    MomentumLattice lat(1.0, 2);
    DispersionContext ctx{RadialProfile::gaussian_bump(1, 1), 0.1};
    KineticParams par;
    par.lambda = 0.1;
    Field F = bose_field(GeneratorK(1.0, -0.5, lat), lat);
    TestFunction J = sample(lat, [](const Vec3& p) { return std::exp(-norm2(p) / 4); });

    TalbotScan z = talbot_scan(lat, ctx, par, {0.0}, J, F);
    CHECK(z.rows[0].q_moll_scaled == 0.0);
    CHECK(z.rows[0].sin2_sum == 0.0);

    TalbotScan s = talbot_scan(lat, ctx, par, default_talbot_grid(), J, F);
    REQUIRE(s.rows.size() == 200u);
    CHECK(s.rows.back().T == 5.0);
    CHECK(s.max_over_min > 10.0);
    // int_0^T sin(x (T - S) / l^2) / x dS = (T l^2 / 2) (T / l^2) sinc^2(x T / (2 l^2)), times l^2
    const double l2 = par.lambda * par.lambda;
    double qmax = 0.0;
    for (const auto& r : s.rows) qmax = std::max(qmax, std::fabs(r.q_moll_scaled));
    for (std::size_t k = 0; k < s.rows.size(); k += 17) {
        const auto& r = s.rows[k];
        CHECK(std::fabs(r.q_moll_scaled - 0.5 * r.T * l2 * r.sin2_sum) <= 1e-9 * qmax);
    }
}
