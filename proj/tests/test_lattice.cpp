#include <doctest.h>

#include "bec/lattice.hpp"
#include "bec/quasifree.hpp"

using namespace bec;

TEST_CASE("lattice layout") {
    MomentumLattice lat(2.0, 2);
    CHECK(lat.size() == 125);
    CHECK(lat.point(lat.index_of_zero()) == Vec3{0, 0, 0});
    for (std::size_t i = 0; i < lat.size(); ++i) {
        auto z = lat.z(i);
        CHECK(lat.index(z[0], z[1], z[2]) == long(i));
        auto m = lat.z(lat.neg(i));
        CHECK(m == std::array<int, 3>{-z[0], -z[1], -z[2]});
    }
    CHECK(lat.index(3, 0, 0) == -1);
    long s = lat.add(lat.index(1, 0, -1), lat.index(1, 2, 0));
    CHECK(s == lat.index(2, 2, -1));
    CHECK(lat.add(lat.index(2, 0, 0), lat.index(1, 0, 0)) == -1);
    CHECK_THROWS_AS(MomentumLattice(0.0, 1), ValidationError);
    CHECK_THROWS_AS(MomentumLattice(1.0, -1), ValidationError);
}

TEST_CASE("lattice sums") {
    MomentumLattice lat(2.0, 1);
    CHECK(lattice_sum(lat, Field(lat.size(), 1.0)) == 3.375);
    Field ind(lat.size(), 0.0);
    ind[lat.index_of_zero()] = 1.0;
    CHECK(lattice_sum(lat, ind) == 0.125);
    for (std::size_t i = 0; i < lat.size(); i += 5) {
        Field e(lat.size(), 0.0);
        e[i] = 1.0;
        CHECK(lattice_sum(lat, e) == 1.0 / lat.volume());
    }

    // Gaussian on L=8, M=16 against the exact (2 pi)^-3 integral; aliasing error ~ e^{-L^2 / 2}
    MomentumLattice fine(8.0, 16);
    Field g = sample(fine, [](const Vec3& p) { return std::exp(-0.5 * norm2(p)); });
    const double exact = std::pow(2.0 * kPi, 1.5) / std::pow(2.0 * kPi, 3.0);
    CHECK(lattice_sum(fine, g) == doctest::Approx(exact).epsilon(1e-12));

    MomentumLattice big(4.0, 8);

    // parity
    Field h = sample(big, [](const Vec3& p) { return std::exp(-norm2(p - Vec3{0.3, 0.1, 0})) * (1 + p[0]); });
    Field hm(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) hm[i] = h[big.neg(i)];
    CHECK(lattice_sum(big, hm) == doctest::Approx(lattice_sum(big, h)).epsilon(1e-14));

    // doubling M with support inside the old cutoff changes nothing
    MomentumLattice a(1.0, 2), b(1.0, 4);
    auto bump = [](const Vec3& p) { return norm2(p) < 1.0 ? 1.0 - norm2(p) : 0.0; };
    CHECK(lattice_sum(a, sample(a, bump)) == lattice_sum(b, sample(b, bump)));
}

TEST_CASE("cutoff doubling stability for Gaussian-tailed data") {
    auto f = [](const Vec3& p) { return std::exp(-0.5 * norm2(p)) * (1.0 + 0.2 * p[2] * p[2]); };
    MomentumLattice a(4.0, 8), b(4.0, 16);
    double x = lattice_sum(a, sample(a, f)), y = lattice_sum(b, sample(b, f));
    CHECK(std::fabs(x - y) <= 1e-6 * std::fabs(y));
}

TEST_CASE("1-cap-infinity norms") {
    MomentumLattice one(1.0, 1);
    Field ind(one.size(), 0.0);
    ind[one.index_of_zero()] = 1.0;
    CHECK(norm_1cap_infty(one, ind, false) == 2.0);
    MomentumLattice lat(2.0, 1);
    CHECK(norm_1cap_infty(lat, Field(lat.size(), 0.5), false) == doctest::Approx(0.5 * 27 / 8.0 + 0.5));

    // weighted norm of the built-in profile, independent double loop over coordinates
    MomentumLattice big(4.0, 8);
    RadialProfile v = RadialProfile::gaussian_bump(1, 1);
    Field vf = sample(big, [&](const Vec3& p) { return v(p); });
    double l1 = 0.0, sup = 0.0, h = 2.0 * kPi / 4.0;
    for (int x = -8; x <= 8; ++x)
        for (int y = -8; y <= 8; ++y)
            for (int z = -8; z <= 8; ++z) {
                double q = h * h * (x * x + y * y + z * z);
                double val = q * std::exp(-q / 2.0);
                if (q > 0) val *= 1.0 + 1.0 / q;
                l1 += val;
                sup = std::max(sup, val);
            }
    CHECK(norm_1cap_infty(big, vf, true) == doctest::Approx(l1 / 64.0 + sup).epsilon(1e-13));
}

TEST_CASE("continuum integral") {
    CHECK(continuum_integral([](const Vec3&) { return 0.0; }, 8.0).value == 0.0);
    auto r = continuum_integral([](const Vec3& p) { return std::exp(-0.5 * norm2(p)); }, 8.0);
    CHECK(r.value == doctest::Approx(0.0634936359342410).epsilon(1e-9));
    CHECK(r.nodes == 48u * 48u * 48u);

    // vhat_{1,1} f0 with beta = 1, mu = -1 against a radial 1-D adaptive integral
    RadialProfile v = RadialProfile::gaussian_bump(1, 1);
    auto f0 = [](double r) { return 1.0 / std::expm1(0.5 * r * r + 1.0); };
    double R = default_cutoff_radius(1.0, 1.0);
    auto c = continuum_integral([&](const Vec3& p) { return v(p) * f0(norm(p)); }, R, 96);
    double radial = adaptive_integral([&](double r) { return 4.0 * kPi * r * r * v.at(r) * f0(r); }, 0.0, R, 0.0,
                                      1e-13).value / std::pow(2.0 * kPi, 3);
    CHECK(c.value == doctest::Approx(radial).epsilon(1e-6));
}

TEST_CASE("Gauss-Legendre rule") {
    std::vector<double> x, w;
    gauss_legendre(20, -1.0, 3.0, x, w);
    double s = 0.0, m = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        s += w[i];
        m += w[i] * std::pow(x[i], 7);
    }
    CHECK(s == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(m == doctest::Approx((std::pow(3.0, 8) - 1.0) / 8.0).epsilon(1e-13));
    // mirrored nodes
    gauss_legendre(9, -2.0, 2.0, x, w);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(x[i] == -x[x.size() - 1 - i]);

    // orders without a precomputed table
    for (int n : {50, 60, 80, 200}) {
        INFO(n);
        gauss_legendre(n, 0.0, 1.0, x, w);
        double e = 0.0, c = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            e += w[i] * std::exp(x[i]);
            c += w[i] * std::cos(20.0 * x[i]);
        }
        CHECK(std::fabs(e - std::expm1(1.0)) <= 1e-14);
        CHECK(std::fabs(c - std::sin(20.0) / 20.0) <= 1e-14);
    }
}

TEST_CASE("Sobolev-type norm of radial profiles") {
    RadialProfile g = RadialProfile::gaussian_bump(1, 1);
    // m = 0: int |p|^2 e^{-|p|^2/2} dp = 3 (2 pi)^{3/2}
    CHECK(norm_mc(g, 0, 40.0) == doctest::Approx(3.0 * std::pow(2.0 * kPi, 1.5)).epsilon(1e-9));
    double n1 = norm_mc(g, 1, 40.0), n2 = norm_mc(g, 2, 40.0);
    CHECK(n1 > norm_mc(g, 0, 40.0));
    CHECK(std::isfinite(n2));
    RadialProfile bare;
    bare.radial = [](double r) { return std::exp(-r * r); };
    CHECK_THROWS_AS(norm_mc(bare, 1, 5.0), ValidationError);
    CHECK_THROWS_AS(norm_mc(g, 3, 5.0), ValidationError);
}

TEST_CASE("dispersion tables match pointwise evaluation") {
    MomentumLattice lat(3.0, 2);
    DispersionContext ctx{RadialProfile::gaussian_bump(1, 1), 0.2};
    DispersionTables tb(lat, ctx);
    for (std::size_t i = 0; i < lat.size(); ++i) {
        Vec3 p = lat.point(i);
        CHECK(tb.Omega[i] == bogoliubov_omega(ctx, p));
        CHECK(tb.E[i] == free_energy(p));
        if (norm2(p) > 0) {
            HfbCoeffs h = hfb_coeffs(ctx, p, 0.0);
            CHECK(tb.V1sq[i] == h.V1sq);
            CHECK(tb.V2[i] == h.V2);
        }
    }
}
