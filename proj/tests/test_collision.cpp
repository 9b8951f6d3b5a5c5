#include <doctest.h>

#include <random>

#include "bec/collision.hpp"
#include "bec/quasifree.hpp"
#include "oracles.hpp"

using namespace bec;

namespace {

// Small instance: L=1, M=1, lambda=0.2, N=10, T=1, beta=1, mu=-0.5, vhat_{1,1}.
struct Small {
    oracle::Instance in;
    MomentumLattice lat;
    DispersionContext ctx;
    KineticParams par;
    Field F;
    oracle::ZFn oF;

    explicit Small(double L = 1.0, int M = 1, double lambda = 0.2) {
        in.L = L;
        in.M = M;
        in.lambda = lambda;
        lat = MomentumLattice(L, M);
        ctx = DispersionContext{RadialProfile::gaussian_bump(1, 1), lambda};
        par.lambda = lambda;
        par.bigN = 10;
        par.T = 1;
        F = bose_field(GeneratorK(in.beta, in.mu, lat), lat);
        oF = [this](const oracle::Z3& z) { return oracle::bose(in, z); };
    }
    // J(p) = exp(-|p|^2 / 4) + 0.3 p_x
    TestFunction J() const {
        return sample(lat, [](const Vec3& p) { return std::exp(-norm2(p) / 4) + 0.3 * p[0]; });
    }
    oracle::ZFn oJ() const {
        const double h = lat.spacing();
        return [h](const oracle::Z3& z) {
            long double q = (long double)h * h * (z[0] * z[0] + z[1] * z[1] + z[2] * z[2]);
            return std::exp(-q / 4) + 0.3L * h * z[0];
        };
    }
    TestFunction J0() const {
        TestFunction j(lat.size(), 0.0);
        j[lat.index_of_zero()] = lat.volume();
        return j;
    }
    oracle::ZFn oJ0() const {
        const double v = lat.volume();
        return [v](const oracle::Z3& z) { return (z[0] == 0 && z[1] == 0 && z[2] == 0) ? (long double)v : 0.0L; };
    }
};

double rel(double got, long double want) { return double(std::fabs(got - want) / std::fabs(want)); }

GTermSpec boltzmann_spec() {
    GTermSpec s;
    s.family = GFamily::Boltzmann;
    s.ell = 1;
    s.j = 2;
    s.scalar = 0.7;
    const int sg[3][2] = {{1, -1}, {1, -1}, {-1, 1}}, ta[3][2] = {{1, 1}, {-1, 1}, {1, -1}};
    for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 2; ++l) {
            s.sigma[k][l] = sg[k][l];
            s.tau[k][l] = ta[k][l];
        }
    s.j1 = 3;
    s.j2 = 1;
    s.alpha[0] = 1;
    s.beta[2] = 1;
    return s;
}

oracle::GBoltzmann oracle_spec(const GTermSpec& s) {
    oracle::GBoltzmann g;
    g.scalar = s.scalar;
    g.ell = s.ell;
    g.j = s.j;
    for (int k = 0; k < 3; ++k) {
        for (int l = 0; l < 2; ++l) {
            g.sigma[k][l] = s.sigma[k][l];
            g.tau[k][l] = s.tau[k][l];
        }
        g.alpha[k] = s.alpha[k];
        g.beta[k] = s.beta[k];
    }
    g.j1 = s.j1;
    g.j2 = s.j2;
    return g;
}

}  // namespace

TEST_CASE("delta_cub and detailed balance factor") {
    auto c = [](const Vec3&) { return 2.5; };
    CHECK(delta_cub(c, {1, 0, 0}, {0, 3, 1}) == 2.5);
    auto sq = [](const Vec3& p) { return norm2(p); };
    CHECK(delta_cub(sq, {1, 0, 0}, {0, 1, 0}) == 0.0);
    CHECK(delta_cub(sq, {1, 0, 0}, {1, 0, 0}) == -2.0);
    for (int i = 0; i < 3; ++i) {
        auto pi = [i](const Vec3& p) { return p[i]; };
        CHECK(delta_cub(pi, {0.3, -1.2, 0.7}, {2.1, 0.4, -0.9}) == doctest::Approx(0.0).epsilon(1e-15));
    }
    CHECK(detailed_balance_factor(0, 0, 0) == 0.0);
    CHECK(detailed_balance_factor(1, 2, 3) == 10.0);
    // Bose-Einstein with energy conservation: (1 + f) = e^{beta Omega} f
    const double beta = 0.8, O1 = 0.7, O2 = 1.9;
    auto be = [beta](double O) { return 1.0 / std::expm1(beta * O); };
    CHECK(std::fabs(detailed_balance_factor(be(O1), be(O2), be(O1 + O2))) < 1e-15);
}

TEST_CASE("sinc kernel branch") {
    CHECK(sinc_kernel(0.0, 3.0) == 3.0);
    const double a = 50.0;
    for (double x : {0.99e-6 / a, 0.5e-6 / a, 1.01e-6 / a}) {
        double direct = std::sin(a * x) / x;
        CHECK(std::fabs(sinc_kernel(x, a) - direct) <= 1e-12 * std::fabs(direct));
    }
}

TEST_CASE("simplex phase") {
    CHECK(std::abs(simplex_phase(0, 0, 1.7) - cplx(0.5 * 1.7 * 1.7)) < 1e-15);
    // continuity of the series branches
    for (auto [w1, w2] : {std::pair{1.3, 1e-9}, std::pair{1e-9, 0.8}, std::pair{0.9, -0.9 + 1e-9}}) {
        cplx a = simplex_phase(w1, w2, 2.0);
        cplx b = simplex_phase(w1 == 1e-9 ? 0.0 : w1, w2 == 1e-9 ? 0.0 : (w1 + w2 == 1e-9 ? -w1 : w2), 2.0);
        CHECK(std::abs(a - b) <= 1e-6 * std::abs(b));
    }
    auto q = oracle::simplex_phase_quadrature(1.3, -0.7, 2.0);
    CHECK(std::abs(simplex_phase(1.3, -0.7, 2.0) - q) <= 1e-10);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> w(-4.0, 4.0), t(0.0, 3.0);
    for (int k = 0; k < 20; ++k) {
        double a = w(rng), b = w(rng), s = t(rng);
        CHECK(std::abs(simplex_phase(a, b, s) - oracle::simplex_phase_quadrature(a, b, s)) <= 1e-10);
    }
    CHECK_THROWS_AS(simplex_phase(1, 1, -1), ValidationError);
}

TEST_CASE("divided differences of exp") {
    const cplx a(0.3, 1.1), b(-0.2, 0.4), c(0.05, -2.0);
    CHECK(std::abs(exp_divided_difference({a}) - std::exp(a)) < 1e-15);
    CHECK(std::abs(exp_divided_difference({a, b}) - (std::exp(a) - std::exp(b)) / (a - b)) < 1e-14);
    cplx ab = (std::exp(a) - std::exp(b)) / (a - b), bc = (std::exp(b) - std::exp(c)) / (b - c);
    CHECK(std::abs(exp_divided_difference({a, b, c}) - (ab - bc) / (a - c)) < 1e-14);
    CHECK(std::abs(exp_divided_difference({a, a}) - std::exp(a)) < 1e-14);
    CHECK(std::abs(exp_divided_difference({0.0, 0.0, 0.0}) - 0.5) < 1e-16);
    CHECK(std::abs(exp_divided_difference({0.0, 0.0, 0.0, 0.0}) - 1.0 / 6.0) < 1e-16);
    // symmetric in its arguments and continuous across the cluster switch
    CHECK(std::abs(exp_divided_difference({a, b, c}) - exp_divided_difference({c, a, b})) < 1e-14);
    for (double eps : {0.3, 0.99, 1.01, 3.0}) {
        cplx x(0.0, eps);
        cplx lhs = exp_divided_difference({x, 0.0, 0.0});
        cplx rhs = (std::exp(x) - 1.0 - x) / (x * x);
        CHECK(std::abs(lhs - rhs) <= 1e-12 * std::abs(rhs) + 1e-14);
    }
    const cplx x(0.0, 1e-3);
    cplx series = 0.5 + x / 6.0 + x * x / 24.0 + x * x * x / 120.0 + x * x * x * x / 720.0;
    CHECK(std::abs(exp_divided_difference({x, 0.0, 0.0}) - series) < 1e-16);
    // points placed symmetrically about their mean make every odd series term vanish
    const cplx u(0.0, 0.4);
    CHECK(std::abs(exp_divided_difference({u, -u}) - std::sin(0.4) / 0.4) < 1e-16);
    CHECK(std::abs(exp_divided_difference({u, 0.0, -u}) - (std::exp(u) - 2.0 + std::exp(-u)) / (2.0 * u * u)) < 1e-15);
}

TEST_CASE("mollified operator: transcription gate") {
    Small s;
    long double want0 = oracle::q_mollified_d(s.in, s.oF, s.oJ0(), 0.0);
    // frozen value of the independent summation
    CHECK(double(want0) == doctest::Approx(-5.01477095849520636e-15).epsilon(1e-14));
    CHECK(rel(q_mollified_d(s.lat, s.ctx, s.par, s.F, s.J0(), 0.0), want0) <= 1e-12);
    long double want1 = oracle::q_mollified_d(s.in, s.oF, s.oJ(), 0.3);
    CHECK(double(want1) == doctest::Approx(2.86919427749995499e-15).epsilon(1e-14));
    CHECK(rel(q_mollified_d(s.lat, s.ctx, s.par, s.F, s.J(), 0.3), want1) <= 1e-12);

    Small b(4.0, 1, 0.2);
    long double w4 = oracle::q_mollified_d(b.in, b.oF, b.oJ0(), 0.0);
    CHECK(double(w4) == doctest::Approx(7.77244539350819098e-01).epsilon(1e-14));
    CHECK(rel(q_mollified_d(b.lat, b.ctx, b.par, b.F, b.J0(), 0.0), w4) <= 1e-12);
}

TEST_CASE("mollified operator: nulls and symmetries") {
    Small s(3.0, 2, 0.3);
    Field zero(s.lat.size(), 0.0);
    CHECK(q_mollified_d(s.lat, s.ctx, s.par, zero, s.J(), 0.2) == 0.0);
    for (int i = 0; i < 3; ++i) {
        TestFunction pi = sample(s.lat, [i](const Vec3& p) { return p[i]; });
        TestFunction absp = sample(s.lat, [](const Vec3& p) { return std::fabs(p[0]) + std::fabs(p[1]) + std::fabs(p[2]); });
        double scale = std::fabs(q_mollified_d(s.lat, s.ctx, s.par, s.F, absp, 0.0)) + 1.0;
        CHECK(std::fabs(q_mollified_d(s.lat, s.ctx, s.par, s.F, pi, 0.0)) <= 1e-12 * scale);
    }
    // the pointwise response reassembles the operator for any J
    TestFunction J = s.J();
    std::vector<double> pw = q_mollified_d_pointwise(s.lat, s.ctx, s.par, s.F, 0.2);
    double viaJ = 0.0;
    for (std::size_t q = 0; q < J.size(); ++q) viaJ += pw[q] * J[q];
    viaJ /= s.lat.volume();
    CHECK(viaJ == doctest::Approx(q_mollified_d(s.lat, s.ctx, s.par, s.F, J, 0.2)).epsilon(1e-12));
}

TEST_CASE("mollified operator: time integral equals the cos double integral") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    const double l = 0.3, T = 1.3;
    for (int k = 0; k < 20; ++k) {
        double x = u(rng);
        double lhs = simplex_phase(x / (l * l), -x / (l * l), T).real() / (l * l);
        double rhs = l * l * (1.0 - std::cos(x * T / (l * l))) / (x * x);
        CHECK(std::fabs(lhs - rhs) <= 1e-10 * std::fabs(rhs));
    }
    Small s(4.0, 1, 0.3);
    TestFunction J = s.J();
    double a = q_mollified_d_time_integral(s.lat, s.ctx, s.par, s.F, J);
    double b = cBd0_integrated(s.lat, s.ctx, s.par, s.F, J);
    CHECK(a == doctest::Approx(b).epsilon(1e-10));
}

TEST_CASE("mollified operator: cutoff doubling") {
    Small a(2.0, 4, 0.3), b(2.0, 8, 0.3);
    double x = q_mollified_d(a.lat, a.ctx, a.par, a.F, a.J(), 0.0);
    double y = q_mollified_d(b.lat, b.ctx, b.par, b.F, b.J(), 0.0);
    CHECK(std::fabs(x - y) <= 1e-6 * std::fabs(y));
}

TEST_CASE("mollified operator: equilibrium suppression") {
    // Pairs through p = 0 are exactly resonant and their balance factor F (1 + F) never vanishes,
    // so J is taken with J(0) = 0; F(0) then drops out. Off-shell terms carry sin^2(x T / 2 l^2),
    // so the decrease is a trend, strict on L = 3 and only end to end on L = 4.
    auto value = [](double L, double l) {
        Small s(L, 1, l);
        Field Feq = sample(s.lat, [&](const Vec3& p) {
            double O = bogoliubov_omega(s.ctx, p);
            return O == 0.0 ? 1.0 : 1.0 / std::expm1(O);
        });
        TestFunction J = sample(s.lat, [](const Vec3& p) { return norm2(p) * std::exp(-norm2(p) / 4); });
        return std::fabs(q_mollified_d_time_integral(s.lat, s.ctx, s.par, Feq, J));
    };
    const double a = value(3.0, 0.2), b = value(3.0, 0.1), c = value(3.0, 0.05);
    MESSAGE("equilibrium time integrals on L=3: " << a << " " << b << " " << c);
    CHECK(b < a);
    CHECK(c < b);
    CHECK(value(4.0, 0.05) < value(4.0, 0.2));
}

TEST_CASE("subleading operators: transcription gates") {
    Small s;
    const TestFunction J = s.J();
    long double b1 = oracle::bol1_printed(s.in, s.oF, s.oJ(), 2, 1);
    CHECK(double(b1) == doctest::Approx(8.61420324122393288e-20).epsilon(1e-14));
    CHECK(rel(bol1_d(s.lat, s.ctx, s.par, s.F, J, 2, 1, OperatorForm::Printed), b1) <= 1e-12);
    long double b21 = oracle::bol21_printed(s.in, s.oF, s.oJ(), 2, 1);
    long double b22 = oracle::bol22_printed(s.in, s.oF, s.oJ(), 2, 1);
    CHECK(double(b21) == doctest::Approx(-1.04443778885655619e-28).epsilon(1e-14));
    CHECK(double(b22) == doctest::Approx(-1.09117310578030061e-19).epsilon(1e-14));
    CHECK(rel(bol21_d(s.lat, s.ctx, s.par, s.F, J, 2, 1), b21) <= 1e-12);
    CHECK(rel(bol22_d(s.lat, s.ctx, s.par, s.F, J, 2, 1), b22) <= 1e-12);
    CHECK(rel(bol2_d(s.lat, s.ctx, s.par, s.F, J, 2, 1, OperatorForm::Printed), b21 + b22) <= 1e-12);

    Small b(4.0, 1, 0.2);
    const TestFunction J4 = b.J();
    long double c1 = oracle::bol1_printed(b.in, b.oF, b.oJ(), 2, 1);
    long double c2 = oracle::bol21_printed(b.in, b.oF, b.oJ(), 2, 1) + oracle::bol22_printed(b.in, b.oF, b.oJ(), 2, 1);
    CHECK(double(c1) == doctest::Approx(-8.81479834978510441e-03).epsilon(1e-14));
    CHECK(rel(bol1_d(b.lat, b.ctx, b.par, b.F, J4, 2, 1, OperatorForm::Printed), c1) <= 1e-12);
    CHECK(rel(bol2_d(b.lat, b.ctx, b.par, b.F, J4, 2, 1, OperatorForm::Printed), c2) <= 1e-12);
}

TEST_CASE("subleading operators: trivial cases") {
    Small s(4.0, 1, 0.2);
    const TestFunction J = s.J();
    DispersionContext novhat{RadialProfile::zero(), 0.2};
    Field zero(s.lat.size(), 0.0);
    for (auto form : {OperatorForm::Derived, OperatorForm::Printed}) {
        CHECK(bol1_d(s.lat, novhat, s.par, s.F, J, 2, 1, form) == 0.0);
        CHECK(bol2_d(s.lat, novhat, s.par, s.F, J, 2, 1, form) == 0.0);
        CHECK(bol1_d(s.lat, s.ctx, s.par, zero, J, 2, 1, form) == 0.0);
        CHECK(bol2_d(s.lat, s.ctx, s.par, s.F, J, 0, 0, form) == 0.0);
    }
    CHECK_THROWS_AS(bol1_d(s.lat, s.ctx, s.par, s.F, J, 1, 2), ValidationError);
}

TEST_CASE("subleading operators: integrated forms") {
    Small s(4.0, 1, 0.2);
    const TestFunction J = s.J();
    // the macroscopic double integral against a fine product rule in (S1, S2)
    const double l2 = s.par.lambda * s.par.lambda;
    std::vector<double> x, w;
    gauss_legendre(200, 0.0, 1.0, x, w);
    for (auto form : {OperatorForm::Derived, OperatorForm::Printed}) {
        double acc = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i)
            for (std::size_t j = 0; j < x.size(); ++j) {
                double S1 = x[i], S2 = x[i] * x[j];
                acc += w[i] * w[j] * x[i] * bol1_d(s.lat, s.ctx, s.par, s.F, J, S1 / l2, S2 / l2, form);
            }
        CHECK(cBd1_integrated(s.lat, s.ctx, s.par, s.F, J, form) == doctest::Approx(acc).epsilon(1e-8));
    }
}

TEST_CASE("G-term evaluator: transcription gates") {
    Small s;
    const TestFunction J = s.J();
    GTermSpec spec = boltzmann_spec();
    auto want = oracle::gterm_boltzmann(s.in, s.oF, s.oJ(), oracle_spec(spec), 2, 1);
    CHECK(double(want.real()) == doctest::Approx(-2.52232240789122032e-61).epsilon(1e-13));
    cplx got = gterm_eval(s.lat, s.ctx, s.par, s.F, J, spec, 2, 1);
    CHECK(double(std::abs(oracle::cld(got.real(), got.imag()) - want) / std::abs(want)) <= 1e-12);

    Small b(4.0, 1, 0.2);
    auto w4 = oracle::gterm_boltzmann(b.in, b.oF, b.oJ(), oracle_spec(spec), 2, 1);
    cplx g4 = gterm_eval(b.lat, b.ctx, b.par, b.F, b.J(), spec, 2, 1);
    CHECK(double(std::abs(oracle::cld(g4.real(), g4.imag()) - w4) / std::abs(w4)) <= 1e-12);

    // absorption families
    for (bool cubic : {false, true}) {
        GTermSpec a;
        a.family = cubic ? GFamily::AbsCub : GFamily::AbsQuart;
        a.ell = 3;
        a.j = 1;
        a.scalar = -1.5;
        a.m1 = 2;
        a.m2 = -2;
        a.alpha[0] = 1;
        a.beta[1] = 1;
        a.iota = 1;
        a.pk_sign = -1;
        oracle::GAbsorption o;
        o.cubic = cubic;
        o.ell = 3;
        o.j = 1;
        o.scalar = -1.5;
        o.m1 = 2;
        o.m2 = -2;
        o.a[0] = 1;
        o.a[3] = 1;
        o.iota = 1;
        o.sign = -1;
        auto wa = oracle::gterm_absorption(b.in, b.oF, b.oJ(), o, 1.7, 0.6);
        cplx ga = gterm_eval(b.lat, b.ctx, b.par, b.F, b.J(), a, 1.7, 0.6);
        CHECK(double(std::abs(oracle::cld(ga.real(), ga.imag()) - wa) / std::abs(wa)) <= 1e-12);
    }
}

TEST_CASE("G-term evaluator: trivial cases") {
    Small b(4.0, 1, 0.2);
    GTermSpec spec = boltzmann_spec();
    DispersionContext nolam{b.ctx.vhat, 0.0};
    CHECK(gterm_eval(b.lat, nolam, b.par, b.F, b.J(), spec, 2, 1) == cplx(0.0));

    // F = 0 with all tau_{k,2} = +1: bracket 1 - 0; flipping them gives 0 - 1
    Field zero(b.lat.size(), 0.0);
    GTermSpec up = spec, down = spec;
    for (int k = 0; k < 3; ++k) {
        up.tau[k][1] = 1;
        down.tau[k][1] = -1;
    }
    cplx u = gterm_eval(b.lat, b.ctx, b.par, zero, b.J(), up, 2, 1);
    cplx d = gterm_eval(b.lat, b.ctx, b.par, zero, b.J(), down, 2, 1);
    CHECK(std::abs(u) > 0.0);
    CHECK(std::abs(u + d) <= 1e-15 * std::abs(u));
    oracle::ZFn ozero = [](const oracle::Z3&) { return 0.0L; };
    auto want = oracle::gterm_boltzmann(b.in, ozero, b.oJ(), oracle_spec(up), 2, 1);
    CHECK(double(std::abs(oracle::cld(u.real(), u.imag()) - want) / std::abs(want)) <= 1e-12);

    // closed-form time integral against a product rule
    GTermSpec q;
    q.family = GFamily::AbsQuart;
    q.m1 = 2;
    q.m2 = 0;
    q.iota = 0;
    q.beta[1] = 1;
    const double t = 3.0;
    std::vector<double> x, w;
    cplx acc = 0.0;
    for (int piece = 0; piece < 4; ++piece) {
        gauss_legendre(100, t * piece / 4.0, t * (piece + 1) / 4.0, x, w);
        for (std::size_t i = 0; i < x.size(); ++i) acc += w[i] * gterm_eval(b.lat, b.ctx, b.par, b.F, b.J(), q, x[i]);
    }
    cplx ct = gterm_time_integral(b.lat, b.ctx, b.par, b.F, b.J(), q, t);
    CHECK(std::abs(ct - acc) <= 1e-10 * std::abs(acc));

    GTermSpec badspec = spec;
    badspec.j1 = 4;
    CHECK_THROWS_AS(gterm_eval(b.lat, b.ctx, b.par, b.F, b.J(), badspec, 1, 0), ValidationError);
}

TEST_CASE("kinetic parameter validation") {
    KineticParams p;
    p.lambda = 1.5;
    CHECK_THROWS_AS(p.validate(), ValidationError);
    p = KineticParams{};
    p.sGridCount = 1;
    CHECK_THROWS_AS(p.validate(), ValidationError);
    p = KineticParams{};
    p.bigN = 0.5;
    CHECK_THROWS_AS(p.validate(), ValidationError);
}
