#include <doctest.h>

#include <functional>

#include "bec/quasifree.hpp"
#include "bec/wick.hpp"

using namespace bec;

namespace {

Symbol op(std::size_t mom, bool dagger) {
    Symbol s;
    s.mom = mom;
    s.dagger = dagger;
    return s;
}

OperatorWord word(std::initializer_list<Symbol> s) { return OperatorWord{std::vector<Symbol>(s)}; }

// Brute-force enumeration of perfect matchings, for the counts.
void enumerate(std::vector<int>& free, std::vector<std::pair<int, int>>& cur,
               const std::function<void(const std::vector<std::pair<int, int>>&)>& visit) {
    if (free.empty()) {
        visit(cur);
        return;
    }
    int a = free[0];
    for (std::size_t k = 1; k < free.size(); ++k) {
        int b = free[k];
        std::vector<int> rest;
        for (std::size_t m = 1; m < free.size(); ++m)
            if (m != k) rest.push_back(free[m]);
        cur.emplace_back(a, b);
        enumerate(rest, cur, visit);
        cur.pop_back();
    }
}

struct WickInstance {
    MomentumLattice lat{4.0, 1};
    DispersionContext ctx{RadialProfile::gaussian_bump(1, 1), 0.1};
    KineticParams par;
    Field f0;
    TestFunction J;
    WickInstance() {
        par.lambda = 0.1;
        par.bigN = 10;
        par.T = 1;
        f0 = bose_field(GeneratorK(1.0, -0.5, lat), lat);
        J = sample(lat, [](const Vec3& p) { return std::exp(-norm2(p) / 4); });
    }
};

}  // namespace

TEST_CASE("pair values") {
    MomentumLattice lat(2.0, 1);
    Field f0 = bose_field(GeneratorK(1.0, -0.5, lat), lat);
    const std::size_t p = lat.index(1, 0, 0), q = lat.index(0, 1, 0);
    const double V = lat.volume();
    OperatorWord w = word({op(p, true), op(p, false), op(q, false), op(p, true)});
    CHECK(pair_value(w, 0, 1, f0, lat) == doctest::Approx(V * f0[p]).epsilon(1e-15));
    CHECK(pair_value(w, 1, 3, f0, lat) == doctest::Approx(V * (1.0 + f0[p])).epsilon(1e-15));
    CHECK(pair_value(w, 0, 3, f0, lat) == 0.0);  // equal types
    CHECK(pair_value(w, 2, 3, f0, lat) == 0.0);  // different momenta
    CHECK_THROWS_AS(pair_value(w, 1, 1, f0, lat), ValidationError);
}

TEST_CASE("Wick expectations: hand examples") {
    MomentumLattice lat(2.0, 1);
    Field f0 = bose_field(GeneratorK(1.0, -0.5, lat), lat);
    const std::size_t p = lat.index(1, 0, 0), q = lat.index(0, 1, -1);
    const double V = lat.volume();
    // <a+_p a+_q a_q a_p> / |Lambda|^2 = f(p) f(q) for p != q
    cplx e = wick_expectation(word({op(p, true), op(q, true), op(q, false), op(p, false)}), f0, lat);
    CHECK(e.real() / (V * V) == doctest::Approx(f0[p] * f0[q]).epsilon(1e-14));
    CHECK(e.imag() == 0.0);
    // p = q: the crossed matching adds f(p)^2
    cplx d = wick_expectation(word({op(p, true), op(p, true), op(p, false), op(p, false)}), f0, lat);
    CHECK(d.real() / (V * V) == doctest::Approx(2.0 * f0[p] * f0[p]).epsilon(1e-14));
    // <a_p a+_p> = |Lambda| (1 + f)
    cplx c = wick_expectation(word({op(p, false), op(p, true)}), f0, lat);
    CHECK(c.real() / V == doctest::Approx(1.0 + f0[p]).epsilon(1e-15));
    // odd length, unbalanced daggers, nonzero total momentum
    CHECK(wick_expectation(word({op(p, true), op(p, false), op(q, true)}), f0, lat) == cplx(0.0));
    CHECK(wick_expectation(word({op(p, true), op(p, true), op(p, false), op(p, true)}), f0, lat) == cplx(0.0));
    CHECK(wick_expectation(word({op(p, true), op(q, false)}), f0, lat) == cplx(0.0));
    // coefficients multiply through
    OperatorWord w = word({op(p, true), op(p, false)});
    w.symbols[0].coeff = cplx(0.0, 2.0);
    w.symbols[1].coeff = 1.5;
    CHECK(std::abs(wick_expectation(w, f0, lat) - cplx(0.0, 3.0) * V * f0[p]) < 1e-14);
    // self-adjoint combination a+_p a_p a+_q a_q is real
    cplx h = wick_expectation(word({op(p, true), op(p, false), op(q, true), op(q, false)}), f0, lat);
    CHECK(std::fabs(h.imag()) <= 1e-12 * std::abs(h));
    OperatorWord big;
    big.symbols.assign(kWickMaxLength + 2, op(p, true));
    CHECK_THROWS_AS(wick_expectation(big, f0, lat), ValidationError);
}

TEST_CASE("matching counts") {
    MomentumLattice lat(1.0, 1);
    for (int n : {2, 3, 4}) {
        OperatorWord w;
        for (int k = 0; k < n; ++k) w.symbols.push_back(op(std::size_t(k), true));
        for (int k = 0; k < n; ++k) w.symbols.push_back(op(std::size_t(k), false));
        std::vector<int> free(2 * n);
        for (int k = 0; k < 2 * n; ++k) free[k] = k;
        std::vector<std::pair<int, int>> cur;
        std::size_t all = 0, conserving = 0;
        enumerate(free, cur, [&](const std::vector<std::pair<int, int>>& m) {
            ++all;
            bool ok = true;
            for (auto [a, b] : m) ok = ok && (w.symbols[a].dagger != w.symbols[b].dagger);
            conserving += ok;
        });
        CHECK(count_matchings(w, false) == all);
        CHECK(count_matchings(w, true) == conserving);
    }
    CHECK(count_matchings(word({op(0, true), op(0, true), op(0, false), op(0, false)}), false) == 3);
    CHECK(count_matchings(word({op(0, true), op(0, true), op(0, true), op(0, false)}), true) == 0);
}

TEST_CASE("second-order Duhamel term of f") {
    WickInstance w;
    DuhamelF d = duhamel_f_second_order(w.lat, w.ctx, w.par, w.f0, w.J);
    // frozen from the word expansion on this instance
    CHECK(d.boltzmann_graded[1].real() == doctest::Approx(-2.330505869305e-04).epsilon(1e-10));
    CHECK(d.boltzmann_graded[2].real() == doctest::Approx(1.117686163116e-04).epsilon(1e-10));
    CHECK(d.total == doctest::Approx(d.boltzmann + d.condensate + d.other).epsilon(1e-12));
    CHECK(d.max_imag <= 1e-12 * std::fabs(d.total));

    // grades 0..2 of the Boltzmann class against the collision operators
    const double l = w.par.lambda, N = w.par.bigN;
    const double a0 = cBd0_integrated(w.lat, w.ctx, w.par, w.f0, w.J) / N;
    const double a1 = l * cBd1_integrated(w.lat, w.ctx, w.par, w.f0, w.J) / N;
    const double a2 = l * l * cBd2_integrated(w.lat, w.ctx, w.par, w.f0, w.J) / N;
    CHECK(d.boltzmann_graded[0].real() == doctest::Approx(a0).epsilon(1e-10));
    CHECK(d.boltzmann_graded[1].real() == doctest::Approx(a1).epsilon(1e-10));
    CHECK(d.boltzmann_graded[2].real() == doctest::Approx(a2).epsilon(1e-10));

    // the commutator shortcut reproduces the total
    CHECK(duhamel_f_commutator_shortcut(w.lat, w.ctx, w.par, w.f0, w.J) == doctest::Approx(d.total).epsilon(1e-10));

    // 1/N scaling
    KineticParams p10 = w.par;
    p10.bigN = 100;
    DuhamelF e = duhamel_f_second_order(w.lat, w.ctx, p10, w.f0, w.J, false);
    CHECK(std::fabs(e.total * 10.0 - d.total) <= 1e-9 * std::fabs(d.total));
}

TEST_CASE("Boltzmann class vanishes for momentum test functions") {
    WickInstance w;
    TestFunction px = sample(w.lat, [](const Vec3& p) { return p[0]; });
    TestFunction absp = sample(w.lat, [](const Vec3& p) { return std::fabs(p[0]); });
    DuhamelF d = duhamel_f_second_order(w.lat, w.ctx, w.par, w.f0, px);
    double scale = std::fabs(cBd0_integrated(w.lat, w.ctx, w.par, w.f0, absp)) / w.par.bigN;
    REQUIRE(scale > 0.0);
    CHECK(std::fabs(d.boltzmann) <= 1e-10 * scale);
}

TEST_CASE("second-order Duhamel term of g") {
    WickInstance w;
    DuhamelG g = duhamel_g_second_order(w.lat, w.ctx, w.par, w.f0, w.J);
    CHECK(std::abs(g.total) > 0.0);
    CHECK(std::abs(g.total - (g.boltzmann + g.condensate + g.pair_absorption + g.other)) <= 1e-12 * std::abs(g.total));
    KineticParams p10 = w.par;
    p10.bigN = 100;
    DuhamelG h = duhamel_g_second_order(w.lat, w.ctx, p10, w.f0, w.J);
    CHECK(std::abs(h.total * 10.0 - g.total) <= 1e-9 * std::abs(g.total));

    // the odd part of J drops out of g[J]
    TestFunction odd = sample(w.lat, [](const Vec3& p) { return p[0] + 0.3 * p[1] * p[2] * p[2]; });
    TestFunction mixed(w.J.size());
    for (std::size_t i = 0; i < mixed.size(); ++i) mixed[i] = w.J[i] + odd[i];
    DuhamelG m = duhamel_g_second_order(w.lat, w.ctx, w.par, w.f0, mixed);
    CHECK(std::abs(m.total - g.total) <= 1e-12 * std::abs(g.total));

    CHECK_THROWS_AS(duhamel_g_second_order(w.lat, DispersionContext{w.ctx.vhat, 0.2}, w.par, w.f0, w.J),
                    ValidationError);
}
