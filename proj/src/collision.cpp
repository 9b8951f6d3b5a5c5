#include "bec/collision.hpp"

#include "bec/kernels.hpp"

#include <algorithm>

namespace bec {

void KineticParams::validate() const {
    if (!(lambda > 0.0 && lambda < 1.0)) throw ValidationError("KineticParams: lambda must lie in (0, 1)");
    if (!(bigN >= 1.0)) throw ValidationError("KineticParams: bigN must be >= 1");
    if (!(T > 0.0)) throw ValidationError("KineticParams: T must be > 0");
    if (sGridCount < 2) throw ValidationError("KineticParams: sGridCount must be >= 2");
}

PairList::PairList(const MomentumLattice& lat) {
    const std::size_t n = lat.size();
    i1.reserve(n * n);
    i2.reserve(n * n);
    i12.reserve(n * n);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            long c = lat.add(a, b);
            if (c < 0) continue;
            i1.push_back(a);
            i2.push_back(b);
            i12.push_back(static_cast<std::size_t>(c));
        }
    }
}

double delta_cub(const MomentumLattice& lat, const TestFunction& J, std::size_t i1, std::size_t i2) {
    long c = lat.add(i1, i2);
    if (c < 0) throw ValidationError("delta_cub: p1 + p2 lies outside the lattice cutoff");
    return J[i1] + J[i2] - J[static_cast<std::size_t>(c)];
}

double delta_cub(const std::function<double(const Vec3&)>& J, const Vec3& p1, const Vec3& p2) {
    return J(p1) + J(p2) - J(p1 + p2);
}

double detailed_balance_factor(double F1, double F2, double F3) {
    return (1.0 + F1) * (1.0 + F2) * F3 - F1 * F2 * (1.0 + F3);
}

double sinc_kernel(double x, double a) {
    double ax = a * x;
    if (std::abs(ax) < 1e-6) return a * (1.0 - ax * ax / 6.0);
    return std::sin(ax) / x;
}

namespace {

struct PairWeights {
    std::vector<double> dOmega, weight;
};

// weight = (v1 + v2)^2 * bracket; the J factor is applied by the caller.
PairWeights pair_weights(const PairList& pl, const DispersionTables& tab, const Field& F) {
    PairWeights pw;
    pw.dOmega.resize(pl.size());
    pw.weight.resize(pl.size());
    for (std::size_t k = 0; k < pl.size(); ++k) {
        std::size_t a = pl.i1[k], b = pl.i2[k], c = pl.i12[k];
        double vs = tab.vhat[a] + tab.vhat[b];
        pw.dOmega[k] = tab.Omega[a] + tab.Omega[b] - tab.Omega[c];
        pw.weight[k] = vs * vs * detailed_balance_factor(F[a], F[b], F[c]);
    }
    return pw;
}

void check_field(const MomentumLattice& lat, const std::vector<double>& v, const char* what) {
    if (v.size() != lat.size()) throw ValidationError(std::string(what) + ": size does not match the lattice");
}

}  // namespace

double q_mollified_d(const MomentumLattice& lat, const DispersionContext& ctx, const KineticParams& par,
                     const Field& F, const TestFunction& J, double S) {
    par.validate();
    check_field(lat, F, "q_mollified_d F");
    check_field(lat, J, "q_mollified_d J");
    if (S > par.T) throw ValidationError("q_mollified_d: S must not exceed T");
    PairList pl(lat);
    DispersionTables tab(lat, ctx);
    PairWeights pw = pair_weights(pl, tab, F);
    for (std::size_t k = 0; k < pl.size(); ++k) pw.weight[k] *= J[pl.i1[k]] + J[pl.i2[k]] - J[pl.i12[k]];
    std::vector<double> kern(pl.size());
    const auto& kt = kernels::active();
    const double a = (par.T - S) / (par.lambda * par.lambda);
    kt.sinc_batch(pw.dOmega.data(), a, kern.data(), kern.size());
    double vol = lat.volume();
    return kt.dot(pw.weight.data(), kern.data(), kern.size()) / (vol * vol);
}

std::vector<double> q_mollified_d_pointwise(const MomentumLattice& lat, const DispersionContext& ctx,
                                            const KineticParams& par, const Field& F, double S) {
    par.validate();
    check_field(lat, F, "q_mollified_d F");
    PairList pl(lat);
    DispersionTables tab(lat, ctx);
    PairWeights pw = pair_weights(pl, tab, F);
    std::vector<double> kern(pl.size());
    const double a = (par.T - S) / (par.lambda * par.lambda);
    kernels::active().sinc_batch(pw.dOmega.data(), a, kern.data(), kern.size());
    std::vector<double> out(lat.size(), 0.0);
    double vol = lat.volume();
    // J_q = |Lambda| 1_q, so each pair feeds q = p1, p2 with +1 and q = p12 with -1.
    for (std::size_t k = 0; k < pl.size(); ++k) {
        double c = pw.weight[k] * kern[k];
        out[pl.i1[k]] += c;
        out[pl.i2[k]] += c;
        out[pl.i12[k]] -= c;
    }
    for (double& v : out) v /= vol;
    return out;
}

double q_mollified_d_time_integral(const MomentumLattice& lat, const DispersionContext& ctx,
                                   const KineticParams& par, const Field& F, const TestFunction& J) {
    par.validate();
    check_field(lat, F, "q_mollified_d F");
    check_field(lat, J, "q_mollified_d J");
    PairList pl(lat);
    DispersionTables tab(lat, ctx);
    PairWeights pw = pair_weights(pl, tab, F);
    const double l2 = par.lambda * par.lambda;
    const double t = par.T / l2;
    double acc = 0.0;
    for (std::size_t k = 0; k < pl.size(); ++k) {
        double x = pw.dOmega[k];
        double h = 0.5 * x * t;
        // l^2 (1 - cos(x t)) / x^2 = l^2 t^2 sinc^2(x t / 2) / 2, with sinc(h) = sin(h)/h.
        double sc = std::abs(h) < 1e-4 ? 1.0 - h * h / 6.0 : std::sin(h) / h;
        double kern = 0.5 * l2 * t * t * sc * sc;
        acc += pw.weight[k] * (J[pl.i1[k]] + J[pl.i2[k]] - J[pl.i12[k]]) * kern;
    }
    double vol = lat.volume();
    return acc / (vol * vol);
}

// ---------------------------------------------------------------------------
// simplex phase: t^2 e[0, x, y], x = i w1 t, y = i (w1 + w2) t, e[...] divided differences of exp.

namespace {

cplx dd_pair(cplx a, cplx b) {
    cplx h = 0.5 * (b - a);
    cplx m = 0.5 * (a + b);
    if (std::abs(h) < 0.5) {
        // sinh(h)/h series
        cplx h2 = h * h, term = 1.0, sum = 1.0;
        for (int k = 1; k < 20; ++k) {
            term *= h2 / (double((2 * k) * (2 * k + 1)));
            sum += term;
            if (std::abs(term) < 1e-18 * std::abs(sum)) break;
        }
        return std::exp(m) * sum;
    }
    return (std::exp(b) - std::exp(a)) / (b - a);
}

cplx dd_triple_cluster(cplx a, cplx b, cplx c) {
    cplx m = (a + b + c) / 3.0;
    cplx w[3] = {a - m, b - m, c - m};
    // e[w0, w1, w2] = sum_{n >= 2} h_{n-2}(w) / n!, h_k complete homogeneous symmetric.
    // h_k via generating recursion on the three variables.
    const int K = 40;
    cplx hk[K + 1];
    // h_k(w0,w1,w2) = sum_{i+j+l=k} w0^i w1^j w2^l built incrementally.
    cplx p0[K + 1], p01[K + 1];
    p0[0] = 1.0;
    for (int k = 1; k <= K; ++k) p0[k] = p0[k - 1] * w[0];
    for (int k = 0; k <= K; ++k) {
        p01[k] = p0[k];
        if (k > 0) p01[k] += w[1] * p01[k - 1];
    }
    for (int k = 0; k <= K; ++k) {
        hk[k] = p01[k];
        if (k > 0) hk[k] += w[2] * hk[k - 1];
    }
    // |h_k| <= C(k + 2, 2) r^k, so term k is bounded by r^k / (2 k!); odd h_k can vanish exactly,
    // so the stop test uses that bound rather than the term itself.
    const double r = std::max({std::abs(w[0]), std::abs(w[1]), std::abs(w[2])});
    cplx sum = 0.0;
    double fact = 2.0, bound = 0.5;
    for (int n = 2; n <= K + 2; ++n) {
        if (n > 2) {
            fact *= n;
            bound *= r / (n - 2);
        }
        sum += hk[n - 2] / fact;
        if (n > 2 && bound < 1e-18 * std::abs(sum)) break;
    }
    return std::exp(m) * sum;
}

cplx dd_triple(cplx a, cplx b, cplx c) {
    const double tau = 0.5;
    double dab = std::abs(a - b), dac = std::abs(a - c), dbc = std::abs(b - c);
    int close = (dab < tau) + (dac < tau) + (dbc < tau);
    if (close >= 2) return dd_triple_cluster(a, b, c);
    if (close == 1) {
        // reorder so that (a, b) is the close pair
        if (dac < tau) std::swap(b, c);
        else if (dbc < tau) std::swap(a, c);
        return (dd_pair(b, c) - dd_pair(a, b)) / (c - a);
    }
    return (dd_pair(b, c) - dd_pair(a, b)) / (c - a);
}

}  // namespace

namespace {

// Clustered points: e[z] = e^m sum_k h_k(z - m) / (k + n - 1)!, h_k complete homogeneous symmetric.
cplx dd_cluster(const cplx* z, int n) {
    cplx m = 0.0;
    for (int i = 0; i < n; ++i) m += z[i];
    m /= double(n);
    const int K = 40;
    cplx h[K + 1];
    for (int k = 0; k <= K; ++k) h[k] = k == 0 ? 1.0 : 0.0;
    // multiply the generating series by 1 / (1 - w_i x), one variable at a time
    for (int i = 0; i < n; ++i) {
        cplx w = z[i] - m;
        for (int k = 1; k <= K; ++k) h[k] += w * h[k - 1];
    }
    double r = 0.0;
    for (int i = 0; i < n; ++i) r = std::max(r, std::abs(z[i] - m));
    cplx sum = 0.0;
    double fact = 1.0;
    for (int k = 2; k < n; ++k) fact *= k;  // (n - 1)!
    // |h_k| <= C(k + n - 1, n - 1) r^k bounds term k by r^k / (k! (n - 1)!); h_k itself can be 0.
    double bound = 1.0 / fact;
    for (int k = 0; k <= K; ++k) {
        if (k > 0) {
            fact *= (k + n - 1);
            bound *= r / k;
        }
        sum += h[k] / fact;
        if (k > 0 && bound < 1e-18 * std::abs(sum)) break;
    }
    return std::exp(m) * sum;
}

cplx dd_rec(const cplx* z, int n) {
    if (n == 1) return std::exp(z[0]);
    int ia = 0, ib = 1;
    double best = -1.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (std::abs(z[i] - z[j]) > best) {
                best = std::abs(z[i] - z[j]);
                ia = i;
                ib = j;
            }
    if (best < 1.0) return dd_cluster(z, n);
    cplx wa[8], wb[8];
    int na = 0, nb = 0;
    for (int i = 0; i < n; ++i) {
        if (i != ia) wa[na++] = z[i];
        if (i != ib) wb[nb++] = z[i];
    }
    return (dd_rec(wa, na) - dd_rec(wb, nb)) / (z[ib] - z[ia]);
}

}  // namespace

cplx exp_divided_difference(std::initializer_list<cplx> z) {
    if (z.size() < 1 || z.size() > 8) throw ValidationError("exp_divided_difference: 1..8 points");
    return dd_rec(z.begin(), static_cast<int>(z.size()));
}

cplx simplex_phase(double w1, double w2, double t) {
    if (t < 0.0) throw ValidationError("simplex_phase: t must be >= 0");
    if (t == 0.0) return 0.0;
    if (w1 == 0.0 && w2 == 0.0) return 0.5 * t * t;
    cplx x(0.0, w1 * t), y(0.0, (w1 + w2) * t);
    return t * t * dd_triple(cplx(0.0, 0.0), x, y);
}

// ---------------------------------------------------------------------------
// Phase operators

double PhaseGroup::bracket(const Field& F) const {
    double a = 1.0, b = 1.0;
    for (int k = 0; k < 3; ++k) {
        double f = F[bidx[k]];
        a *= plus[k] ? 1.0 + f : f;
        b *= minus[k] ? 1.0 + f : f;
    }
    return a - b;
}

double PhaseGroup::jvalue(const TestFunction& J) const {
    if (nj == 0) return 1.0;
    double s = 0.0;
    for (int k = 0; k < nj; ++k) s += jcoef[k] * J[jidx[k]];
    return s;
}

namespace {

cplx phase_sum(const std::vector<PhaseTerm>& terms, double s1, double s2) {
    cplx acc = 0.0;
    for (const auto& pt : terms) acc += pt.c * std::exp(cplx(0.0, pt.w1 * s1 + pt.w2 * s2));
    return acc;
}

cplx phase_simplex(const std::vector<PhaseTerm>& terms, double t) {
    cplx acc = 0.0;
    for (const auto& pt : terms) acc += pt.c * simplex_phase(pt.w1, pt.w2, t);
    return acc;
}

double take(const PhaseOperator& op, cplx z) { return op.imag_part ? z.imag() : z.real(); }

}  // namespace

double PhaseOperator::eval(const MomentumLattice& lat, const Field& F, const TestFunction& J, double s1,
                           double s2) const {
    cplx acc = 0.0;
    for (const auto& g : groups) {
        double jb = g.jvalue(J) * g.bracket(F);
        if (jb == 0.0) continue;
        acc += jb * phase_sum(g.terms, s1, s2);
    }
    double vol = lat.volume();
    return pre * take(*this, acc) / (vol * vol);
}

double PhaseOperator::simplex_integral(const MomentumLattice& lat, const Field& F, const TestFunction& J,
                                       double t) const {
    cplx acc = 0.0;
    for (const auto& g : groups) {
        double jb = g.jvalue(J) * g.bracket(F);
        if (jb == 0.0) continue;
        acc += jb * phase_simplex(g.terms, t);
    }
    double vol = lat.volume();
    return pre * take(*this, acc) / (vol * vol);
}

std::vector<double> PhaseOperator::eval_pointwise(const MomentumLattice& lat, const Field& F, double s1,
                                                  double s2) const {
    std::vector<cplx> acc(lat.size(), 0.0);
    for (const auto& g : groups) {
        double b = g.bracket(F);
        if (b == 0.0) continue;
        cplx v = b * phase_sum(g.terms, s1, s2);
        for (int k = 0; k < g.nj; ++k) acc[g.jidx[k]] += g.jcoef[k] * v;
    }
    double vol = lat.volume();
    std::vector<double> out(lat.size());
    // J_q = |Lambda| 1_q contributes one factor |Lambda|.
    for (std::size_t q = 0; q < out.size(); ++q) out[q] = pre * take(*this, acc[q]) * vol / (vol * vol);
    return out;
}

namespace {

using Terms = std::vector<PhaseTerm>;

Terms ex(double w1, double w2, cplx c = 1.0) { return {PhaseTerm{c, w1, w2}}; }

// sin(W s1) or sin(W s2) as two exponentials.
Terms sin_s1(double W) {
    const cplx h(0.0, -0.5);  // 1/(2i)
    return {PhaseTerm{h, W, 0.0}, PhaseTerm{-h, -W, 0.0}};
}
Terms sin_s2(double W) {
    const cplx h(0.0, -0.5);
    return {PhaseTerm{h, 0.0, W}, PhaseTerm{-h, 0.0, -W}};
}

Terms operator*(const Terms& a, const Terms& b) {
    Terms r;
    r.reserve(a.size() * b.size());
    for (const auto& x : a)
        for (const auto& y : b) r.push_back(PhaseTerm{x.c * y.c, x.w1 + y.w1, x.w2 + y.w2});
    return r;
}
Terms operator*(cplx s, Terms a) {
    for (auto& x : a) x.c *= s;
    return a;
}
Terms operator+(Terms a, const Terms& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

PhaseGroup make_group(std::initializer_list<std::pair<std::size_t, double>> js, std::array<std::size_t, 3> bidx,
                      std::array<bool, 3> plus, std::array<bool, 3> minus, Terms terms) {
    PhaseGroup g;
    for (const auto& [idx, c] : js) {
        g.jidx[g.nj] = idx;
        g.jcoef[g.nj] = c;
        ++g.nj;
    }
    for (int k = 0; k < 3; ++k) {
        g.bidx[k] = bidx[k];
        g.plus[k] = plus[k];
        g.minus[k] = minus[k];
    }
    g.terms = std::move(terms);
    return g;
}

// Folds pre and the Im/Re choice into the term coefficients so operators can be added.
PhaseOperator normalized(PhaseOperator op) {
    cplx s = op.imag_part ? cplx(0.0, -op.pre) : cplx(op.pre, 0.0);  // Im z = Re(-i z)
    for (auto& g : op.groups)
        for (auto& t : g.terms) t.c *= s;
    op.pre = 1.0;
    op.imag_part = false;
    return op;
}

PhaseOperator merged(PhaseOperator a, const PhaseOperator& b) {
    a = normalized(std::move(a));
    PhaseOperator nb = normalized(b);
    a.groups.insert(a.groups.end(), nb.groups.begin(), nb.groups.end());
    return a;
}

// Terms in s1 moved to s2 and conjugated.
Terms conj_s2(const Terms& a) {
    Terms r;
    r.reserve(a.size());
    for (const auto& t : a) r.push_back(PhaseTerm{std::conj(t.c), 0.0, -t.w1});
    return r;
}

PhaseOperator printed_bol1(const MomentumLattice& lat, const DispersionTables& tb, double lambda) {
    PairList pl(lat);
    PhaseOperator op;
    op.pre = 2.0 / (lambda * lambda);
    op.imag_part = true;
    for (std::size_t k = 0; k < pl.size(); ++k) {
        std::size_t a = pl.i1[k], b = pl.i2[k], c = pl.i12[k];
        std::size_t ma = lat.neg(a);
        double A = (tb.vhat[a] + tb.vhat[b]) * (tb.vhat[a] + tb.vhat[c]) * tb.V2[a];
        if (A == 0.0) continue;
        double O1 = tb.Omega[a], O2 = tb.Omega[b], O12 = tb.Omega[c];
        double d = O2 - O12;
        Terms common = ex(-d, d, A);  // e^{-i (O2 - O12)(s1 - s2)}
        Terms ta = common * ex(0.0, O1) * sin_s1(O1);
        Terms tb_ = common * ex(O1, 0.0) * sin_s2(O1);
        op.groups.push_back(make_group({{ma, -1.0}, {b, 1.0}, {c, -1.0}}, {ma, b, c}, {true, false, true},
                                       {false, true, false}, ta));
        op.groups.push_back(make_group({{a, 1.0}, {b, 1.0}, {c, -1.0}}, {a, b, c}, {false, false, true},
                                       {true, true, false}, tb_));
    }
    return op;
}

PhaseOperator printed_bol21(const MomentumLattice& lat, const DispersionTables& tb, double lambda) {
    PairList pl(lat);
    PhaseOperator op;
    op.pre = 1.0 / (lambda * lambda);
    op.imag_part = true;
    for (std::size_t k = 0; k < pl.size(); ++k) {
        std::size_t a = pl.i1[k], b = pl.i2[k], c = pl.i12[k];
        double vs = tb.vhat[a] + tb.vhat[b];
        if (vs == 0.0) continue;
        double O1 = tb.Omega[a], O2 = tb.Omega[b], O12 = tb.Omega[c];
        double dO = O1 + O2 - O12;
        auto bracket_term = [](double V, double O, int sgn_first) {
            // V (sin(O s1) e^{sgn i O s1} - sin(O s2) e^{i O s2})
            return cplx(V) * (sin_s1(O) * ex(sgn_first * O, 0.0)) + cplx(-V) * (sin_s2(O) * ex(0.0, O));
        };
        Terms inner = bracket_term(tb.V1sq[a], O1, -1) + bracket_term(tb.V1sq[b], O2, -1) +
                      cplx(-1.0) * bracket_term(tb.V1sq[c], O12, +1);
        Terms t = ex(dO, -dO, vs * vs) * inner;
        op.groups.push_back(make_group({{a, 1.0}, {b, 1.0}, {c, -1.0}}, {a, b, c}, {false, false, true},
                                       {true, true, false}, t));
    }
    return op;
}

PhaseOperator printed_bol22(const MomentumLattice& lat, const DispersionTables& tb, double lambda) {
    PairList pl(lat);
    PhaseOperator op;
    op.pre = 2.0 / (lambda * lambda);
    op.imag_part = false;
    for (std::size_t k = 0; k < pl.size(); ++k) {
        std::size_t a = pl.i1[k], b = pl.i2[k], c = pl.i12[k];
        std::size_t ma = lat.neg(a), mc = lat.neg(c);
        double v1 = tb.vhat[a], v2 = tb.vhat[b], v12 = tb.vhat[c];
        double pref = v1 + v2;
        if (pref == 0.0) continue;
        double O1 = tb.Omega[a], O2 = tb.Omega[b], O12 = tb.Omega[c];
        double W1 = tb.V2[a], W2 = tb.V2[b], W12 = tb.V2[c];

        Terms t1 = sin_s1(O1) * sin_s1(O12) * ex(O2, -O2) * ex(0.0, O1 - O12);
        t1 = cplx(pref * W1 * W12 * (v2 + v12)) * t1;
        op.groups.push_back(make_group({{ma, -1.0}, {b, 1.0}, {mc, 1.0}}, {ma, b, mc}, {false, true, true},
                                       {true, false, false}, t1));

        Terms inner2 = cplx((v1 + v2) * W1) * (sin_s2(O1) * ex(0.0, O12)) +
                       cplx((v2 + v12) * W12) * (sin_s2(O12) * ex(0.0, -O1));
        Terms t2 = cplx(pref * W1) * (sin_s1(O1) * ex(O2, -O2) * ex(-O12, 0.0) * inner2);
        op.groups.push_back(make_group({{ma, -1.0}, {b, 1.0}, {c, -1.0}}, {ma, b, c}, {false, true, false},
                                       {true, false, true}, t2));

        // The printed third group carries no test-function factor; nj = 0 evaluates as J-weight 1.
        Terms t3 = cplx(0.5 * W12 * (v1 + v2)) * (ex(0.0, -(O1 + O2)) * sin_s2(O12)) +
                   cplx(W2 * (v1 + v12)) * (ex(0.0, -(O1 + O12)) * sin_s2(O2));
        t3 = cplx(pref) * t3;
        op.groups.push_back(make_group({}, {a, b, mc}, {true, true, true}, {false, false, false}, t3));
    }
    return op;
}

// Dressed vertex of the monomial a+_x a+_y a_{x+y} in H_cub(s), order by order in lambda:
// eta = eta0 + l eta1 + l^2 eta2 + ..., collected over every word and every labelling that produces it.
struct Vertex {
    Terms eta[3];
};

Vertex dressed_vertex(const DispersionTables& tb, std::size_t x, std::size_t y, std::size_t z) {
    const double vx = tb.vhat[x], vy = tb.vhat[y], vz = tb.vhat[z];
    const double Ox = tb.Omega[x], Oy = tb.Omega[y], Oz = tb.Omega[z];
    const double dO = Ox + Oy - Oz;
    const cplx mi(0.0, -1.0), pi(0.0, 1.0);
    Vertex V;
    V.eta[0] = ex(dO, 0.0, vx + vy);
    // one flipped annihilator of the conjugate channel: u_x ubar_z vbar_y (vy + vz) + (x <-> y)
    V.eta[1] = cplx(vy + vz) * (ex(Ox - Oz, 0.0, mi * tb.V2[y]) * sin_s1(Oy)) +
               cplx(vx + vz) * (ex(Oy - Oz, 0.0, mi * tb.V2[x]) * sin_s1(Ox));
    // V1^2 corrections of u, ubar
    Terms kappa = cplx(tb.V1sq[x]) * (sin_s1(Ox) * ex(-Ox, 0.0)) + cplx(tb.V1sq[y]) * (sin_s1(Oy) * ex(-Oy, 0.0)) +
                  cplx(-tb.V1sq[z]) * (sin_s1(Oz) * ex(Oz, 0.0));
    // two flips: u_x v_z vbar_y (vx + vz) + (x <-> y), v_z vbar_y = V2_z V2_y sin sin
    V.eta[2] = ex(dO, 0.0, pi * (vx + vy)) * kappa +
               cplx((vx + vz) * tb.V2[z] * tb.V2[y]) * (ex(Ox, 0.0) * sin_s1(Oz) * sin_s1(Oy)) +
               cplx((vy + vz) * tb.V2[z] * tb.V2[x]) * (ex(Oy, 0.0) * sin_s1(Oz) * sin_s1(Ox));
    return V;
}

// Boltzmann contractions at order lambda^grade:
// -(1/l^2) Re sum [eta(s1) conj(eta(s2))]_grade dJ (h_x h_y ht_z - ht_x ht_y h_z)
// plus, at grade 2, the a+a+a+ / aaa channel.
PhaseOperator derived_bol(const MomentumLattice& lat, const DispersionTables& tb, double lambda, int grade) {
    PairList pl(lat);
    PhaseOperator op;
    op.pre = -1.0 / (lambda * lambda);
    op.imag_part = false;
    for (std::size_t k = 0; k < pl.size(); ++k) {
        std::size_t x = pl.i1[k], y = pl.i2[k], z = pl.i12[k];
        Vertex V = dressed_vertex(tb, x, y, z);
        Terms t;
        for (int g = 0; g <= grade; ++g) {
            if (V.eta[g].empty() || V.eta[grade - g].empty()) continue;
            t = t + V.eta[g] * conj_s2(V.eta[grade - g]);
        }
        if (!t.empty())
            op.groups.push_back(make_group({{x, 1.0}, {y, 1.0}, {z, -1.0}}, {x, y, z}, {false, false, true},
                                           {true, true, false}, t));
        if (grade != 2) continue;
        // a+_x a+_y a+_w with w = -(x + y): vertex vhat(y) u_x u_y vbar_w at s1, all six labellings at s2.
        std::size_t w = lat.neg(z);
        double bamp = tb.vhat[y] * tb.V2[w];
        if (bamp == 0.0) continue;
        Terms B = ex(tb.Omega[x] + tb.Omega[y], 0.0, cplx(0.0, -bamp)) * sin_s1(tb.Omega[w]);
        const std::size_t idx[3] = {x, y, w};
        Terms C;
        for (int c = 0; c < 3; ++c) {
            for (int b = 0; b < 3; ++b) {
                if (b == c) continue;
                int a = 3 - b - c;
                double amp = tb.vhat[idx[b]] * tb.V2[idx[c]];
                if (amp == 0.0) continue;
                // vhat(b) ubar_a ubar_b v_c at s2, v_c = i V2 sin
                C = C + ex(0.0, -(tb.Omega[idx[a]] + tb.Omega[idx[b]]), cplx(0.0, amp)) * sin_s2(tb.Omega[idx[c]]);
            }
        }
        if (C.empty()) continue;
        // both charge orderings: 2 Re
        op.groups.push_back(make_group({{x, 1.0}, {y, 1.0}, {w, 1.0}}, {x, y, w}, {false, false, false},
                                       {true, true, true}, cplx(2.0) * (B * C)));
    }
    return op;
}

}  // namespace

PhaseOperator build_bol0(const MomentumLattice& lat, const DispersionContext& ctx) {
    PairList pl(lat);
    DispersionTables tb(lat, ctx);
    PhaseOperator op;
    op.pre = 1.0 / (ctx.lambda * ctx.lambda);
    op.imag_part = false;
    for (std::size_t k = 0; k < pl.size(); ++k) {
        std::size_t a = pl.i1[k], b = pl.i2[k], c = pl.i12[k];
        double vs = tb.vhat[a] + tb.vhat[b];
        if (vs == 0.0) continue;
        double dO = tb.Omega[a] + tb.Omega[b] - tb.Omega[c];
        op.groups.push_back(make_group({{a, 1.0}, {b, 1.0}, {c, -1.0}}, {a, b, c}, {true, true, false},
                                       {false, false, true}, ex(dO, -dO, vs * vs)));
    }
    return op;
}

PhaseOperator build_bol1(const MomentumLattice& lat, const DispersionContext& ctx, OperatorForm form) {
    DispersionTables tb(lat, ctx);
    if (form == OperatorForm::Printed) return printed_bol1(lat, tb, ctx.lambda);
    return derived_bol(lat, tb, ctx.lambda, 1);
}

PhaseOperator build_bol21(const MomentumLattice& lat, const DispersionContext& ctx) {
    return printed_bol21(lat, DispersionTables(lat, ctx), ctx.lambda);
}

PhaseOperator build_bol22(const MomentumLattice& lat, const DispersionContext& ctx) {
    return printed_bol22(lat, DispersionTables(lat, ctx), ctx.lambda);
}

PhaseOperator build_bol2(const MomentumLattice& lat, const DispersionContext& ctx, OperatorForm form) {
    DispersionTables tb(lat, ctx);
    if (form == OperatorForm::Printed)
        return merged(printed_bol21(lat, tb, ctx.lambda), printed_bol22(lat, tb, ctx.lambda));
    return derived_bol(lat, tb, ctx.lambda, 2);
}

namespace {
void check_times(double s1, double s2, const char* who) {
    if (!(s1 >= s2 && s2 >= 0.0)) throw ValidationError(std::string(who) + ": need s1 >= s2 >= 0");
}
}  // namespace

double bol1_d(const MomentumLattice& lat, const DispersionContext& ctx, const KineticParams& par, const Field& F,
              const TestFunction& J, double s1, double s2, OperatorForm form) {
    par.validate();
    check_times(s1, s2, "bol1_d");
    return build_bol1(lat, ctx, form).eval(lat, F, J, s1, s2);
}

double bol21_d(const MomentumLattice& lat, const DispersionContext& ctx, const KineticParams& par, const Field& F,
               const TestFunction& J, double s1, double s2) {
    par.validate();
    check_times(s1, s2, "bol21_d");
    return build_bol21(lat, ctx).eval(lat, F, J, s1, s2);
}

double bol22_d(const MomentumLattice& lat, const DispersionContext& ctx, const KineticParams& par, const Field& F,
               const TestFunction& J, double s1, double s2) {
    par.validate();
    check_times(s1, s2, "bol22_d");
    return build_bol22(lat, ctx).eval(lat, F, J, s1, s2);
}

double bol2_d(const MomentumLattice& lat, const DispersionContext& ctx, const KineticParams& par, const Field& F,
              const TestFunction& J, double s1, double s2, OperatorForm form) {
    par.validate();
    check_times(s1, s2, "bol2_d");
    return build_bol2(lat, ctx, form).eval(lat, F, J, s1, s2);
}

namespace {
double macro_simplex(const PhaseOperator& op, const MomentumLattice& lat, const KineticParams& par, const Field& F,
                     const TestFunction& J) {
    // int over Delta[T, 2] of g(S / l^2) dS = l^4 int over Delta[T / l^2, 2] of g(s) ds
    double l2 = par.lambda * par.lambda;
    return l2 * l2 * op.simplex_integral(lat, F, J, par.micro_time());
}
}  // namespace

double cBd0_integrated(const MomentumLattice& lat, const DispersionContext& ctx, const KineticParams& par,
                       const Field& F, const TestFunction& J) {
    par.validate();
    return macro_simplex(build_bol0(lat, ctx), lat, par, F, J);
}

double cBd1_integrated(const MomentumLattice& lat, const DispersionContext& ctx, const KineticParams& par,
                       const Field& F, const TestFunction& J, OperatorForm form) {
    par.validate();
    return macro_simplex(build_bol1(lat, ctx, form), lat, par, F, J);
}

double cBd2_integrated(const MomentumLattice& lat, const DispersionContext& ctx, const KineticParams& par,
                       const Field& F, const TestFunction& J, OperatorForm form) {
    par.validate();
    return macro_simplex(build_bol2(lat, ctx, form), lat, par, F, J);
}

}  // namespace bec

// ---------------------------------------------------------------------------
// G-channel families

namespace bec {

void GTermSpec::validate() const {
    auto pm1 = [](int v) { return v == 1 || v == -1; };
    auto m_ok = [](int v) { return v == 0 || v == 2 || v == -2; };
    if (ell < 0 || ell > 3) throw ValidationError("GTermSpec: ell must lie in 0..3");
    int jmax = family == GFamily::AbsQuart ? 7 : 12;
    if (j < 0 || j > jmax) throw ValidationError("GTermSpec: lambda power out of range");
    for (int k = 0; k < 3; ++k) {
        if (alpha[k] < 0 || alpha[k] > 2 || beta[k] < 0 || beta[k] > 2)
            throw ValidationError("GTermSpec: alpha and beta must lie in 0..2");
        for (int l = 0; l < 2; ++l)
            if (!pm1(sigma[k][l]) || !pm1(tau[k][l])) throw ValidationError("GTermSpec: sigma and tau must be +-1");
    }
    if (j1 < 1 || j1 > 3 || j2 < 1 || j2 > 3) throw ValidationError("GTermSpec: j1, j2 must lie in 1..3");
    if (!m_ok(m1) || !m_ok(m2)) throw ValidationError("GTermSpec: m1, m2 must lie in {0, +-2}");
    if (iota != 0 && iota != 1) throw ValidationError("GTermSpec: iota must be 0 or 1");
    if (!pm1(pk_sign)) throw ValidationError("GTermSpec: pk_sign must be +-1");
}

namespace {

cplx minus_i_pow(int ell) {
    static const cplx tab[4] = {cplx(1, 0), cplx(0, -1), cplx(-1, 0), cplx(0, 1)};
    return tab[ell & 3];
}

double ipow(double x, int n) {
    double r = 1.0;
    for (int k = 0; k < n; ++k) r *= x;
    return r;
}

// Visits every summand as (amplitude, w1, w2) with phase exp(i (w1 s1 + w2 s2)).
template <class Visit>
void gterm_visit(const MomentumLattice& lat, const DispersionContext& ctx, const Field& F, const TestFunction& J,
                 const GTermSpec& sp, Visit&& visit) {
    DispersionTables tb(lat, ctx);
    const std::size_t n = lat.size();
    if (sp.family == GFamily::Boltzmann) {
        PairList pl(lat);
        for (std::size_t k = 0; k < pl.size(); ++k) {
            std::size_t idx[3] = {pl.i1[k], pl.i2[k], pl.i12[k]};
            double amp = J[idx[sp.j1 - 1]] * tb.vhat[idx[1]] * tb.vhat[idx[sp.j2 - 1]];
            if (amp == 0.0) continue;
            for (int m = 0; m < 3; ++m)
                amp *= ipow(tb.V1sq[idx[m]], sp.alpha[m]) * ipow(tb.V2[idx[m]], sp.beta[m]);
            double a = 1.0, b = 1.0;
            for (int m = 0; m < 3; ++m) {
                std::size_t ip = sp.tau[m][0] > 0 ? idx[m] : lat.neg(idx[m]);
                std::size_t im = lat.neg(ip);
                a *= F[ip] + 0.5 * (1 + sp.tau[m][1]);
                b *= F[im] + 0.5 * (1 - sp.tau[m][1]);
            }
            amp *= a - b;
            double w1 = 0.0, w2 = 0.0;
            for (int m = 0; m < 3; ++m) {
                w1 -= sp.sigma[m][0] * tb.Omega[idx[m]];
                w2 -= sp.sigma[m][1] * tb.Omega[idx[m]];
            }
            visit(amp, w1, w2);
        }
        return;
    }
    for (std::size_t p = 0; p < n; ++p) {
        double ap = J[p] * (1.0 + F[p] + F[lat.neg(p)]) * ipow(tb.V1sq[p], sp.alpha[0]) * ipow(tb.V2[p], sp.beta[0]);
        if (sp.family == GFamily::AbsCub) ap *= tb.vhat[p];
        if (ap == 0.0) continue;
        Vec3 pp = lat.point(p);
        for (std::size_t k = 0; k < n; ++k) {
            double ak = ipow(tb.V1sq[k], sp.alpha[1]) * ipow(tb.V2[k], sp.beta[1]) * (F[k] + sp.iota);
            if (sp.family == GFamily::AbsCub)
                ak *= tb.vhat[k];
            else
                ak *= ctx.vhat(bec::operator+(pp, bec::operator*(double(sp.pk_sign), lat.point(k))));
            if (ak == 0.0) continue;
            if (sp.family == GFamily::AbsQuart)
                visit(ap * ak, -(sp.m1 * tb.Omega[p] + sp.m2 * tb.Omega[k]), 0.0);
            else
                visit(ap * ak, -sp.m1 * tb.Omega[p], -sp.m2 * tb.Omega[k]);
        }
    }
}

double gterm_norm(const MomentumLattice& lat) {
    double vol = lat.volume();
    return 1.0 / (vol * vol);
}

}  // namespace

cplx gterm_eval(const MomentumLattice& lat, const DispersionContext& ctx, const KineticParams& par, const Field& F,
                const TestFunction& J, const GTermSpec& spec, double s1, double s2) {
    (void)par;
    spec.validate();
    check_field(lat, F, "gterm_eval F");
    check_field(lat, J, "gterm_eval J");
    cplx acc = 0.0;
    gterm_visit(lat, ctx, F, J, spec, [&](double amp, double w1, double w2) {
        acc += amp * std::exp(cplx(0.0, w1 * s1 + w2 * s2));
    });
    return spec.scalar * minus_i_pow(spec.ell) * ipow(ctx.lambda, spec.j) * gterm_norm(lat) * acc;
}

cplx gterm_time_integral(const MomentumLattice& lat, const DispersionContext& ctx, const KineticParams& par,
                         const Field& F, const TestFunction& J, const GTermSpec& spec, double t) {
    (void)par;
    spec.validate();
    check_field(lat, F, "gterm_eval F");
    check_field(lat, J, "gterm_eval J");
    if (t < 0.0) throw ValidationError("gterm_time_integral: t must be >= 0");
    cplx acc = 0.0;
    const bool single = spec.family == GFamily::AbsQuart;
    gterm_visit(lat, ctx, F, J, spec, [&](double amp, double w1, double w2) {
        if (single) {
            // int_0^t e^{i w s} ds, written as a first divided difference of exp
            cplx z(0.0, w1 * t);
            cplx r = std::abs(z) < 1e-8 ? cplx(1.0) + 0.5 * z : (std::exp(z) - 1.0) / z;
            acc += amp * t * r;
        } else {
            acc += amp * simplex_phase(w1, w2, t);
        }
    });
    return spec.scalar * minus_i_pow(spec.ell) * ipow(ctx.lambda, spec.j) * gterm_norm(lat) * acc;
}

}  // namespace bec
