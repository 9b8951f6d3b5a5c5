#include "bec/wick.hpp"

#include <unordered_map>

namespace bec {

double pair_value(const OperatorWord& w, std::size_t i, std::size_t j, const Field& f0, const MomentumLattice& lat) {
    if (i >= w.size() || j >= w.size() || i == j) throw ValidationError("pair_value: bad positions");
    if (i > j) std::swap(i, j);
    const Symbol& l = w.symbols[i];
    const Symbol& r = w.symbols[j];
    if (l.dagger == r.dagger || l.mom != r.mom) return 0.0;
    double vol = lat.volume();
    return l.dagger ? vol * f0[l.mom] : vol * (1.0 + f0[l.mom]);
}

namespace {

constexpr int kMaxOps = static_cast<int>(kWickMaxLength);

// Minimal operator record for the enumerator.
struct Op {
    std::size_t mom;
    bool dag;
    unsigned char slot;
};

// Enumerates matchings with nonzero value; visit(value, partner) gets partner[i] for every position.
template <class Visit>
void enumerate(const Op* ops, int n, const double* occ, double vol, int* partner, unsigned used, double prod,
               Visit& visit) {
    int i = 0;
    while (i < n && (used >> i & 1u)) ++i;
    if (i == n) {
        visit(prod, partner);
        return;
    }
    for (int j = i + 1; j < n; ++j) {
        if (used >> j & 1u) continue;
        if (ops[i].dag == ops[j].dag || ops[i].mom != ops[j].mom) continue;
        double v = ops[i].dag ? vol * occ[ops[i].mom] : vol * (1.0 + occ[ops[i].mom]);
        partner[i] = j;
        partner[j] = i;
        enumerate(ops, n, occ, vol, partner, used | (1u << i) | (1u << j), prod * v, visit);
    }
}

std::size_t double_factorial_odd(std::size_t n) {
    std::size_t r = 1;
    for (std::size_t k = n; k > 1; k -= 2) r *= k;
    return r;
}

}  // namespace

cplx wick_expectation(const OperatorWord& w, const Field& f0, const MomentumLattice& lat) {
    if (w.size() > kWickMaxLength) throw ValidationError("wick_expectation: word longer than the enumeration guard");
    if (w.size() % 2 == 1) return 0.0;
    Op ops[kMaxOps];
    cplx coeff = 1.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
        ops[k] = Op{w.symbols[k].mom, w.symbols[k].dagger, static_cast<unsigned char>(w.symbols[k].slot)};
        coeff *= w.symbols[k].coeff;
    }
    double sum = 0.0;
    int partner[kMaxOps];
    auto visit = [&](double v, const int*) { sum += v; };
    enumerate(ops, static_cast<int>(w.size()), f0.data(), lat.volume(), partner, 0u, 1.0, visit);
    return coeff * sum;
}

std::size_t count_matchings(const OperatorWord& w, bool number_conserving_only) {
    if (w.size() > kWickMaxLength) throw ValidationError("count_matchings: word longer than the enumeration guard");
    if (w.size() % 2 == 1) return 0;
    if (!number_conserving_only) return double_factorial_odd(w.size() - 1);
    std::size_t nd = 0;
    for (const auto& s : w.symbols) nd += s.dagger;
    if (2 * nd != w.size()) return 0;
    std::size_t r = 1;
    for (std::size_t k = 2; k <= nd; ++k) r *= k;
    return r;
}

namespace {

struct CoefTerm {
    int grade;
    double amp;
    double w;
};

struct ModeCoefs {
    std::vector<CoefTerm> u, v, ubar, vbar;
};

// u = e^{iWt} + l^2 V1sq (e^{iWt} - e^{-iWt})/2, v = l V2 (e^{iWt} - e^{-iWt})/2, conjugates alike.
std::vector<ModeCoefs> mode_coefficients(const DispersionTables& tb) {
    std::vector<ModeCoefs> out(tb.E.size());
    auto push = [](std::vector<CoefTerm>& dst, int g, double a, double w) {
        if (a != 0.0) dst.push_back(CoefTerm{g, a, w});
    };
    for (std::size_t p = 0; p < out.size(); ++p) {
        double W = tb.Omega[p], A = tb.V1sq[p], B = tb.V2[p];
        ModeCoefs& m = out[p];
        push(m.u, 0, 1.0, W);
        push(m.u, 2, 0.5 * A, W);
        push(m.u, 2, -0.5 * A, -W);
        push(m.v, 1, 0.5 * B, W);
        push(m.v, 1, -0.5 * B, -W);
        push(m.ubar, 0, 1.0, -W);
        push(m.ubar, 2, -0.5 * A, W);
        push(m.ubar, 2, 0.5 * A, -W);
        push(m.vbar, 1, -0.5 * B, W);
        push(m.vbar, 1, 0.5 * B, -W);
    }
    return out;
}

struct CubWord {
    std::array<std::size_t, 3> mom;
    std::array<bool, 3> dag;
    std::vector<CoefTerm> poly;  // amp includes vhat(p2); phase e^{i w s}
    long key;                    // hash of (net momentum, charge)
    int charge;
    std::array<int, 3> net;
};

long word_key(const std::array<int, 3>& net, int charge, int M) {
    const long span = 6L * M + 1;
    long k = ((net[0] + 3L * M) * span + (net[1] + 3L * M)) * span + (net[2] + 3L * M);
    return k * 7 + (charge + 3);
}

// All words of H_cub(s) = sum vhat(p2) [a+_{p1} a+_{p2} a_{p12} + a+_{p12} a_{p2} a_{p1}](s) after the HFB substitution.
std::vector<CubWord> cubic_words(const MomentumLattice& lat, const DispersionTables& tb,
                                 const std::vector<ModeCoefs>& mc) {
    PairList pl(lat);
    std::vector<CubWord> out;
    for (std::size_t k = 0; k < pl.size(); ++k) {
        double wv = tb.vhat[pl.i2[k]];
        if (wv == 0.0) continue;
        for (int ch = 0; ch < 2; ++ch) {
            std::array<std::size_t, 3> m0;
            std::array<bool, 3> d0;
            if (ch == 0) {
                m0 = {pl.i1[k], pl.i2[k], pl.i12[k]};
                d0 = {true, true, false};
            } else {
                m0 = {pl.i12[k], pl.i2[k], pl.i1[k]};
                d0 = {true, false, false};
            }
            for (int flip = 0; flip < 8; ++flip) {
                CubWord w;
                const std::vector<CoefTerm>* lists[3];
                bool empty = false;
                for (int o = 0; o < 3; ++o) {
                    bool fl = flip >> o & 1;
                    const ModeCoefs& c = mc[m0[o]];
                    if (d0[o])
                        lists[o] = fl ? &c.v : &c.u;
                    else
                        lists[o] = fl ? &c.vbar : &c.ubar;
                    if (lists[o]->empty()) empty = true;
                    w.mom[o] = fl ? lat.neg(m0[o]) : m0[o];
                    w.dag[o] = fl ? !d0[o] : d0[o];
                }
                if (empty) continue;
                for (const auto& a : *lists[0])
                    for (const auto& b : *lists[1])
                        for (const auto& c : *lists[2])
                            w.poly.push_back(
                                CoefTerm{a.grade + b.grade + c.grade, wv * a.amp * b.amp * c.amp, a.w + b.w + c.w});
                w.net = {0, 0, 0};
                w.charge = 0;
                for (int o = 0; o < 3; ++o) {
                    auto z = lat.z(w.mom[o]);
                    int s = w.dag[o] ? 1 : -1;
                    for (int d = 0; d < 3; ++d) w.net[d] += s * z[d];
                    w.charge += s;
                }
                w.key = word_key(w.net, w.charge, lat.M);
                out.push_back(std::move(w));
            }
        }
    }
    return out;
}

enum Cls { kBoltz = 0, kCond = 1, kPair = 2, kOther = 3 };

// Topology of a matching on the word layout given by slots.
int classify(const Op* ops, int n, const int* partner) {
    int ab = 0, ac = 0, bc = 0, bb = 0, cc = 0, aa = 0;
    for (int i = 0; i < n; ++i) {
        int j = partner[i];
        if (j < i) continue;
        int s = ops[i].slot, t = ops[j].slot;
        if (s > t) std::swap(s, t);
        if (s == 0 && t == 0) ++aa;
        else if (s == 0 && t == 1) ++ab;
        else if (s == 0 && t == 2) ++ac;
        else if (s == 1 && t == 1) ++bb;
        else if (s == 1 && t == 2) ++bc;
        else ++cc;
    }
    if (aa > 0) return -1;
    if (ab == 1 && ac == 1 && bc == 2) return kBoltz;
    if (ab == 1 && ac == 1 && bb == 1 && cc == 1) return kCond;
    if (ab == 2 && bc == 1 && cc == 1) return kPair;
    return kOther;
}

using Graded = std::array<cplx, kMaxGrade + 1>;

// sum over term pairs of amp_B amp_C lambda^{gB + gC} simplex(wB, wC, t), sorted by grade
Graded time_factors(const CubWord& B, const CubWord& C, double t, double lambda) {
    Graded tf{};
    for (const auto& b : B.poly)
        for (const auto& c : C.poly) tf[b.grade + c.grade] += (b.amp * c.amp) * simplex_phase(b.w, c.w, t);
    double lp = 1.0;
    for (int g = 0; g <= kMaxGrade; ++g) {
        tf[g] *= lp;
        lp *= lambda;
    }
    return tf;
}

struct OracleSetup {
    DispersionTables tb;
    std::vector<ModeCoefs> mc;
    std::vector<CubWord> words;
    std::unordered_map<long, std::vector<std::size_t>> by_key;

    OracleSetup(const MomentumLattice& lat, const DispersionContext& ctx)
        : tb(lat, ctx), mc(mode_coefficients(tb)), words(cubic_words(lat, tb, mc)) {
        for (std::size_t i = 0; i < words.size(); ++i) by_key[words[i].key].push_back(i);
    }
    const std::vector<std::size_t>* partners(const CubWord& B, int chargeA, int M) const {
        std::array<int, 3> neg = {-B.net[0], -B.net[1], -B.net[2]};
        int ch = -chargeA - B.charge;
        if (ch < -3 || ch > 3) return nullptr;
        auto it = by_key.find(word_key(neg, ch, M));
        return it == by_key.end() ? nullptr : &it->second;
    }
};

void check_inputs(const MomentumLattice& lat, const DispersionContext& ctx, const KineticParams& par,
                  const Field& f0, const TestFunction& J) {
    par.validate();
    if (ctx.lambda != par.lambda) throw ValidationError("wick oracle: ctx.lambda and params.lambda differ");
    if (f0.size() != lat.size() || J.size() != lat.size())
        throw ValidationError("wick oracle: field sizes do not match the lattice");
}

// Per-class Wick weight of sum_q J(q) nu0([[A_q, B], C]) with A_q = (1/|Lambda|) J(q) x quadratic word.
// For f: A_q = a+_q a_q. For g: A_q = a_{-q} a_q.
void wick_weights(const CubWord& B, const CubWord& C, bool is_g, const MomentumLattice& lat, const Field& f0,
                  const TestFunction& J, double w[4]) {
    for (int k = 0; k < 4; ++k) w[k] = 0.0;
    const double vol = lat.volume();
    std::size_t cand[12];
    int nc = 0;
    auto add_cand = [&](std::size_t q) {
        for (int k = 0; k < nc; ++k)
            if (cand[k] == q) return;
        cand[nc++] = q;
    };
    for (int o = 0; o < 3; ++o) {
        add_cand(B.mom[o]);
        add_cand(C.mom[o]);
        if (is_g) {
            add_cand(lat.neg(B.mom[o]));
            add_cand(lat.neg(C.mom[o]));
        }
    }
    Op Bo[3], Co[3];
    for (int o = 0; o < 3; ++o) {
        Bo[o] = Op{B.mom[o], B.dag[o], 1};
        Co[o] = Op{C.mom[o], C.dag[o], 2};
    }
    for (int k = 0; k < nc; ++k) {
        std::size_t q = cand[k];
        double jq = J[q];
        if (jq == 0.0) continue;
        Op Ao[2];
        if (is_g)
            Ao[0] = Op{lat.neg(q), false, 0}, Ao[1] = Op{q, false, 0};
        else
            Ao[0] = Op{q, true, 0}, Ao[1] = Op{q, false, 0};
        // ABC - BAC - CAB + CBA
        const Op* seq[4][3] = {{Ao, Bo, Co}, {Bo, Ao, Co}, {Co, Ao, Bo}, {Co, Bo, Ao}};
        const double sgn[4] = {1.0, -1.0, -1.0, 1.0};
        for (int ord = 0; ord < 4; ++ord) {
            Op ops[8];
            int n = 0;
            for (int part = 0; part < 3; ++part) {
                const Op* src = seq[ord][part];
                int len = src == Ao ? 2 : 3;
                for (int e = 0; e < len; ++e) ops[n++] = src[e];
            }
            int partner[8];
            double scale = sgn[ord] * jq / vol;
            auto visit = [&](double v, const int* pr) {
                int c = classify(ops, 8, pr);
                if (c >= 0) w[c] += scale * v;
            };
            enumerate(ops, 8, f0.data(), vol, partner, 0u, 1.0, visit);
        }
    }
}

}  // namespace

DuhamelF duhamel_f_second_order(const MomentumLattice& lat, const DispersionContext& ctx, const KineticParams& par,
                                const Field& f0, const TestFunction& J, bool classify_flag) {
    check_inputs(lat, ctx, par, f0, J);
    OracleSetup setup(lat, ctx);
    const double vol = lat.volume();
    const double t = par.micro_time();
    // -(1/|Lambda|) (lambda / sqrt N)^2 / |Lambda|^4 from the commutator, the trace and the two H_cub sums
    const double pref = -(par.lambda * par.lambda / par.bigN) / (vol * vol * vol * vol * vol);

    const std::size_t nw = setup.words.size();
    std::vector<std::array<Graded, 4>> part(nw);
    std::vector<std::size_t> pairs(nw, 0);
    parallel_for(nw, [&](std::size_t bi) {
        const CubWord& B = setup.words[bi];
        std::array<Graded, 4> acc{};
        const auto* list = setup.partners(B, 0, lat.M);
        if (!list) {
            part[bi] = acc;
            return;
        }
        for (std::size_t ci : *list) {
            const CubWord& C = setup.words[ci];
            double w[4];
            wick_weights(B, C, false, lat, f0, J, w);
            if (w[0] == 0.0 && w[1] == 0.0 && w[2] == 0.0 && w[3] == 0.0) continue;
            ++pairs[bi];
            Graded tf = time_factors(B, C, t, par.lambda);
            for (int c = 0; c < 4; ++c) {
                if (w[c] == 0.0) continue;
                for (int g = 0; g <= kMaxGrade; ++g) acc[c][g] += w[c] * tf[g];
            }
        }
        part[bi] = acc;
    });

    DuhamelF r;
    Graded* dst[4] = {&r.boltzmann_graded, &r.condensate_graded, &r.other_graded, &r.other_graded};
    for (std::size_t bi = 0; bi < nw; ++bi) {
        r.word_pairs += pairs[bi];
        for (int c = 0; c < 4; ++c)
            for (int g = 0; g <= kMaxGrade; ++g) (*dst[c])[g] += pref * part[bi][c][g];
    }
    cplx tot = 0.0, bz = 0.0, cd = 0.0, ot = 0.0;
    for (int g = 0; g <= kMaxGrade; ++g) {
        r.total_graded[g] = r.boltzmann_graded[g] + r.condensate_graded[g] + r.other_graded[g];
        tot += r.total_graded[g];
        bz += r.boltzmann_graded[g];
        cd += r.condensate_graded[g];
        ot += r.other_graded[g];
    }
    r.total = tot.real();
    r.boltzmann = classify_flag ? bz.real() : 0.0;
    r.condensate = classify_flag ? cd.real() : 0.0;
    r.other = classify_flag ? ot.real() : 0.0;
    r.max_imag = std::max({std::abs(tot.imag()), std::abs(bz.imag()), std::abs(cd.imag()), std::abs(ot.imag())});
    return r;
}

double duhamel_f_commutator_shortcut(const MomentumLattice& lat, const DispersionContext& ctx,
                                     const KineticParams& par, const Field& f0, const TestFunction& J) {
    check_inputs(lat, ctx, par, f0, J);
    OracleSetup setup(lat, ctx);
    const double vol = lat.volume();
    const double t = par.micro_time();
    const double pref = -(par.lambda * par.lambda / par.bigN) / (vol * vol * vol * vol * vol);
    const std::size_t nw = setup.words.size();
    std::vector<cplx> part(nw, 0.0);
    parallel_for(nw, [&](std::size_t bi) {
        const CubWord& B = setup.words[bi];
        double dJ = 0.0;
        for (int o = 0; o < 3; ++o) dJ += (B.dag[o] ? 1.0 : -1.0) * J[B.mom[o]];
        if (dJ == 0.0) return;
        const auto* list = setup.partners(B, 0, lat.M);
        if (!list) return;
        cplx acc = 0.0;
        for (std::size_t ci : *list) {
            const CubWord& C = setup.words[ci];
            OperatorWord bc, cb;
            for (int o = 0; o < 3; ++o) bc.symbols.push_back(Symbol{B.mom[o], B.dag[o], 1.0, Slot::H1});
            for (int o = 0; o < 3; ++o) bc.symbols.push_back(Symbol{C.mom[o], C.dag[o], 1.0, Slot::H2});
            for (int o = 0; o < 3; ++o) cb.symbols.push_back(bc.symbols[3 + o]);
            for (int o = 0; o < 3; ++o) cb.symbols.push_back(bc.symbols[o]);
            cplx comm = wick_expectation(bc, f0, lat) - wick_expectation(cb, f0, lat);
            if (comm == 0.0) continue;
            Graded tf = time_factors(B, C, t, par.lambda);
            cplx s = 0.0;
            for (int g = 0; g <= kMaxGrade; ++g) s += tf[g];
            acc += comm * s;
        }
        // [f[J], B] = dJ(B) B
        part[bi] = dJ * acc;
    });
    cplx sum = 0.0;
    for (const auto& v : part) sum += v;
    return (pref * sum).real();
}

DuhamelG duhamel_g_second_order(const MomentumLattice& lat, const DispersionContext& ctx, const KineticParams& par,
                                const Field& f0, const TestFunction& J) {
    check_inputs(lat, ctx, par, f0, J);
    OracleSetup setup(lat, ctx);
    const double vol = lat.volume();
    const double t = par.micro_time();
    const double pref = -(par.lambda * par.lambda / par.bigN) / (vol * vol * vol * vol * vol);
    const std::size_t nw = setup.words.size();
    std::vector<std::array<Graded, 4>> part(nw);
    std::vector<std::size_t> pairs(nw, 0);
    parallel_for(nw, [&](std::size_t bi) {
        const CubWord& B = setup.words[bi];
        std::array<Graded, 4> acc{};
        const auto* list = setup.partners(B, -2, lat.M);
        if (list) {
            for (std::size_t ci : *list) {
                const CubWord& C = setup.words[ci];
                double w[4];
                wick_weights(B, C, true, lat, f0, J, w);
                if (w[0] == 0.0 && w[1] == 0.0 && w[2] == 0.0 && w[3] == 0.0) continue;
                ++pairs[bi];
                Graded tf = time_factors(B, C, t, par.lambda);
                for (int c = 0; c < 4; ++c) {
                    if (w[c] == 0.0) continue;
                    for (int g = 0; g <= kMaxGrade; ++g) acc[c][g] += w[c] * tf[g];
                }
            }
        }
        part[bi] = acc;
    });
    DuhamelG r;
    Graded other{};
    Graded* dst[4] = {&r.boltzmann_graded, &r.condensate_graded, &r.pair_absorption_graded, &other};
    for (std::size_t bi = 0; bi < nw; ++bi) {
        r.word_pairs += pairs[bi];
        for (int c = 0; c < 4; ++c)
            for (int g = 0; g <= kMaxGrade; ++g) (*dst[c])[g] += pref * part[bi][c][g];
    }
    for (int g = 0; g <= kMaxGrade; ++g) {
        r.boltzmann += r.boltzmann_graded[g];
        r.condensate += r.condensate_graded[g];
        r.pair_absorption += r.pair_absorption_graded[g];
        r.other += other[g];
    }
    r.total = r.boltzmann + r.condensate + r.pair_absorption + r.other;
    return r;
}

}  // namespace bec
