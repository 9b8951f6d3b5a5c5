#include "bec/evolution.hpp"

#include <spdlog/spdlog.h>

namespace bec {

void EvolutionOptions::validate() const {
    if (picard_depth < 1 || picard_depth > 16) throw ValidationError("evolution: picard_depth must be in 1..16");
}

cplx evolve_psi(const MomentumLattice& lat, const DispersionContext& ctx, const KineticParams& par,
                const std::vector<Snapshot>& snapshots) {
    par.validate();
    if (snapshots.empty() || snapshots.front().S != 0.0)
        throw ValidationError("evolve_psi: snapshots must start at S = 0");
    if (snapshots.back().S < par.T * (1.0 - 1e-12)) throw ValidationError("evolve_psi: snapshots must cover [0, T]");
    std::vector<double> vh(lat.size());
    for (std::size_t i = 0; i < vh.size(); ++i) vh[i] = ctx.vhat(lat.point(i));
    auto density = [&](const Field& F) {
        if (F.size() != lat.size()) throw ValidationError("evolve_psi: field size does not match the lattice");
        std::vector<double> w(F.size());
        for (std::size_t i = 0; i < F.size(); ++i) w[i] = vh[i] * F[i];
        return lattice_sum(lat, w);
    };
    double integral = 0.0;
    double prev = density(snapshots.front().F);
    for (std::size_t k = 1; k < snapshots.size(); ++k) {
        double a = snapshots[k - 1].S, b = snapshots[k].S;
        if (!(b > a)) throw ValidationError("evolve_psi: snapshot times must increase");
        double cur = density(snapshots[k].F);
        if (b >= par.T) {
            // last, possibly partial, interval
            double x = (par.T - a) / (b - a);
            double end = prev + x * (cur - prev);
            integral += 0.5 * (par.T - a) * (prev + end);
            break;
        }
        integral += 0.5 * (b - a) * (prev + cur);
        prev = cur;
    }
    return cplx(0.0, -1.0) * integral / (std::sqrt(par.bigN) * par.lambda);
}

namespace {

// Lower-triangular (n <= m) table of hat-function weights of one group.
struct GroupWeights {
    const PhaseGroup* g = nullptr;
    std::vector<double> P;  // index m (m + 1) / 2 + n
};

inline std::size_t tri(std::size_t n, std::size_t m) { return m * (m + 1) / 2 + n; }

// Accumulates into W the weights int_0^{T_m} dS2 phi_n(S2) int_{S2}^{T_m} dS1 c exp(i (a S1 + b S2)).
void add_term_weights(const PhaseTerm& t, double lambda, double h, std::size_t K, std::vector<cplx>& W) {
    const double l2 = lambda * lambda;
    const double a = t.w1 / l2, b = t.w2 / l2;
    const cplx I(0.0, 1.0);
    const cplx z0 = I * (a + b) * h, z1 = I * a * h, zb = I * b * h;
    const cplx Dr = exp_divided_difference({z0, z0, z1, 0.0});
    const cplx Df = exp_divided_difference({z0, z1, z1, 0.0}) + exp_divided_difference({z0, z1, 0.0, 0.0});
    const cplx Pr = exp_divided_difference({zb, zb, 0.0});
    const cplx Pf = exp_divided_difference({zb, 0.0, 0.0});
    const cplx g1 = h * exp_divided_difference({z1, 0.0});
    std::vector<cplx> tr(K + 1), tf(K + 1), sr(K + 1), sf(K + 1), G(K + 1);
    cplx cum = 0.0;
    for (std::size_t k = 0; k <= K; ++k) {
        double S = k * h;
        cplx eab = std::exp(I * ((a + b) * S)), eb = std::exp(I * (b * S));
        tr[k] = t.c * h * h * eab * Dr;
        tf[k] = t.c * h * h * eab * Df;
        sr[k] = t.c * h * eb * Pr;
        sf[k] = t.c * h * eb * Pf;
        G[k] = g1 * cum;
        cum += std::exp(I * (a * S));
    }
    for (std::size_t m = 1; m <= K; ++m) {
        for (std::size_t n = 0; n <= m; ++n) {
            cplx v = 0.0;
            if (n >= 1) v += tr[n - 1] + sr[n - 1] * (G[m] - G[n]);
            if (n < m) v += tf[n] + sf[n] * (G[m] - G[n + 1]);
            W[tri(n, m)] += v;
        }
    }
}

std::vector<GroupWeights> operator_weights(const PhaseOperator& op, double scale, double lambda, double h,
                                           std::size_t K) {
    std::vector<GroupWeights> out(op.groups.size());
    const std::size_t len = (K + 1) * (K + 2) / 2;
    parallel_for(op.groups.size(), [&](std::size_t gi) {
        const PhaseGroup& g = op.groups[gi];
        std::vector<cplx> W(len, 0.0);
        for (const auto& t : g.terms) add_term_weights(t, lambda, h, K, W);
        GroupWeights gw;
        gw.g = &g;
        gw.P.resize(len);
        for (std::size_t i = 0; i < len; ++i) gw.P[i] = scale * op.pre * (op.imag_part ? W[i].imag() : W[i].real());
        out[gi] = std::move(gw);
    });
    return out;
}

}  // namespace

EvolutionState evolve_F(const MomentumLattice& lat, const DispersionContext& ctx, const KineticParams& par,
                        const Field& f0, const EvolutionOptions& opt) {
    par.validate();
    opt.validate();
    if (f0.size() != lat.size()) throw ValidationError("evolve_F: f0 size does not match the lattice");
    for (double v : f0)
        if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError("evolve_F: f0 must be finite and >= 0");
    const std::size_t K = static_cast<std::size_t>(par.sGridCount) - 1;
    const double h = par.T / K;

    std::vector<PhaseOperator> ops;
    std::vector<double> scales;
    ops.push_back(build_bol0(lat, ctx));
    scales.push_back(1.0);
    if (opt.with_subleading) {
        ops.push_back(build_bol1(lat, ctx));
        scales.push_back(par.lambda);
        ops.push_back(build_bol2(lat, ctx));
        scales.push_back(par.lambda * par.lambda);
    }
    std::vector<GroupWeights> weights;
    for (std::size_t i = 0; i < ops.size(); ++i) {
        auto w = operator_weights(ops[i], scales[i], par.lambda, h, K);
        for (auto& x : w) weights.push_back(std::move(x));
    }

    std::vector<Field> path(K + 1, f0);
    const double inv = 1.0 / (par.bigN * lat.volume());
    for (int it = 0; it < opt.picard_depth; ++it) {
        // per-group responses first, then a serial reduction in group order
        std::vector<std::vector<double>> resp(weights.size());
        parallel_for(weights.size(), [&](std::size_t gi) {
            const auto& gw = weights[gi];
            std::vector<double> b(K + 1);
            for (std::size_t n = 0; n <= K; ++n) b[n] = gw.g->bracket(path[n]);
            std::vector<double> r(K + 1, 0.0);
            for (std::size_t m = 1; m <= K; ++m) {
                double acc = 0.0;
                for (std::size_t n = 0; n <= m; ++n) acc += b[n] * gw.P[tri(n, m)];
                r[m] = acc;
            }
            resp[gi] = std::move(r);
        });
        std::vector<Field> next(K + 1, f0);
        for (std::size_t gi = 0; gi < weights.size(); ++gi) {
            const PhaseGroup& g = *weights[gi].g;
            for (std::size_t m = 1; m <= K; ++m)
                for (int k = 0; k < g.nj; ++k) next[m][g.jidx[k]] += inv * g.jcoef[k] * resp[gi][m];
        }
        std::size_t clamped = 0;
        double worst = 0.0;
        for (auto& F : next)
            for (double& v : F) {
                if (!std::isfinite(v)) throw NumericalGuard("evolve_F: non-finite density");
                if (v < 0.0) {
                    if (v < -1e-12) {
                        ++clamped;
                        worst = std::min(worst, v);
                    }
                    v = 0.0;
                }
            }
        if (clamped > 0)
            spdlog::warn("evolve_F: Picard iterate {} produced {} negative densities (min {:.3e}); clamped to 0",
                         it + 1, clamped, worst);
        path = std::move(next);
    }

    EvolutionState st;
    st.T = par.T;
    st.F = path.back();
    for (std::size_t m = 0; m <= K; ++m) st.snapshots.push_back(Snapshot{m * h, path[m]});
    st.snapshots.back().S = par.T;
    st.Psi_path.push_back(0.0);
    for (std::size_t m = 1; m <= K; ++m) {
        KineticParams pm = par;
        pm.T = st.snapshots[m].S;
        std::vector<Snapshot> head(st.snapshots.begin(), st.snapshots.begin() + m + 1);
        st.Psi_path.push_back(evolve_psi(lat, ctx, pm, head));
    }
    st.Psi = st.Psi_path.back();
    return st;
}

cplx evolve_G(const MomentumLattice& lat, const DispersionContext& ctx, const KineticParams& par, const Field& F,
              const std::vector<GTermSpec>& termlist, const TestFunction& J) {
    par.validate();
    if (termlist.empty()) throw ValidationError("evolve_G: term list unconfigured");
    const double t = par.micro_time();
    cplx acc = 0.0;
    for (const auto& spec : termlist) acc += gterm_time_integral(lat, ctx, par, F, J, spec, t);
    // both channels pick up l^2 from the change to microscopic time
    return par.lambda * par.lambda * acc / par.bigN;
}

}  // namespace bec
