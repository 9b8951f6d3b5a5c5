#pragma once

#include <initializer_list>
#include <vector>

#include "bec/lattice.hpp"

namespace bec {

struct KineticParams {
    double lambda = 0.1;
    double bigN = 10.0;
    double T = 1.0;
    int sGridCount = 32;

    void validate() const;
    double micro_time() const { return T / (lambda * lambda); }
};

// Valid (p1, p2) pairs: p1 + p2 inside the cutoff. Pairs leaving it are dropped.
struct PairList {
    std::vector<std::size_t> i1, i2, i12;
    explicit PairList(const MomentumLattice& lat);
    std::size_t size() const { return i1.size(); }
};

double delta_cub(const MomentumLattice& lat, const TestFunction& J, std::size_t i1, std::size_t i2);
double delta_cub(const std::function<double(const Vec3&)>& J, const Vec3& p1, const Vec3& p2);

// (1 + F1)(1 + F2) F3 - F1 F2 (1 + F3)
double detailed_balance_factor(double F1, double F2, double F3);

// sin(a x) / x with the limit a at x = 0 (series once |a x| < 1e-6).
double sinc_kernel(double x, double a);

// Mollified cubic operator at macroscopic time S.
double q_mollified_d(const MomentumLattice& lat, const DispersionContext& ctx, const KineticParams& par,
                     const Field& F, const TestFunction& J, double S);
// Same operator for every J_q = |Lambda| 1_{q}; entry q of the result.
std::vector<double> q_mollified_d_pointwise(const MomentumLattice& lat, const DispersionContext& ctx,
                                            const KineticParams& par, const Field& F, double S);
// int_0^T Q dS for S-independent F, using int_0^T sin(x (T-S)/l^2)/x dS = l^2 (1 - cos(x T/l^2)) / x^2.
double q_mollified_d_time_integral(const MomentumLattice& lat, const DispersionContext& ctx,
                                   const KineticParams& par, const Field& F, const TestFunction& J);

// int over 0 <= s2 <= s1 <= t of exp(i (w1 s1 + w2 s2)), closed form with series branches.
cplx simplex_phase(double w1, double w2, double t);

// Divided difference e[z0, ..., zn] of exp (repeated points allowed), i.e. the integral of
// exp(sum u_k z_k) over the standard simplex. Separated points recurse; clusters use a shifted series.
cplx exp_divided_difference(std::initializer_list<cplx> z);

// ---- Sums of phase terms, the common currency of the subleading operators ----

struct PhaseTerm {
    cplx c;
    double w1, w2;  // exp(i (w1 s1 + w2 s2))
};

// One (pair, bracket) group: J-combination times occupation bracket times phases.
struct PhaseGroup {
    int nj = 0;
    std::size_t jidx[3] = {0, 0, 0};
    double jcoef[3] = {0, 0, 0};
    std::size_t bidx[3] = {0, 0, 0};
    // bracket = prod_k occ(bidx[k], plus[k]) - prod_k occ(bidx[k], minus[k]); occ(i, true) = 1 + F_i.
    bool plus[3] = {false, false, false};
    bool minus[3] = {false, false, false};
    std::vector<PhaseTerm> terms;

    double bracket(const Field& F) const;
    double jvalue(const TestFunction& J) const;
};

// value(s1, s2) = pre * Part( (1/|Lambda|^2) sum_groups J * bracket * sum_terms c e^{i phase} )
struct PhaseOperator {
    double pre = 1.0;
    bool imag_part = false;
    std::vector<PhaseGroup> groups;

    double eval(const MomentumLattice& lat, const Field& F, const TestFunction& J, double s1, double s2) const;
    // int over the micro simplex [0, t] of value(s1, s2).
    double simplex_integral(const MomentumLattice& lat, const Field& F, const TestFunction& J, double t) const;
    // Pointwise response for J_q = |Lambda| 1_q, evaluated at (s1, s2).
    std::vector<double> eval_pointwise(const MomentumLattice& lat, const Field& F, double s1, double s2) const;
};

// Printed: the subleading operators as transcribed. Derived: the same orders obtained from the dressed
// cubic vertex; this is the form that matches the Wick expansion and is used by the evolution.
enum class OperatorForm { Derived, Printed };

// Micro-time form of the leading term: Re sum e^{i dOmega (s1 - s2)} (v1 + v2)^2 dJ bracket.
PhaseOperator build_bol0(const MomentumLattice& lat, const DispersionContext& ctx);
PhaseOperator build_bol1(const MomentumLattice& lat, const DispersionContext& ctx,
                         OperatorForm form = OperatorForm::Derived);
// Printed pieces of the second order operator.
PhaseOperator build_bol21(const MomentumLattice& lat, const DispersionContext& ctx);
PhaseOperator build_bol22(const MomentumLattice& lat, const DispersionContext& ctx);
PhaseOperator build_bol2(const MomentumLattice& lat, const DispersionContext& ctx,
                         OperatorForm form = OperatorForm::Derived);

// Operators at microscopic times s1 >= s2 >= 0, 1/l^2 prefactors included.
double bol1_d(const MomentumLattice& lat, const DispersionContext& ctx, const KineticParams& par, const Field& F,
              const TestFunction& J, double s1, double s2, OperatorForm form = OperatorForm::Derived);
double bol21_d(const MomentumLattice& lat, const DispersionContext& ctx, const KineticParams& par, const Field& F,
               const TestFunction& J, double s1, double s2);
double bol22_d(const MomentumLattice& lat, const DispersionContext& ctx, const KineticParams& par, const Field& F,
               const TestFunction& J, double s1, double s2);
double bol2_d(const MomentumLattice& lat, const DispersionContext& ctx, const KineticParams& par, const Field& F,
              const TestFunction& J, double s1, double s2, OperatorForm form = OperatorForm::Derived);

// Macroscopic simplex integrals over Delta[T, 2] for frozen F.
// cB_d: leading term; cBd1, cBd2: subleading operators.
double cBd0_integrated(const MomentumLattice& lat, const DispersionContext& ctx, const KineticParams& par,
                       const Field& F, const TestFunction& J);
double cBd1_integrated(const MomentumLattice& lat, const DispersionContext& ctx, const KineticParams& par,
                       const Field& F, const TestFunction& J, OperatorForm form = OperatorForm::Derived);
double cBd2_integrated(const MomentumLattice& lat, const DispersionContext& ctx, const KineticParams& par,
                       const Field& F, const TestFunction& J, OperatorForm form = OperatorForm::Derived);

// ---- G-channel term families ----

enum class GFamily { AbsQuart, Boltzmann, AbsCub };

struct GTermSpec {
    GFamily family = GFamily::Boltzmann;
    double scalar = 1.0;  // numeric prefactor attached to the term
    int ell = 0;          // power of (-i), 0..3
    int j = 0;            // power of lambda
    // Boltzmann family: sigma[k][l] phase signs, tau[k][l] occupation signs, k = momentum 1..3, l = time 1..2.
    int sigma[3][2] = {{1, 1}, {1, 1}, {1, 1}};
    int tau[3][2] = {{1, 1}, {1, 1}, {1, 1}};
    int j1 = 1, j2 = 1;  // J(p_{j1}) and vhat(p_{j2})
    int alpha[3] = {0, 0, 0};
    int beta[3] = {0, 0, 0};
    // Absorption families: m1, m2 in {0, +-2}; iota in {0, 1}; vhat(p +- k) sign for AbsQuart.
    int m1 = 0, m2 = 0;
    int iota = 0;
    int pk_sign = -1;

    void validate() const;
};

// One term of a G-channel family; single time s for AbsQuart, (s1, s2) otherwise.
cplx gterm_eval(const MomentumLattice& lat, const DispersionContext& ctx, const KineticParams& par,
                const Field& F, const TestFunction& J, const GTermSpec& spec, double s1, double s2 = 0.0);
// The same term integrated in closed form (single integral over [0, t] or simplex over Delta[t, 2]).
cplx gterm_time_integral(const MomentumLattice& lat, const DispersionContext& ctx, const KineticParams& par,
                         const Field& F, const TestFunction& J, const GTermSpec& spec, double t);

}  // namespace bec
