#pragma once

#include <string>
#include <vector>

#include "bec/collision.hpp"

namespace bec {

// Radial test function with a known support (or decay) radius.
struct RadialChi {
    std::string name;
    std::function<double(double)> f;
    double support = 0.0;  // f is zero (or below 1e-16 of its peak) beyond this radius

    // exp(-r^2 / (2 s^2))
    static RadialChi gaussian(double s);
    // (1 - r^2 / a^2)^3 on r < a: C^2, compactly supported
    static RadialChi c2_bump(double a);
};

struct LogLogFit {
    double slope = 0.0, intercept = 0.0, r2 = 0.0;
};
// Ordinary least squares of log y against log x; nonpositive y are skipped.
LogLogFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y);

struct PoissonRow {
    double L = 0.0;
    double lattice = 0.0;     // L^-3 sum over (2 pi / L) Z^3
    double continuum = 0.0;   // (2 pi)^-3 int
    double error = 0.0;       // |lattice - continuum|
    double reference_err = 0.0;  // convergence estimate of the continuum value
};

struct PoissonScan {
    std::vector<PoissonRow> rows;
    LogLogFit fit;  // log error vs log L
    double predicted_rate = 0.0;  // r / 2, for comparison only
};

PoissonScan poisson_error_scan(const RadialChi& chi, const std::vector<double>& L_list, int r);

// Phase pairs (F1, F2) attached to the times (s1, s2). F = O1 + O2 - O12, F' = O1 - O2 - O12.
enum class PhaseSelector { Zero, F_Zero, F_MinusF, F1_F2 };
PhaseSelector parse_phase_selector(const std::string& s);
std::string to_string(PhaseSelector s);

// Kernel H(p1, p2) through the invariants (|p1|, |p2|, cos angle).
struct PairKernel {
    std::string name;
    std::function<double(double, double, double)> f;
    double support = 0.0;  // per momentum

    // exp(-(|p1|^2 + |p2|^2) / 2)
    static PairKernel gaussian();
};

struct DiscRow {
    double L = 0.0;
    cplx lattice, continuum;
    double eps = 0.0;  // |lattice - continuum|
    double reference_err = 0.0;
};

// Lattice vs continuum gap of sum H(p1, p2) l^4 simplex_phase(F1, F2, T / l^2),
// i.e. the double macroscopic time integral of H exp(i (F1 S1 + F2 S2) / l^2).
std::vector<DiscRow> oscillatory_disc_error(const PairKernel& H, PhaseSelector sel, const DispersionContext& ctx,
                                            double T, const std::vector<double>& L_list);

struct TalbotRow {
    double T = 0.0;
    double q_moll_scaled = 0.0;  // l^2 int_0^T Q_{d; T - S}(F)[J] dS
    double sin2_sum = 0.0;       // (T / l^2) sum sin^2(x) / x^2 dJ (v1 + v2)^2 (balance) / |Lambda|^2, x = T dOmega / (2 l^2)
};

struct TalbotScan {
    std::vector<TalbotRow> rows;
    double max_over_min = 0.0;  // of |sin2_sum| over the grid
};

// 200 points on (0, 5].
std::vector<double> default_talbot_grid();

TalbotScan talbot_scan(const MomentumLattice& lat, const DispersionContext& ctx, const KineticParams& par,
                       const std::vector<double>& T_grid, const TestFunction& J, const Field& F);

}  // namespace bec
