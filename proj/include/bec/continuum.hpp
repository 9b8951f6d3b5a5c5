#pragma once

#include "bec/collision.hpp"

namespace bec {

using RadialFn = std::function<double(double)>;
using VecFn = std::function<double(const Vec3&)>;

// eps sin^2(x / eps) / (pi x^2), value 1 / (pi eps) at x = 0.
double dirac_seq(double eps, double x);

// Mean of J over the sphere of radius r. Directions come in antipodal pairs, so odd J averages to exactly 0.
// angular_nodes = 0 treats J as radial and evaluates it once on the x axis.
double sphere_average(const VecFn& J, double r, int angular_nodes);

// For radial F, vhat and dispersion the six dimensional integrand depends on (|p1|, |p2|, cos angle) only,
// and J enters through its sphere average. The continuum operators below integrate that reduced form.
struct ContinuumQuadrature {
    int radial_nodes = 96;  // Gauss-Legendre nodes per radial axis on (0, R]
    int angular_nodes = 8;  // cos-theta nodes of the sphere average (0: J radial)
    double R = 8.0;
    double epsrel = 1e-10;  // adaptive cos-angle integral
    std::size_t limit = 4000;

    void validate() const;
};

struct HypersurfaceQuadrature {
    int radial_nodes = 200;   // |p1|
    int inplane_nodes = 200;  // |p2| in the plane orthogonal to p1
    int angular_nodes = 8;
    double R1 = 8.0, R2 = 8.0;

    void validate() const;
    // R = 8 max(sigma, 1 / sqrt(beta)) on both radial axes.
    static HypersurfaceQuadrature defaults(double sigma, double beta);
};

// (2 pi)^-6 int int_{|p1|, |p2| <= R} sinc(dOmega, (T - S) / l^2) (v1 + v2)^2 dJ (balance factor).
double q_mollified_c(const DispersionContext& ctx, const KineticParams& par, const RadialFn& F, const VecFn& J,
                     double S, const ContinuumQuadrature& quad);

struct SharpValue {
    double value = 0.0;
    double gain_scale = 0.0;  // gain term (1 + f1)(1 + f2) f3 alone, with |J1| + |J2| + |J3| in place of dJ
};

// Energy conserving operator with free dispersion:
// (pi / (2 pi)^6) int dp1 / |p1| int_{p2 . p1 = 0} dp2 (v1 + v2)^2 dJ (balance factor), |p1 + p2|^2 = |p1|^2 + |p2|^2.
SharpValue q_energy_conserving(const RadialProfile& vhat, const RadialFn& f, const VecFn& J,
                               const HypersurfaceQuadrature& quad);

struct MollifiedVsSharp {
    double mollified = 0.0;
    double sharp = 0.0;
    double gap = 0.0;
};

// int_0^T Q_c dS = pi T int delta_eps(dOmega) (...) with eps = 2 l^2 / T, against T Q(f)[J].
MollifiedVsSharp q_mollified_vs_sharp(const DispersionContext& ctx, const KineticParams& par, const RadialFn& f,
                                      const VecFn& J, const ContinuumQuadrature& quad);

}  // namespace bec
