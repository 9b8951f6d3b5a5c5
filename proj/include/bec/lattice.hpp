#pragma once

#include <vector>

#include "bec/dispersion.hpp"

namespace bec {

// Truncated lattice p = (2 pi / L) z, z in Z^3, |z|_inf <= M, volume L^3.
struct MomentumLattice {
    double L = 1.0;
    int M = 1;

    MomentumLattice() = default;
    MomentumLattice(double L_, int M_);

    int side() const { return 2 * M + 1; }
    std::size_t size() const { return static_cast<std::size_t>(side()) * side() * side(); }
    double volume() const { return L * L * L; }
    double spacing() const { return 2.0 * kPi / L; }

    std::array<int, 3> z(std::size_t idx) const;
    Vec3 point(std::size_t idx) const;
    // Index of z, or -1 when outside the cutoff.
    long index(int zx, int zy, int zz) const;
    std::size_t index_of_zero() const { return size() / 2; }
    // -p is the mirror index under this layout.
    std::size_t neg(std::size_t idx) const { return size() - 1 - idx; }
    // Index of p_i + p_j, or -1 when the sum leaves the cutoff.
    long add(std::size_t i, std::size_t j) const;
};

using Field = std::vector<double>;
using TestFunction = std::vector<double>;

// Samples a callable at every lattice point.
Field sample(const MomentumLattice& lat, const std::function<double(const Vec3&)>& f);

double lattice_sum(const MomentumLattice& lat, const std::vector<double>& f);
cplx lattice_sum(const MomentumLattice& lat, const std::vector<cplx>& f);

// L^1 + l^inf norm; weighted applies w = 1 + 1/|p|^2 away from p = 0.
double norm_1cap_infty(const MomentumLattice& lat, const std::vector<double>& f, bool weighted);

struct QuadratureReport {
    double value = 0.0;
    std::size_t nodes = 0;
};

// Gauss-Legendre rule on [a, b]; nodes are mirrored so symmetric integrands cancel exactly.
void gauss_legendre(int n, double a, double b, std::vector<double>& x, std::vector<double>& w);

// Adaptive Gauss-Kronrod (61 point) on [a, b]. Throws NumericalGuard when the tolerance is not met.
struct AdaptiveReport {
    double value = 0.0;
    double abserr = 0.0;
};
AdaptiveReport adaptive_integral(const std::function<double(double)>& f, double a, double b, double epsabs,
                                 double epsrel, std::size_t limit = 2000);

// (2 pi)^-3 times the integral over the cube [-R, R]^3 restricted to |p| <= R.
QuadratureReport continuum_integral(const std::function<double(const Vec3&)>& f, double R, int nodes_per_axis = 48);

// Default radius max(8 sigma, 8 / sqrt(beta)).
double default_cutoff_radius(double sigma, double beta);

// ||f||_{m,c} = sum_{n <= m} || <|p|>^n |D^{m-n} f| ||_{L^1(R^3)} on |p| <= R for radial profiles, m <= 2.
// |D^k f| is the Frobenius norm of the derivative tensor; needs the d1 / d2 callbacks.
double norm_mc(const RadialProfile& f, int m, double R);

// Per-point dispersion data reused by every lattice operator.
struct DispersionTables {
    std::vector<double> E, vhat, Omega, V1sq, V2;
    DispersionTables(const MomentumLattice& lat, const DispersionContext& ctx);
};

}  // namespace bec
