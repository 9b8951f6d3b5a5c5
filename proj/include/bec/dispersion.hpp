#pragma once

#include <map>
#include <string>

#include "bec/common.hpp"

namespace bec {

// Radial, nonnegative interaction profile v(p) = v_r(|p|) with v(0) = 0.
struct RadialProfile {
    std::string name;
    std::map<std::string, double> params;
    std::function<double(double)> radial;
    std::function<double(double)> d1;  // optional d/dr
    std::function<double(double)> d2;  // optional d^2/dr^2

    double operator()(const Vec3& p) const { return radial(norm(p)); }
    double at(double r) const { return radial(r); }

    // a |p|^2 exp(-|p|^2 / (2 sigma^2))
    static RadialProfile gaussian_bump(double a, double sigma);
    static RadialProfile zero();
};

struct DispersionContext {
    RadialProfile vhat;
    double lambda = 0.1;
};

struct HfbCoeffs {
    cplx u;
    cplx v;
    double V1sq = 0.0;
    double V2 = 0.0;
};

double free_energy(const Vec3& p);
double free_energy_r(double r);

// Omega from precomputed E and vhat (scalar core shared by every module).
double omega_from(double E, double lam_v);
double bogoliubov_omega(const DispersionContext& ctx, const Vec3& p);
double bogoliubov_omega_r(const DispersionContext& ctx, double r);

// V1^2 and V2 from E, vhat, lambda. Throws DegeneratePoint for E = 0 < vhat.
void v_coeffs(double E, double vhat, double lambda, double& V1sq, double& V2);

HfbCoeffs hfb_coeffs(const DispersionContext& ctx, const Vec3& p, double t);

double omega_expansion_residual(const DispersionContext& ctx, const Vec3& p);

}  // namespace bec
