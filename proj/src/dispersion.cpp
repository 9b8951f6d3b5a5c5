#include "bec/dispersion.hpp"

namespace bec {

RadialProfile RadialProfile::gaussian_bump(double a, double sigma) {
    if (!(a >= 0.0) || !(sigma > 0.0)) throw ValidationError("profile: need a >= 0 and sigma > 0");
    RadialProfile pr;
    pr.name = "gaussian_bump";
    pr.params = {{"a", a}, {"sigma", sigma}};
    const double s2 = sigma * sigma;
    pr.radial = [a, s2](double r) { return a * r * r * std::exp(-r * r / (2.0 * s2)); };
    pr.d1 = [a, s2](double r) { return a * std::exp(-r * r / (2.0 * s2)) * (2.0 * r - r * r * r / s2); };
    pr.d2 = [a, s2](double r) {
        double r2 = r * r;
        return a * std::exp(-r2 / (2.0 * s2)) * (2.0 - 5.0 * r2 / s2 + r2 * r2 / (s2 * s2));
    };
    return pr;
}

RadialProfile RadialProfile::zero() {
    RadialProfile pr;
    pr.name = "zero";
    pr.radial = [](double) { return 0.0; };
    pr.d1 = pr.radial;
    pr.d2 = pr.radial;
    return pr;
}

double free_energy(const Vec3& p) { return 0.5 * norm2(p); }
double free_energy_r(double r) { return 0.5 * r * r; }

// sqrt(E(E+2 lv)) written as E + 2 lv / (1 + sqrt(1 + 2 lv / E)) to keep the
// small-coupling digits.
double omega_from(double E, double lam_v) {
    if (E <= 0.0) return 0.0;
    return E + 2.0 * lam_v / (1.0 + std::sqrt(1.0 + 2.0 * lam_v / E));
}

double bogoliubov_omega(const DispersionContext& ctx, const Vec3& p) {
    return omega_from(free_energy(p), ctx.lambda * ctx.vhat(p));
}

double bogoliubov_omega_r(const DispersionContext& ctx, double r) {
    return omega_from(free_energy_r(r), ctx.lambda * ctx.vhat.at(r));
}

void v_coeffs(double E, double vhat, double lambda, double& V1sq, double& V2) {
    if (vhat == 0.0) {
        V1sq = 0.0;
        V2 = 0.0;
        return;
    }
    if (E <= 0.0) throw DegeneratePoint("hfb_coeffs: E(p) = 0 with vhat(p) > 0");
    double om = omega_from(E, lambda * vhat);
    V1sq = vhat * vhat / (om * (om + E + lambda * vhat));
    V2 = vhat / om;
}

HfbCoeffs hfb_coeffs(const DispersionContext& ctx, const Vec3& p, double t) {
    double E = free_energy(p);
    double vh = ctx.vhat(p);
    HfbCoeffs c;
    v_coeffs(E, vh, ctx.lambda, c.V1sq, c.V2);
    if (vh == 0.0) {
        c.u = std::exp(cplx(0.0, E * t));
        c.v = 0.0;
        return c;
    }
    double om = omega_from(E, ctx.lambda * vh);
    double s = std::sin(om * t);
    double l = ctx.lambda;
    c.u = std::exp(cplx(0.0, om * t)) + cplx(0.0, l * l * s * c.V1sq);
    c.v = cplx(0.0, l * s * c.V2);
    return c;
}

double omega_expansion_residual(const DispersionContext& ctx, const Vec3& p) {
    double E = free_energy(p);
    if (E <= 0.0) throw ValidationError("omega_expansion_residual: needs E(p) > 0");
    double l = ctx.lambda;
    double vh = ctx.vhat(p);
    return bogoliubov_omega(ctx, p) - (E + l * vh - l * l * vh * vh / (2.0 * E));
}

}  // namespace bec
