#include "bec/continuum.hpp"

#include <memory>
#include <vector>

namespace bec {

double dirac_seq(double eps, double x) {
    if (!(eps > 0.0)) throw ValidationError("dirac_seq: need eps > 0");
    double y = x / eps;
    if (std::abs(y) < 1e-6) return (1.0 - y * y / 3.0) / (kPi * eps);
    double s = std::sin(y);
    return eps * s * s / (kPi * x * x);
}

namespace {

struct SphereRule {
    std::vector<Vec3> dir;
    std::vector<double> w;  // sums to 1, one weight per antipodal pair
};

SphereRule sphere_rule(int n) {
    SphereRule r;
    std::vector<double> c, wc;
    gauss_legendre(n, 0.0, 1.0, c, wc);
    const int nphi = 2 * n;
    for (int i = 0; i < n; ++i) {
        double st = std::sqrt(std::max(0.0, 1.0 - c[i] * c[i]));
        for (int k = 0; k < nphi; ++k) {
            double phi = 2.0 * kPi * (k + 0.5) / nphi;
            r.dir.push_back({st * std::cos(phi), st * std::sin(phi), c[i]});
            r.w.push_back(wc[i] / nphi);
        }
    }
    return r;
}

double average_with(const VecFn& J, double r, const SphereRule* rule) {
    if (!rule) return J(Vec3{r, 0.0, 0.0});
    double acc = 0.0;
    for (std::size_t k = 0; k < rule->dir.size(); ++k) {
        Vec3 p = r * rule->dir[k];
        acc += rule->w[k] * (J(p) + J(-p));
    }
    return 0.5 * acc;
}

void check_finite(double v, const char* who) {
    if (!std::isfinite(v)) throw NumericalGuard(std::string(who) + ": non-finite integrand at a node");
}

}  // namespace

double sphere_average(const VecFn& J, double r, int angular_nodes) {
    if (angular_nodes < 0) throw ValidationError("sphere_average: angular_nodes must be >= 0");
    if (angular_nodes == 0) return average_with(J, r, nullptr);
    SphereRule rule = sphere_rule(angular_nodes);
    return average_with(J, r, &rule);
}

void ContinuumQuadrature::validate() const {
    if (radial_nodes < 2 || angular_nodes < 0) throw ValidationError("continuum quadrature: bad node counts");
    if (!(R > 0.0) || !std::isfinite(R)) throw ValidationError("continuum quadrature: cutoff must be finite");
    if (!(epsrel > 0.0) || limit < 16) throw ValidationError("continuum quadrature: bad adaptive settings");
}

void HypersurfaceQuadrature::validate() const {
    if (radial_nodes < 2 || inplane_nodes < 2 || angular_nodes < 0)
        throw ValidationError("hypersurface quadrature: bad node counts");
    if (!(R1 > 0.0) || !(R2 > 0.0) || !std::isfinite(R1) || !std::isfinite(R2))
        throw ValidationError("hypersurface quadrature: cutoffs must be finite");
}

HypersurfaceQuadrature HypersurfaceQuadrature::defaults(double sigma, double beta) {
    HypersurfaceQuadrature q;
    q.R1 = q.R2 = default_cutoff_radius(sigma, beta);
    return q;
}

namespace {

// Shared driver of the reduced (r1, r2, cos) integral; kernel(dOmega) supplies the energy weight.
template <class Kernel>
double reduced_integral(const DispersionContext& ctx, const RadialFn& F, const VecFn& J,
                        const ContinuumQuadrature& quad, Kernel kernel, const char* who) {
    quad.validate();
    std::unique_ptr<SphereRule> rule;
    if (quad.angular_nodes > 0) rule = std::make_unique<SphereRule>(sphere_rule(quad.angular_nodes));
    std::vector<double> r, w;
    gauss_legendre(quad.radial_nodes, 0.0, quad.R, r, w);
    const int n = quad.radial_nodes;
    std::vector<double> Fr(n), Jr(n), vr(n), Or(n);
    for (int i = 0; i < n; ++i) {
        Fr[i] = F(r[i]);
        Jr[i] = average_with(J, r[i], rule.get());
        vr[i] = ctx.vhat.at(r[i]);
        Or[i] = bogoliubov_omega_r(ctx, r[i]);
        check_finite(Fr[i] + Jr[i] + vr[i], who);
    }
    std::vector<double> rows(n, 0.0);
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j) {
            double vs = vr[i] + vr[j];
            if (vs == 0.0) continue;
            const double r1 = r[i], r2 = r[j];
            std::function<double(double)> g = [&](double c) {
                double r3 = std::sqrt(std::max(0.0, r1 * r1 + r2 * r2 + 2.0 * r1 * r2 * c));
                double dJ = Jr[i] + Jr[j] - average_with(J, r3, rule.get());
                if (dJ == 0.0) return 0.0;
                double dO = Or[i] + Or[j] - bogoliubov_omega_r(ctx, r3);
                double v = kernel(dO) * dJ * detailed_balance_factor(Fr[i], Fr[j], F(r3));
                check_finite(v, who);
                return v;
            };
            AdaptiveReport rep = adaptive_integral(g, -1.0, 1.0, 0.0, quad.epsrel, quad.limit);
            acc += w[j] * r2 * r2 * vs * vs * rep.value;
        }
        rows[i] = w[i] * r[i] * r[i] * acc;
    });
    double total = 0.0;
    for (double v : rows) total += v;
    // 4 pi for the direction of p1, 2 pi for the azimuth of p2 around it.
    return 8.0 * kPi * kPi * total / std::pow(2.0 * kPi, 6);
}

}  // namespace

double q_mollified_c(const DispersionContext& ctx, const KineticParams& par, const RadialFn& F, const VecFn& J,
                     double S, const ContinuumQuadrature& quad) {
    par.validate();
    if (!(S >= 0.0 && S <= par.T)) throw ValidationError("q_mollified_c: need 0 <= S <= T");
    const double a = (par.T - S) / (par.lambda * par.lambda);
    return reduced_integral(ctx, F, J, quad, [a](double dO) { return sinc_kernel(dO, a); }, "q_mollified_c");
}

SharpValue q_energy_conserving(const RadialProfile& vhat, const RadialFn& f, const VecFn& J,
                               const HypersurfaceQuadrature& quad) {
    quad.validate();
    std::unique_ptr<SphereRule> rule;
    if (quad.angular_nodes > 0) rule = std::make_unique<SphereRule>(sphere_rule(quad.angular_nodes));
    std::vector<double> r1, w1, r2, w2;
    gauss_legendre(quad.radial_nodes, 0.0, quad.R1, r1, w1);
    gauss_legendre(quad.inplane_nodes, 0.0, quad.R2, r2, w2);
    auto tab = [&](const std::vector<double>& r, std::vector<double>& fv, std::vector<double>& jv,
                   std::vector<double>& vv) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            fv.push_back(f(r[i]));
            jv.push_back(average_with(J, r[i], rule.get()));
            vv.push_back(vhat.at(r[i]));
            check_finite(fv.back() + jv.back() + vv.back(), "q_energy_conserving");
        }
    };
    std::vector<double> f1, j1, v1, f2, j2, v2;
    tab(r1, f1, j1, v1);
    tab(r2, f2, j2, v2);
    const std::size_t n1 = r1.size(), n2 = r2.size();
    std::vector<double> val(n1, 0.0), gain(n1, 0.0);
    parallel_for(n1, [&](std::size_t i) {
        double a = 0.0, g = 0.0;
        for (std::size_t j = 0; j < n2; ++j) {
            double vs = v1[i] + v2[j];
            // on the shell p1 . p2 = 0, so |p1 + p2|^2 = |p1|^2 + |p2|^2
            double r3 = std::sqrt(r1[i] * r1[i] + r2[j] * r2[j]);
            double f3 = f(r3);
            double j3 = average_with(J, r3, rule.get());
            double dJ = j1[i] + j2[j] - j3;
            double wgt = w2[j] * r2[j] * vs * vs;
            double b = detailed_balance_factor(f1[i], f2[j], f3);
            check_finite(b * dJ * wgt, "q_energy_conserving");
            a += wgt * dJ * b;
            g += wgt * (std::abs(j1[i]) + std::abs(j2[j]) + std::abs(j3)) * (1.0 + f1[i]) * (1.0 + f2[j]) * f3;
        }
        // dp1 / |p1| = 4 pi r1 dr1
        val[i] = w1[i] * r1[i] * a;
        gain[i] = w1[i] * r1[i] * g;
    });
    SharpValue out;
    for (std::size_t i = 0; i < n1; ++i) {
        out.value += val[i];
        out.gain_scale += gain[i];
    }
    // pi from the energy delta, 4 pi from the direction of p1, 2 pi from the in-plane angle.
    const double c = kPi * 8.0 * kPi * kPi / std::pow(2.0 * kPi, 6);
    out.value *= c;
    out.gain_scale *= c;
    return out;
}

MollifiedVsSharp q_mollified_vs_sharp(const DispersionContext& ctx, const KineticParams& par, const RadialFn& f,
                                      const VecFn& J, const ContinuumQuadrature& quad) {
    par.validate();
    const double eps = 2.0 * par.lambda * par.lambda / par.T;
    const double T = par.T;
    MollifiedVsSharp out;
    out.mollified = reduced_integral(
        ctx, f, J, quad, [eps, T](double dO) { return kPi * T * dirac_seq(eps, dO); }, "q_mollified_vs_sharp");
    HypersurfaceQuadrature hq;
    hq.radial_nodes = hq.inplane_nodes = quad.radial_nodes;
    hq.angular_nodes = quad.angular_nodes;
    hq.R1 = hq.R2 = quad.R;
    out.sharp = T * q_energy_conserving(ctx.vhat, f, J, hq).value;
    out.gap = std::abs(out.mollified - out.sharp);
    return out;
}

}  // namespace bec
