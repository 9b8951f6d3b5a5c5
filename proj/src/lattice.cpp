#include "bec/lattice.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <algorithm>
#include <memory>

namespace bec {

MomentumLattice::MomentumLattice(double L_, int M_) : L(L_), M(M_) {
    if (!(L_ >= 1.0)) throw ValidationError("lattice: box length L must be >= 1");
    if (M_ < 0) throw ValidationError("lattice: cutoff M must be >= 0");
}

std::array<int, 3> MomentumLattice::z(std::size_t idx) const {
    int n = side();
    int iz = static_cast<int>(idx % n);
    int iy = static_cast<int>((idx / n) % n);
    int ix = static_cast<int>(idx / (static_cast<std::size_t>(n) * n));
    return {ix - M, iy - M, iz - M};
}

Vec3 MomentumLattice::point(std::size_t idx) const {
    auto zz = z(idx);
    double h = spacing();
    return {h * zz[0], h * zz[1], h * zz[2]};
}

long MomentumLattice::index(int zx, int zy, int zz) const {
    if (std::abs(zx) > M || std::abs(zy) > M || std::abs(zz) > M) return -1;
    long n = side();
    return ((zx + M) * n + (zy + M)) * n + (zz + M);
}

long MomentumLattice::add(std::size_t i, std::size_t j) const {
    auto a = z(i);
    auto b = z(j);
    return index(a[0] + b[0], a[1] + b[1], a[2] + b[2]);
}

Field sample(const MomentumLattice& lat, const std::function<double(const Vec3&)>& f) {
    Field out(lat.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(lat.point(i));
    return out;
}

double lattice_sum(const MomentumLattice& lat, const std::vector<double>& f) {
    double s = 0.0;
    for (double v : f) s += v;
    return s / lat.volume();
}

cplx lattice_sum(const MomentumLattice& lat, const std::vector<cplx>& f) {
    cplx s = 0.0;
    for (const cplx& v : f) s += v;
    return s / lat.volume();
}

double norm_1cap_infty(const MomentumLattice& lat, const std::vector<double>& f, bool weighted) {
    double l1 = 0.0, linf = 0.0;
    const std::size_t zero = lat.index_of_zero();
    for (std::size_t i = 0; i < f.size(); ++i) {
        double v = f[i];
        if (weighted && i != zero) v *= 1.0 + 1.0 / norm2(lat.point(i));
        l1 += std::abs(v);
        linf = std::max(linf, std::abs(v));
    }
    return l1 / lat.volume() + linf;
}

void gauss_legendre(int n, double a, double b, std::vector<double>& x, std::vector<double>& w) {
    if (n < 1) throw ValidationError("gauss_legendre: need at least one node");
    // Golub-Welsch. The glfixed tables are exact only for tabulated orders; orders such as 50, 60
    // or 200 come out 1e-12..1e-10 off.
    std::unique_ptr<gsl_integration_fixed_workspace, decltype(&gsl_integration_fixed_free)> tab(
        gsl_integration_fixed_alloc(gsl_integration_fixed_legendre, static_cast<std::size_t>(n), -1.0, 1.0, 0.0, 0.0),
        &gsl_integration_fixed_free);
    if (!tab) throw NumericalGuard("gauss_legendre: rule construction failed");
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    // Reference nodes on [-1, 1], mirrored so that t_k = -t_{n-1-k} exactly.
    const double* tn = gsl_integration_fixed_nodes(tab.get());
    const double* tw = gsl_integration_fixed_weights(tab.get());
    std::vector<double> t(tn, tn + n), wt(tw, tw + n);
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int p, int q) { return t[p] < t[q]; });
    std::vector<double> ts(n), ws(n);
    for (int i = 0; i < n; ++i) {
        ts[i] = t[order[i]];
        ws[i] = wt[order[i]];
    }
    for (int i = 0; i < n / 2; ++i) {
        double tt = 0.5 * (ts[n - 1 - i] - ts[i]);
        double ww = 0.5 * (ws[n - 1 - i] + ws[i]);
        ts[i] = -tt;
        ts[n - 1 - i] = tt;
        ws[i] = ws[n - 1 - i] = ww;
    }
    if (n % 2 == 1) ts[n / 2] = 0.0;
    double c = 0.5 * (a + b), h = 0.5 * (b - a);
    for (int i = 0; i < n; ++i) {
        x[i] = c + h * ts[i];
        w[i] = h * ws[i];
    }
}

QuadratureReport continuum_integral(const std::function<double(const Vec3&)>& f, double R, int nodes_per_axis) {
    std::vector<double> x, w;
    gauss_legendre(nodes_per_axis, -R, R, x, w);
    double acc = 0.0;
    const double R2 = R * R;
    for (int i = 0; i < nodes_per_axis; ++i) {
        for (int j = 0; j < nodes_per_axis; ++j) {
            double row = 0.0;
            for (int k = 0; k < nodes_per_axis; ++k) {
                Vec3 p{x[i], x[j], x[k]};
                if (norm2(p) > R2) continue;
                double v = f(p);
                if (!std::isfinite(v)) throw NumericalGuard("continuum_integral: non-finite integrand at a node");
                row += w[k] * v;
            }
            acc += w[i] * w[j] * row;
        }
    }
    QuadratureReport rep;
    rep.value = acc / std::pow(2.0 * kPi, 3);
    rep.nodes = static_cast<std::size_t>(nodes_per_axis) * nodes_per_axis * nodes_per_axis;
    return rep;
}

namespace {
double gsl_thunk(double x, void* params) { return (*static_cast<const std::function<double(double)>*>(params))(x); }

struct GslOff {
    GslOff() { gsl_set_error_handler_off(); }
};
const GslOff gsl_off;
}  // namespace

AdaptiveReport adaptive_integral(const std::function<double(double)>& f, double a, double b, double epsabs,
                                 double epsrel, std::size_t limit) {
    std::unique_ptr<gsl_integration_workspace, decltype(&gsl_integration_workspace_free)> ws(
        gsl_integration_workspace_alloc(limit), &gsl_integration_workspace_free);
    gsl_function gf;
    gf.function = &gsl_thunk;
    gf.params = const_cast<std::function<double(double)>*>(&f);
    AdaptiveReport rep;
    int st = gsl_integration_qag(&gf, a, b, epsabs, epsrel, limit, GSL_INTEG_GAUSS61, ws.get(), &rep.value, &rep.abserr);
    if (!std::isfinite(rep.value)) throw NumericalGuard("adaptive_integral: non-finite integrand");
    if (st != 0 && st != GSL_EROUND) throw NumericalGuard(std::string("adaptive_integral: ") + gsl_strerror(st));
    return rep;
}

double default_cutoff_radius(double sigma, double beta) {
    return std::max(8.0 * sigma, 8.0 / std::sqrt(beta));
}

double norm_mc(const RadialProfile& f, int m, double R) {
    if (m < 0 || m > 2) throw ValidationError("norm_mc: only m <= 2 is supported");
    if (!(R > 0.0)) throw ValidationError("norm_mc: need R > 0");
    if ((m >= 1 && !f.d1) || (m >= 2 && !f.d2)) throw ValidationError("norm_mc: profile lacks derivative callbacks");
    // |D^k f| for radial f: |f|, |f'|, and the Hessian norm sqrt(f''^2 + 2 (f'/r)^2)
    auto Dk = [&f](int k, double r) {
        if (k == 0) return std::fabs(f.at(r));
        if (k == 1) return std::fabs(f.d1(r));
        double a = f.d2(r), b = f.d1(r) / r;
        return std::sqrt(a * a + 2.0 * b * b);
    };
    double total = 0.0;
    for (int n = 0; n <= m; ++n) {
        auto g = [&](double r) {
            if (r == 0.0) return 0.0;
            return 4.0 * kPi * r * r * std::pow(std::sqrt(1.0 + r * r), n) * Dk(m - n, r);
        };
        total += adaptive_integral(g, 0.0, R, 0.0, 1e-11).value;
    }
    return total;
}

DispersionTables::DispersionTables(const MomentumLattice& lat, const DispersionContext& ctx) {
    std::size_t n = lat.size();
    E.resize(n);
    vhat.resize(n);
    Omega.resize(n);
    V1sq.resize(n);
    V2.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        Vec3 p = lat.point(i);
        E[i] = free_energy(p);
        vhat[i] = ctx.vhat(p);
        Omega[i] = omega_from(E[i], ctx.lambda * vhat[i]);
        v_coeffs(E[i], vhat[i], ctx.lambda, V1sq[i], V2[i]);
    }
}

}  // namespace bec
