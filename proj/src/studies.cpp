#include "bec/studies.hpp"

#include <algorithm>
#include <limits>

namespace bec {

RadialChi RadialChi::gaussian(double s) {
    if (!(s > 0.0)) throw ValidationError("gaussian chi: need s > 0");
    RadialChi c;
    c.name = "gaussian";
    c.f = [s](double r) { return std::exp(-r * r / (2.0 * s * s)); };
    c.support = s * std::sqrt(2.0 * std::log(1e16));
    return c;
}

RadialChi RadialChi::c2_bump(double a) {
    if (!(a > 0.0)) throw ValidationError("c2 bump: need a > 0");
    RadialChi c;
    c.name = "c2_bump";
    c.f = [a](double r) {
        if (r >= a) return 0.0;
        double u = 1.0 - r * r / (a * a);
        return u * u * u;
    };
    c.support = a;
    return c;
}

LogLogFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
        if (x[i] > 0.0 && y[i] > 0.0) {
            lx.push_back(std::log(x[i]));
            ly.push_back(std::log(y[i]));
        }
    }
    LogLogFit fit;
    const std::size_t n = lx.size();
    if (n < 2) return fit;
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    if (sxx == 0.0) return fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r2 = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
    return fit;
}

namespace {

double radial_integral(const std::function<double(double)>& f, double R, int n) {
    std::vector<double> x, w;
    gauss_legendre(n, 0.0, R, x, w);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += w[i] * x[i] * x[i] * f(x[i]);
    return 4.0 * kPi * acc / std::pow(2.0 * kPi, 3);
}

// Lattice points (2 pi / L) z inside the ball of radius R.
std::vector<Vec3> ball_points(double L, double R) {
    const double h = 2.0 * kPi / L;
    const int M = static_cast<int>(std::ceil(R / h));
    std::vector<Vec3> out;
    for (int x = -M; x <= M; ++x)
        for (int y = -M; y <= M; ++y)
            for (int z = -M; z <= M; ++z) {
                Vec3 p{h * x, h * y, h * z};
                if (norm2(p) <= R * R) out.push_back(p);
            }
    return out;
}

}  // namespace

PoissonScan poisson_error_scan(const RadialChi& chi, const std::vector<double>& L_list, int r) {
    if (L_list.empty()) throw ValidationError("poisson_error_scan: empty L list");
    PoissonScan scan;
    scan.predicted_rate = 0.5 * r;
    // reference two levels above the default 64 nodes
    const double c1 = radial_integral(chi.f, chi.support, 128);
    const double c2 = radial_integral(chi.f, chi.support, 256);
    std::vector<double> xs, ys;
    for (double L : L_list) {
        if (!(L >= 1.0)) throw ValidationError("poisson_error_scan: L must be >= 1");
        PoissonRow row;
        row.L = L;
        double acc = 0.0;
        for (const Vec3& p : ball_points(L, chi.support)) acc += chi.f(norm(p));
        row.lattice = acc / (L * L * L);
        row.continuum = c2;
        row.reference_err = std::abs(c2 - c1);
        row.error = std::abs(row.lattice - row.continuum);
        scan.rows.push_back(row);
        xs.push_back(L);
        ys.push_back(row.error);
    }
    scan.fit = loglog_fit(xs, ys);
    return scan;
}

PhaseSelector parse_phase_selector(const std::string& s) {
    if (s == "0,0" || s == "zero") return PhaseSelector::Zero;
    if (s == "F,0") return PhaseSelector::F_Zero;
    if (s == "F,-F") return PhaseSelector::F_MinusF;
    if (s == "F1,F2") return PhaseSelector::F1_F2;
    throw ValidationError("unknown phase selector '" + s + "' (expected 0,0 | F,0 | F,-F | F1,F2)");
}

std::string to_string(PhaseSelector s) {
    switch (s) {
        case PhaseSelector::Zero: return "0,0";
        case PhaseSelector::F_Zero: return "F,0";
        case PhaseSelector::F_MinusF: return "F,-F";
        case PhaseSelector::F1_F2: return "F1,F2";
    }
    return "?";
}

PairKernel PairKernel::gaussian() {
    PairKernel k;
    k.name = "gaussian";
    k.f = [](double r1, double r2, double) { return std::exp(-0.5 * (r1 * r1 + r2 * r2)); };
    k.support = std::sqrt(2.0 * std::log(1e16));
    return k;
}

namespace {

void phases(PhaseSelector sel, double O1, double O2, double O12, double& F1, double& F2) {
    double F = O1 + O2 - O12;
    switch (sel) {
        case PhaseSelector::Zero: F1 = F2 = 0.0; break;
        case PhaseSelector::F_Zero: F1 = F; F2 = 0.0; break;
        case PhaseSelector::F_MinusF: F1 = F; F2 = -F; break;
        case PhaseSelector::F1_F2: F1 = F; F2 = O1 - O2 - O12; break;
    }
}

cplx disc_continuum(const PairKernel& H, PhaseSelector sel, const DispersionContext& ctx, double T, int n) {
    const double l2 = ctx.lambda * ctx.lambda, t = T / l2;
    std::vector<double> r, w;
    gauss_legendre(n, 0.0, H.support, r, w);
    std::vector<double> Om(n);
    for (int i = 0; i < n; ++i) Om[i] = bogoliubov_omega_r(ctx, r[i]);
    std::vector<cplx> rows(n);
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
        cplx acc = 0.0;
        for (int j = 0; j < n; ++j) {
            const double r1 = r[i], r2 = r[j];
            if (H.f(r1, r2, 0.0) == 0.0 && H.f(r1, r2, 1.0) == 0.0 && H.f(r1, r2, -1.0) == 0.0) continue;
            auto val = [&](double c) {
                double r3 = std::sqrt(std::max(0.0, r1 * r1 + r2 * r2 + 2.0 * r1 * r2 * c));
                double F1 = 0.0, F2 = 0.0;
                phases(sel, Om[i], Om[j], bogoliubov_omega_r(ctx, r3), F1, F2);
                return H.f(r1, r2, c) * l2 * l2 * simplex_phase(F1, F2, t);
            };
            std::function<double(double)> re = [&](double c) { return val(c).real(); };
            std::function<double(double)> im = [&](double c) { return val(c).imag(); };
            double a = adaptive_integral(re, -1.0, 1.0, 1e-22, 1e-12, 4000).value;
            double b = sel == PhaseSelector::Zero ? 0.0 : adaptive_integral(im, -1.0, 1.0, 1e-22, 1e-12, 4000).value;
            acc += w[j] * r2 * r2 * cplx(a, b);
        }
        rows[i] = w[i] * r[i] * r[i] * acc;
    });
    cplx total = 0.0;
    for (const cplx& v : rows) total += v;
    return 8.0 * kPi * kPi * total / std::pow(2.0 * kPi, 6);
}

cplx disc_lattice(const PairKernel& H, PhaseSelector sel, const DispersionContext& ctx, double T, double L) {
    const double l2 = ctx.lambda * ctx.lambda, t = T / l2;
    std::vector<Vec3> pts = ball_points(L, H.support);
    std::vector<double> Om(pts.size()), rad(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        Om[i] = bogoliubov_omega(ctx, pts[i]);
        rad[i] = norm(pts[i]);
    }
    std::vector<cplx> rows(pts.size());
    parallel_for(pts.size(), [&](std::size_t i) {
        cplx acc = 0.0;
        for (std::size_t j = 0; j < pts.size(); ++j) {
            double c = rad[i] > 0.0 && rad[j] > 0.0 ? dot(pts[i], pts[j]) / (rad[i] * rad[j]) : 0.0;
            double h = H.f(rad[i], rad[j], c);
            if (h == 0.0) continue;
            double F1 = 0.0, F2 = 0.0;
            phases(sel, Om[i], Om[j], bogoliubov_omega(ctx, pts[i] + pts[j]), F1, F2);
            acc += h * simplex_phase(F1, F2, t);
        }
        rows[i] = acc;
    });
    cplx total = 0.0;
    for (const cplx& v : rows) total += v;
    return l2 * l2 * total / std::pow(L, 6);
}

}  // namespace

std::vector<DiscRow> oscillatory_disc_error(const PairKernel& H, PhaseSelector sel, const DispersionContext& ctx,
                                            double T, const std::vector<double>& L_list) {
    if (!(T > 0.0)) throw ValidationError("oscillatory_disc_error: T must be > 0");
    if (!(ctx.lambda > 0.0 && ctx.lambda < 1.0)) throw ValidationError("oscillatory_disc_error: lambda in (0, 1)");
    // default 32 radial nodes; the reference sits two levels above
    cplx c1 = disc_continuum(H, sel, ctx, T, 64);
    cplx c2 = disc_continuum(H, sel, ctx, T, 128);
    std::vector<DiscRow> out;
    for (double L : L_list) {
        if (!(L >= 1.0)) throw ValidationError("oscillatory_disc_error: L must be >= 1");
        DiscRow row;
        row.L = L;
        row.lattice = disc_lattice(H, sel, ctx, T, L);
        row.continuum = c2;
        row.eps = std::abs(row.lattice - c2);
        row.reference_err = std::abs(c2 - c1);
        out.push_back(row);
    }
    return out;
}

std::vector<double> default_talbot_grid() {
    std::vector<double> g;
    for (int k = 1; k <= 200; ++k) g.push_back(5.0 * k / 200.0);
    return g;
}

TalbotScan talbot_scan(const MomentumLattice& lat, const DispersionContext& ctx, const KineticParams& par,
                       const std::vector<double>& T_grid, const TestFunction& J, const Field& F) {
    par.validate();
    if (F.size() != lat.size() || J.size() != lat.size())
        throw ValidationError("talbot_scan: field sizes do not match the lattice");
    PairList pl(lat);
    DispersionTables tb(lat, ctx);
    const double l2 = par.lambda * par.lambda, vol = lat.volume();
    std::vector<double> dO(pl.size()), wt(pl.size());
    for (std::size_t k = 0; k < pl.size(); ++k) {
        std::size_t a = pl.i1[k], b = pl.i2[k], c = pl.i12[k];
        dO[k] = tb.Omega[a] + tb.Omega[b] - tb.Omega[c];
        double vs = tb.vhat[a] + tb.vhat[b];
        wt[k] = vs * vs * (J[a] + J[b] - J[c]) * detailed_balance_factor(F[a], F[b], F[c]) / (vol * vol);
    }
    TalbotScan scan;
    scan.rows.resize(T_grid.size());
    parallel_for(T_grid.size(), [&](std::size_t i) {
        const double T = T_grid[i];
        if (!(T >= 0.0)) throw ValidationError("talbot_scan: T must be >= 0");
        TalbotRow row;
        row.T = T;
        if (T > 0.0) {
            KineticParams p = par;
            p.T = T;
            row.q_moll_scaled = l2 * q_mollified_d_time_integral(lat, ctx, p, F, J);
            double acc = 0.0;
            for (std::size_t k = 0; k < pl.size(); ++k) {
                double x = T * dO[k] / (2.0 * l2);
                double s = std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
                acc += s * s * wt[k];
            }
            row.sin2_sum = T / l2 * acc;
        }
        scan.rows[i] = row;
    });
    double mx = 0.0, mn = std::numeric_limits<double>::infinity();
    for (const auto& r : scan.rows) {
        mx = std::max(mx, std::abs(r.sin2_sum));
        mn = std::min(mn, std::abs(r.sin2_sum));
    }
    scan.max_over_min = mn > 0.0 ? mx / mn : std::numeric_limits<double>::infinity();
    return scan;
}

}  // namespace bec
