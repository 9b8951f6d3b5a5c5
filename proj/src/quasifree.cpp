#include "bec/quasifree.hpp"

#include <sstream>

namespace bec {

GeneratorK::GeneratorK(double beta, double mu, const MomentumLattice& lat)
    : kappa0_(-beta * mu), beta_(beta), mu_(mu), thermal_(true) {
    if (!(beta > 0.0)) throw ValidationError("GeneratorK: beta must be > 0");
    if (!(mu < 0.0)) throw ValidationError("GeneratorK: mu must be < 0 (floor kappa0 = -beta mu fails at p = 0)");
    K_ = [beta, mu](const Vec3& p) { return beta * (free_energy(p) - mu); };
    check_floor(lat);
}

GeneratorK::GeneratorK(std::function<double(const Vec3&)> K, double kappa0, const MomentumLattice& lat)
    : K_(std::move(K)), kappa0_(kappa0) {
    if (!(kappa0 > 0.0)) throw ValidationError("GeneratorK: kappa0 must be > 0");
    check_floor(lat);
}

void GeneratorK::check_floor(const MomentumLattice& lat) const {
    for (std::size_t i = 0; i < lat.size(); ++i) {
        double k = K_(lat.point(i));
        if (!(k >= kappa0_)) {
            std::ostringstream os;
            os << "GeneratorK: floor violated, K = " << k << " < kappa0 = " << kappa0_ << " at lattice index " << i;
            throw ValidationError(os.str());
        }
    }
}

double bose_from_exponent(double K, double kappa0) {
    if (!(K >= kappa0) || !(kappa0 > 0.0)) throw ValidationError("bose_density: K below the floor kappa0");
    return 1.0 / std::expm1(K);
}

double bose_density(const GeneratorK& K, const Vec3& p) { return bose_from_exponent(K(p), K.kappa0()); }

Field bose_field(const GeneratorK& K, const MomentumLattice& lat) {
    Field f(lat.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = bose_density(K, lat.point(i));
    return f;
}

const std::vector<std::vector<std::int64_t>>& cumulant_polynomials() {
    static const std::vector<std::vector<std::int64_t>> table = [] {
        std::vector<std::vector<std::int64_t>> P(kCumulantMax + 1);
        P[1] = {0, 1};
        for (int n = 1; n < kCumulantMax; ++n) {
            const auto& p = P[n];
            // derivative
            std::vector<std::int64_t> d(p.size() > 1 ? p.size() - 1 : 1, 0);
            for (std::size_t k = 1; k < p.size(); ++k) d[k - 1] = static_cast<std::int64_t>(k) * p[k];
            // times (f + f^2)
            std::vector<std::int64_t> q(d.size() + 2, 0);
            for (std::size_t k = 0; k < d.size(); ++k) {
                q[k + 1] += d[k];
                q[k + 2] += d[k];
            }
            P[n + 1] = q;
        }
        return P;
    }();
    return table;
}

double cumulant(const GeneratorK& K, const MomentumLattice& lat, int n) {
    if (n < 1 || n > kCumulantMax) throw ValidationError("cumulant: n must lie in [1, 16]");
    const auto& P = cumulant_polynomials()[n];
    Field f0 = bose_field(K, lat);
    std::vector<double> vals(f0.size());
    for (std::size_t i = 0; i < f0.size(); ++i) {
        double f = f0[i], acc = 0.0;
        for (std::size_t k = P.size(); k-- > 0;) acc = acc * f + static_cast<double>(P[k]);
        vals[i] = acc;
    }
    return lattice_sum(lat, vals);
}

namespace {

// Sum over r in R(ell) of prod (1/r_n!) (c_n / n!)^{r_n}, recursing on the part size.
double partition_sum(int remaining, int maxpart, const std::vector<double>& c) {
    if (remaining == 0) return 1.0;
    double total = 0.0;
    for (int n = std::min(remaining, maxpart); n >= 1; --n) {
        double term = c[n];
        double acc = 0.0;
        double inv_fact_r = 1.0;
        double pw = 1.0;
        for (int r = 1; r * n <= remaining; ++r) {
            pw *= term;
            inv_fact_r /= r;
            acc += inv_fact_r * pw * partition_sum(remaining - r * n, n - 1, c);
        }
        total += acc;
    }
    return total;
}

}  // namespace

double number_moment(const GeneratorK& K, const MomentumLattice& lat, int ell) {
    if (ell < 1 || ell > kMomentMax) throw ValidationError("number_moment: ell must lie in [1, 16]");
    std::vector<double> c(ell + 1, 0.0);
    double fact = 1.0;
    for (int n = 1; n <= ell; ++n) {
        fact *= n;
        c[n] = lat.volume() * cumulant(K, lat, n) / fact;
    }
    double ellfact = 1.0;
    for (int k = 2; k <= ell; ++k) ellfact *= k;
    return ellfact * partition_sum(ell, ell, c);
}

}  // namespace bec
