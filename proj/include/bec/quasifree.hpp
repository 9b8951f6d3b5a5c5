#pragma once

#include <cstdint>
#include <vector>

#include "bec/lattice.hpp"

namespace bec {

// K(p) = beta (E(p) - mu) by default, or any callable with K >= kappa0 > 0 on the lattice.
class GeneratorK {
public:
    GeneratorK(double beta, double mu, const MomentumLattice& lat);
    GeneratorK(std::function<double(const Vec3&)> K, double kappa0, const MomentumLattice& lat);

    double operator()(const Vec3& p) const { return K_(p); }
    double kappa0() const { return kappa0_; }
    double beta() const { return beta_; }
    double mu() const { return mu_; }
    bool thermal() const { return thermal_; }

private:
    void check_floor(const MomentumLattice& lat) const;
    std::function<double(const Vec3&)> K_;
    double kappa0_ = 0.0;
    double beta_ = 0.0, mu_ = 0.0;
    bool thermal_ = false;
};

double bose_density(const GeneratorK& K, const Vec3& p);
// 1 / (e^K - 1) for a raw exponent, with the floor check.
double bose_from_exponent(double K, double kappa0);
Field bose_field(const GeneratorK& K, const MomentumLattice& lat);

// Integer coefficients of P_n(f): P_1 = f, P_{n+1} = f (1 + f) P_n'(f). Entry k is the f^k coefficient.
const std::vector<std::vector<std::int64_t>>& cumulant_polynomials();
inline constexpr int kCumulantMax = 16;
inline constexpr int kMomentMax = 16;

double cumulant(const GeneratorK& K, const MomentumLattice& lat, int n);
double number_moment(const GeneratorK& K, const MomentumLattice& lat, int ell);

}  // namespace bec
