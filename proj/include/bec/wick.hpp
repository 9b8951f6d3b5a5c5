#pragma once

#include <array>
#include <vector>

#include "bec/collision.hpp"

namespace bec {

enum class Slot : unsigned char { A, H1, H2 };

struct Symbol {
    std::size_t mom = 0;  // lattice index
    bool dagger = false;
    cplx coeff = 1.0;
    Slot slot = Slot::A;
};

struct OperatorWord {
    std::vector<Symbol> symbols;
    std::size_t size() const { return symbols.size(); }
};

inline constexpr std::size_t kWickMaxLength = 12;

// Contraction of positions i < j: |Lambda| f0(p) for (a+_p, a_p), |Lambda| (1 + f0(p)) for (a_p, a+_p),
// zero for equal types or different momenta.
double pair_value(const OperatorWord& w, std::size_t i, std::size_t j, const Field& f0, const MomentumLattice& lat);

// Sum over all perfect matchings of products of pair values, times the product of symbol coefficients.
cplx wick_expectation(const OperatorWord& w, const Field& f0, const MomentumLattice& lat);

// Number of perfect matchings, either all (2n-1)!! of them or only creation/annihilation pairs.
std::size_t count_matchings(const OperatorWord& w, bool number_conserving_only);

// Coefficient of lambda^j collected separately; grades run 0..kMaxGrade.
inline constexpr int kMaxGrade = 12;
using Graded = std::array<cplx, kMaxGrade + 1>;

struct DuhamelF {
    double total = 0.0, boltzmann = 0.0, condensate = 0.0, other = 0.0;
    // graded[j]: lambda^j part of the class (lambda^2/N prefactor included); class sum = sum_j graded[j].
    Graded total_graded{}, boltzmann_graded{}, condensate_graded{}, other_graded{};
    double max_imag = 0.0;  // largest imaginary part seen among the class totals
    std::size_t word_pairs = 0;
};

struct DuhamelG {
    cplx total, boltzmann, condensate, pair_absorption, other;
    Graded boltzmann_graded{}, condensate_graded{}, pair_absorption_graded{};
    std::size_t word_pairs = 0;
};

// -(1/|Lambda|) int over Delta[T / l^2, 2] of nu0([[A, H_cub(s1)], H_cub(s2)]) for A = f[J], by word expansion.
// The HFB substitution uses u, v from hfb_coeffs; lambda is taken from par and must match ctx.
DuhamelF duhamel_f_second_order(const MomentumLattice& lat, const DispersionContext& ctx, const KineticParams& par,
                                const Field& f0, const TestFunction& J, bool classify = true);

// Same quantity through [f[J], B] = dJ(B) B, so only nu0([B, C]) is needed. Cross-check of the word expansion.
double duhamel_f_commutator_shortcut(const MomentumLattice& lat, const DispersionContext& ctx,
                                     const KineticParams& par, const Field& f0, const TestFunction& J);

DuhamelG duhamel_g_second_order(const MomentumLattice& lat, const DispersionContext& ctx, const KineticParams& par,
                                const Field& f0, const TestFunction& J);

}  // namespace bec
