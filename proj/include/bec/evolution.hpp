#pragma once

#include <map>
#include <string>
#include <vector>

#include "bec/collision.hpp"

namespace bec {

struct Snapshot {
    double S = 0.0;
    Field F;
};

struct EvolutionState {
    double T = 0.0;
    cplx Psi = 0.0;
    Field F;
    std::map<std::string, cplx> Gweak;
    std::vector<Snapshot> snapshots;  // uniform S-grid on [0, T]
    std::vector<cplx> Psi_path;       // Psi at every snapshot time
};

struct EvolutionOptions {
    int picard_depth = 2;
    bool with_subleading = false;
    void validate() const;
};

// Psi_T = -(i / (N^{1/2} l)) int_0^T lattice_sum(vhat F_S) dS, F_S linear between snapshots.
cplx evolve_psi(const MomentumLattice& lat, const DispersionContext& ctx, const KineticParams& par,
                const std::vector<Snapshot>& snapshots);

// Picard iteration of the weak equation with J_q = |Lambda| 1_q. Iterate 0 is F_S = f0.
// F_S is linear in S between grid nodes; its occupation brackets are interpolated the same way and the
// oscillating time weights are integrated exactly against those hat functions.
EvolutionState evolve_F(const MomentumLattice& lat, const DispersionContext& ctx, const KineticParams& par,
                        const Field& f0, const EvolutionOptions& opt);

// G_T[J] = (1 / N) sum over the term list, each term integrated over macroscopic time
// (single integral for the quartic channel, (1 / l^2) times the ordered double integral otherwise).
cplx evolve_G(const MomentumLattice& lat, const DispersionContext& ctx, const KineticParams& par, const Field& F,
              const std::vector<GTermSpec>& termlist, const TestFunction& J);

}  // namespace bec
