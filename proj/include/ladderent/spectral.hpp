#pragma once

#include <cstdint>

#include "ladderent/hilbert.hpp"
#include "ladderent/lattice.hpp"

namespace ladderent {

/// H = (J/4) sum_bonds [ sigma^x sigma^x + sigma^y sigma^y + delta sigma^z sigma^z ].
/// delta = 1 is the isotropic Heisenberg point; J > 0 is antiferromagnetic.
struct HamiltonianSpec {
    LadderGeometry geometry;
    double coupling_j = 1.0;
    double delta = 1.0;
};

/// Start-vector seed is a documented constant so runs reproduce bit-for-bit.
inline constexpr uint64_t kLanczosDefaultSeed = 20260810ull;

struct LanczosOptions {
    double tol = 1e-10;     // Ritz-value change threshold
    int max_iter = 500;     // total matvec budget across restarts
    uint64_t seed = kLanczosDefaultSeed;
    int max_basis = 0;      // 0 = pick from the problem dimension
};

struct GroundStateResult {
    double energy = 0.0;  // units of J
    StateVector state;
    int iterations = 0;
    double residual = 0.0;
    bool degeneracy_warning = false;
};

/// H|psi> without materializing H. Works on both full and sector layouts;
/// sector states map into the same sector (total Sz is conserved bond by bond).
StateVector apply_hamiltonian(const HamiltonianSpec& spec, const StateVector& state);

/// Lowest eigenpair by Lanczos with full reorthogonalization, restarting from
/// the current Ritz vector if the basis cap is hit. Even n works in the
/// Sz = 0 sector, odd n in the n_down = (n-1)/2 sector.
GroundStateResult ground_state(const HamiltonianSpec& spec, const LanczosOptions& opts = {});

/// Rayleigh quotient <psi|H|psi> / <psi|psi>.
double energy_expectation(const HamiltonianSpec& spec, const StateVector& state);

}  // namespace ladderent
