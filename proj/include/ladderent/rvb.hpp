#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ladderent/hilbert.hpp"
#include "ladderent/lattice.hpp"

namespace ladderent {

/// A perfect matching of the ladder bond graph. Pairs are oriented from
/// sublattice A to sublattice B, which fixes the sign of every singlet and
/// makes the summed state unique.
struct DimerCovering {
    std::vector<std::pair<int, int>> pairs;  // (a in A, b in B)
};

enum class RvbConstruction { Enumeration, Recursion };

struct RvbState {
    LadderGeometry geometry;
    StateVector state;  // normalized, Sz = 0 sector
    std::size_t covering_count = 0;
    double norm_sq = 0.0;  // <psi|psi> of the raw equal-weight covering sum
    RvbConstruction construction = RvbConstruction::Enumeration;
};

/// All perfect matchings, in lexicographic order of the pair list (each pair
/// keyed by its lower site index). Requires an even site count and a bipartite
/// bond graph; a graph with no matching yields an empty list.
std::vector<DimerCovering> enumerate_dimer_coverings(const LadderGeometry& geometry);

/// Equal-weight superposition of singlet products over all coverings.
RvbState build_rvb_enumerated(const LadderGeometry& geometry);

/// Same state built by growing the ladder rung by rung. The growth tracks,
/// for every boundary between consecutive rungs, which legs carry a singlet
/// across it; keeping all crossing patterns makes the recursion reproduce the
/// enumerated state exactly for every leg count. With at most the empty and
/// fully-crossed patterns retained this reduces to the familiar two-term
/// rung-pair recursion, which is exact for ladders of one or two legs.
RvbState build_rvb_recursive(const LadderGeometry& geometry);
RvbState build_rvb_recursive_open(int rungs, int legs);
RvbState build_rvb_recursive_periodic(int rungs, int legs);

/// Cached single- and double-rung edge objects for the recursion identities.
/// two_bar is the connected remainder of the two-rung state after removing
/// the decomposable coverings. Shifting a rung by one swaps every dimer's
/// sublattice ends, so the removed product carries a sign (-1)^(L/2) relative
/// to a naive same-orientation product on even-leg ladders; two_bar uses the
/// placement-consistent orientation throughout.
struct RecursionCache {
    int legs = 0;
    Eigen::VectorXd one;      // single-rung covering state (2^L); zero for odd L
    Eigen::VectorXd two;      // two-rung state, index = rung0 | rung1 << L
    Eigen::VectorXd two_bar;  // connected part of two
    Eigen::MatrixXd edge_map;  // two_bar as a map: (a, b) -> amplitude at rung pair (a, b)
    Eigen::MatrixXd two_map;   // same layout for |2>
    double n1 = 0.0, n2 = 0.0, n2_bar = 0.0;
    // Independent family spanning the rung vectors reachable from |1> under
    // contraction with two_bar; rank-revealing orthogonalization.
    std::vector<Eigen::VectorXd> edge_basis;
    Eigen::MatrixXd edge_basis_map;  // least-squares action of the contraction on the family
    double edge_basis_residual = 0.0;
    std::vector<double> gamma1;  // cross-term weights of the family against two_bar |1>
};

RecursionCache build_recursion_cache(int legs);

/// Open-ladder norms <M|M> of the raw covering sums, for M = 1..m_max.
/// Computed by a boundary-crossing transfer recursion, never by enumeration;
/// entries where no covering exists (odd-leg, odd-rung) are zero.
struct NormSequence {
    int legs = 0;
    std::vector<double> values;  // values[m-1] = N_m
};

NormSequence norm_recursion(int legs, int m_max);

/// Reduced density matrix of the last two rungs of the recursed RVB state,
/// normalized to unit trace.
ReducedState block_rdm_2xL(int legs, int rungs, BoundaryMode boundary);

/// Number of dimer coverings, via the same transfer recursion (no state built).
std::size_t count_dimer_coverings(const LadderGeometry& geometry);

std::string coverings_to_json(const std::vector<DimerCovering>& coverings);

}  // namespace ladderent
