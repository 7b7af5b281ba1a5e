#pragma once

// Test-only reference implementations. These stay deliberately naive and
// independent of the library's compute paths: dense matrices instead of
// matrix-free application, triple-loop partial traces instead of grouped
// accumulation, a permanent instead of backtracking enumeration.

#include <bit>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "ladderent/hilbert.hpp"
#include "ladderent/lattice.hpp"
#include "ladderent/spectral.hpp"

namespace oracles {

using ladderent::Complex;

/// Dense H on the full 2^n space, built bond by bond from Pauli blocks.
inline Eigen::MatrixXd dense_hamiltonian(const ladderent::HamiltonianSpec& spec) {
    const int n = spec.geometry.n_sites();
    const Eigen::Index dim = Eigen::Index{1} << n;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    const double jz = spec.coupling_j * 0.25 * spec.delta;
    const double jf = spec.coupling_j * 0.5;
    for (Eigen::Index p = 0; p < dim; ++p)
        for (const auto& [a, b] : spec.geometry.bonds) {
            bool anti = ((p >> a) ^ (p >> b)) & 1;
            h(p, p) += anti ? -jz : jz;
            if (anti) h(p ^ ((Eigen::Index{1} << a) | (Eigen::Index{1} << b)), p) += jf;
        }
    return h;
}

inline double dense_ground_energy(const ladderent::HamiltonianSpec& spec) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense_hamiltonian(spec),
                                                      Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

/// Brute-force partial trace of |psi><psi| onto `sites` via explicit index
/// composition.
inline Eigen::MatrixXcd brute_partial_trace(const ladderent::StateVector& state,
                                            const std::vector<int>& sites) {
    const int n = state.n_qubits();
    const auto full = state.to_full().amplitudes();
    const int k = static_cast<int>(sites.size());
    std::vector<int> rest;
    {
        std::vector<bool> used(n, false);
        for (int s : sites) used[s] = true;
        for (int s = 0; s < n; ++s)
            if (!used[s]) rest.push_back(s);
    }
    auto compose = [&](uint64_t a, uint64_t r) {
        uint64_t idx = 0;
        for (int j = 0; j < k; ++j) idx |= ((a >> j) & 1) << sites[j];
        for (std::size_t j = 0; j < rest.size(); ++j) idx |= ((r >> j) & 1) << rest[j];
        return idx;
    };
    const Eigen::Index dim = Eigen::Index{1} << k;
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
    for (Eigen::Index a = 0; a < dim; ++a)
        for (Eigen::Index b = 0; b < dim; ++b) {
            Complex acc{0.0, 0.0};
            for (uint64_t r = 0; r < (uint64_t{1} << rest.size()); ++r)
                acc += full[compose(a, r)] * std::conj(full[compose(b, r)]);
            rho(a, b) = acc;
        }
    return rho;
}

/// Number of perfect matchings of a bipartite graph = permanent of its
/// biadjacency matrix (Ryser's formula).
inline std::size_t matching_count_by_permanent(const ladderent::LadderGeometry& g) {
    std::vector<int> a_sites, b_sites;
    for (int s = 0; s < g.n_sites(); ++s)
        (ladderent::sublattice_of(g, s) == ladderent::Sublattice::A ? a_sites : b_sites)
            .push_back(s);
    if (a_sites.size() != b_sites.size()) return 0;
    const int m = static_cast<int>(a_sites.size());
    std::vector<std::vector<double>> adj(m, std::vector<double>(m, 0.0));
    for (const auto& [i, j] : g.bonds) {
        int ai = -1, bj = -1;
        for (int t = 0; t < m; ++t) {
            if (a_sites[t] == i || a_sites[t] == j) ai = t;
            if (b_sites[t] == i || b_sites[t] == j) bj = t;
        }
        if (ai >= 0 && bj >= 0) adj[ai][bj] = 1.0;
    }
    double perm = 0.0;
    for (uint64_t s = 1; s < (uint64_t{1} << m); ++s) {
        double prod = 1.0;
        for (int r = 0; r < m; ++r) {
            double rowsum = 0.0;
            for (int c = 0; c < m; ++c)
                if ((s >> c) & 1) rowsum += adj[r][c];
            prod *= rowsum;
        }
        int parity = (m - std::popcount(s)) & 1;
        perm += parity ? -prod : prod;
    }
    return static_cast<std::size_t>(std::llround(perm));
}

inline ladderent::StateVector random_full_state(int n, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    std::vector<Complex> amps(std::size_t{1} << n);
    for (auto& a : amps) a = Complex(dist(rng), dist(rng));
    auto state = ladderent::StateVector::from_full_amplitudes(n, std::move(amps));
    state.normalize();
    return state;
}

inline ladderent::StateVector random_sector_state(int n, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    auto state = ladderent::StateVector::zero_sector(n, n / 2);
    for (auto& a : state.amplitudes()) a = Complex(dist(rng), dist(rng));
    state.normalize();
    return state;
}

/// Applies a single-qubit unitary on `site` of a full-layout state.
inline ladderent::StateVector apply_local_unitary(const ladderent::StateVector& state, int site,
                                                  const Eigen::Matrix2cd& u) {
    auto out = state.to_full();
    auto& amps = out.amplitudes();
    const uint64_t bit = uint64_t{1} << site;
    for (uint64_t idx = 0; idx < amps.size(); ++idx) {
        if (idx & bit) continue;
        Complex a0 = amps[idx], a1 = amps[idx | bit];
        amps[idx] = u(0, 0) * a0 + u(0, 1) * a1;
        amps[idx | bit] = u(1, 0) * a0 + u(1, 1) * a1;
    }
    return out;
}

inline Eigen::Matrix2cd random_unitary(uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    Eigen::Matrix2cd m;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) m(i, j) = Complex(dist(rng), dist(rng));
    Eigen::HouseholderQR<Eigen::Matrix2cd> qr(m);
    Eigen::Matrix2cd q = qr.householderQ();
    return q;
}

/// <S^2_total> of a normalized state: 3n/4 plus twice the sum of all pair
/// couplings, evaluated through a complete-graph Heisenberg expectation.
inline double total_spin_squared(const ladderent::StateVector& state) {
    const int n = state.n_qubits();
    ladderent::LadderGeometry complete;
    complete.legs = n;
    complete.rungs = 1;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) complete.bonds.emplace_back(i, j);
    ladderent::HamiltonianSpec spec{complete, 1.0, 1.0};
    return 0.75 * n + 2.0 * ladderent::energy_expectation(spec, state);
}

}  // namespace oracles
