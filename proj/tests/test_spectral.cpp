#include "doctest.h"

#include <cmath>

#include "ladderent/bits.hpp"
#include "ladderent/errors.hpp"
#include "ladderent/spectral.hpp"
#include "ladderent/tolerances.hpp"
#include "oracles.hpp"

using namespace ladderent;

namespace {

HamiltonianSpec spec_of(int legs, int rungs, BoundaryMode boundary, double j = 1.0,
                        double delta = 1.0) {
    return {build_ladder(legs, rungs, boundary), j, delta};
}

}  // namespace

TEST_CASE("two-site eigenstates of the bond term") {
    auto spec = spec_of(1, 2, BoundaryMode::Open);
    std::vector<Complex> amps(4, Complex{0.0, 0.0});
    amps[0b10] = Complex(M_SQRT1_2, 0.0);
    amps[0b01] = Complex(-M_SQRT1_2, 0.0);
    auto singlet = StateVector::from_full_amplitudes(2, std::move(amps), true);
    auto h_singlet = apply_hamiltonian(spec, singlet);
    for (std::size_t i = 0; i < 4; ++i)
        CHECK(std::abs(h_singlet.amplitudes()[i] - (-0.75) * singlet.amplitudes()[i]) < 1e-14);

    std::vector<Complex> tri(4, Complex{0.0, 0.0});
    tri[0b10] = tri[0b01] = Complex(M_SQRT1_2, 0.0);
    auto triplet = StateVector::from_full_amplitudes(2, std::move(tri), true);
    auto h_triplet = apply_hamiltonian(spec, triplet);
    for (std::size_t i = 0; i < 4; ++i)
        CHECK(std::abs(h_triplet.amplitudes()[i] - 0.25 * triplet.amplitudes()[i]) < 1e-14);
}

TEST_CASE("matrix-free application matches the dense oracle") {
    for (auto [legs, rungs, boundary] :
         {std::tuple{1, 4, BoundaryMode::PeriodicAlongLegs}, std::tuple{2, 3, BoundaryMode::Open},
          std::tuple{3, 4, BoundaryMode::Open}, std::tuple{2, 5, BoundaryMode::PeriodicAlongLegs}}) {
        for (double delta : {1.0, 1.37}) {
            auto spec = spec_of(legs, rungs, boundary, 1.0, delta);
            const int n = spec.geometry.n_sites();
            auto state = oracles::random_full_state(n, 1000 + n);
            auto got = apply_hamiltonian(spec, state);
            auto h = oracles::dense_hamiltonian(spec);
            Eigen::Map<const Eigen::VectorXcd> v(state.amplitudes().data(), h.rows());
            Eigen::VectorXcd want = h * v;
            double diff = 0.0;
            for (Eigen::Index i = 0; i < want.size(); ++i)
                diff = std::max(diff, std::abs(got.amplitudes()[i] - want[i]));
            CHECK(diff < 1e-12);
        }
    }
}

TEST_CASE("sector application preserves the sector and matches the full path") {
    auto spec = spec_of(2, 3, BoundaryMode::Open);
    auto state = oracles::random_sector_state(6, 7);
    auto got = apply_hamiltonian(spec, state);
    CHECK(got.layout() == StateLayout::SzSector);
    auto want = apply_hamiltonian(spec, state.to_full());
    for (std::size_t i = 0; i < got.size(); ++i) {
        uint64_t pattern = got.basis()[i];
        CHECK(std::abs(got.amplitudes()[i] - want.amplitudes()[pattern]) < 1e-12);
    }
    // anything outside the sector stays zero
    for (uint64_t p = 0; p < want.amplitudes().size(); ++p)
        if (std::popcount(p) != 3) CHECK(std::abs(want.amplitudes()[p]) < 1e-12);
}

TEST_CASE("ground state anchors") {
    CHECK(ground_state(spec_of(1, 2, BoundaryMode::Open)).energy ==
          doctest::Approx(-0.75).epsilon(1e-12));
    CHECK(ground_state(spec_of(1, 4, BoundaryMode::PeriodicAlongLegs)).energy ==
          doctest::Approx(-2.0).epsilon(1e-10));
    CHECK(ground_state(spec_of(2, 2, BoundaryMode::Open)).energy ==
          doctest::Approx(-2.0).epsilon(1e-10));
}

TEST_CASE("lanczos matches dense diagonalization on small ladders") {
    for (auto [legs, rungs, boundary] :
         {std::tuple{1, 6, BoundaryMode::Open}, std::tuple{2, 4, BoundaryMode::Open},
          std::tuple{1, 5, BoundaryMode::PeriodicAlongLegs},
          std::tuple{3, 3, BoundaryMode::PeriodicAlongLegs}}) {
        for (double delta : {1.0, 1.2, 1.4}) {
            auto spec = spec_of(legs, rungs, boundary, 1.0, delta);
            auto result = ground_state(spec);
            CHECK(result.energy ==
                  doctest::Approx(oracles::dense_ground_energy(spec)).epsilon(1e-10));
            CHECK(result.residual <= tol::kResidualFactor * (std::abs(result.energy) + 1.0) * 10);
            CHECK(result.state.is_normalized());
        }
    }
}

TEST_CASE("variational bound against random sector states") {
    auto spec = spec_of(2, 4, BoundaryMode::PeriodicAlongLegs);
    auto gs = ground_state(spec);
    for (uint64_t seed = 0; seed < 50; ++seed) {
        auto probe = oracles::random_sector_state(8, 9000 + seed);
        CHECK(gs.energy <= energy_expectation(spec, probe) + 1e-10);
    }
}

TEST_CASE("rayleigh quotient of the ground state reproduces its energy") {
    auto spec = spec_of(3, 4, BoundaryMode::Open);
    auto gs = ground_state(spec);
    CHECK(energy_expectation(spec, gs.state) == doctest::Approx(gs.energy).epsilon(1e-10));
}

TEST_CASE("global spin flip leaves the spectrum alone") {
    auto spec = spec_of(2, 4, BoundaryMode::Open);
    auto state = oracles::random_sector_state(8, 3);
    auto h_state = apply_hamiltonian(spec, state);
    // flip: pattern -> complement; the Sz=0 sector maps onto itself
    auto flipped = StateVector::zero_sector(8, 4);
    const auto& basis = state.basis();
    const uint64_t all = (uint64_t{1} << 8) - 1;
    for (std::size_t i = 0; i < basis.size(); ++i)
        flipped.amplitudes()[bits::pattern_rank(basis[i] ^ all)] = state.amplitudes()[i];
    auto h_flipped = apply_hamiltonian(spec, flipped);
    for (std::size_t i = 0; i < basis.size(); ++i)
        CHECK(std::abs(h_flipped.amplitudes()[bits::pattern_rank(basis[i] ^ all)] -
                       h_state.amplitudes()[i]) < 1e-12);
}

TEST_CASE("identical options give identical states") {
    auto spec = spec_of(2, 4, BoundaryMode::Open);
    auto a = ground_state(spec);
    auto b = ground_state(spec);
    REQUIRE(a.state.size() == b.state.size());
    for (std::size_t i = 0; i < a.state.size(); ++i)
        CHECK(a.state.amplitudes()[i] == b.state.amplitudes()[i]);  // bitwise
}

TEST_CASE("restart path still converges") {
    LanczosOptions opts;
    opts.max_basis = 6;  // force several restarts
    auto spec = spec_of(2, 4, BoundaryMode::PeriodicAlongLegs);
    auto gs = ground_state(spec, opts);
    CHECK(gs.energy == doctest::Approx(oracles::dense_ground_energy(spec)).epsilon(1e-9));
}

TEST_CASE("iteration cap raises a convergence error") {
    LanczosOptions opts;
    opts.max_iter = 2;
    CHECK_THROWS_AS(ground_state(spec_of(2, 4, BoundaryMode::Open), opts), ConvergenceError);
}

TEST_CASE("degeneracy warning on a frustrated triangle") {
    // 1x3 periodic is rejected by geometry rules, so frustrate a 3x3 torus-like
    // case instead: the 3-site ring equivalent is legs=3, rungs=3 periodic.
    auto spec = spec_of(3, 3, BoundaryMode::PeriodicAlongLegs);
    auto gs = ground_state(spec);
    CHECK(gs.energy == doctest::Approx(oracles::dense_ground_energy(spec)).epsilon(1e-9));
}

TEST_CASE("odd site counts solve in the nearest sector") {
    auto spec = spec_of(1, 5, BoundaryMode::Open);
    auto gs = ground_state(spec);
    CHECK(gs.state.n_down() == 2);
    CHECK(gs.energy == doctest::Approx(oracles::dense_ground_energy(spec)).epsilon(1e-10));
}

TEST_CASE("size and coupling preconditions") {
    CHECK_THROWS_AS(ground_state(spec_of(5, 5, BoundaryMode::Open)), ResourceError);
    HamiltonianSpec bad = spec_of(2, 2, BoundaryMode::Open);
    bad.coupling_j = -1.0;
    CHECK_THROWS_AS(ground_state(bad), DomainError);
    auto state = oracles::random_full_state(4, 2);
    CHECK_THROWS_AS(apply_hamiltonian(spec_of(2, 3, BoundaryMode::Open), state), DomainError);
}
