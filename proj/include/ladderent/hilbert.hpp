#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ladderent {

using Complex = std::complex<double>;

enum class StateLayout {
    Full,     // 2^n amplitudes, basis index bit i = spin at site i (0 = up, 1 = down)
    SzSector  // amplitudes over all n-bit patterns with a fixed number of down spins
};

/// All basis patterns with exactly n_down set bits, strictly increasing.
/// sz_zero_basis(n) is the half-filled case used throughout.
std::vector<uint64_t> sector_basis(int n, int n_down);
std::vector<uint64_t> sz_zero_basis(int n);

/// Pure n-qubit state. Bit b_i of a basis index is the spin at site i,
/// bit 0 <-> |up>, bit 1 <-> |down>. Sector-compressed states share an
/// immutable basis-pattern list.
class StateVector {
public:
    StateVector() = default;

    static StateVector zero_full(int n);
    static StateVector zero_sector(int n, int n_down);
    static StateVector from_full_amplitudes(int n, std::vector<Complex> amps,
                                            bool normalized = false);
    static StateVector from_sector_amplitudes(int n, int n_down, std::vector<Complex> amps,
                                              bool normalized = false);

    int n_qubits() const { return n_; }
    StateLayout layout() const { return layout_; }
    int n_down() const { return n_down_; }
    std::size_t size() const { return amps_.size(); }
    bool is_normalized() const { return normalized_; }

    const std::vector<Complex>& amplitudes() const { return amps_; }
    std::vector<Complex>& amplitudes() { return amps_; }
    const std::vector<uint64_t>& basis() const;  // SzSector only
    uint64_t pattern(std::size_t i) const { return layout_ == StateLayout::Full ? i : basis()[i]; }

    double norm() const;
    void normalize();
    void mark_normalized(bool flag) { normalized_ = flag; }

    /// Expand a sector state into the full 2^n representation (n capped by memory).
    StateVector to_full() const;

    /// Amplitude of a given basis pattern regardless of layout (0 outside the sector).
    Complex amplitude_of_pattern(uint64_t pattern) const;

private:
    int n_ = 0;
    StateLayout layout_ = StateLayout::Full;
    int n_down_ = -1;
    bool normalized_ = false;
    std::vector<Complex> amps_;
    std::shared_ptr<const std::vector<uint64_t>> basis_;
};

/// Overlap <a|b>; states must describe the same number of qubits.
Complex overlap(const StateVector& a, const StateVector& b);

/// |<a|b>| with both sides normalized.
double fidelity(const StateVector& a, const StateVector& b);

/// Reduced density matrix on an ordered site subset K. Row/column bit j of
/// the matrix corresponds to site K[j].
struct ReducedState {
    std::vector<int> sites;
    Eigen::MatrixXcd matrix;

    double trace() const { return matrix.trace().real(); }
    /// Throws if the matrix is non-Hermitian or has negative weight beyond tolerance.
    void validate() const;
};

ReducedState reduced_density_matrix(const StateVector& state, const std::vector<int>& sites);

/// Largest eigenvalue of the reduced density matrix on `sites` (equivalently
/// of its complement): the squared maximal Schmidt coefficient of that split.
double max_schmidt_sq(const StateVector& state, const std::vector<int>& sites);

/// Largest eigenvalue of a Hermitian PSD matrix; dense solve for small
/// dimensions, Krylov iteration above that.
double largest_eigenvalue(const Eigen::MatrixXcd& herm);

/// Partial trace of an existing density matrix down to the subset `keep`
/// (indices into rho.sites).
ReducedState trace_down(const ReducedState& rho, const std::vector<int>& keep);

// --- state import/export -------------------------------------------------

void save_state_binary(const StateVector& state, const std::string& path);
StateVector load_state_binary(const std::string& path);
std::string state_to_json(const StateVector& state);  // n <= 12
StateVector state_from_json(const std::string& text);

}  // namespace ladderent
