#include "ladderent/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <random>

#include <nlohmann/json.hpp>

#include "ladderent/bits.hpp"
#include "ladderent/errors.hpp"
#include "ladderent/tolerances.hpp"

namespace ladderent {

std::vector<uint64_t> sector_basis(int n, int n_down) {
    if (n < 1 || n > bits::kMaxSites)
        throw ResourceError("sector_basis: supported range is 1.." +
                            std::to_string(bits::kMaxSites) + " sites");
    if (n_down < 0 || n_down > n) throw DomainError("sector_basis: invalid down-spin count");
    return bits::patterns_with_popcount(n, n_down);
}

std::vector<uint64_t> sz_zero_basis(int n) {
    if (n < 2 || n % 2 != 0)
        throw DomainError("sz_zero_basis: needs an even, positive number of sites");
    return sector_basis(n, n / 2);
}

StateVector StateVector::zero_full(int n) {
    if (n < 1 || n > 24) throw ResourceError("full state vectors supported up to 24 qubits");
    StateVector s;
    s.n_ = n;
    s.layout_ = StateLayout::Full;
    s.amps_.assign(std::size_t{1} << n, Complex{0.0, 0.0});
    return s;
}

StateVector StateVector::zero_sector(int n, int n_down) {
    StateVector s;
    s.n_ = n;
    s.layout_ = StateLayout::SzSector;
    s.n_down_ = n_down;
    s.basis_ = std::make_shared<const std::vector<uint64_t>>(sector_basis(n, n_down));
    s.amps_.assign(s.basis_->size(), Complex{0.0, 0.0});
    return s;
}

StateVector StateVector::from_full_amplitudes(int n, std::vector<Complex> amps, bool normalized) {
    if (amps.size() != (std::size_t{1} << n))
        throw DomainError("from_full_amplitudes: amplitude count must be 2^n");
    StateVector s;
    s.n_ = n;
    s.layout_ = StateLayout::Full;
    s.amps_ = std::move(amps);
    s.normalized_ = normalized;
    return s;
}

StateVector StateVector::from_sector_amplitudes(int n, int n_down, std::vector<Complex> amps,
                                                bool normalized) {
    StateVector s = zero_sector(n, n_down);
    if (amps.size() != s.amps_.size())
        throw DomainError("from_sector_amplitudes: amplitude count does not match the sector");
    s.amps_ = std::move(amps);
    s.normalized_ = normalized;
    return s;
}

const std::vector<uint64_t>& StateVector::basis() const {
    if (layout_ != StateLayout::SzSector)
        throw DomainError("basis(): state is not sector-compressed");
    return *basis_;
}

double StateVector::norm() const {
    double s = 0.0;
    for (const auto& a : amps_) s += std::norm(a);
    return std::sqrt(s);
}

void StateVector::normalize() {
    double nrm = norm();
    if (nrm <= 0.0) throw DomainError("normalize: zero state");
    for (auto& a : amps_) a /= nrm;
    normalized_ = true;
}

StateVector StateVector::to_full() const {
    if (layout_ == StateLayout::Full) return *this;
    StateVector full = zero_full(n_);
    const auto& pats = *basis_;
    for (std::size_t i = 0; i < pats.size(); ++i) full.amps_[pats[i]] = amps_[i];
    full.normalized_ = normalized_;
    return full;
}

Complex StateVector::amplitude_of_pattern(uint64_t pattern) const {
    if (layout_ == StateLayout::Full) return amps_[pattern];
    if (static_cast<int>(std::popcount(pattern)) != n_down_) return Complex{0.0, 0.0};
    return amps_[bits::pattern_rank(pattern)];
}

Complex overlap(const StateVector& a, const StateVector& b) {
    if (a.n_qubits() != b.n_qubits()) throw DomainError("overlap: qubit count mismatch");
    Complex acc{0.0, 0.0};
    if (a.layout() == b.layout() && (a.layout() == StateLayout::Full || a.n_down() == b.n_down())) {
        for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a.amplitudes()[i]) * b.amplitudes()[i];
        return acc;
    }
    const StateVector& sector = a.layout() == StateLayout::SzSector ? a : b;
    const StateVector& other = a.layout() == StateLayout::SzSector ? b : a;
    const bool sector_is_bra = &sector == &a;
    for (std::size_t i = 0; i < sector.size(); ++i) {
        Complex sa = sector.amplitudes()[i];
        Complex oa = other.amplitude_of_pattern(sector.basis()[i]);
        acc += sector_is_bra ? std::conj(sa) * oa : std::conj(oa) * sa;
    }
    return acc;
}

double fidelity(const StateVector& a, const StateVector& b) {
    double na = a.norm(), nb = b.norm();
    if (na <= 0.0 || nb <= 0.0) throw DomainError("fidelity: zero state");
    return std::abs(overlap(a, b)) / (na * nb);
}

void ReducedState::validate() const {
    double herm = (matrix - matrix.adjoint()).cwiseAbs().maxCoeff();
    if (herm > tol::kHermiticity)
        throw DomainError("reduced state is not Hermitian within tolerance");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(matrix, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol::kHermiticity)
        throw DomainError("reduced state has negative eigenvalues beyond tolerance");
}

namespace {

struct TraceEntry {
    uint64_t rest;
    uint32_t block;
    Complex amp;
};

uint64_t mask_of_sites(const std::vector<int>& sites, int n) {
    uint64_t mask = 0;
    for (int s : sites) {
        if (s < 0 || s >= n) throw DomainError("site subset contains an out-of-range index");
        uint64_t bit = uint64_t{1} << s;
        if (mask & bit) throw DomainError("site subset contains a duplicate index");
        mask |= bit;
    }
    return mask;
}

}  // namespace

ReducedState reduced_density_matrix(const StateVector& state, const std::vector<int>& sites) {
    const int n = state.n_qubits();
    const int k = static_cast<int>(sites.size());
    if (k == 0) throw DomainError("reduced_density_matrix: empty subset");
    if (k == n) throw DomainError("reduced_density_matrix: subset must be proper");
    if (k > 14) throw ResourceError("reduced_density_matrix: subsets above 14 sites are not dense-diagonalizable");
    const uint64_t mask = mask_of_sites(sites, n);
    const uint64_t rest_mask = ((n == 64 ? ~uint64_t{0} : (uint64_t{1} << n) - 1)) & ~mask;
    const bits::PextTable rest_extract(rest_mask);

    std::vector<TraceEntry> entries;
    entries.reserve(state.size());
    for (std::size_t i = 0; i < state.size(); ++i) {
        Complex a = state.amplitudes()[i];
        if (a == Complex{0.0, 0.0}) continue;
        uint64_t p = state.pattern(i);
        uint32_t block = 0;
        for (int j = 0; j < k; ++j) block |= static_cast<uint32_t>((p >> sites[j]) & 1) << j;
        entries.push_back({rest_extract(p), block, a});
    }
    std::sort(entries.begin(), entries.end(), [](const TraceEntry& x, const TraceEntry& y) {
        return x.rest < y.rest || (x.rest == y.rest && x.block < y.block);
    });

    ReducedState out;
    out.sites = sites;
    const Eigen::Index dim = Eigen::Index{1} << k;
    out.matrix = Eigen::MatrixXcd::Zero(dim, dim);
    std::size_t lo = 0;
    while (lo < entries.size()) {
        std::size_t hi = lo;
        while (hi < entries.size() && entries[hi].rest == entries[lo].rest) ++hi;
        for (std::size_t i = lo; i < hi; ++i)
            for (std::size_t j = lo; j < hi; ++j)
                out.matrix(entries[i].block, entries[j].block) +=
                    entries[i].amp * std::conj(entries[j].amp);
        lo = hi;
    }
    return out;
}

double largest_eigenvalue(const Eigen::MatrixXcd& herm) {
    const Eigen::Index dim = herm.rows();
    if (dim <= 64) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm, Eigen::EigenvaluesOnly);
        return es.eigenvalues().maxCoeff();
    }
    // Krylov iteration with full reorthogonalization; exhausting the space is exact.
    std::mt19937_64 rng(0x1adde2u);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Eigen::VectorXcd v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v[i] = Complex(dist(rng), dist(rng));
    v.normalize();

    std::vector<Eigen::VectorXcd> basis;
    std::vector<double> alpha, beta;
    double prev = 0.0;
    int stall = 0;
    for (Eigen::Index it = 0; it < dim; ++it) {
        basis.push_back(v);
        Eigen::VectorXcd w = herm * v;
        double a = std::real(v.dot(w));
        alpha.push_back(a);
        w -= a * v;
        if (it > 0) w -= beta.back() * basis[it - 1];
        for (const auto& q : basis) w -= q.dot(w) * q;
        double b = w.norm();

        Eigen::MatrixXd t = Eigen::MatrixXd::Zero(alpha.size(), alpha.size());
        for (std::size_t i = 0; i < alpha.size(); ++i) {
            t(i, i) = alpha[i];
            if (i + 1 < alpha.size()) t(i, i + 1) = t(i + 1, i) = beta[i];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t, Eigen::EigenvaluesOnly);
        double cur = es.eigenvalues().maxCoeff();
        if (it > 0) {
            stall = std::abs(cur - prev) <= 1e-14 * std::max(1.0, std::abs(cur)) ? stall + 1 : 0;
            if (stall >= 3) return cur;
        }
        prev = cur;
        if (b < 1e-300) return cur;  // Krylov space exhausted
        beta.push_back(b);
        v = w / b;
    }
    return prev;
}

double max_schmidt_sq(const StateVector& state, const std::vector<int>& sites) {
    const int n = state.n_qubits();
    const int k = static_cast<int>(sites.size());
    if (k == 0 || k == n) throw DomainError("max_schmidt_sq: subset must be proper and nonempty");
    mask_of_sites(sites, n);  // validity check
    if (2 * k <= n) return largest_eigenvalue(reduced_density_matrix(state, sites).matrix);
    // Work on the smaller complement; the nonzero spectrum is shared.
    std::vector<bool> in(n, false);
    for (int s : sites) in[s] = true;
    std::vector<int> comp;
    for (int s = 0; s < n; ++s)
        if (!in[s]) comp.push_back(s);
    return largest_eigenvalue(reduced_density_matrix(state, comp).matrix);
}

ReducedState trace_down(const ReducedState& rho, const std::vector<int>& keep) {
    const int k = static_cast<int>(rho.sites.size());
    uint32_t keep_mask = 0;
    ReducedState out;
    for (int pos : keep) {
        if (pos < 0 || pos >= k) throw DomainError("trace_down: position out of range");
        keep_mask |= uint32_t{1} << pos;
        out.sites.push_back(rho.sites[pos]);
    }
    const int kk = static_cast<int>(keep.size());
    const uint32_t traced_mask = ((uint32_t{1} << k) - 1) & ~keep_mask;
    const Eigen::Index dim = Eigen::Index{1} << kk;
    out.matrix = Eigen::MatrixXcd::Zero(dim, dim);

    auto compose = [&](uint32_t kept, uint32_t traced) {
        uint32_t idx = static_cast<uint32_t>(bits::pdep(traced, traced_mask));
        for (int j = 0; j < kk; ++j) idx |= ((kept >> j) & 1) << keep[j];
        return idx;
    };
    const uint32_t tdim = uint32_t{1} << (k - kk);
    for (uint32_t a = 0; a < dim; ++a)
        for (uint32_t b = 0; b < dim; ++b) {
            Complex acc{0.0, 0.0};
            for (uint32_t t = 0; t < tdim; ++t) acc += rho.matrix(compose(a, t), compose(b, t));
            out.matrix(a, b) = acc;
        }
    return out;
}

// --- import/export --------------------------------------------------------

namespace {
constexpr char kMagic[8] = {'L', 'E', 'N', 'T', 'S', 'V', '0', '1'};
}

void save_state_binary(const StateVector& state, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DomainError("save_state_binary: cannot open " + path);
    f.write(kMagic, 8);
    uint32_t n = static_cast<uint32_t>(state.n_qubits());
    int32_t n_down = state.layout() == StateLayout::SzSector ? state.n_down() : -1;
    uint8_t normalized = state.is_normalized() ? 1 : 0;
    uint8_t pad[3] = {0, 0, 0};
    uint64_t count = state.size();
    f.write(reinterpret_cast<const char*>(&n), 4);
    f.write(reinterpret_cast<const char*>(&n_down), 4);
    f.write(reinterpret_cast<const char*>(&normalized), 1);
    f.write(reinterpret_cast<const char*>(pad), 3);
    f.write(reinterpret_cast<const char*>(&count), 8);
    for (const auto& a : state.amplitudes()) {
        double re = a.real(), im = a.imag();
        f.write(reinterpret_cast<const char*>(&re), 8);
        f.write(reinterpret_cast<const char*>(&im), 8);
    }
}

StateVector load_state_binary(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DomainError("load_state_binary: cannot open " + path);
    char magic[8];
    f.read(magic, 8);
    if (std::memcmp(magic, kMagic, 8) != 0)
        throw DomainError("load_state_binary: bad header in " + path);
    uint32_t n = 0;
    int32_t n_down = 0;
    uint8_t normalized = 0;
    uint8_t pad[3];
    uint64_t count = 0;
    f.read(reinterpret_cast<char*>(&n), 4);
    f.read(reinterpret_cast<char*>(&n_down), 4);
    f.read(reinterpret_cast<char*>(&normalized), 1);
    f.read(reinterpret_cast<char*>(pad), 3);
    f.read(reinterpret_cast<char*>(&count), 8);
    std::vector<Complex> amps(count);
    for (auto& a : amps) {
        double re, im;
        f.read(reinterpret_cast<char*>(&re), 8);
        f.read(reinterpret_cast<char*>(&im), 8);
        a = Complex(re, im);
    }
    if (!f) throw DomainError("load_state_binary: truncated file " + path);
    if (n_down < 0) return StateVector::from_full_amplitudes(static_cast<int>(n), std::move(amps),
                                                             normalized != 0);
    return StateVector::from_sector_amplitudes(static_cast<int>(n), n_down, std::move(amps),
                                               normalized != 0);
}

std::string state_to_json(const StateVector& state) {
    if (state.n_qubits() > 12)
        throw ResourceError("state_to_json: JSON export is limited to 12 qubits");
    nlohmann::json j;
    j["n"] = state.n_qubits();
    j["layout"] = state.layout() == StateLayout::Full ? "full" : "sz_sector";
    if (state.layout() == StateLayout::SzSector) j["n_down"] = state.n_down();
    j["normalized"] = state.is_normalized();
    auto& arr = j["amplitudes"] = nlohmann::json::array();
    for (const auto& a : state.amplitudes()) arr.push_back({a.real(), a.imag()});
    return j.dump();
}

StateVector state_from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    int n = j.at("n").get<int>();
    bool normalized = j.value("normalized", false);
    std::vector<Complex> amps;
    for (const auto& pair : j.at("amplitudes"))
        amps.emplace_back(pair.at(0).get<double>(), pair.at(1).get<double>());
    if (j.at("layout").get<std::string>() == "full")
        return StateVector::from_full_amplitudes(n, std::move(amps), normalized);
    return StateVector::from_sector_amplitudes(n, j.at("n_down").get<int>(), std::move(amps),
                                               normalized);
}

}  // namespace ladderent
