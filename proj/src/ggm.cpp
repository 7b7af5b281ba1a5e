#include "ladderent/ggm.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <random>

#include <nlohmann/json.hpp>

#include "ladderent/bits.hpp"
#include "ladderent/errors.hpp"
#include "ladderent/tolerances.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ladderent {

namespace {

constexpr int kFullSweepLimit = 16;

std::vector<int> mask_to_sites(uint64_t mask) {
    std::vector<int> out;
    while (mask) {
        out.push_back(std::countr_zero(mask));
        mask &= mask - 1;
    }
    return out;
}

uint64_t sites_to_mask(const std::vector<int>& sites) {
    uint64_t mask = 0;
    for (int s : sites) mask |= uint64_t{1} << s;
    return mask;
}

/// Largest eigenvalue of A A^dagger without forming the Gram matrix when the
/// side is large: Lanczos on the implicit product, exact on exhaustion.
double largest_gram_eigenvalue(const Eigen::MatrixXcd& a) {
    const Eigen::Index m = a.rows();
    if (m <= 64) {
        Eigen::MatrixXcd g = a * a.adjoint();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g, Eigen::EigenvaluesOnly);
        return es.eigenvalues().maxCoeff();
    }
    Eigen::VectorXcd v(m);
    for (Eigen::Index i = 0; i < m; ++i)
        v[i] = Complex(1.0 + 1e-3 * std::sin(0.7 * static_cast<double>(i + 1)),
                       1e-3 * std::cos(1.3 * static_cast<double>(i + 1)));
    v.normalize();
    std::vector<Eigen::VectorXcd> basis;
    std::vector<double> alpha, beta;
    double prev = 0.0;
    int stall = 0;
    for (Eigen::Index it = 0; it < m; ++it) {
        basis.push_back(v);
        Eigen::VectorXcd w = a * (a.adjoint() * v);
        double diag = std::real(v.dot(w));
        alpha.push_back(diag);
        w -= diag * v;
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
            stall = std::abs(cur - prev) <= 1e-14 * std::max(1.0, cur) ? stall + 1 : 0;
            if (stall >= 3) return cur;
        }
        prev = cur;
        if (b < 1e-300) return cur;
        beta.push_back(b);
        v = w / b;
    }
    return prev;
}

/// lambda_max^2 of one split of a full-layout amplitude array.
double split_lambda_sq(const std::vector<Complex>& amps, int n, uint64_t mask) {
    const int k = std::popcount(mask);
    const uint64_t full = (uint64_t{1} << n) - 1;
    const uint64_t side = 2 * k <= n ? mask : full ^ mask;
    const int ks = std::popcount(side);
    const bits::PextTable row(side), col(full ^ side);
    Eigen::MatrixXcd a(Eigen::Index{1} << ks, Eigen::Index{1} << (n - ks));
    for (uint64_t idx = 0; idx <= full; ++idx) a(row(idx), col(idx)) = amps[idx];
    return largest_gram_eigenvalue(a);
}

struct SplitValue {
    uint64_t mask;  // canonical mask
    double lambda_sq;
};

/// Two-rung block positions for the restricted sweep (deduplicated).
std::vector<int> block_start_rungs(const LadderGeometry& g) {
    std::vector<int> starts{g.rungs - 2};
    if (g.boundary == BoundaryMode::Open) {
        int middle = (g.rungs - 2) / 2;
        if (middle != starts.front()) starts.push_back(middle);
    }
    std::sort(starts.begin(), starts.end());
    return starts;
}

Eigen::MatrixXcd block_density(const StateVector& state, const std::vector<int>& block) {
    const int n = state.n_qubits();
    if (static_cast<int>(block.size()) < n)
        return reduced_density_matrix(state, block).matrix;
    // Two-rung ladder: the block is the whole system, use the pure projector.
    if (n > 12) throw ResourceError("compute_ggm: two-rung systems handled densely only up to 12 sites");
    StateVector full = state.to_full();
    Eigen::Map<const Eigen::VectorXcd> v(full.amplitudes().data(), full.amplitudes().size());
    return v * v.adjoint();
}

void check_normalized(const StateVector& state) {
    if (std::abs(state.norm() - 1.0) > 1e-8)
        throw DomainError("compute_ggm: state must be normalized");
}

GgmResult finish_result(std::vector<SplitValue> values, int n, Strategy strategy) {
    if (values.empty()) throw DomainError("compute_ggm: no bipartitions enumerated");
    std::sort(values.begin(), values.end(), [](const SplitValue& x, const SplitValue& y) {
        return x.mask < y.mask;
    });
    double best = -1.0;
    for (const auto& v : values) best = std::max(best, v.lambda_sq);

    GgmResult out;
    out.strategy = strategy;
    out.lambda_sq = best;
    for (const auto& v : values)
        if (v.lambda_sq >= best - tol::kGgmTie) out.ties.push_back(mask_to_sites(v.mask));
    for (const auto& v : values)
        if (v.lambda_sq == best) {
            out.argmax_sites = mask_to_sites(v.mask);
            break;
        }

    if (best > 1.0 + 1e-9) throw DomainError("compute_ggm: Schmidt weight exceeds 1");
    const double lower = std::pow(2.0, -0.5 * n) - 1e-12;
    if (best < lower) throw DomainError("compute_ggm: Schmidt weight below the 2^(-n/2) bound");
    out.value = std::max(0.0, 1.0 - best);
    return out;
}

}  // namespace

std::vector<int> canonical_split(const std::vector<int>& sites, int n) {
    uint64_t mask = sites_to_mask(sites);
    const uint64_t full = (uint64_t{1} << n) - 1;
    const int k = std::popcount(mask);
    if (2 * k > n) return mask_to_sites(full ^ mask);
    if (2 * k == n && !(mask & 1)) return mask_to_sites(full ^ mask);
    return mask_to_sites(mask);
}

std::vector<BipartitionSpec> enumerate_bipartitions(int n, Strategy strategy,
                                                    const std::optional<LadderGeometry>& geometry) {
    if (n < 2) throw DomainError("enumerate_bipartitions: need at least two sites");
    std::vector<BipartitionSpec> out;
    if (strategy == Strategy::Full) {
        if (n > kFullSweepLimit)
            throw ResourceError(
                "enumerate_bipartitions: full enumeration stops at 16 sites; use Restricted2xL");
        const uint64_t full = (uint64_t{1} << n) - 1;
        for (uint64_t mask = 1; mask < full; mask += 2)  // one side always holds site 0
            out.push_back({canonical_split(mask_to_sites(mask), n), true});
        return out;
    }
    if (!geometry) throw DomainError("enumerate_bipartitions: Restricted2xL needs a geometry");
    const auto& g = *geometry;
    if (g.n_sites() != n) throw DomainError("enumerate_bipartitions: geometry size mismatch");
    std::vector<uint64_t> seen;
    for (int start : block_start_rungs(g)) {
        const int lo = start * g.legs, width = 2 * g.legs;
        for (uint64_t sub = 1; sub < (uint64_t{1} << width); ++sub) {
            if (std::popcount(sub) == n) continue;  // whole system is not a split
            std::vector<int> sites;
            for (int j = 0; j < width; ++j)
                if ((sub >> j) & 1) sites.push_back(lo + j);
            auto canon = canonical_split(sites, n);
            uint64_t key = sites_to_mask(canon);
            if (std::find(seen.begin(), seen.end(), key) == seen.end()) {
                seen.push_back(key);
                out.push_back({std::move(canon), true});
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const BipartitionSpec& a, const BipartitionSpec& b) {
        return sites_to_mask(a.sites) < sites_to_mask(b.sites);
    });
    return out;
}

GgmResult compute_ggm(const StateVector& state, Strategy strategy,
                      const std::optional<LadderGeometry>& geometry) {
    check_normalized(state);
    const int n = state.n_qubits();

    if (strategy == Strategy::Full) {
        if (n > kFullSweepLimit)
            throw ResourceError("compute_ggm: full enumeration stops at 16 sites; use Restricted2xL");
        const std::vector<Complex> amps = state.to_full().amplitudes();
        const uint64_t full = (uint64_t{1} << n) - 1;
        const std::size_t count = (std::size_t{1} << (n - 1)) - 1;
        std::vector<SplitValue> values(count);
#pragma omp parallel for schedule(dynamic, 16)
        for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(count); ++j) {
            uint64_t mask = 2 * static_cast<uint64_t>(j) + 1;
            double lam = split_lambda_sq(amps, n, mask);
            values[j] = {sites_to_mask(canonical_split(mask_to_sites(mask), n)), lam};
        }
        return finish_result(std::move(values), n, Strategy::Full);
    }

    if (!geometry) throw DomainError("compute_ggm: Restricted2xL needs a geometry");
    const auto& g = *geometry;
    if (g.n_sites() != n) throw DomainError("compute_ggm: geometry size mismatch");

    std::map<uint64_t, double> per_split;
    for (int start : block_start_rungs(g)) {
        std::vector<int> block;
        for (int j = 0; j < 2 * g.legs; ++j) block.push_back(start * g.legs + j);
        Eigen::MatrixXcd rho_block = block_density(state, block);
        const uint64_t subsets = uint64_t{1} << block.size();
        for (uint64_t sub = 1; sub < subsets; ++sub) {
            if (static_cast<int>(block.size()) == n && sub == subsets - 1) continue;
            std::vector<int> positions;
            std::vector<int> sites;
            for (std::size_t j = 0; j < block.size(); ++j)
                if ((sub >> j) & 1) {
                    positions.push_back(static_cast<int>(j));
                    sites.push_back(block[j]);
                }
            uint64_t key = sites_to_mask(canonical_split(sites, n));
            if (per_split.count(key)) continue;
            Eigen::MatrixXcd rho_s =
                positions.size() == block.size()
                    ? rho_block
                    : trace_down({block, rho_block}, positions).matrix;
            per_split[key] = largest_eigenvalue(rho_s);
        }
    }
    std::vector<SplitValue> values;
    values.reserve(per_split.size());
    for (const auto& [mask, lam] : per_split) values.push_back({mask, lam});
    return finish_result(std::move(values), n, Strategy::Restricted2xL);
}

RestrictedValidationReport validate_restricted_strategy(const StateVector& state,
                                                        const LadderGeometry& geometry) {
    if (state.n_qubits() > kFullSweepLimit)
        throw ResourceError("validate_restricted_strategy: needs the full sweep, so n <= 16");
    auto full = compute_ggm(state, Strategy::Full);
    auto restricted = compute_ggm(state, Strategy::Restricted2xL, geometry);
    RestrictedValidationReport r;
    r.n = state.n_qubits();
    r.ggm_full = full.value;
    r.ggm_restricted = restricted.value;
    r.discrepancy = std::abs(full.value - restricted.value);
    r.agrees = r.discrepancy <= tol::kOracle;
    r.argmax_full = full.argmax_sites;
    r.argmax_restricted = restricted.argmax_sites;
    return r;
}

std::string strategy_name(Strategy s) {
    return s == Strategy::Full ? "full" : "restricted2xl";
}

std::string ggm_result_to_json(const GgmResult& result) {
    nlohmann::json j;
    j["value"] = result.value;
    j["lambda_sq"] = result.lambda_sq;
    j["argmax"] = result.argmax_sites;
    j["strategy"] = strategy_name(result.strategy);
    j["ties"] = result.ties;
    return j.dump();
}

}  // namespace ladderent
