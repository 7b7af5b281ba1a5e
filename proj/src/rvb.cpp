#include "ladderent/rvb.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <nlohmann/json.hpp>

#include "ladderent/bits.hpp"
#include "ladderent/errors.hpp"
#include "ladderent/tolerances.hpp"

namespace ladderent {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

// Singlet sign convention: amplitude is +1/sqrt(2) when the sublattice-A
// endpoint is up, -1/sqrt(2) when it is down, zero on aligned spins.
inline double pending_factor(int leg, int rung, int spin_here) {
    int a_spin = ((leg + rung) % 2 == 0) ? spin_here : 1 - spin_here;
    return a_spin ? -kInvSqrt2 : kInvSqrt2;
}

/// One way to finish a rung: pair some adjacent free legs inside the rung and
/// send the rest across to the next rung.
struct LocalConfig {
    std::vector<std::pair<int, int>> rung_pairs;
    uint32_t out_pending = 0;
};

void gen_local_configs(int legs, uint32_t remaining, LocalConfig& cur,
                       std::vector<LocalConfig>& out) {
    if (!remaining) {
        out.push_back(cur);
        return;
    }
    int l = std::countr_zero(remaining);
    cur.out_pending |= 1u << l;
    gen_local_configs(legs, remaining & ~(1u << l), cur, out);
    cur.out_pending &= ~(1u << l);
    if (l + 1 < legs && ((remaining >> (l + 1)) & 1)) {
        cur.rung_pairs.emplace_back(l, l + 1);
        gen_local_configs(legs, remaining & ~(3u << l), cur, out);
        cur.rung_pairs.pop_back();
    }
}

std::vector<LocalConfig> local_configs(int legs, uint32_t used) {
    std::vector<LocalConfig> out;
    LocalConfig cur;
    uint32_t all = (uint32_t{1} << legs) - 1;
    gen_local_configs(legs, all & ~used, cur, out);
    return out;
}

void check_rvb_geometry(const LadderGeometry& g) {
    if (g.n_sites() % 2 != 0)
        throw DomainError("RVB states need an even number of sites for a complete covering");
    if (!is_bipartite(g))
        throw DomainError(
            "RVB states need a bipartite bond graph; periodic ladders with an odd rung "
            "count wrap onto the same sublattice");
}

/// Grows the state rung by rung for one fixed set of legs carrying a wrap
/// dimer (empty for open boundaries). Components are keyed by the set of legs
/// whose singlet is split across the current growth boundary; the spin of the
/// not-yet-placed half is appended above the closed bits.
std::vector<double> grow_chain(const LadderGeometry& g, uint32_t wrap) {
    const int legs = g.legs, rungs = g.rungs;
    const bool periodic = g.boundary == BoundaryMode::PeriodicAlongLegs;
    const uint32_t leg_mask = (uint32_t{1} << legs) - 1;

    std::map<uint32_t, std::vector<double>> comps;
    comps[0] = {1.0};
    for (int r = 0; r < rungs; ++r) {
        std::map<uint32_t, std::vector<double>> next;
        const uint64_t closed_size = uint64_t{1} << (r * legs);
        const bool first = r == 0, last = r == rungs - 1;
        for (const auto& [sin, vec] : comps) {
            if (periodic && last && (sin & wrap)) continue;  // site already taken by the wrap dimer
            uint32_t used = sin;
            if (periodic && (first || last)) used |= wrap;
            for (const auto& cfg : local_configs(legs, used)) {
                if (last && cfg.out_pending) continue;
                for (uint32_t b = 0; b <= leg_mask; ++b) {
                    double f = 1.0;
                    bool ok = true;
                    for (const auto& [l1, l2] : cfg.rung_pairs) {
                        int s1 = (b >> l1) & 1, s2 = (b >> l2) & 1;
                        if (s1 == s2) {
                            ok = false;
                            break;
                        }
                        int a_spin = ((l1 + r) % 2 == 0) ? s1 : s2;
                        f *= a_spin ? -kInvSqrt2 : kInvSqrt2;
                    }
                    if (!ok) continue;
                    for (uint32_t rest = cfg.out_pending; rest; rest &= rest - 1)
                        f *= pending_factor(std::countr_zero(rest), r, (b >> std::countr_zero(rest)) & 1);
                    if (periodic && first)
                        for (uint32_t rest = wrap; rest; rest &= rest - 1)
                            f *= pending_factor(std::countr_zero(rest), 0, (b >> std::countr_zero(rest)) & 1);

                    const uint64_t pend_in = bits::pext(b, sin);
                    const uint64_t pend_out = bits::pext(~b & leg_mask, cfg.out_pending);
                    auto& nv = next[cfg.out_pending];
                    if (nv.empty())
                        nv.assign(uint64_t{1} << ((r + 1) * legs + std::popcount(cfg.out_pending)),
                                  0.0);
                    const uint64_t off_old = pend_in << (r * legs);
                    const uint64_t off_new = (uint64_t{b} << (r * legs)) |
                                             (pend_out << ((r + 1) * legs));
                    if (periodic && last && wrap) {
                        // wrap closure: the rung-0 spin on each wrap leg must oppose b
                        const uint64_t req = ~uint64_t{b} & wrap;
                        for (uint64_t closed = 0; closed < closed_size; ++closed)
                            if ((closed & wrap) == req)
                                nv[off_new + closed] += f * vec[off_old + closed];
                    } else {
                        for (uint64_t closed = 0; closed < closed_size; ++closed)
                            nv[off_new + closed] += f * vec[off_old + closed];
                    }
                }
            }
        }
        comps = std::move(next);
    }
    auto it = comps.find(0);
    if (it == comps.end()) return std::vector<double>(uint64_t{1} << (rungs * legs), 0.0);
    return std::move(it->second);
}

RvbState sector_state_from_full(const LadderGeometry& g, const std::vector<double>& full,
                                std::size_t covering_count, RvbConstruction construction) {
    const int n = g.n_sites();
    StateVector state = StateVector::zero_sector(n, n / 2);
    const auto& patterns = state.basis();
    double norm_sq = 0.0;
    for (const auto& x : full) norm_sq += x * x;
    for (std::size_t i = 0; i < patterns.size(); ++i)
        state.amplitudes()[i] = Complex(full[patterns[i]], 0.0);
    if (norm_sq <= 0.0) throw ConstructionError("RVB construction produced the zero state");
    state.normalize();

    RvbState out;
    out.geometry = g;
    out.state = std::move(state);
    out.covering_count = covering_count;
    out.norm_sq = norm_sq;
    out.construction = construction;
    return out;
}

/// Raw equal-weight covering sum as a full real vector (small systems only).
Eigen::VectorXd raw_covering_sum(const LadderGeometry& g) {
    auto coverings = enumerate_dimer_coverings(g);
    const int n = g.n_sites();
    Eigen::VectorXd out = Eigen::VectorXd::Zero(Eigen::Index{1} << n);
    const int k = n / 2;
    const double mag = std::pow(kInvSqrt2, k);
    for (const auto& cov : coverings) {
        for (uint64_t m = 0; m < (uint64_t{1} << k); ++m) {
            uint64_t pattern = 0;
            for (int d = 0; d < k; ++d)
                pattern |= uint64_t{1} << (((m >> d) & 1) ? cov.pairs[d].first : cov.pairs[d].second);
            double sign = (std::popcount(m) & 1) ? -1.0 : 1.0;
            out[static_cast<Eigen::Index>(pattern)] += sign * mag;
        }
    }
    return out;
}

}  // namespace

std::vector<DimerCovering> enumerate_dimer_coverings(const LadderGeometry& geometry) {
    check_rvb_geometry(geometry);
    const int n = geometry.n_sites();
    std::vector<std::vector<int>> adj(n);
    for (const auto& [i, j] : geometry.bonds) {
        adj[i].push_back(j);
        adj[j].push_back(i);
    }
    for (auto& a : adj) std::sort(a.begin(), a.end());

    std::vector<DimerCovering> out;
    std::vector<int> matched(n, -1);
    std::vector<std::pair<int, int>> stack;
    auto record = [&] {
        DimerCovering cov;
        cov.pairs.reserve(stack.size());
        for (const auto& [s, t] : stack)
            cov.pairs.emplace_back(sublattice_of(geometry, s) == Sublattice::A ? std::pair{s, t}
                                                                               : std::pair{t, s});
        out.push_back(std::move(cov));
    };
    auto dfs = [&](auto&& self, int from) -> void {
        int s = from;
        while (s < n && matched[s] >= 0) ++s;
        if (s == n) {
            record();
            return;
        }
        for (int t : adj[s]) {
            if (matched[t] >= 0 || t < s) continue;
            matched[s] = t;
            matched[t] = s;
            stack.emplace_back(s, t);
            self(self, s + 1);
            stack.pop_back();
            matched[s] = -1;
            matched[t] = -1;
        }
    };
    dfs(dfs, 0);
    return out;
}

std::size_t count_dimer_coverings(const LadderGeometry& geometry) {
    check_rvb_geometry(geometry);
    const int legs = geometry.legs, rungs = geometry.rungs;
    const bool periodic = geometry.boundary == BoundaryMode::PeriodicAlongLegs;
    std::size_t total = 0;
    const uint32_t wrap_limit = periodic ? (uint32_t{1} << legs) : 1;
    for (uint32_t wrap = 0; wrap < wrap_limit; ++wrap) {
        std::map<uint32_t, std::size_t> counts{{0u, 1u}};
        for (int r = 0; r < rungs; ++r) {
            std::map<uint32_t, std::size_t> next;
            const bool first = r == 0, last = r == rungs - 1;
            for (const auto& [sin, c] : counts) {
                if (periodic && last && (sin & wrap)) continue;
                uint32_t used = sin;
                if (periodic && (first || last)) used |= wrap;
                for (const auto& cfg : local_configs(legs, used)) {
                    if (last && cfg.out_pending) continue;
                    next[cfg.out_pending] += c;
                }
            }
            counts = std::move(next);
        }
        if (counts.count(0)) total += counts[0];
    }
    return total;
}

RvbState build_rvb_enumerated(const LadderGeometry& geometry) {
    const int n = geometry.n_sites();
    if (n > 24) throw ResourceError("build_rvb_enumerated: state vectors reach 24 spins");
    if (geometry.rungs % 2 != 0)
        throw DomainError("build_rvb_enumerated: the covering ansatz needs an even rung count");
    auto coverings = enumerate_dimer_coverings(geometry);
    if (coverings.empty())
        throw ConstructionError("build_rvb_enumerated: the geometry has no dimer covering");

    StateVector state = StateVector::zero_sector(n, n / 2);
    const int k = n / 2;
    const double mag = std::pow(kInvSqrt2, k);
    double norm_sq = 0.0;
    for (const auto& cov : coverings) {
        for (uint64_t m = 0; m < (uint64_t{1} << k); ++m) {
            uint64_t pattern = 0;
            for (int d = 0; d < k; ++d)
                pattern |= uint64_t{1} << (((m >> d) & 1) ? cov.pairs[d].first : cov.pairs[d].second);
            double sign = (std::popcount(m) & 1) ? -1.0 : 1.0;
            state.amplitudes()[bits::pattern_rank(pattern)] += sign * mag;
        }
    }
    for (const auto& a : state.amplitudes()) norm_sq += std::norm(a);
    if (norm_sq <= 0.0) throw ConstructionError("build_rvb_enumerated: zero state");
    state.normalize();

    RvbState out;
    out.geometry = geometry;
    out.state = std::move(state);
    out.covering_count = coverings.size();
    out.norm_sq = norm_sq;
    out.construction = RvbConstruction::Enumeration;
    return out;
}

RvbState build_rvb_recursive(const LadderGeometry& geometry) {
    const int n = geometry.n_sites();
    if (n > 24) throw ResourceError("build_rvb_recursive: state vectors reach 24 spins");
    if (geometry.rungs % 2 != 0)
        throw DomainError("build_rvb_recursive: the covering ansatz needs an even rung count");
    check_rvb_geometry(geometry);

    std::vector<double> full;
    if (geometry.boundary == BoundaryMode::Open) {
        full = grow_chain(geometry, 0);
    } else {
        full.assign(uint64_t{1} << n, 0.0);
        for (uint32_t wrap = 0; wrap < (uint32_t{1} << geometry.legs); ++wrap) {
            auto part = grow_chain(geometry, wrap);
            for (std::size_t i = 0; i < full.size(); ++i) full[i] += part[i];
        }
    }
    return sector_state_from_full(geometry, full, count_dimer_coverings(geometry),
                                  RvbConstruction::Recursion);
}

RvbState build_rvb_recursive_open(int rungs, int legs) {
    return build_rvb_recursive(build_ladder(legs, rungs, BoundaryMode::Open));
}

RvbState build_rvb_recursive_periodic(int rungs, int legs) {
    return build_rvb_recursive(build_ladder(legs, rungs, BoundaryMode::PeriodicAlongLegs));
}

RecursionCache build_recursion_cache(int legs) {
    if (legs < 1 || legs > 7) throw DomainError("build_recursion_cache: 1 to 7 legs supported");
    RecursionCache c;
    c.legs = legs;
    const Eigen::Index rung_dim = Eigen::Index{1} << legs;

    if (legs % 2 == 0)
        c.one = raw_covering_sum(build_ladder(legs, 1, BoundaryMode::Open));
    else
        c.one = Eigen::VectorXd::Zero(rung_dim);  // a single odd rung has no covering
    c.two = raw_covering_sum(build_ladder(legs, 2, BoundaryMode::Open));
    // second-rung placement flips each of the L/2 product dimers once
    const double product_sign = (legs / 2) % 2 == 1 ? -1.0 : 1.0;
    c.two_bar = c.two;
    for (Eigen::Index a = 0; a < rung_dim; ++a)
        for (Eigen::Index b = 0; b < rung_dim; ++b)
            c.two_bar[a | (b << legs)] -= product_sign * c.one[a] * c.one[b];

    c.edge_map.resize(rung_dim, rung_dim);
    c.two_map.resize(rung_dim, rung_dim);
    for (Eigen::Index a = 0; a < rung_dim; ++a)
        for (Eigen::Index b = 0; b < rung_dim; ++b) {
            c.edge_map(a, b) = c.two_bar[a | (b << legs)];
            c.two_map(a, b) = c.two[a | (b << legs)];
        }
    c.n1 = c.one.squaredNorm();
    c.n2 = c.two.squaredNorm();
    c.n2_bar = c.two_bar.squaredNorm();

    // Rank-revealing growth of the family reachable from |1> under contraction
    // with the connected two-rung object.
    if (c.n1 > 0.0) {
        Eigen::VectorXd w = c.one / std::sqrt(c.n1);
        std::vector<Eigen::VectorXd> pending{w};
        while (!pending.empty()) {
            Eigen::VectorXd v = pending.back();
            pending.pop_back();
            Eigen::VectorXd res = v;
            for (const auto& g : c.edge_basis) res -= g.dot(v) * g;
            if (res.norm() > 1e-8) {
                res.normalize();
                c.edge_basis.push_back(res);
                pending.push_back(c.edge_map.transpose() * res);
            }
        }
        const int dim = static_cast<int>(c.edge_basis.size());
        c.edge_basis_map.resize(dim, dim);
        c.edge_basis_residual = 0.0;
        for (int i = 0; i < dim; ++i) {
            Eigen::VectorXd img = c.edge_map.transpose() * c.edge_basis[i];
            Eigen::VectorXd rem = img;
            for (int j = 0; j < dim; ++j) {
                c.edge_basis_map(j, i) = c.edge_basis[j].dot(img);
                rem -= c.edge_basis_map(j, i) * c.edge_basis[j];
            }
            c.edge_basis_residual = std::max(c.edge_basis_residual, rem.norm());
        }
        if (c.edge_basis_residual > tol::kGammaResidual)
            throw ConstructionError(
                "build_recursion_cache: edge family failed to close under contraction");
        Eigen::VectorXd cross = c.edge_map * c.one;
        for (const auto& g : c.edge_basis) c.gamma1.push_back(g.dot(cross));
    }
    return c;
}

NormSequence norm_recursion(int legs, int m_max) {
    if (legs < 1 || legs > 6) throw DomainError("norm_recursion: 1 to 6 legs supported");
    if (m_max < 1) throw DomainError("norm_recursion: m_max must be positive");

    // Boundary states (S, p): the crossing set and the spins of the deferred
    // singlet halves. Norms evolve on ket x bra boundary pairs.
    const uint32_t nsec = uint32_t{1} << legs;
    std::vector<int> offset(nsec, 0);
    int dim = 0;
    for (uint32_t s = 0; s < nsec; ++s) {
        offset[s] = dim;
        dim += 1 << std::popcount(s);
    }

    struct Triplet {
        int row, col;
        double val;
    };
    const uint32_t leg_mask = nsec - 1;
    auto build_step = [&](int parity) {
        std::vector<std::vector<Triplet>> per_b(nsec);
        for (uint32_t b = 0; b <= leg_mask; ++b) {
            for (uint32_t sin = 0; sin <= leg_mask; ++sin) {
                uint64_t pin = bits::pext(b, sin);
                int col = offset[sin] + static_cast<int>(pin);
                for (const auto& cfg : local_configs(legs, sin)) {
                    double f = 1.0;
                    bool ok = true;
                    for (const auto& [l1, l2] : cfg.rung_pairs) {
                        int s1 = (b >> l1) & 1, s2 = (b >> l2) & 1;
                        if (s1 == s2) {
                            ok = false;
                            break;
                        }
                        int a_spin = ((l1 + parity) % 2 == 0) ? s1 : s2;
                        f *= a_spin ? -kInvSqrt2 : kInvSqrt2;
                    }
                    if (!ok) continue;
                    for (uint32_t rest = cfg.out_pending; rest; rest &= rest - 1)
                        f *= pending_factor(std::countr_zero(rest), parity,
                                            (b >> std::countr_zero(rest)) & 1);
                    uint64_t pout = bits::pext(~b & leg_mask, cfg.out_pending);
                    per_b[b].push_back({offset[cfg.out_pending] + static_cast<int>(pout), col, f});
                }
            }
        }
        return per_b;
    };
    const auto step_even = build_step(0), step_odd = build_step(1);

    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(dim, dim);
    g(0, 0) = 1.0;
    NormSequence out;
    out.legs = legs;
    out.values.reserve(m_max);
    for (int r = 0; r < m_max; ++r) {
        const auto& step = (r % 2 == 0) ? step_even : step_odd;
        Eigen::MatrixXd next = Eigen::MatrixXd::Zero(dim, dim);
        for (uint32_t b = 0; b <= leg_mask; ++b) {
            Eigen::MatrixXd kg = Eigen::MatrixXd::Zero(dim, dim);
            for (const auto& t : step[b]) kg.row(t.row) += t.val * g.row(t.col);
            for (const auto& t : step[b]) next.col(t.row) += t.val * kg.col(t.col);
        }
        g = std::move(next);
        out.values.push_back(g(0, 0));
    }
    return out;
}

ReducedState block_rdm_2xL(int legs, int rungs, BoundaryMode boundary) {
    if (legs > 7) throw ResourceError("block_rdm_2xL: block dimension is unmanageable past 7 legs");
    if (rungs < 4) throw DomainError("block_rdm_2xL: needs at least 4 rungs for a proper block");
    auto geometry = build_ladder(legs, rungs, boundary);
    RvbState rvb = build_rvb_recursive(geometry);
    std::vector<int> block;
    for (int j = 0; j < 2 * legs; ++j) block.push_back((rungs - 2) * legs + j);
    return reduced_density_matrix(rvb.state, block);
}

std::string coverings_to_json(const std::vector<DimerCovering>& coverings) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& c : coverings) j.push_back(c.pairs);
    return j.dump();
}

}  // namespace ladderent
