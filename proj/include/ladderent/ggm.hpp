#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ladderent/hilbert.hpp"
#include "ladderent/lattice.hpp"

namespace ladderent {

enum class Strategy { Full, Restricted2xL };

/// One unordered bipartition, stored as its canonical half: the smaller side,
/// or the lexicographically smaller side when both halves have n/2 sites.
struct BipartitionSpec {
    std::vector<int> sites;
    bool canonical = true;
};

struct GgmResult {
    double value = 0.0;      // 1 - lambda_sq
    double lambda_sq = 0.0;  // squared maximal Schmidt coefficient over the sweep
    std::vector<int> argmax_sites;
    Strategy strategy = Strategy::Full;
    std::vector<std::vector<int>> ties;  // all splits within the tie tolerance
};

std::vector<int> canonical_split(const std::vector<int>& sites, int n);

/// Full: every unordered nonempty proper split (2^(n-1) - 1 of them, n <= 16).
/// Restricted2xL: all nonempty subsets of a contiguous two-rung block; the
/// block sits at the last rung pair, plus the middle pair for open boundaries.
std::vector<BipartitionSpec> enumerate_bipartitions(
    int n, Strategy strategy, const std::optional<LadderGeometry>& geometry = std::nullopt);

GgmResult compute_ggm(const StateVector& state, Strategy strategy,
                      const std::optional<LadderGeometry>& geometry = std::nullopt);

struct RestrictedValidationReport {
    int n = 0;
    double ggm_full = 0.0;
    double ggm_restricted = 0.0;
    double discrepancy = 0.0;
    bool agrees = false;
    std::vector<int> argmax_full;
    std::vector<int> argmax_restricted;
};

/// Compares the full sweep against the two-rung-block sweep on the same state.
RestrictedValidationReport validate_restricted_strategy(const StateVector& state,
                                                        const LadderGeometry& geometry);

std::string ggm_result_to_json(const GgmResult& result);
std::string strategy_name(Strategy s);

}  // namespace ladderent
