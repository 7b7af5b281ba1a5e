#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ladderent/ggm.hpp"
#include "ladderent/lattice.hpp"
#include "ladderent/rvb.hpp"
#include "ladderent/spectral.hpp"

namespace ladderent {

struct ComparisonRecord {
    LadderGeometry geometry;
    double fidelity = 0.0;      // |<exact|rvb>|
    double delta_e = 0.0;       // |<H>_rvb - E0| / |E0| (or per-site denominator)
    double ggm_exact = 0.0;
    double ggm_rvb = 0.0;
    double energy_exact = 0.0;
    double energy_rvb = 0.0;
    bool degeneracy_warning = false;
};

/// Exact ground state vs the enumerated RVB state on one geometry (n <= 16).
ComparisonRecord compare_exact_rvb(const LadderGeometry& geometry, double coupling_j,
                                   double delta = 1.0, bool delta_e_per_site = false,
                                   const LanczosOptions& opts = {});

/// Power-law approach to an asymptote: G(n) = G_c + sign * k * n^(-x).
struct ScalingFit {
    double g_c = 0.0;
    double k = 0.0;
    double x = 0.0;
    int sign = +1;
    double residual = 0.0;  // RMS over the fitted points
    std::vector<std::pair<int, double>> points_used;
    bool degenerate = false;          // flat data, k pinned to zero
    bool exactly_determined = false;  // three points, three parameters
};

struct FitOptions {
    std::optional<int> sign_hint;  // +1 decreasing data, -1 increasing data
    int min_points = 4;
};

/// Deterministic Gauss-Newton fit in (G_c, log k, x) with a fixed multi-start
/// grid; the sign comes from data monotonicity unless hinted.
ScalingFit fit_scaling(const std::vector<std::pair<int, double>>& points,
                       const FitOptions& options = {});

struct OddEvenReport {
    std::vector<std::pair<int, ScalingFit>> odd_fits;
    std::vector<std::pair<int, ScalingFit>> even_fits;
    double gc_gap = 0.0;  // at the largest L of each parity
    double x_gap = 0.0;
    std::string text;
};

/// Splits per-leg fits by leg parity and reports asymptote and exponent gaps.
OddEvenReport odd_even_report(const std::map<int, ScalingFit>& fits);

std::string scaling_fit_to_json(const ScalingFit& fit);

}  // namespace ladderent
