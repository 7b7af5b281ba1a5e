#include "ladderent/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "ladderent/errors.hpp"
#include "ladderent/tolerances.hpp"

namespace ladderent {

ComparisonRecord compare_exact_rvb(const LadderGeometry& geometry, double coupling_j, double delta,
                                   bool delta_e_per_site, const LanczosOptions& opts) {
    if (geometry.n_sites() > 16)
        throw ResourceError("compare_exact_rvb: both constructions are feasible up to 16 spins");
    HamiltonianSpec ham{geometry, coupling_j, delta};
    GroundStateResult exact = ground_state(ham, opts);
    RvbState rvb = build_rvb_enumerated(geometry);

    ComparisonRecord rec;
    rec.geometry = geometry;
    rec.degeneracy_warning = exact.degeneracy_warning;
    rec.energy_exact = exact.energy;
    rec.energy_rvb = energy_expectation(ham, rvb.state);
    rec.fidelity = fidelity(exact.state, rvb.state);
    double denom = std::abs(exact.energy);
    if (delta_e_per_site) denom /= geometry.n_sites();
    if (denom <= 0.0) throw DomainError("compare_exact_rvb: ground energy is zero");
    rec.delta_e = std::abs(rec.energy_rvb - exact.energy) / denom;
    rec.ggm_exact = compute_ggm(exact.state, Strategy::Full).value;
    rec.ggm_rvb = compute_ggm(rvb.state, Strategy::Full).value;
    return rec;
}

namespace {

struct FitStart {
    double g_c, log_k, x;
};

double sse_of(const std::vector<std::pair<int, double>>& pts, double g_c, double log_k, double x,
              int sign) {
    double sse = 0.0;
    for (const auto& [n, g] : pts) {
        double r = g_c + sign * std::exp(log_k) * std::pow(double(n), -x) - g;
        sse += r * r;
    }
    return sse;
}

/// Gauss-Newton with backtracking; returns (params, sse, converged).
struct GnResult {
    double g_c, log_k, x, sse;
    bool converged;
};

GnResult gauss_newton(const std::vector<std::pair<int, double>>& pts, FitStart start, int sign) {
    const int count = static_cast<int>(pts.size());
    Eigen::Vector3d p(start.g_c, start.log_k, start.x);
    double sse = sse_of(pts, p[0], p[1], p[2], sign);
    bool converged = false;
    for (int it = 0; it < 200 && !converged; ++it) {
        Eigen::MatrixXd jac(count, 3);
        Eigen::VectorXd res(count);
        for (int i = 0; i < count; ++i) {
            double n = pts[i].first;
            double decay = std::exp(p[1]) * std::pow(n, -p[2]);
            res[i] = p[0] + sign * decay - pts[i].second;
            jac(i, 0) = 1.0;
            jac(i, 1) = sign * decay;
            jac(i, 2) = -sign * decay * std::log(n);
        }
        Eigen::Vector3d step = (jac.transpose() * jac)
                                   .ldlt()
                                   .solve(-jac.transpose() * res);
        if (!step.allFinite()) break;
        double scale = 1.0;
        bool accepted = false;
        for (int half = 0; half < 40; ++half, scale *= 0.5) {
            Eigen::Vector3d q = p + scale * step;
            if (q[2] <= 0.0) continue;  // the exponent stays positive
            double trial = sse_of(pts, q[0], q[1], q[2], sign);
            if (trial <= sse) {
                if ((scale * step).norm() < 1e-12) converged = true;
                p = q;
                sse = trial;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            converged = (step.norm() < 1e-9);
            break;
        }
    }
    return {p[0], p[1], p[2], sse, converged};
}

}  // namespace

ScalingFit fit_scaling(const std::vector<std::pair<int, double>>& raw, const FitOptions& options) {
    if (options.min_points < 3)
        throw DomainError("fit_scaling: three points are the minimum for three parameters");
    std::vector<std::pair<int, double>> pts = raw;
    std::sort(pts.begin(), pts.end());
    for (std::size_t i = 1; i < pts.size(); ++i)
        if (pts[i].first == pts[i - 1].first)
            throw DomainError("fit_scaling: points must have distinct n");
    if (static_cast<int>(pts.size()) < options.min_points)
        throw DomainError("fit_scaling: need at least " + std::to_string(options.min_points) +
                          " points");

    double lo = pts.front().second, hi = pts.front().second;
    for (const auto& [n, g] : pts) {
        lo = std::min(lo, g);
        hi = std::max(hi, g);
    }

    ScalingFit fit;
    fit.points_used = pts;
    fit.exactly_determined = pts.size() == 3;

    if (hi - lo <= 1e-13 * std::max(1.0, std::abs(hi))) {  // flat data
        double mean = 0.0;
        for (const auto& [n, g] : pts) mean += g;
        mean /= pts.size();
        fit.g_c = mean;
        fit.k = 0.0;
        fit.x = 0.0;
        fit.sign = +1;
        fit.degenerate = true;
        double sse = 0.0;
        for (const auto& [n, g] : pts) sse += (g - mean) * (g - mean);
        fit.residual = std::sqrt(sse / pts.size());
        return fit;
    }

    int sign = 0;
    if (options.sign_hint) {
        sign = *options.sign_hint >= 0 ? +1 : -1;
    } else {
        bool nondecreasing = true, nonincreasing = true;
        for (std::size_t i = 1; i < pts.size(); ++i) {
            if (pts[i].second < pts[i - 1].second - 1e-14) nondecreasing = false;
            if (pts[i].second > pts[i - 1].second + 1e-14) nonincreasing = false;
        }
        if (nondecreasing == nonincreasing)
            throw DomainError("fit_scaling: non-monotone data needs a sign hint");
        sign = nondecreasing ? -1 : +1;  // data rising toward G_c approaches from below
    }

    const double span = hi - lo;
    std::vector<GnResult> winners;
    for (double x0 : {0.25, 0.5, 1.0, 2.0})
        for (double gc0 : {lo, hi}) {
            double k0 = std::abs(pts.front().second - gc0) *
                        std::pow(double(pts.front().first), x0);
            if (k0 < 1e-8 * span) k0 = span;
            winners.push_back(gauss_newton(pts, {gc0, std::log(k0), x0}, sign));
        }
    const GnResult* best = nullptr;
    for (const auto& w : winners)
        if (!best || w.sse < best->sse - 1e-15 * std::max(1.0, best->sse) ||
            (std::abs(w.sse - best->sse) <= 1e-15 * std::max(1.0, best->sse) && w.x < best->x))
            best = &w;

    fit.g_c = best->g_c;
    fit.k = std::exp(best->log_k);
    fit.x = best->x;
    fit.sign = sign;
    fit.residual = std::sqrt(best->sse / pts.size());
    fit.degenerate = fit.k < 1e-12 * std::max(1.0, std::abs(fit.g_c));
    return fit;
}

OddEvenReport odd_even_report(const std::map<int, ScalingFit>& fits) {
    OddEvenReport rep;
    for (const auto& [legs, fit] : fits)
        (legs % 2 == 1 ? rep.odd_fits : rep.even_fits).emplace_back(legs, fit);
    if (rep.odd_fits.size() < 2 || rep.even_fits.size() < 2)
        throw DomainError("odd_even_report: need fits for at least two odd and two even leg counts");

    const auto& odd_top = rep.odd_fits.back();
    const auto& even_top = rep.even_fits.back();
    rep.gc_gap = std::abs(odd_top.second.g_c - even_top.second.g_c);
    rep.x_gap = std::abs(odd_top.second.x - even_top.second.x);

    std::ostringstream os;
    auto table = [&os](const char* title, const std::vector<std::pair<int, ScalingFit>>& fits) {
        os << title << "\n";
        os << "  L    G_c          k            x        rms          points\n";
        char line[160];
        for (const auto& [legs, f] : fits) {
            std::snprintf(line, sizeof line, "  %-4d %-12.8f %-12.8f %-8.4f %-12.3e %zu%s\n", legs,
                          f.g_c, f.k, f.x, f.residual, f.points_used.size(),
                          f.exactly_determined ? " (exactly determined)" : "");
            os << line;
        }
    };
    table("odd-legged ladders", rep.odd_fits);
    table("even-legged ladders", rep.even_fits);
    char line[160];
    std::snprintf(line, sizeof line,
                  "largest-L gaps: |G_c(odd) - G_c(even)| = %.8f, |x(odd) - x(even)| = %.8f\n",
                  rep.gc_gap, rep.x_gap);
    os << line;
    rep.text = os.str();
    return rep;
}

std::string scaling_fit_to_json(const ScalingFit& fit) {
    nlohmann::json j;
    j["g_c"] = fit.g_c;
    j["k"] = fit.k;
    j["x"] = fit.x;
    j["sign"] = fit.sign;
    j["residual"] = fit.residual;
    j["degenerate"] = fit.degenerate;
    j["exactly_determined"] = fit.exactly_determined;
    auto& pts = j["points"] = nlohmann::json::array();
    for (const auto& [n, g] : fit.points_used) pts.push_back({n, g});
    return j.dump();
}

}  // namespace ladderent
