#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace ladderent {

enum class BoundaryMode { Open, PeriodicAlongLegs };

enum class Sublattice : uint8_t { A = 0, B = 1 };

/// An L-legged, M-rung spin-1/2 ladder. Sites are indexed rung-major:
/// site = rung * legs + leg, so a two-rung block is a contiguous index range.
/// Periodic boundaries wrap the rung index only (along the leg direction);
/// the rung direction is always open.
struct LadderGeometry {
    int legs = 0;
    int rungs = 0;
    BoundaryMode boundary = BoundaryMode::Open;
    std::vector<std::pair<int, int>> bonds;  // unordered pairs, i < j, sorted

    int n_sites() const { return legs * rungs; }
    int site_index(int leg, int rung) const { return rung * legs + leg; }
    int leg_of(int site) const { return site % legs; }
    int rung_of(int site) const { return site / legs; }
};

LadderGeometry build_ladder(int legs, int rungs, BoundaryMode boundary);

Sublattice sublattice_of(const LadderGeometry& geometry, int site);

/// True when every bond joins sublattice A to sublattice B. Fails only for
/// leg-wrap bonds of odd-rung periodic ladders.
bool is_bipartite(const LadderGeometry& geometry);

std::string boundary_name(BoundaryMode boundary);
BoundaryMode boundary_from_name(const std::string& name);

std::string geometry_to_json(const LadderGeometry& geometry);
LadderGeometry geometry_from_json(const std::string& text);

}  // namespace ladderent
