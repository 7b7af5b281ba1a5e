#include "ladderent/lattice.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

#include "ladderent/errors.hpp"

namespace ladderent {

LadderGeometry build_ladder(int legs, int rungs, BoundaryMode boundary) {
    if (legs < 1 || rungs < 1)
        throw DomainError("build_ladder: legs and rungs must be positive");
    if (boundary == BoundaryMode::PeriodicAlongLegs && rungs < 3)
        throw DomainError(
            "build_ladder: periodic boundary needs at least 3 rungs "
            "(a 2-rung wrap would duplicate an existing bond)");

    LadderGeometry g;
    g.legs = legs;
    g.rungs = rungs;
    g.boundary = boundary;

    // Rung bonds: adjacent legs within one rung.
    for (int m = 0; m < rungs; ++m)
        for (int l = 0; l + 1 < legs; ++l)
            g.bonds.emplace_back(g.site_index(l, m), g.site_index(l + 1, m));

    // Leg bonds: adjacent rungs on one leg, wrapping when periodic.
    for (int m = 0; m + 1 < rungs; ++m)
        for (int l = 0; l < legs; ++l)
            g.bonds.emplace_back(g.site_index(l, m), g.site_index(l, m + 1));
    if (boundary == BoundaryMode::PeriodicAlongLegs)
        for (int l = 0; l < legs; ++l) {
            int a = g.site_index(l, rungs - 1);
            int b = g.site_index(l, 0);
            g.bonds.emplace_back(std::min(a, b), std::max(a, b));
        }

    for (auto& [i, j] : g.bonds)
        if (i > j) std::swap(i, j);
    std::sort(g.bonds.begin(), g.bonds.end());
    return g;
}

Sublattice sublattice_of(const LadderGeometry& geometry, int site) {
    if (site < 0 || site >= geometry.n_sites())
        throw DomainError("sublattice_of: site index out of range");
    int parity = (geometry.leg_of(site) + geometry.rung_of(site)) % 2;
    return parity == 0 ? Sublattice::A : Sublattice::B;
}

bool is_bipartite(const LadderGeometry& geometry) {
    for (const auto& [i, j] : geometry.bonds)
        if (sublattice_of(geometry, i) == sublattice_of(geometry, j)) return false;
    return true;
}

std::string boundary_name(BoundaryMode boundary) {
    return boundary == BoundaryMode::Open ? "open" : "periodic";
}

BoundaryMode boundary_from_name(const std::string& name) {
    if (name == "open") return BoundaryMode::Open;
    if (name == "periodic") return BoundaryMode::PeriodicAlongLegs;
    throw DomainError("unknown boundary mode: " + name);
}

std::string geometry_to_json(const LadderGeometry& geometry) {
    nlohmann::json j;
    j["legs"] = geometry.legs;
    j["rungs"] = geometry.rungs;
    j["boundary"] = boundary_name(geometry.boundary);
    j["bonds"] = geometry.bonds;
    return j.dump();
}

LadderGeometry geometry_from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    auto g = build_ladder(j.at("legs").get<int>(), j.at("rungs").get<int>(),
                          boundary_from_name(j.at("boundary").get<std::string>()));
    if (j.contains("bonds")) {
        auto bonds = j.at("bonds").get<std::vector<std::pair<int, int>>>();
        std::sort(bonds.begin(), bonds.end());
        if (bonds != g.bonds)
            throw DomainError("geometry_from_json: bond list does not match the stated shape");
    }
    return g;
}

}  // namespace ladderent
