#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ladderent/spectral.hpp"

namespace ladderent {

/// One resolved invocation. String fields keep the user's spelling so a config
/// round-trips losslessly through its file form.
struct RunConfig {
    std::string command = "scan";  // exact-ggm | rvb-ggm | compare | scan | fit | validate
    std::string legs = "2";        // "2", "1,3", "2..8" or any comma mix
    std::string rungs = "4";
    std::string boundary = "periodic";  // open | periodic
    std::string model = "exact";        // exact | rvb | rvb-recursive
    std::string strategy = "auto";      // auto | full | restricted
    double coupling_j = 1.0;
    double delta = 1.0;
    int jobs = 1;
    uint64_t seed = kLanczosDefaultSeed;
    std::string out_dir = "out";
    double tol = 1e-10;
    int max_iter = 500;
    bool delta_e_per_site = false;
    bool save_states = false;
    std::string input;       // fit: results.csv from a scan
    int min_points = 4;      // fit: points required per leg count
    std::string what = "rvb-recursion";  // validate target
    int max_spins = 20;
};

/// "1,3", "2..8", "4" and combinations; sorted, deduplicated.
std::vector<int> parse_int_list(const std::string& spec);

std::string config_to_text(const RunConfig& config);
RunConfig config_from_text(const std::string& text);
uint64_t config_hash(const RunConfig& config);

/// Executes the command, writing per-geometry JSON records, an aggregate CSV,
/// and a manifest (always, also on failure) under config.out_dir.
/// Returns 0 on success, 2 on usage errors, 3 on compute errors.
int run(const RunConfig& config);

}  // namespace ladderent
