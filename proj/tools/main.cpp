#include <cstdio>
#include <string>

#include "CLI11.hpp"

#include "ladderent/run.hpp"

namespace {

void add_shared_options(CLI::App* cmd, ladderent::RunConfig& config) {
    cmd->add_option("--legs", config.legs, "leg counts: single, list, or a..b range");
    cmd->add_option("--rungs", config.rungs, "rung counts: single, list, or a..b range");
    cmd->add_option("--boundary", config.boundary, "open | periodic")
        ->check(CLI::IsMember({"open", "periodic"}));
    cmd->add_option("-J,--coupling", config.coupling_j, "antiferromagnetic coupling J > 0");
    cmd->add_option("--delta", config.delta, "zz anisotropy (1 = isotropic Heisenberg)");
    cmd->add_option("--strategy", config.strategy, "auto | full | restricted")
        ->check(CLI::IsMember({"auto", "full", "restricted"}));
    cmd->add_option("--jobs", config.jobs, "geometries processed concurrently")
        ->envname("LADDER_ENT_THREADS");
    cmd->add_option("--seed", config.seed, "start-vector seed for reproducible runs");
    cmd->add_option("--out", config.out_dir, "output directory");
    cmd->add_option("--tol", config.tol, "ground-state solver tolerance");
    cmd->add_option("--max-iter", config.max_iter, "ground-state iteration cap");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"genuine multisite entanglement in Heisenberg spin ladders"};
    app.set_config("--config", "", "key=value config file; flags override file values");
    app.require_subcommand(1);

    ladderent::RunConfig config;

    auto* scan = app.add_subcommand("scan", "sweep geometries, write GGM records and CSV");
    add_shared_options(scan, config);
    scan->add_option("--model", config.model, "exact | rvb | rvb-recursive")
        ->check(CLI::IsMember({"exact", "rvb", "rvb-recursive"}));
    scan->add_flag("--save-states", config.save_states, "export state vectors alongside records");

    auto* exact = app.add_subcommand("exact-ggm", "GGM of exact ground states");
    add_shared_options(exact, config);
    exact->add_flag("--save-states", config.save_states, "export state vectors alongside records");

    auto* rvb = app.add_subcommand("rvb-ggm", "GGM of RVB covering states");
    add_shared_options(rvb, config);
    rvb->add_option("--model", config.model, "rvb | rvb-recursive")
        ->check(CLI::IsMember({"exact", "rvb", "rvb-recursive"}));
    rvb->add_flag("--save-states", config.save_states, "export state vectors alongside records");

    auto* compare = app.add_subcommand("compare", "exact vs RVB fidelity and energies");
    add_shared_options(compare, config);
    compare->add_flag("--delta-e-per-site", config.delta_e_per_site,
                      "divide the energy-difference denominator by the site count");

    auto* fit = app.add_subcommand("fit", "finite-size scaling fits of a scan CSV");
    fit->add_option("--input", config.input, "results.csv produced by scan")->required();
    fit->add_option("--out", config.out_dir, "output directory");
    fit->add_option("--min-points", config.min_points,
                    "points required per leg count (3 allows an exactly determined fit)");

    auto* validate = app.add_subcommand("validate", "run oracle cross-checks");
    validate->add_option("--what", config.what, "rvb-recursion | restricted-ggm | lanczos")
        ->check(CLI::IsMember({"rvb-recursion", "restricted-ggm", "lanczos"}));
    validate->add_option("--max-spins", config.max_spins, "largest system the checks touch");
    validate->add_option("--out", config.out_dir, "output directory");
    add_shared_options(validate, config);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    for (auto* cmd : {scan, exact, rvb, compare, fit, validate})
        if (cmd->parsed()) config.command = cmd->get_name();
    return ladderent::run(config);
}
