#include "ladderent/run.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "ladderent/analysis.hpp"
#include "ladderent/bits.hpp"
#include "ladderent/errors.hpp"
#include "ladderent/ggm.hpp"
#include "ladderent/rvb.hpp"
#include "ladderent/tolerances.hpp"

namespace ladderent {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<int> parse_int_list(const std::string& spec) {
    std::vector<int> out;
    std::stringstream ss(spec);
    std::string piece;
    while (std::getline(ss, piece, ',')) {
        if (piece.empty()) continue;
        auto dots = piece.find("..");
        try {
            if (dots == std::string::npos) {
                out.push_back(std::stoi(piece));
            } else {
                int lo = std::stoi(piece.substr(0, dots));
                int hi = std::stoi(piece.substr(dots + 2));
                if (hi < lo) throw DomainError("parse_int_list: empty range " + piece);
                for (int v = lo; v <= hi; ++v) out.push_back(v);
            }
        } catch (const std::invalid_argument&) {
            throw DomainError("parse_int_list: cannot parse '" + piece + "'");
        }
    }
    if (out.empty()) throw DomainError("parse_int_list: empty list '" + spec + "'");
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string join_sites(const std::vector<int>& sites) {
    std::string s;
    for (std::size_t i = 0; i < sites.size(); ++i) {
        if (i) s += ';';
        s += std::to_string(sites[i]);
    }
    return s;
}

std::string now_iso8601() {
    auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%FT%TZ", std::gmtime(&t));
    return buf;
}

const std::vector<std::pair<std::string, std::string>> config_items(const RunConfig& c) {
    return {
        {"command", c.command},
        {"legs", c.legs},
        {"rungs", c.rungs},
        {"boundary", c.boundary},
        {"model", c.model},
        {"strategy", c.strategy},
        {"j", fmt_double(c.coupling_j)},
        {"delta", fmt_double(c.delta)},
        {"jobs", std::to_string(c.jobs)},
        {"seed", std::to_string(c.seed)},
        {"out", c.out_dir},
        {"tol", fmt_double(c.tol)},
        {"max-iter", std::to_string(c.max_iter)},
        {"delta-e-per-site", c.delta_e_per_site ? "true" : "false"},
        {"save-states", c.save_states ? "true" : "false"},
        {"input", c.input},
        {"min-points", std::to_string(c.min_points)},
        {"what", c.what},
        {"max-spins", std::to_string(c.max_spins)},
    };
}

}  // namespace

std::string config_to_text(const RunConfig& c) {
    std::string out;
    for (const auto& [k, v] : config_items(c)) out += k + "=" + v + "\n";
    return out;
}

RunConfig config_from_text(const std::string& text) {
    RunConfig c;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw DomainError("config: expected key=value, got '" + line + "'");
        std::string k = line.substr(0, eq), v = line.substr(eq + 1);
        if (k == "command") c.command = v;
        else if (k == "legs") c.legs = v;
        else if (k == "rungs") c.rungs = v;
        else if (k == "boundary") c.boundary = v;
        else if (k == "model") c.model = v;
        else if (k == "strategy") c.strategy = v;
        else if (k == "j") c.coupling_j = std::stod(v);
        else if (k == "delta") c.delta = std::stod(v);
        else if (k == "jobs") c.jobs = std::stoi(v);
        else if (k == "seed") c.seed = std::stoull(v);
        else if (k == "out") c.out_dir = v;
        else if (k == "tol") c.tol = std::stod(v);
        else if (k == "max-iter") c.max_iter = std::stoi(v);
        else if (k == "delta-e-per-site") c.delta_e_per_site = v == "true" || v == "1";
        else if (k == "save-states") c.save_states = v == "true" || v == "1";
        else if (k == "input") c.input = v;
        else if (k == "min-points") c.min_points = std::stoi(v);
        else if (k == "what") c.what = v;
        else if (k == "max-spins") c.max_spins = std::stoi(v);
        else throw DomainError("config: unknown key '" + k + "'");
    }
    return c;
}

uint64_t config_hash(const RunConfig& c) {
    uint64_t h = 0xcbf29ce484222325ull;  // FNV-1a
    for (char ch : config_to_text(c)) {
        h ^= static_cast<unsigned char>(ch);
        h *= 0x100000001b3ull;
    }
    return h;
}

namespace {

// ---------------------------------------------------------------------------
// shared record machinery

struct GeometryRecord {
    int legs = 0, rungs = 0, n = 0;
    std::string boundary, model;
    double delta = 0.0;
    double energy = 0.0;
    GgmResult ggm;
    bool degeneracy_warning = false;
    double wall_seconds = 0.0;
};

struct RunContext {
    RunConfig config;
    fs::path out;
    std::vector<std::string> warnings;
    std::mutex mutex;
    std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();
    std::string started_at = now_iso8601();
    int rows_written = 0;

    void warn(const std::string& msg) {
        std::lock_guard<std::mutex> lock(mutex);
        warnings.push_back(msg);
    }
};

void write_manifest(RunContext& ctx, const std::optional<std::pair<std::string, std::string>>& error) {
    json m;
    m["command"] = ctx.config.command;
    json cfg;
    for (const auto& [k, v] : config_items(ctx.config)) cfg[k] = v;
    m["config"] = cfg;
    char hash[32];
    std::snprintf(hash, sizeof hash, "%016llx",
                  static_cast<unsigned long long>(config_hash(ctx.config)));
    m["config_hash"] = hash;
    m["version"] = "ladderent 0.1.0";
    m["started_at"] = ctx.started_at;
    m["finished_at"] = now_iso8601();
    m["wall_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - ctx.started).count();
    m["warnings"] = ctx.warnings;
    m["rows_written"] = ctx.rows_written;
    if (error) m["error"] = {{"category", error->first}, {"message", error->second}};
    else m["error"] = nullptr;
    std::ofstream(ctx.out / "manifest.json") << m.dump(2) << "\n";
    if (error) {
        json e = {{"error", {{"category", error->first}, {"message", error->second}}}};
        std::ofstream(ctx.out / "error.json") << e.dump(2) << "\n";
    }
}

Strategy pick_strategy(const std::string& name, int n) {
    if (name == "full") return Strategy::Full;
    if (name == "restricted") return Strategy::Restricted2xL;
    if (name == "auto") return Strategy::Restricted2xL;
    throw DomainError("unknown strategy '" + name + "' (auto, full, restricted)");
    (void)n;
}

GeometryRecord compute_record(const RunConfig& config, const std::string& model, int legs,
                              int rungs) {
    auto t0 = std::chrono::steady_clock::now();
    LadderGeometry geometry = build_ladder(legs, rungs, boundary_from_name(config.boundary));
    GeometryRecord rec;
    rec.legs = legs;
    rec.rungs = rungs;
    rec.n = geometry.n_sites();
    rec.boundary = config.boundary;
    rec.model = model;
    rec.delta = config.delta;

    StateVector state;
    if (model == "exact") {
        HamiltonianSpec ham{geometry, config.coupling_j, config.delta};
        LanczosOptions opts;
        opts.tol = config.tol;
        opts.max_iter = config.max_iter;
        opts.seed = config.seed;
        GroundStateResult gs = ground_state(ham, opts);
        rec.energy = gs.energy;
        rec.degeneracy_warning = gs.degeneracy_warning;
        state = std::move(gs.state);
    } else if (model == "rvb" || model == "rvb-recursive") {
        RvbState rvb = model == "rvb" ? build_rvb_enumerated(geometry)
                                      : build_rvb_recursive(geometry);
        HamiltonianSpec ham{geometry, config.coupling_j, config.delta};
        rec.energy = energy_expectation(ham, rvb.state);
        state = std::move(rvb.state);
    } else {
        throw DomainError("unknown model '" + model + "' (exact, rvb, rvb-recursive)");
    }

    rec.ggm = compute_ggm(state, pick_strategy(config.strategy, rec.n), geometry);
    if (config.save_states) {
        fs::path dir = fs::path(config.out_dir) / "states";
        fs::create_directories(dir);
        char name[96];
        std::snprintf(name, sizeof name, "state_L%d_M%d_%s_%s.bin", legs, rungs,
                      rec.boundary.c_str(), model.c_str());
        save_state_binary(state, (dir / name).string());
    }
    rec.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

json record_to_json(const GeometryRecord& r) {
    json j;
    j["legs"] = r.legs;
    j["rungs"] = r.rungs;
    j["boundary"] = r.boundary;
    j["n"] = r.n;
    j["model"] = r.model;
    j["delta"] = r.delta;
    j["energy"] = r.energy;
    j["ggm"] = json::parse(ggm_result_to_json(r.ggm));
    j["degeneracy_warning"] = r.degeneracy_warning;
    j["wall_seconds"] = r.wall_seconds;
    return j;
}

constexpr const char* kCsvHeader =
    "legs,rungs,boundary,n,model,delta,energy,ggm,lambda_sq,strategy,argmax_sites,"
    "degeneracy_warning\n";

std::string record_to_csv(const GeometryRecord& r) {
    std::string row;
    row += std::to_string(r.legs) + ",";
    row += std::to_string(r.rungs) + ",";
    row += r.boundary + ",";
    row += std::to_string(r.n) + ",";
    row += r.model + ",";
    row += fmt_double(r.delta) + ",";
    row += fmt_double(r.energy) + ",";
    row += fmt_double(r.ggm.value) + ",";
    row += fmt_double(r.ggm.lambda_sq) + ",";
    row += strategy_name(r.ggm.strategy) + ",";
    row += join_sites(r.ggm.argmax_sites) + ",";
    row += r.degeneracy_warning ? "1" : "0";
    row += "\n";
    return row;
}

/// Runs fn(i) for i in [0, count) on config.jobs threads; exceptions surface
/// after all workers join.
template <typename Fn>
void parallel_for(int jobs, int count, Fn&& fn) {
    if (jobs <= 1 || count <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::mutex err_mutex;
    std::exception_ptr error;
    const int workers = std::min(jobs, count);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

// ---------------------------------------------------------------------------
// commands

int run_scan(RunContext& ctx, const std::string& model) {
    const auto legs = parse_int_list(ctx.config.legs);
    const auto rungs = parse_int_list(ctx.config.rungs);
    std::vector<std::pair<int, int>> grid;
    for (int l : legs)
        for (int m : rungs) grid.emplace_back(l, m);

    std::vector<std::optional<GeometryRecord>> records(grid.size());
    parallel_for(ctx.config.jobs, static_cast<int>(grid.size()), [&](int i) {
        const auto [l, m] = grid[i];
        try {
            records[i] = compute_record(ctx.config, model, l, m);
        } catch (const DomainError& e) {
            // structurally impossible combinations (periodic 2 rungs, odd-rung
            // RVB, ...) are skipped so ranged scans stay usable
            ctx.warn("skipped " + std::to_string(l) + "x" + std::to_string(m) + ": " + e.what());
        } catch (const ConstructionError& e) {
            ctx.warn("skipped " + std::to_string(l) + "x" + std::to_string(m) + ": " + e.what());
        }
    });

    std::ofstream csv(ctx.out / "results.csv", std::ios::binary);
    csv << kCsvHeader;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!records[i]) continue;
        csv << record_to_csv(*records[i]);
        char name[96];
        std::snprintf(name, sizeof name, "record_L%d_M%d_%s_%s.json", records[i]->legs,
                      records[i]->rungs, records[i]->boundary.c_str(), model.c_str());
        fs::create_directories(ctx.out / "records");
        std::ofstream(ctx.out / "records" / name) << record_to_json(*records[i]).dump(2) << "\n";
        ++ctx.rows_written;
    }
    if (ctx.rows_written == 0)
        throw DomainError("scan: no geometry in the requested grid could be computed");
    return 0;
}

int run_compare(RunContext& ctx) {
    const auto legs = parse_int_list(ctx.config.legs);
    const auto rungs = parse_int_list(ctx.config.rungs);
    std::vector<std::pair<int, int>> grid;
    for (int l : legs)
        for (int m : rungs) grid.emplace_back(l, m);

    std::vector<std::optional<ComparisonRecord>> records(grid.size());
    parallel_for(ctx.config.jobs, static_cast<int>(grid.size()), [&](int i) {
        const auto [l, m] = grid[i];
        try {
            LadderGeometry g = build_ladder(l, m, boundary_from_name(ctx.config.boundary));
            LanczosOptions opts;
            opts.tol = ctx.config.tol;
            opts.max_iter = ctx.config.max_iter;
            opts.seed = ctx.config.seed;
            records[i] = compare_exact_rvb(g, ctx.config.coupling_j, ctx.config.delta,
                                           ctx.config.delta_e_per_site, opts);
        } catch (const DomainError& e) {
            ctx.warn("skipped " + std::to_string(l) + "x" + std::to_string(m) + ": " + e.what());
        } catch (const ConstructionError& e) {
            ctx.warn("skipped " + std::to_string(l) + "x" + std::to_string(m) + ": " + e.what());
        }
    });

    std::ofstream csv(ctx.out / "compare.csv", std::ios::binary);
    csv << "legs,rungs,boundary,n,delta,fidelity,delta_e,ggm_exact,ggm_rvb,energy_exact,energy_"
           "rvb\n";
    json all = json::array();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!records[i]) continue;
        const auto& r = *records[i];
        csv << r.geometry.legs << "," << r.geometry.rungs << "," << ctx.config.boundary << ","
            << r.geometry.n_sites() << "," << fmt_double(ctx.config.delta) << ","
            << fmt_double(r.fidelity) << "," << fmt_double(r.delta_e) << ","
            << fmt_double(r.ggm_exact) << "," << fmt_double(r.ggm_rvb) << ","
            << fmt_double(r.energy_exact) << "," << fmt_double(r.energy_rvb) << "\n";
        all.push_back({{"legs", r.geometry.legs},
                       {"rungs", r.geometry.rungs},
                       {"boundary", ctx.config.boundary},
                       {"fidelity", r.fidelity},
                       {"delta_e", r.delta_e},
                       {"ggm_exact", r.ggm_exact},
                       {"ggm_rvb", r.ggm_rvb},
                       {"energy_exact", r.energy_exact},
                       {"energy_rvb", r.energy_rvb},
                       {"degeneracy_warning", r.degeneracy_warning}});
        ++ctx.rows_written;
    }
    std::ofstream(ctx.out / "compare.json") << all.dump(2) << "\n";
    if (ctx.rows_written == 0) throw DomainError("compare: nothing to compare in the grid");
    return 0;
}

struct CsvRow {
    int legs, rungs, n;
    std::string boundary, model;
    double ggm;
};

std::vector<CsvRow> read_results_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw DomainError("fit: cannot open input CSV " + path);
    std::string line;
    if (!std::getline(f, line)) throw DomainError("fit: empty CSV " + path);
    std::vector<std::string> header;
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) header.push_back(cell);
    }
    auto col = [&](const std::string& name) {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw DomainError("fit: CSV misses column '" + name + "'");
        return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t c_legs = col("legs"), c_rungs = col("rungs"), c_n = col("n"),
                      c_ggm = col("ggm"), c_boundary = col("boundary"), c_model = col("model");
    std::vector<CsvRow> rows;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        rows.push_back({std::stoi(cells.at(c_legs)), std::stoi(cells.at(c_rungs)),
                        std::stoi(cells.at(c_n)), cells.at(c_boundary), cells.at(c_model),
                        std::stod(cells.at(c_ggm))});
    }
    return rows;
}

int run_fit(RunContext& ctx) {
    if (ctx.config.input.empty()) throw DomainError("fit: --input CSV is required");
    auto rows = read_results_csv(ctx.config.input);
    // even-rung subsequences only: odd rungs oscillate against the power law
    std::map<int, std::vector<std::pair<int, double>>> per_leg;
    for (const auto& r : rows)
        if (r.rungs % 2 == 0) per_leg[r.legs].push_back({r.n, r.ggm});

    std::map<int, ScalingFit> fits;
    json jfits = json::object();
    std::ofstream csv(ctx.out / "fits.csv", std::ios::binary);
    csv << "legs,g_c,k,x,sign,residual,points,degenerate,exactly_determined\n";
    for (auto& [legs, pts] : per_leg) {
        FitOptions opts;
        opts.min_points = ctx.config.min_points;
        try {
            ScalingFit fit = fit_scaling(pts, opts);
            fits[legs] = fit;
            jfits[std::to_string(legs)] = json::parse(scaling_fit_to_json(fit));
            csv << legs << "," << fmt_double(fit.g_c) << "," << fmt_double(fit.k) << ","
                << fmt_double(fit.x) << "," << (fit.sign > 0 ? "+" : "-") << ","
                << fmt_double(fit.residual) << "," << fit.points_used.size() << ","
                << (fit.degenerate ? 1 : 0) << "," << (fit.exactly_determined ? 1 : 0) << "\n";
            ++ctx.rows_written;
            // plot-ready two-column data
            char name[64];
            std::snprintf(name, sizeof name, "plot_L%d.dat", legs);
            std::ofstream plot(ctx.out / name, std::ios::binary);
            std::sort(pts.begin(), pts.end());
            for (const auto& [n, g] : pts) plot << n << " " << fmt_double(g) << "\n";
        } catch (const DomainError& e) {
            ctx.warn("fit skipped for L=" + std::to_string(legs) + ": " + e.what());
        }
    }
    std::ofstream(ctx.out / "fits.json") << jfits.dump(2) << "\n";

    int odd = 0, even = 0;
    for (const auto& [legs, fit] : fits) (legs % 2 ? odd : even)++;
    if (odd >= 2 && even >= 2) {
        OddEvenReport rep = odd_even_report(fits);
        std::ofstream(ctx.out / "parity_report.txt") << rep.text;
        json jr;
        jr["gc_gap"] = rep.gc_gap;
        jr["x_gap"] = rep.x_gap;
        jr["odd_legs"] = json::array();
        for (const auto& [legs, fit] : rep.odd_fits) jr["odd_legs"].push_back(legs);
        jr["even_legs"] = json::array();
        for (const auto& [legs, fit] : rep.even_fits) jr["even_legs"].push_back(legs);
        std::ofstream(ctx.out / "parity_report.json") << jr.dump(2) << "\n";
    } else {
        ctx.warn("parity report skipped: needs fits for two odd and two even leg counts");
    }
    if (fits.empty()) throw DomainError("fit: no leg count had enough even-rung points");
    return 0;
}

// ---------------------------------------------------------------------------
// validate: oracle checks runnable from the CLI

/// Dense ground energy in the half-filled sector, built bond by bond.
double dense_sector_ground_energy(const HamiltonianSpec& spec) {
    const int n = spec.geometry.n_sites();
    auto basis = sector_basis(n, n / 2);
    const Eigen::Index dim = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    const double jz = spec.coupling_j * 0.25 * spec.delta;
    const double jf = spec.coupling_j * 0.5;
    for (Eigen::Index i = 0; i < dim; ++i) {
        uint64_t p = basis[i];
        for (const auto& [a, b] : spec.geometry.bonds) {
            bool anti = ((p >> a) ^ (p >> b)) & 1;
            h(i, i) += anti ? -jz : jz;
            if (anti) {
                uint64_t q = p ^ ((uint64_t{1} << a) | (uint64_t{1} << b));
                h(static_cast<Eigen::Index>(bits::pattern_rank(q)), i) += jf;
            }
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

/// Dense ground energy over the full 2^n space (small n); independent of any
/// sector assumption.
double dense_full_ground_energy(const HamiltonianSpec& spec) {
    const int n = spec.geometry.n_sites();
    if (n > 10) throw ResourceError("dense_full_ground_energy: 10 sites at most");
    const Eigen::Index dim = Eigen::Index{1} << n;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    const double jz = spec.coupling_j * 0.25 * spec.delta;
    const double jf = spec.coupling_j * 0.5;
    for (Eigen::Index p = 0; p < dim; ++p)
        for (const auto& [a, b] : spec.geometry.bonds) {
            bool anti = ((p >> a) ^ (p >> b)) & 1;
            h(p, p) += anti ? -jz : jz;
            if (anti) h(p ^ ((Eigen::Index{1} << a) | (Eigen::Index{1} << b)), p) += jf;
        }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

std::vector<LadderGeometry> geometry_sweep(int max_n) {
    std::vector<LadderGeometry> out;
    for (int legs = 1; legs <= max_n; ++legs)
        for (int rungs = 1; legs * rungs <= max_n; ++rungs) {
            out.push_back(build_ladder(legs, rungs, BoundaryMode::Open));
            if (rungs >= 3) out.push_back(build_ladder(legs, rungs, BoundaryMode::PeriodicAlongLegs));
        }
    return out;
}

int run_validate(RunContext& ctx) {
    const std::string& what = ctx.config.what;
    std::vector<std::string> findings;
    int checks = 0;

    if (what == "rvb-recursion") {
        for (int legs = 1; legs <= 4; ++legs) {
            auto norms = norm_recursion(legs, std::max(2, ctx.config.max_spins / legs));
            for (int rungs = 2; legs * rungs <= ctx.config.max_spins; rungs += 2) {
                for (auto boundary : {BoundaryMode::Open, BoundaryMode::PeriodicAlongLegs}) {
                    if (boundary == BoundaryMode::PeriodicAlongLegs && rungs < 4) continue;
                    LadderGeometry g = build_ladder(legs, rungs, boundary);
                    RvbState en = build_rvb_enumerated(g);
                    RvbState rec = build_rvb_recursive(g);
                    ++checks;
                    double fid = fidelity(en.state, rec.state);
                    if (std::abs(fid - 1.0) > tol::kOracle)
                        findings.push_back("recursion/enumeration fidelity " + fmt_double(fid) +
                                           " on " + std::to_string(legs) + "x" +
                                           std::to_string(rungs) + " " + boundary_name(boundary));
                    if (en.covering_count != rec.covering_count)
                        findings.push_back("covering count mismatch on " + std::to_string(legs) +
                                           "x" + std::to_string(rungs));
                    if (boundary == BoundaryMode::Open) {
                        double want = en.norm_sq;
                        double got = norms.values.at(rungs - 1);
                        if (std::abs(want - got) > tol::kOracle * std::max(1.0, want))
                            findings.push_back("norm recursion " + fmt_double(got) + " vs " +
                                               fmt_double(want) + " on " + std::to_string(legs) +
                                               "x" + std::to_string(rungs));
                    }
                    if (rungs >= 4) {
                        std::vector<int> block;
                        for (int j = 0; j < 2 * legs; ++j) block.push_back((rungs - 2) * legs + j);
                        auto oracle = reduced_density_matrix(en.state, block);
                        auto fast = block_rdm_2xL(legs, rungs, boundary);
                        double diff = (oracle.matrix - fast.matrix).cwiseAbs().maxCoeff();
                        if (diff > tol::kOracle)
                            findings.push_back("block rdm differs by " + fmt_double(diff) + " on " +
                                               std::to_string(legs) + "x" + std::to_string(rungs) +
                                               " " + boundary_name(boundary));
                    }
                }
            }
        }
    } else if (what == "restricted-ggm") {
        const int cap = std::min(ctx.config.max_spins, 16);
        for (const auto& g : geometry_sweep(cap)) {
            if (g.n_sites() < 4 || g.n_sites() % 2 != 0) continue;
            std::vector<StateVector> states;
            {
                HamiltonianSpec ham{g, ctx.config.coupling_j, ctx.config.delta};
                states.push_back(ground_state(ham).state);
            }
            if (g.rungs % 2 == 0 && is_bipartite(g)) states.push_back(build_rvb_enumerated(g).state);
            for (const auto& s : states) {
                ++checks;
                auto rep = validate_restricted_strategy(s, g);
                if (!rep.agrees)
                    findings.push_back("restricted GGM misses the optimum on " +
                                       std::to_string(g.legs) + "x" + std::to_string(g.rungs) + " " +
                                       boundary_name(g.boundary) + ": full " +
                                       fmt_double(rep.ggm_full) + " vs restricted " +
                                       fmt_double(rep.ggm_restricted));
            }
        }
    } else if (what == "lanczos") {
        const int cap = std::min(ctx.config.max_spins, 12);
        for (const auto& g : geometry_sweep(cap)) {
            if (g.n_sites() < 2 || g.n_sites() % 2 != 0) continue;
            for (double delta : {1.0, 1.2, 1.4}) {
                HamiltonianSpec ham{g, ctx.config.coupling_j, delta};
                ++checks;
                double lanczos = ground_state(ham).energy;
                double dense = dense_sector_ground_energy(ham);
                if (std::abs(lanczos - dense) > 1e-9)
                    findings.push_back("lanczos " + fmt_double(lanczos) + " vs dense " +
                                       fmt_double(dense) + " on " + std::to_string(g.legs) + "x" +
                                       std::to_string(g.rungs) + " " + boundary_name(g.boundary) +
                                       " delta " + fmt_double(delta));
                if (g.n_sites() <= 8) {
                    double full = dense_full_ground_energy(ham);
                    if (std::abs(lanczos - full) > 1e-9)
                        findings.push_back("sector minimum differs from full spectrum on " +
                                           std::to_string(g.legs) + "x" + std::to_string(g.rungs));
                }
            }
        }
    } else {
        throw DomainError("validate: unknown target '" + what +
                          "' (rvb-recursion, restricted-ggm, lanczos)");
    }

    json report;
    report["what"] = what;
    report["checks"] = checks;
    report["findings"] = findings;
    std::ofstream(ctx.out / "validate.json") << report.dump(2) << "\n";
    std::printf("validate %s: %d checks, %zu findings\n", what.c_str(), checks, findings.size());
    for (const auto& f : findings) std::printf("  FINDING: %s\n", f.c_str());
    if (!findings.empty())
        throw DomainError("validate " + what + ": " + std::to_string(findings.size()) +
                          " findings (see validate.json)");
    ctx.rows_written = checks;
    return 0;
}

}  // namespace

int run(const RunConfig& config) {
    RunContext ctx;
    ctx.config = config;
    ctx.out = config.out_dir;
    std::error_code ec;
    fs::create_directories(ctx.out, ec);
    if (ec || !fs::is_directory(ctx.out)) {
        std::fprintf(stderr, "cannot create output directory %s\n", config.out_dir.c_str());
        return 2;
    }

    try {
        int rc = 0;
        if (config.command == "scan") rc = run_scan(ctx, config.model);
        else if (config.command == "exact-ggm") rc = run_scan(ctx, "exact");
        else if (config.command == "rvb-ggm")
            rc = run_scan(ctx, config.model == "exact" ? "rvb" : config.model);
        else if (config.command == "compare") rc = run_compare(ctx);
        else if (config.command == "fit") rc = run_fit(ctx);
        else if (config.command == "validate") rc = run_validate(ctx);
        else {
            write_manifest(ctx, {{"usage", "unknown command '" + config.command + "'"}});
            return 2;
        }
        write_manifest(ctx, std::nullopt);
        return rc;
    } catch (const Error& e) {
        write_manifest(ctx, {{to_string(e.category()), e.what()}});
        std::fprintf(stderr, "error (%s): %s\n", to_string(e.category()), e.what());
        return 3;
    } catch (const std::exception& e) {
        write_manifest(ctx, {{"internal", e.what()}});
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}

}  // namespace ladderent
