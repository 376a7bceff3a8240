#pragma once

// Command-line front end: solve, generate, export-lp, oracle, kpi, check, bench.

#include <cstdlib>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "darpdp/engine.hpp"
#include "darpdp/exact.hpp"
#include "darpdp/io.hpp"
#include "darpdp/model.hpp"
#include "darpdp/schedule.hpp"

namespace darpdp {

namespace cli {

enum Exit { kOk = 0, kUsage = 1, kInfeasible = 2, kOverCap = 3 };

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot write '" + path.string() + "'");
    out << text;
}

inline std::string default_out_dir() {
    const char* env = std::getenv("DARPDP_OUT");
    return env && *env ? env : ".";
}

inline Instance load_instance(const std::string& path, bool benchmark_format) {
    const auto text = read_file(path);
    if (benchmark_format) return import_benchmark_text(text, std::filesystem::path(path).stem().string());
    return parse_instance(text);
}

struct ParamFlags {
    SolverParams params;
    std::string arc_cost = "minutes";

    void attach(CLI::App& app) {
        app.add_option("--w1", params.w1, "Travel weight")->capture_default_str();
        app.add_option("--w2", params.w2, "Lateness weight")->capture_default_str();
        app.add_option("--alpha", params.alpha, "Score reaction factor")->capture_default_str();
        app.add_option("--beta1", params.beta1, "Reward for a new best solution")->capture_default_str();
        app.add_option("--beta2", params.beta2, "Reward for an improving move")->capture_default_str();
        app.add_option("--gamma", params.gamma, "Penalty factor for a worse move")->capture_default_str();
        app.add_option("--size-n", params.size_n, "Neighbourhood size factor")->capture_default_str();
        app.add_option("--size-e", params.size_e, "Elite set size")->capture_default_str();
        app.add_option("--alpha-t", params.alpha_t, "Cooling rate")->capture_default_str();
        app.add_option("--t-min", params.t_min, "Minimum temperature (0 = m/2)")->capture_default_str();
        app.add_option("--t-max", params.t_max, "Maximum temperature (0 = n/2)")->capture_default_str();
        app.add_option("--iter-max", params.iter_max, "Local search iterations without improvement")
            ->capture_default_str();
        app.add_option("--removal-fraction", params.removal_fraction, "Upper bound on the destroyed fraction")
            ->capture_default_str();
        app.add_option("--cpu-max", params.cpu_max, "Time budget per run in seconds")->capture_default_str();
        app.add_option("--iter-budget", params.max_iterations, "Outer iteration budget (overrides --cpu-max)")
            ->capture_default_str();
        app.add_option("--arc-cost", arc_cost, "Arc cost unit")
            ->check(CLI::IsMember({"minutes", "miles"}))
            ->capture_default_str();
        app.add_flag("--strict-perturb-parity", params.strict_perturb_parity,
                     "Perturb on odd rather than even non-improving counts");
        app.add_flag("--strict-cluster-mean", params.strict_cluster_mean,
                     "Average cluster distances over every vertex");
    }

    SolverParams resolve() {
        params.arc_cost = arc_cost == "miles" ? ArcCost::Miles : ArcCost::Minutes;
        if (auto errs = validate_params(params); !errs.empty()) throw UsageError("invalid parameter: " + errs.front());
        return params;
    }
};

inline std::string seed_tag(const std::string& name, std::uint64_t seed) {
    return name + "_seed" + std::to_string(seed);
}

// Runs seeds seed..seed+runs-1, at most `jobs` at a time.
// Each replica collects its own move log (one line per accepted move) when
// `log_moves` is set.
inline std::vector<EilsResult> run_replicas(const Instance& inst, const SolverParams& base, std::uint64_t seed, int runs,
                                            int jobs, bool log_moves = false,
                                            std::vector<std::string>* move_logs = nullptr) {
    std::vector<EilsResult> results(runs);
    std::vector<std::string> logs(runs);
    auto one = [&](int r) {
        SolverParams p = base;
        p.rng_seed = seed + static_cast<std::uint64_t>(r);
        std::function<void(const MoveTrace&)> on_move;
        if (log_moves) {
            on_move = [&logs, r](const MoveTrace& mv) {
                char buf[96];
                std::snprintf(buf, sizeof buf, "%s %.9g %.9g\n", std::string(to_string(mv.kind)).c_str(), mv.delta,
                              mv.new_cost);
                logs[r] += buf;
            };
        }
        results[r] = run_eils(inst, p, {}, on_move);
    };
    if (jobs <= 1) {
        for (int r = 0; r < runs; ++r) one(r);
        if (move_logs) *move_logs = std::move(logs);
        return results;
    }
    for (int start = 0; start < runs; start += jobs) {
        std::vector<std::thread> pool;
        for (int r = start; r < std::min(runs, start + jobs); ++r) pool.emplace_back(one, r);
        for (auto& t : pool) t.join();
    }
    if (move_logs) *move_logs = std::move(logs);
    return results;
}

inline std::map<std::string, double> read_baseline(const std::string& path) {
    auto rows = detail::read_csv(read_file(path));
    if (rows.empty()) throw UsageError("baseline file is empty");
    const int c_inst = detail::column(rows.front(), "instance");
    const int c_best = detail::column(rows.front(), "best");
    std::map<std::string, double> out;
    for (std::size_t i = 1; i < rows.size(); ++i) out[rows[i].at(c_inst)] = std::stod(rows[i].at(c_best));
    return out;
}

}  // namespace cli

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    using namespace cli;
    CLI::App app{"Dial-a-ride solver with driver preferences", "darpdp"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "darpdp 1.0");
    app.set_help_all_flag("--help-all", "Print help for every subcommand and exit");

    // solve
    auto* solve = app.add_subcommand("solve", "Run the iterated local search on instance files");
    std::vector<std::string> solve_paths;
    ParamFlags solve_flags;
    std::uint64_t seed = 1;
    int runs = 1;
    int jobs = 1;
    std::string out_dir = default_out_dir();
    bool benchmark_format = false;
    bool write_trace = false;
    bool verbose = false;
    solve->add_option("instances", solve_paths, "Instance JSON files")->required()->check(CLI::ExistingFile);
    solve->add_option("--seed", seed, "First seed")->capture_default_str();
    solve->add_option("--runs", runs, "Number of seeded runs")->capture_default_str();
    solve->add_option("--jobs", jobs, "Runs executed concurrently")->capture_default_str();
    solve->add_option("--out", out_dir, "Output directory (default $DARPDP_OUT or .)");
    solve->add_flag("--benchmark-format", benchmark_format, "Read whitespace benchmark files instead of JSON");
    solve->add_flag("--trace", write_trace, "Write a per-iteration trace CSV for every run");
    solve->add_flag("-v,--verbose", verbose, "Write a log of accepted local search moves for every run");
    solve_flags.attach(*solve);

    // bench
    auto* bench = app.add_subcommand("bench", "Tabulate best/avg/CPU over seeded runs");
    std::vector<std::string> bench_paths;
    ParamFlags bench_flags;
    std::string baseline_path;
    bench->add_option("instances", bench_paths, "Instance JSON files")->required()->check(CLI::ExistingFile);
    bench->add_option("--seed", seed, "First seed")->capture_default_str();
    bench->add_option("--runs", runs, "Number of seeded runs per instance")->capture_default_str();
    bench->add_option("--jobs", jobs, "Runs executed concurrently")->capture_default_str();
    bench->add_option("--out", out_dir, "Output directory (default $DARPDP_OUT or .)");
    bench->add_option("--baseline", baseline_path, "CSV with instance,best columns for the gap")
        ->check(CLI::ExistingFile);
    bench->add_flag("--benchmark-format", benchmark_format, "Read whitespace benchmark files instead of JSON");
    bench_flags.attach(*bench);

    // generate
    auto* gen = app.add_subcommand("generate", "Build benchmark instances from taxi trip records");
    std::string trips_path, zones_path;
    std::vector<int> sizes;
    std::vector<std::string> types, fleets;
    std::uint64_t gen_seed = 2021;
    gen->add_option("--trips", trips_path, "Trip CSV")->required()->check(CLI::ExistingFile);
    gen->add_option("--zones", zones_path, "Zone centroid CSV (LocationID,x,y)")->required()->check(CLI::ExistingFile);
    gen->add_option("--seed", gen_seed, "Generator seed")->capture_default_str();
    gen->add_option("--size", sizes, "Request counts (default: 10 15 20 30 50 100 200)");
    gen->add_option("--type", types, "Window types (a = 5 min, b = 10 min)")->check(CLI::IsMember({"a", "b"}));
    gen->add_option("--fleet", fleets, "Fleet rules applied to n/9")->check(CLI::IsMember({"floor", "ceil"}));
    gen->add_option("--out", out_dir, "Output directory (default $DARPDP_OUT or .)");

    // export-lp
    auto* lp = app.add_subcommand("export-lp", "Write the MILP in CPLEX LP format");
    std::string lp_path, lp_out;
    ParamFlags lp_flags;
    bool no_duration_row = false;
    lp->add_option("instance", lp_path, "Instance JSON file")->required()->check(CLI::ExistingFile);
    lp->add_option("-o,--output", lp_out, "LP file (default <out>/<name>.lp)");
    lp->add_option("--out", out_dir, "Output directory (default $DARPDP_OUT or .)");
    lp->add_flag("--no-duration-row", no_duration_row, "Omit the route duration rows");
    lp->add_flag("--benchmark-format", benchmark_format, "Read whitespace benchmark files instead of JSON");
    lp_flags.attach(*lp);

    // oracle
    auto* oracle = app.add_subcommand("oracle", "Solve a tiny instance exactly by enumeration");
    std::string oracle_path, oracle_out;
    ParamFlags oracle_flags;
    BruteForceLimits limits;
    oracle->add_option("instance", oracle_path, "Instance JSON file")->required()->check(CLI::ExistingFile);
    oracle->add_option("--max-requests", limits.max_requests, "Request cap")->capture_default_str();
    oracle->add_option("--max-vehicles", limits.max_vehicles, "Vehicle cap")->capture_default_str();
    oracle->add_option("-o,--output", oracle_out, "Write the optimal solution JSON here");
    oracle->add_flag("--benchmark-format", benchmark_format, "Read whitespace benchmark files instead of JSON");
    oracle_flags.attach(*oracle);

    // kpi
    auto* kpi = app.add_subcommand("kpi", "Coverage, empty driving and excess ride time of a solution");
    std::string kpi_inst, kpi_sol;
    ParamFlags kpi_flags;
    bool kpi_strict = false;
    kpi->add_option("instance", kpi_inst, "Instance JSON file")->required()->check(CLI::ExistingFile);
    kpi->add_option("solution", kpi_sol, "Solution JSON file")->required()->check(CLI::ExistingFile);
    kpi->add_flag("--strict", kpi_strict, "Sum per-vehicle empty ratios and divide excess ride time by n");
    kpi->add_flag("--benchmark-format", benchmark_format, "Read whitespace benchmark files instead of JSON");
    kpi_flags.attach(*kpi);

    // check
    auto* check = app.add_subcommand("check", "Validate an instance and optionally a solution");
    std::string check_inst, check_sol;
    ParamFlags check_flags;
    check->add_option("instance", check_inst, "Instance JSON file")->required()->check(CLI::ExistingFile);
    check->add_option("solution", check_sol, "Solution JSON file")->check(CLI::ExistingFile);
    check->add_flag("--benchmark-format", benchmark_format, "Read whitespace benchmark files instead of JSON");
    check_flags.attach(*check);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kOk : kUsage;
    }

    try {
        if (*solve || *bench) {
            const bool is_bench = bench->parsed();
            auto& flags = is_bench ? bench_flags : solve_flags;
            const auto& paths = is_bench ? bench_paths : solve_paths;
            if (runs < 1) throw UsageError("--runs must be at least 1");
            if (jobs < 1) throw UsageError("--jobs must be at least 1");
            const SolverParams params = flags.resolve();
            std::vector<RunStats> all;
            bool infeasible = false;
            for (const auto& path : paths) {
                const Instance inst = load_instance(path, benchmark_format);
                if (auto rep = validate_instance(inst); !rep.ok()) {
                    err << path << ": invalid instance: " << rep.issues.front() << "\n";
                    infeasible = true;
                    continue;
                }
                std::vector<std::string> move_logs;
                auto results = run_replicas(inst, params, seed, runs, jobs, verbose && !is_bench, &move_logs);
                const EilsResult* best = nullptr;
                for (std::size_t i = 0; i < results.size(); ++i) {
                    const auto& r = results[i];
                    all.push_back(r.stats);
                    if (!is_bench) {
                        const auto tag = seed_tag(inst.name, r.stats.seed);
                        const std::filesystem::path dir(out_dir);
                        write_file(dir / (tag + "_solution.json"), write_solution(inst, r.best));
                        write_file(dir / (tag + "_stats.json"), write_run_stats(r.stats));
                        if (write_trace) write_file(dir / (tag + "_trace.csv"), write_trace_csv(r.stats));
                        if (verbose) write_file(dir / (tag + "_moves.log"), move_logs[i]);
                    }
                    if (!best || objective(inst, r.best) < objective(inst, best->best)) best = &r;
                }
                const bool ok = check_feasibility(inst, best->best).feasible();
                if (!is_bench) {
                    write_file(std::filesystem::path(out_dir) / (inst.name + "_best_solution.json"),
                               write_solution(inst, best->best));
                }
                out << inst.name << ": best " << best->best.cost.weighted << " served " << best->best.served() << "/"
                    << inst.num_requests() << (ok ? "" : " (infeasible)") << "\n";
                if (!ok) infeasible = true;
            }
            if (!all.empty()) {
                std::map<std::string, double> baseline;
                if (is_bench && !baseline_path.empty()) baseline = read_baseline(baseline_path);
                const auto table = results_table(all, baseline);
                write_file(std::filesystem::path(out_dir) / (is_bench ? "bench.csv" : "results.csv"), table);
                if (is_bench) out << table;
            }
            return infeasible ? kInfeasible : kOk;
        }

        if (*gen) {
            const auto trips = prepare_trips(read_trips_csv(read_file(trips_path)), read_zones_csv(read_file(zones_path)));
            if (sizes.empty()) sizes = suite_sizes();
            if (types.empty()) types = {"a", "b"};
            if (fleets.empty()) fleets = {"floor", "ceil"};
            int written = 0;
            for (int n : sizes) {
                for (const auto& t : types) {
                    for (const auto& f : fleets) {
                        Scenario sc;
                        sc.type = t == "a" ? WindowType::A : WindowType::B;
                        sc.fleet = f == "floor" ? FleetRule::Floor : FleetRule::Ceil;
                        auto batch = generate_instances(trips, {n}, sc, gen_seed);
                        const auto& inst = batch.front();
                        write_file(std::filesystem::path(out_dir) / (inst.name + ".json"), write_instance(inst));
                        out << inst.name << " " << inst.num_requests() << " " << inst.num_vehicles() << "\n";
                        ++written;
                    }
                }
            }
            out << written << " instances written to " << out_dir << "\n";
            return kOk;
        }

        if (*lp) {
            const Instance inst = load_instance(lp_path, benchmark_format);
            MilpOptions opts;
            opts.route_duration_row = !no_duration_row;
            const auto text = export_milp(inst, lp_flags.resolve(), opts);
            const std::filesystem::path target =
                lp_out.empty() ? std::filesystem::path(out_dir) / (inst.name + ".lp") : std::filesystem::path(lp_out);
            write_file(target, text);
            out << target.string() << "\n";
            return kOk;
        }

        if (*oracle) {
            const Instance inst = load_instance(oracle_path, benchmark_format);
            const SolverParams params = oracle_flags.resolve();
            ExactResult res;
            try {
                res = brute_force_solve(inst, params, limits);
            } catch (const OverCapError& e) {
                err << "refused: " << e.what() << "\n";
                return kOverCap;
            }
            if (!res.feasible) {
                out << "infeasible: " << res.reason << "\n";
                return kInfeasible;
            }
            out << "optimum " << res.optimum.weighted << " travel " << res.optimum.travel << " lateness "
                << res.optimum.lateness_total << " served " << res.optimum.served << " proven "
                << (res.proven ? "yes" : "no") << " nodes " << res.nodes_explored << "\n";
            if (!oracle_out.empty()) write_file(oracle_out, write_solution(inst, res.solution));
            return kOk;
        }

        if (*kpi) {
            const Instance inst = load_instance(kpi_inst, benchmark_format);
            const auto parsed = parse_solution(read_file(kpi_sol), inst, kpi_flags.resolve());
            if (!parsed.ok()) {
                for (const auto& s : parsed.issues) err << s << "\n";
                return kInfeasible;
            }
            KpiOptions opts;
            opts.strict = kpi_strict;
            const auto k = compute_kpis(inst, parsed.solution, opts);
            out << "kpi1=" << k.kpi1 << " kpi2=" << k.kpi2 << " kpi3=" << k.kpi3 << "\n";
            return kOk;
        }

        if (*check) {
            const Instance inst = load_instance(check_inst, benchmark_format);
            auto rep = validate_instance(inst);
            for (const auto& s : rep.issues) out << "instance: " << s << "\n";
            bool ok = rep.ok();
            if (!check_sol.empty() && ok) {
                const auto parsed = parse_solution(read_file(check_sol), inst, check_flags.resolve());
                for (const auto& s : parsed.issues) out << "solution: " << s << "\n";
                ok = parsed.ok();
            }
            out << (ok ? "ok" : "invalid") << "\n";
            return ok ? kOk : kInfeasible;
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}

}  // namespace darpdp
