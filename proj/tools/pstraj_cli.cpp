#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pstraj/config.hpp"

using namespace pstraj;

namespace {

enum Exit { ok = 0, config_error = 2, io_error = 3, solver_fault = 4, over_cap = 5 };

const char* kExitCodes =
    "Exit codes:\n"
    "  0  success\n"
    "  2  invalid configuration or usage\n"
    "  3  file could not be read or written\n"
    "  4  solver fault (the failing trajectory is named)\n"
    "  5  oracle refused: instance over the size cap\n";

std::vector<int> parse_sizes(const std::string& text)
{
    std::vector<int> ns;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        int n = 0;
        try {
            n = std::stoi(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size() || n < 1) throw ConfigError("--scaling", 0, "expected a comma-separated list of N >= 1, got '" + text + "'");
        ns.push_back(n);
    }
    if (ns.size() < 2) throw ConfigError("--scaling", 0, "need at least two values of N");
    for (std::size_t i = 1; i < ns.size(); ++i)
        if (ns[i] <= ns[i - 1]) throw ConfigError("--scaling", 0, "N values must be ascending");
    return ns;
}

void emit(const std::string& path, const std::string& text)
{
    if (path.empty() || path == "-") std::cout << text;
    else write_file(path, text);
}

int run(const std::string& config_path, std::optional<Solver> solver, std::optional<long> trajectories,
        std::optional<std::uint64_t> seed, std::optional<int> workers, std::string output, const std::string& scaling)
{
    RunConfig cfg = load_config(config_path, solver);
    if (trajectories) cfg.ensemble.n_trajectories = *trajectories;
    if (seed) cfg.ensemble.master_seed = *seed;
    if (workers) cfg.ensemble.workers = *workers;
    if (output.empty()) output = cfg.output_path;

    if (!scaling.empty()) {
        const auto ns = parse_sizes(scaling);
        const ModelSpec base = cfg.model;
        const auto family = [&](int n) { return with_size(base, n, base.cavity_truncation); };
        const auto report = scaling_report(family, ns, cfg.ensemble);
        emit(output, scaling_csv(report));
        if (!output.empty() && output != "-") write_file(output + ".json", scaling_json(cfg, report));
        std::fprintf(stderr, "log-log slopes vs N: step cost %.3f, total time %.3f, dt %.3f, memory %.3f\n",
                     report.step_cost_slope, report.total_time_slope, report.dt_slope, report.memory_slope);
        return ok;
    }

    const auto model = assemble(cfg.model);
    const auto record = run_ensemble(model, cfg.ensemble);
    emit(output, csv_text(record, cfg.observables));
    if (!output.empty() && output != "-") write_file(output + ".json", sidecar_text(cfg, record));
    return ok;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Permutation-symmetric quantum trajectory solver for emitter ensembles in a cavity"};
    app.footer(std::string("Outputs: CSV of observable means and standard errors, plus a JSON sidecar at <output>.json.\n"
                           "Without an output path the CSV goes to stdout and no sidecar is written.\n\n") +
               kExitCodes);

    std::string config_path;
    std::string solver_name_arg;
    long trajectories = 0;
    std::uint64_t seed = 0;
    int workers = 0;
    std::string output;
    bool force_oracle = false;
    std::string scaling;

    app.add_option("--config", config_path, "YAML run configuration")->required();
    auto* solver_opt = app.add_option("--solver", solver_name_arg, "override the solver: jump, hybrid, u1 or oracle");
    auto* traj_opt = app.add_option("--trajectories", trajectories, "number of trajectories")->check(CLI::PositiveNumber);
    auto* seed_opt = app.add_option("--seed", seed, "master seed");
    auto* workers_opt = app.add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--output", output, "CSV output path ('-' for stdout)");
    app.add_flag("--oracle", force_oracle, "use the master-equation oracle (small instances only)");
    app.add_option("--scaling", scaling, "comma-separated N list; writes a scaling table and log-log slopes");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : config_error;
    }

    try {
        std::optional<Solver> solver;
        if (*solver_opt) solver = parse_solver(solver_name_arg);
        if (force_oracle) {
            if (solver && *solver != Solver::oracle) throw ConfigError("--oracle", 0, "conflicts with --solver " + solver_name_arg);
            solver = Solver::oracle;
        }
        if (solver == Solver::oracle && !scaling.empty()) throw ConfigError("--scaling", 0, "the oracle has no trajectories to time");
        return run(config_path, solver, *traj_opt ? std::optional<long>(trajectories) : std::nullopt,
                   *seed_opt ? std::optional<std::uint64_t>(seed) : std::nullopt,
                   *workers_opt ? std::optional<int>(workers) : std::nullopt, output, scaling);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return config_error;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return io_error;
    } catch (const CapExceeded& e) {
        std::cerr << "oracle refused: " << e.what() << "\n";
        return over_cap;
    } catch (const ModelError& e) {
        std::cerr << "model error: " << e.what() << "\n";
        return config_error;
    } catch (const SolverFault& e) {
        std::cerr << "solver fault: " << e.what() << "\n";
        return solver_fault;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return config_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return solver_fault;
    }
}
