#pragma once

// Seeded, parallel trajectory ensembles and scaling measurements.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pstraj/hybrid_qsd.hpp"
#include "pstraj/oracle.hpp"
#include "pstraj/trajectory.hpp"

namespace pstraj {

enum class Solver { jump, hybrid, u1, oracle };

std::string solver_name(Solver s);
// Throws std::invalid_argument for unknown names.
Solver parse_solver(const std::string& name);

struct EnsembleConfig {
    long n_trajectories = 100;
    std::uint64_t master_seed = 0;
    std::vector<double> t_grid;
    Solver solver = Solver::jump;
    int workers = 1;
    StepControls controls;
    HybridControls hybrid;
    oracle::MasterControls master;
    bool keep_series = false;
};

struct EnsembleRecord {
    std::vector<std::string> names;
    std::vector<double> t;
    std::vector<std::vector<double>> mean;     // [observable][time]
    std::vector<std::vector<double>> stderr_;  // NaN when undefined
    std::vector<std::vector<std::vector<double>>> series;  // [trajectory][observable][time], if kept
    std::vector<double> wall_seconds;  // per trajectory
    std::vector<long> steps;           // per trajectory
    std::vector<long> jumps;
    long total_steps = 0;
    double total_dt = 0.0;
    std::size_t max_amplitudes = 0;
    double displaced_field_mean = 0.0;  // hybrid: average over trajectories
    double displaced_field_max = 0.0;
    long invariant_checks = 0;          // u1: no-jump steps checked for fixed K
};

// SplitMix64 finaliser.
std::uint64_t mix64(std::uint64_t x);
std::uint64_t trajectory_seed(std::uint64_t master_seed, std::uint64_t index);

// Runs the configured solver. Trajectory i uses trajectory_seed(master, i);
// results are reduced in index order, so they do not depend on `workers`.
// A failing trajectory aborts the run with SolverFault naming its index.
EnsembleRecord run_ensemble(const AssembledModel& model, const EnsembleConfig& config);

struct ScalingRow {
    int n = 0;
    double dt_mean = 0.0;
    double step_seconds = 0.0;        // wall time per step
    double trajectory_seconds = 0.0;  // wall time per trajectory
    double amplitudes = 0.0;          // largest state size
    long steps = 0;
};

struct ScalingReport {
    std::vector<ScalingRow> rows;
    double step_cost_slope = 0.0;  // log-log slopes against N
    double total_time_slope = 0.0;
    double dt_slope = 0.0;
    double memory_slope = 0.0;
    bool dt_inverse_n = false;  // dt slope within 0.3 of -1
};

// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

// Runs `config` for each N (ascending) on family(N).
ScalingReport scaling_report(const std::function<ModelSpec(int)>& family, const std::vector<int>& ns,
                             const EnsembleConfig& config);

} // namespace pstraj
