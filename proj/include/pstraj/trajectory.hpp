#pragma once

// Quantum-jump unravelling on pseudo-states. A trajectory holds an amplitude
// matrix psi(index, n_c) over the current sector and the truncated Fock basis;
// (E (x) C) acts as E * psi * C^T.

#include <cstdint>
#include <random>
#include <vector>

#include "pstraj/model.hpp"

namespace pstraj {

using Rng = std::mt19937_64;

// Uniform in [0, 1) from the top 53 bits.
double uniform01(Rng& rng);
double standard_normal(Rng& rng);

struct StepControls {
    double p_max = 0.05;
    double dt_max = 0.0;      // <= 0: rk_safety / model.norm_estimate
    double rk_safety = 0.5;
    bool waiting_time = false;  // norm-bisection sampling instead of per-step draws
    // Total jump probability per step from the RK4 norm decay 1 - |psi(t+dt)|^2;
    // a jump ends the step at the time where the linearly interpolated decay
    // reaches the draw, with the channel drawn from the rates there. When false
    // the literal <L^dag L> dt is used and the jump acts on the step's start state.
    bool norm_probability = true;
};

double resolved_dt_max(const AssembledModel& model, const StepControls& controls);

struct TrajectoryState {
    int sector = 0;
    Matrix psi;
    double t = 0.0;
    Rng rng;
};

TrajectoryState initial_state(const AssembledModel& model, std::uint64_t seed);

// Sum of terms acting within `sector` (terms must be sector-diagonal there).
Matrix apply_terms(const std::vector<KronTerm>& terms, int sector, const Matrix& psi);
// L psi for an individual channel; `target` receives the new sector, or -1
// when the channel has no block from `sector`.
Matrix apply_individual(const BlockOperator& op, int sector, const Matrix& psi, int& target);
Matrix apply_cavity(const SparseMatrix& c, const Matrix& psi);

double expectation(const Observable& obs, int sector, const Matrix& psi);

// <L^dag L> for every individual channel followed by every collective channel,
// for a normalised psi.
std::vector<double> channel_rates(const AssembledModel& model, int sector, const Matrix& psi);

double choose_dt(double total_rate, double dt_max, double p_max, double time_left);

// Index of the channel whose cumulative interval contains u, or -1 for no
// jump. Throws SolverFault when the probabilities sum to more than 1.
int sample_jump(const std::vector<double>& probabilities, double u);

// Applies channel `index` (individual channels first) and normalises.
void apply_jump(TrajectoryState& state, const AssembledModel& model, int index);

// One RK4 step of d psi/dt = -i H_eff psi (not renormalised).
Matrix rk4_no_jump(const std::vector<KronTerm>& h_eff, int sector, const Matrix& psi, double dt);

struct StepResult {
    double dt = 0.0;
    int channel = -1;
    double residual = 0.0;  // hybrid solver: displaced |<a>| before recentring
};

// One step of the per-step jump scheme: one uniform draw decides between a
// jump and a no-jump RK4 step (a second one picks the channel). A jump ends the
// step early; StepResult::dt is the time advanced.
StepResult step(TrajectoryState& state, const AssembledModel& model, double dt, bool norm_probability = true);

// Per-channel probabilities for one step and the no-jump propagated state.
std::vector<double> step_probabilities(const AssembledModel& model, int sector, const Matrix& psi,
                                       const std::vector<double>& rates, double dt, bool norm_probability,
                                       Matrix& no_jump);

struct TrajectoryRecord {
    std::vector<std::vector<double>> values;       // [observable][time]
    std::vector<std::vector<long>> jump_counts;    // [channel][bin]; bin i covers (t_{i-1}, t_i]
    long steps = 0;
    long jumps = 0;
    double dt_sum = 0.0;
    double wall_seconds = 0.0;
    std::size_t max_amplitudes = 0;  // largest amplitude count held by the state
    long invariant_checks = 0;       // U(1) solver: steps at which K conservation was asserted
    double displaced_field_mean = 0.0;  // hybrid solver: time average of |<a>| in the displaced frame
    double displaced_field_max = 0.0;
};

std::vector<std::string> channel_labels(const AssembledModel& model);

TrajectoryRecord run_trajectory(const AssembledModel& model, const std::vector<double>& t_grid, std::uint64_t seed,
                                const StepControls& controls);

} // namespace pstraj
