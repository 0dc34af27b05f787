#pragma once

// Stepping loop shared by the generic jump solver and the U(1) solver, so both
// consume random numbers identically. `Ops` owns the state and provides
//   rates(), no_jump(dt) -> Matrix, accept(Matrix&&), norm_sq(), jump(index),
//   observe(values, ti), amplitudes().

#include <algorithm>
#include <chrono>
#include <cmath>

#include "pstraj/trajectory.hpp"

namespace pstraj::detail {

inline bool before(double t, double target)
{
    return target - t > 1e-12 * std::max(1.0, std::abs(target));
}

inline double sum(const std::vector<double>& v)
{
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}

inline int pick(const std::vector<double>& weights, double u)
{
    const double total = sum(weights);
    double cumulative = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        cumulative += weights[i];
        if (u * total < cumulative) return static_cast<int>(i);
    }
    for (std::size_t i = weights.size(); i-- > 0;)
        if (weights[i] > 0) return static_cast<int>(i);
    return static_cast<int>(weights.size()) - 1;
}

inline void normalise(Matrix& psi, const char* what)
{
    const double norm = psi.norm();
    if (!(norm > 1e-300) || !std::isfinite(norm)) throw SolverFault(what);
    psi /= norm;
}

struct PerStep {
    int channel = -1;
    double advanced = 0.0;  // a jump ends the step early
};

// One step of the per-step scheme. A uniform draw decides whether the step
// jumps; a jump step draws once more for the channel.
template <typename Ops>
PerStep per_step(Ops& ops, Rng& rng, double dt, const std::vector<double>& rates, bool norm_probability)
{
    const double total = sum(rates);
    Matrix trial = ops.no_jump(dt);
    const double u = uniform01(rng);
    if (!norm_probability) {
        std::vector<double> probs(rates.size());
        for (std::size_t i = 0; i < rates.size(); ++i) probs[i] = rates[i] * dt;
        const int idx = sample_jump(probs, u);
        if (idx >= 0) {
            ops.jump(idx);
            return PerStep{idx, dt};
        }
    } else if (total > 0) {
        const double p_jump = std::clamp(1.0 - trial.squaredNorm() / ops.norm_sq(), 0.0, 1.0);
        if (u < p_jump) {
            // Jump time from the norm decay interpolated linearly across the step.
            const double tau = dt * u / p_jump;
            if (tau > 0) {
                Matrix head = ops.no_jump(tau);
                normalise(head, "no-jump evolution lost the state");
                ops.accept(std::move(head));
            }
            const auto now = ops.rates();
            const int idx = pick(sum(now) > 0 ? now : rates, uniform01(rng));
            ops.jump(idx);
            return PerStep{idx, tau};
        }
    }
    normalise(trial, "no-jump evolution lost the state");
    ops.accept(std::move(trial));
    return PerStep{-1, dt};
}

template <typename Ops>
TrajectoryRecord run_jump_loop(Ops& ops, const std::vector<double>& t_grid, Rng& rng, const StepControls& controls,
                               double dt_max, std::size_t n_observables, std::size_t n_channels)
{
    const auto start = std::chrono::steady_clock::now();
    TrajectoryRecord rec;
    rec.values.assign(n_observables, std::vector<double>(t_grid.size(), 0.0));
    rec.jump_counts.assign(n_channels, std::vector<long>(t_grid.size(), 0));

    double t = 0.0;
    double target_norm_sq = controls.waiting_time ? uniform01(rng) : 0.0;

    for (std::size_t ti = 0; ti < t_grid.size(); ++ti) {
        const double t_next = t_grid[ti];
        if (ti > 0 && t_next < t_grid[ti - 1]) throw std::invalid_argument("time grid must be ascending");
        while (before(t, t_next)) {
            rec.max_amplitudes = std::max<std::size_t>(rec.max_amplitudes, ops.amplitudes());
            const double left = t_next - t;
            if (!controls.waiting_time) {
                const auto rates = ops.rates();
                const double dt = choose_dt(sum(rates), dt_max, controls.p_max, left);
                const auto res = per_step(ops, rng, dt, rates, controls.norm_probability);
                if (res.channel >= 0) {
                    ++rec.jumps;
                    ++rec.jump_counts[res.channel][ti];
                }
                t = (res.advanced == left) ? t_next : t + res.advanced;
                ++rec.steps;
                rec.dt_sum += res.advanced;
                continue;
            }

            // Waiting-time mode: the state is left unnormalised between jumps
            // and a jump fires when its squared norm reaches the drawn target.
            const double dt = std::min(dt_max, left);
            Matrix trial = ops.no_jump(dt);
            ++rec.steps;
            if (trial.squaredNorm() > target_norm_sq) {
                ops.accept(std::move(trial));
                t = (dt == left) ? t_next : t + dt;
                rec.dt_sum += dt;
                continue;
            }
            double lo = 0.0;
            double hi = dt;
            for (int it = 0; it < 60 && hi - lo > 1e-13 * std::max(1.0, dt); ++it) {
                const double mid = 0.5 * (lo + hi);
                if (ops.no_jump(mid).squaredNorm() > target_norm_sq) lo = mid;
                else hi = mid;
            }
            trial = ops.no_jump(hi);
            trial /= trial.norm();
            ops.accept(std::move(trial));
            t += hi;
            rec.dt_sum += hi;
            const auto rates = ops.rates();
            if (sum(rates) <= 0) throw SolverFault("norm decayed with no active jump channel");
            const int idx = pick(rates, uniform01(rng));
            ops.jump(idx);
            ++rec.jumps;
            ++rec.jump_counts[idx][ti];
            target_norm_sq = uniform01(rng);
        }
        ops.observe(rec.values, ti);
    }
    rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rec;
}

} // namespace pstraj::detail
