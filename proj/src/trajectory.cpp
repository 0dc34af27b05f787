#include "pstraj/trajectory.hpp"

#include "pstraj/jump_loop.hpp"

#include <algorithm>
#include <cmath>

namespace pstraj {

double uniform01(Rng& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double standard_normal(Rng& rng)
{
    // Box-Muller on (0, 1] to avoid log(0).
    const double u1 = 1.0 - uniform01(rng);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

double resolved_dt_max(const AssembledModel& model, const StepControls& controls)
{
    if (controls.dt_max > 0) return controls.dt_max;
    if (model.norm_estimate <= 0) return 1.0;
    return controls.rk_safety / model.norm_estimate;
}

TrajectoryState initial_state(const AssembledModel& model, std::uint64_t seed)
{
    TrajectoryState s;
    const auto [sector, index] = model.space->uniform_state(model.spec.initial_species);
    s.sector = sector;
    s.psi = Matrix::Zero(model.sector_dim(sector), model.nc);
    s.psi(index, model.spec.initial_photons) = 1.0;
    s.rng.seed(seed);
    return s;
}

Matrix apply_terms(const std::vector<KronTerm>& terms, int sector, const Matrix& psi)
{
    Matrix out = Matrix::Zero(psi.rows(), psi.cols());
    Matrix tmp;
    for (const auto& term : terms) {
        const Matrix* src = &psi;
        if (!term.emitter_identity) {
            const Block* b = term.emitter.block_from(sector);
            if (!b) continue;
            if (b->to != sector) throw std::logic_error("apply_terms: term leaves the sector");
            tmp = b->op * psi;
            src = &tmp;
        }
        if (term.cavity_identity) out += *src;
        else out += *src * term.cavity_matrix.transpose();
    }
    return out;
}

Matrix apply_individual(const BlockOperator& op, int sector, const Matrix& psi, int& target)
{
    const Block* b = op.block_from(sector);
    if (!b) {
        target = -1;
        return Matrix();
    }
    target = b->to;
    return b->op * psi;
}

Matrix apply_cavity(const SparseMatrix& c, const Matrix& psi)
{
    return psi * c.transpose();
}

double expectation(const Observable& obs, int sector, const Matrix& psi)
{
    const double norm_sq = psi.squaredNorm();
    const Matrix applied = apply_terms(obs.terms, sector, psi);
    return (psi.conjugate().cwiseProduct(applied)).sum().real() / norm_sq;
}

std::vector<double> channel_rates(const AssembledModel& model, int sector, const Matrix& psi)
{
    std::vector<double> rates;
    rates.reserve(model.individual.size() + model.collective.size());
    for (const auto& ch : model.individual) {
        const Block* b = ch.op.block_from(sector);
        rates.push_back(b ? (b->op * psi).squaredNorm() : 0.0);
    }
    for (const auto& ch : model.collective) rates.push_back(apply_cavity(ch.matrix, psi).squaredNorm());
    return rates;
}

double choose_dt(double total_rate, double dt_max, double p_max, double time_left)
{
    double dt = dt_max;
    if (total_rate > 0) dt = std::min(dt, p_max / total_rate);
    return std::min(dt, time_left);
}

int sample_jump(const std::vector<double>& probabilities, double u)
{
    double total = 0.0;
    for (double p : probabilities) total += p;
    if (total > 1.0 + 1e-12) throw SolverFault("jump probabilities exceed 1; timestep control failed");
    double cumulative = 0.0;
    for (std::size_t i = 0; i < probabilities.size(); ++i) {
        cumulative += probabilities[i];
        if (u < cumulative) return static_cast<int>(i);
    }
    return -1;
}

void apply_jump(TrajectoryState& state, const AssembledModel& model, int index)
{
    const int n_ind = static_cast<int>(model.individual.size());
    Matrix next;
    int target = state.sector;
    if (index < n_ind) {
        next = apply_individual(model.individual[index].op, state.sector, state.psi, target);
        if (target < 0) throw SolverFault("jump selected a channel with no block from the current sector");
        if (next.rows() != model.sector_dim(target)) throw std::logic_error("apply_jump: block size mismatch");
    } else {
        next = apply_cavity(model.collective[index - n_ind].matrix, state.psi);
    }
    const double norm = next.norm();
    if (norm < 1e-14) throw SolverFault("jump produced a zero vector");
    state.psi = next / norm;
    state.sector = target;
}

Matrix rk4_no_jump(const std::vector<KronTerm>& h_eff, int sector, const Matrix& psi, double dt)
{
    const cplx f = -I * dt;
    const Matrix k1 = f * apply_terms(h_eff, sector, psi);
    const Matrix k2 = f * apply_terms(h_eff, sector, psi + 0.5 * k1);
    const Matrix k3 = f * apply_terms(h_eff, sector, psi + 0.5 * k2);
    const Matrix k4 = f * apply_terms(h_eff, sector, psi + k3);
    return psi + (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
}

std::vector<double> step_probabilities(const AssembledModel& model, int sector, const Matrix& psi,
                                       const std::vector<double>& rates, double dt, bool norm_probability,
                                       Matrix& no_jump)
{
    no_jump = rk4_no_jump(model.h_eff, sector, psi, dt);
    std::vector<double> probs(rates.size());
    if (!norm_probability) {
        for (std::size_t i = 0; i < rates.size(); ++i) probs[i] = rates[i] * dt;
        return probs;
    }
    double total = 0.0;
    for (double r : rates) total += r;
    if (total <= 0) return probs;
    const double p_jump = std::clamp(1.0 - no_jump.squaredNorm() / psi.squaredNorm(), 0.0, 1.0);
    for (std::size_t i = 0; i < rates.size(); ++i) probs[i] = p_jump * rates[i] / total;
    return probs;
}

namespace {

struct GenericOps {
    const AssembledModel& model;
    TrajectoryState& state;

    std::vector<double> rates() const { return channel_rates(model, state.sector, state.psi); }
    Matrix no_jump(double dt) const { return rk4_no_jump(model.h_eff, state.sector, state.psi, dt); }
    void accept(Matrix&& psi) { state.psi = std::move(psi); }
    double norm_sq() const { return state.psi.squaredNorm(); }
    void jump(int index) { apply_jump(state, model, index); }
    std::size_t amplitudes() const { return state.psi.size(); }
    void observe(std::vector<std::vector<double>>& values, std::size_t ti) const
    {
        for (std::size_t o = 0; o < model.observables.size(); ++o)
            values[o][ti] = expectation(model.observables[o], state.sector, state.psi);
    }
};

} // namespace

StepResult step(TrajectoryState& state, const AssembledModel& model, double dt, bool norm_probability)
{
    GenericOps ops{model, state};
    const auto res = detail::per_step(ops, state.rng, dt, ops.rates(), norm_probability);
    state.t += res.advanced;
    return StepResult{res.advanced, res.channel};
}

std::vector<std::string> channel_labels(const AssembledModel& model)
{
    std::vector<std::string> out;
    for (const auto& c : model.individual) out.push_back(c.label);
    for (const auto& c : model.collective) out.push_back(c.label);
    return out;
}

TrajectoryRecord run_trajectory(const AssembledModel& model, const std::vector<double>& t_grid, std::uint64_t seed,
                                const StepControls& controls)
{
    TrajectoryState state = initial_state(model, seed);
    GenericOps ops{model, state};
    return detail::run_jump_loop(ops, t_grid, state.rng, controls, resolved_dt_max(model, controls),
                                 model.observables.size(), model.individual.size() + model.collective.size());
}

} // namespace pstraj
