#include "pstraj/hybrid_qsd.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>

#include "pstraj/jump_loop.hpp"

namespace pstraj {

namespace {

double row_sum(const Matrix& m)
{
    return m.size() ? m.cwiseAbs().rowwise().sum().maxCoeff() : 0.0;
}

constexpr int kMaxPower = 2;

// Dense ladder monomials and the eigenbasis of i (a^dag - a) for one truncation.
struct Entry {
    int row;
    int col;
    double value;
};

struct Ladder {
    std::vector<std::vector<Entry>> monomials;  // index p * (kMaxPower + 1) + q
    Matrix a;
    Matrix a_dag;
    Matrix number;
    Matrix generator_vectors;
    Eigen::VectorXd generator_values;
};

const Ladder& ladder(int nc)
{
    thread_local std::map<int, Ladder> cache;
    auto it = cache.find(nc);
    if (it != cache.end()) return it->second;
    Ladder l;
    for (int p = 0; p <= kMaxPower; ++p)
        for (int q = 0; q <= kMaxPower; ++q) {
            const SparseMatrix m = CavityExpr::monomial(p, q, 1.0).matrix(nc);
            std::vector<Entry> entries;
            for (int k = 0; k < m.outerSize(); ++k)
                for (SparseMatrix::InnerIterator it(m, k); it; ++it)
                    entries.push_back(Entry{static_cast<int>(it.row()), static_cast<int>(it.col()), it.value().real()});
            l.monomials.push_back(std::move(entries));
        }
    l.a = Matrix(CavityExpr::annihilation().matrix(nc));
    l.a_dag = Matrix(CavityExpr::creation().matrix(nc));
    l.number = Matrix(CavityExpr::number().matrix(nc));
    Eigen::SelfAdjointEigenSolver<Matrix> eig(I * (l.a_dag - l.a));
    l.generator_vectors = eig.eigenvectors();
    l.generator_values = eig.eigenvalues();
    return cache.emplace(nc, std::move(l)).first->second;
}

Matrix dense(const CavityExpr& e, int nc)
{
    if (e.degree() > kMaxPower) return Matrix(e.matrix(nc));
    const Ladder& l = ladder(nc);
    Matrix out = Matrix::Zero(nc, nc);
    for (const auto& [pq, c] : e.terms())
        for (const auto& en : l.monomials[pq.first * (kMaxPower + 1) + pq.second]) out(en.row, en.col) += c * en.value;
    return out;
}

// out += scale * a * b by columns, skipping zeros of b. The operands here are
// a few photons wide, where a general product is mostly overhead.
template <typename B>
void add_times(Matrix& out, const Matrix& a, const B& b, cplx scale = 1.0)
{
    for (Eigen::Index j = 0; j < b.cols(); ++j)
        for (Eigen::Index k = 0; k < b.rows(); ++k) {
            const cplx w = b(k, j);
            if (w != cplx{}) out.col(j) += (scale * w) * a.col(k);
        }
}

template <typename B>
Matrix times(const Matrix& a, const B& b)
{
    Matrix out = Matrix::Zero(a.rows(), b.cols());
    add_times(out, a, b);
    return out;
}

cplx inner(const Matrix& a, const Matrix& b)
{
    return (a.conjugate().cwiseProduct(b)).sum();
}

// Block of a sector-diagonal operator, or null where it vanishes.
const SparseMatrix* sector_block(const BlockOperator& op, int sector)
{
    const Block* b = op.block_from(sector);
    if (!b) return nullptr;
    if (b->to != sector) throw std::logic_error("hybrid: operator leaves the sector");
    return &b->op;
}

// Emitter factors E_k psi, shared by the drift of alpha and of psi.
std::vector<Matrix> emitter_products(const HybridModel& hm, int sector, const Matrix& psi)
{
    std::vector<Matrix> out(hm.terms.size());
    for (std::size_t k = 0; k < hm.terms.size(); ++k) {
        const auto& t = hm.terms[k];
        if (t.emitter_identity) continue;
        if (const auto* b = sector_block(t.emitter, sector)) out[k] = *b * psi;
        else out[k] = Matrix::Zero(psi.rows(), psi.cols());
    }
    return out;
}

cplx drift_from(const HybridModel& hm, cplx alpha, const Matrix& psi, const std::vector<Matrix>& products)
{
    const double norm_sq = psi.squaredNorm();
    cplx v{};
    for (std::size_t k = 0; k < hm.terms.size(); ++k) {
        const auto& t = hm.terms[k];
        if (t.drift.is_zero()) continue;
        const cplx e = t.emitter_identity ? cplx(1.0) : inner(psi, products[k]) / norm_sq;
        v += -I * e * t.drift.classical(alpha);
    }
    if (hm.has_cavity_channel) {
        const cplx c = hm.channel.classical(alpha);
        const cplx dc = hm.channel_drift.classical(alpha);
        const cplx dcd = hm.channel_adjoint_drift.classical(alpha);
        v += 0.5 * (std::conj(c) * dc - dcd * c);
    }
    return v;
}

struct Derivative {
    Matrix psi;
    cplx alpha;
};

// Deterministic part of the displaced-frame equation.
Derivative rhs(const HybridModel& hm, int sector, const Matrix& psi, cplx alpha, bool continuous)
{
    const int nc = hm.nc;
    const auto products = emitter_products(hm, sector, psi);
    const cplx alpha_dot = continuous ? drift_from(hm, alpha, psi, products) : cplx{};

    // Everything acting on the cavity alone is collected in one generator.
    Matrix cavity = Matrix::Zero(nc, nc);
    Matrix out = Matrix::Zero(psi.rows(), psi.cols());
    for (std::size_t k = 0; k < hm.terms.size(); ++k) {
        const auto& t = hm.terms[k];
        const CavityExpr shifted = t.cavity.shifted(alpha);
        if (t.emitter_identity) cavity -= I * dense(shifted, nc);
        else if (shifted.terms().size() == 1 && shifted.degree() == 0) out -= (I * shifted.coefficient(0, 0)) * products[k];
        else add_times(out, products[k], dense(shifted, nc).transpose(), -I);
    }
    // Frame term -i (alpha_dot a^dag - conj(alpha_dot) a).
    if (alpha_dot != cplx{}) {
        const Ladder& l = ladder(nc);
        cavity += -alpha_dot * l.a_dag + std::conj(alpha_dot) * l.a;
    }
    if (const auto* b = sector_block(hm.decay, sector)) out -= 0.5 * (*b * psi);
    if (hm.has_cavity_channel) {
        const Matrix c = dense(hm.channel.shifted(alpha), nc);
        const Matrix cpsi = times(psi, c.transpose());
        const cplx mean = inner(psi, cpsi) / psi.squaredNorm();
        add_times(cavity, c.adjoint(), c, -0.5);
        out += std::conj(mean) * cpsi - 0.5 * std::norm(mean) * psi;
    }
    add_times(out, psi, cavity.transpose());
    return Derivative{std::move(out), alpha_dot};
}

std::vector<double> individual_rates(const HybridModel& hm, int sector, const Matrix& psi)
{
    std::vector<double> rates;
    rates.reserve(hm.model->individual.size());
    for (const auto& ch : hm.model->individual) {
        const Block* b = ch.op.block_from(sector);
        rates.push_back(b ? (b->op * psi).squaredNorm() : 0.0);
    }
    return rates;
}

} // namespace

HybridModel make_hybrid(const AssembledModel& model)
{
    if (model.collective.size() > 1)
        throw ModelError("hybrid solver supports a single cavity dissipator; model has " + std::to_string(model.collective.size()));
    HybridModel hm;
    hm.model = &model;
    hm.nc = model.nc;
    for (const auto& t : model.hamiltonian) {
        HybridModel::Term term;
        term.emitter = t.emitter;
        term.emitter_identity = t.emitter_identity;
        term.emitter_norm = t.emitter_identity ? 1.0 : t.emitter.max_row_sum();
        term.cavity = t.cavity;
        term.drift = t.cavity.derivative_creation();
        hm.terms.push_back(std::move(term));
    }
    hm.decay = BlockOperator(model.space->sector_dims());
    for (const auto& ch : model.individual) hm.decay += ch.op.adjoint() * ch.op;
    hm.decay.prune(1e-15);
    hm.decay_norm = hm.decay.max_row_sum();
    if (!model.collective.empty()) {
        hm.has_cavity_channel = true;
        hm.channel = model.collective.front().op;
        hm.channel_drift = hm.channel.derivative_creation();
        hm.channel_adjoint_drift = hm.channel.adjoint().derivative_creation();
    }
    return hm;
}

cplx complex_wiener(Rng& rng, double dt)
{
    const double g1 = standard_normal(rng);
    const double g2 = standard_normal(rng);
    return cplx(g1, g2) * std::sqrt(0.5 * dt);
}

cplx displacement_drift(const HybridModel& hm, cplx alpha, int sector, const Matrix& psi)
{
    return drift_from(hm, alpha, psi, emitter_products(hm, sector, psi));
}

cplx update_displacement(cplx alpha, const DisplacedState& state, const HybridModel& hm, double dt)
{
    const auto products = emitter_products(hm, state.base.sector, state.base.psi);
    const auto f = [&](cplx a) { return drift_from(hm, a, state.base.psi, products); };
    const cplx k1 = f(alpha);
    const cplx k2 = f(alpha + 0.5 * dt * k1);
    const cplx k3 = f(alpha + 0.5 * dt * k2);
    const cplx k4 = f(alpha + dt * k3);
    return alpha + dt * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
}

cplx displaced_field(const DisplacedState& state, int nc)
{
    const Matrix& psi = state.base.psi;
    return inner(psi, times(psi, ladder(nc).a.transpose())) / psi.squaredNorm();
}

double observable_photon_number(const DisplacedState& state, int nc)
{
    const Matrix& psi = state.base.psi;
    const double n = inner(psi, times(psi, ladder(nc).number.transpose())).real() / psi.squaredNorm();
    const cplx a = displaced_field(state, nc);
    return n + 2.0 * (std::conj(state.alpha) * a).real() + std::norm(state.alpha);
}

double displaced_expectation(const Observable& obs, const DisplacedState& state, int nc)
{
    const Matrix& psi = state.base.psi;
    Matrix applied = Matrix::Zero(psi.rows(), psi.cols());
    for (const auto& t : obs.terms) {
        const auto* b = t.emitter_identity ? nullptr : sector_block(t.emitter, state.base.sector);
        if (!t.emitter_identity && !b) continue;
        const Matrix src = b ? Matrix(*b * psi) : psi;
        add_times(applied, src, dense(t.cavity.shifted(state.alpha), nc).transpose());
    }
    return inner(psi, applied).real() / psi.squaredNorm();
}

double recentre(DisplacedState& state, int nc)
{
    const cplx beta = displaced_field(state, nc);
    const double residual = std::abs(beta);
    if (residual == 0.0) return 0.0;
    // exp(-(beta a^dag - conj(beta) a)) on the truncated basis. With
    // beta = r e^{i phi}, the generator i (beta a^dag - conj(beta) a) is
    // r D G D^dag for G = i (a^dag - a) and D = diag(e^{i n phi}).
    const Ladder& l = ladder(nc);
    const double phi = std::arg(beta);
    Vector rotation(nc);
    for (int n = 0; n < nc; ++n) rotation(n) = std::polar(1.0, n * phi);
    const Vector phases = (l.generator_values.cast<cplx>() * (I * residual)).array().exp().matrix();
    const Matrix v = rotation.asDiagonal() * l.generator_vectors;
    const Matrix shift = v * phases.asDiagonal() * v.adjoint();
    Matrix& psi = state.base.psi;
    psi = times(psi, shift.transpose());
    psi /= psi.norm();
    state.alpha += beta;
    return residual;
}

DisplacedState initial_displaced_state(const AssembledModel& model, std::uint64_t seed)
{
    return DisplacedState{initial_state(model, seed), cplx{}};
}

double hybrid_dt_max(const DisplacedState& state, const HybridModel& hm, const HybridControls& controls)
{
    if (controls.step.dt_max > 0) return controls.step.dt_max;
    const cplx alpha = state.alpha;
    double bound = 0.5 * hm.decay_norm;
    for (const auto& t : hm.terms) bound += t.emitter_norm * row_sum(dense(t.cavity.shifted(alpha), hm.nc));
    if (hm.has_cavity_channel) {
        const CavityExpr c = hm.channel.shifted(alpha);
        bound += row_sum(dense(c.adjoint() * c, hm.nc)) + 2.0 * row_sum(dense(c, hm.nc));
    }
    if (controls.continuous) {
        const cplx a_dot = displacement_drift(hm, alpha, state.base.sector, state.base.psi);
        bound += 2.0 * std::abs(a_dot) * std::sqrt(static_cast<double>(hm.nc));
    }
    double dt = bound > 0 ? controls.step.rk_safety / bound : 1.0;
    if (hm.has_cavity_channel) {
        // d<a> picks up x1 dxi + x2 conj(dxi) with x1 = <a C> - <a><C> and
        // x2 = <C^dag a> - <C^dag><a>.
        const Matrix& psi = state.base.psi;
        const double norm_sq = psi.squaredNorm();
        const Matrix& a = ladder(hm.nc).a;
        const Matrix c = dense(hm.channel.shifted(alpha), hm.nc);
        const Matrix a_psi = times(psi, a.transpose());
        const Matrix c_psi = times(psi, c.transpose());
        const cplx mean_a = inner(psi, a_psi) / norm_sq;
        const cplx mean_c = inner(psi, c_psi) / norm_sq;
        const cplx x1 = inner(psi, times(c_psi, a.transpose())) / norm_sq - mean_a * mean_c;
        const cplx x2 = inner(c_psi, a_psi) / norm_sq - std::conj(mean_c) * mean_a;
        const double spread = std::abs(x1) + std::abs(x2);
        if (spread > 0) dt = std::min(dt, std::pow(controls.ceiling / (controls.noise_margin * spread), 2));
    }
    return dt;
}

namespace {

StepResult step_with_rates(DisplacedState& state, const HybridModel& hm, double dt, const HybridControls& controls,
                           const std::vector<double>& rates)
{
    TrajectoryState& base = state.base;
    const int sector = base.sector;
    const Matrix& psi = base.psi;
    const bool cont = controls.continuous;

    const auto k1 = rhs(hm, sector, psi, state.alpha, cont);
    const auto k2 = rhs(hm, sector, psi + 0.5 * dt * k1.psi, state.alpha + 0.5 * dt * k1.alpha, cont);
    const auto k3 = rhs(hm, sector, psi + 0.5 * dt * k2.psi, state.alpha + 0.5 * dt * k2.alpha, cont);
    const auto k4 = rhs(hm, sector, psi + dt * k3.psi, state.alpha + dt * k3.alpha, cont);
    Matrix next = psi + dt * (k1.psi + 2.0 * k2.psi + 2.0 * k3.psi + k4.psi) / 6.0;
    const cplx alpha_next = state.alpha + dt * (k1.alpha + 2.0 * k2.alpha + 2.0 * k3.alpha + k4.alpha) / 6.0;

    const double total = detail::sum(rates);
    std::vector<double> probs(rates.size(), 0.0);
    if (!controls.step.norm_probability) {
        for (std::size_t i = 0; i < rates.size(); ++i) probs[i] = rates[i] * dt;
    } else if (total > 0) {
        // The diffusive terms also change the norm, so the no-jump
        // probability comes from the trapezoidal integral of the rates.
        const double end_total = detail::sum(individual_rates(hm, sector, next)) / next.squaredNorm();
        const double p_jump = -std::expm1(-0.5 * (total + end_total) * dt);
        for (std::size_t i = 0; i < rates.size(); ++i) probs[i] = p_jump * rates[i] / total;
    }
    const int idx = sample_jump(probs, uniform01(base.rng));
    if (idx >= 0) {
        int target = sector;
        Matrix jumped = apply_individual(hm.model->individual[idx].op, sector, psi, target);
        if (target < 0) throw SolverFault("jump selected a channel with no block from the current sector");
        const double norm = jumped.norm();
        if (norm < 1e-14) throw SolverFault("jump produced a zero vector");
        base.psi = jumped / norm;
        base.sector = target;
    } else {
        if (hm.has_cavity_channel) {
            const Matrix c = dense(hm.channel.shifted(state.alpha), hm.nc);
            const Matrix cpsi = times(psi, c.transpose());
            const cplx mean = inner(psi, cpsi) / psi.squaredNorm();
            next += (cpsi - mean * psi) * complex_wiener(base.rng, dt);
        }
        const double norm = next.norm();
        if (!(norm > 1e-300) || !std::isfinite(norm)) throw SolverFault("hybrid evolution lost the state");
        base.psi = next / norm;
        state.alpha = alpha_next;
    }
    base.t += dt;
    const double field = std::abs(displaced_field(state, hm.nc));
    if (idx < 0 && field > controls.ceiling)
        throw SolverFault("displaced cavity field |<a>| = " + std::to_string(field) + " exceeded the ceiling " +
                          std::to_string(controls.ceiling) + "; increase the cavity truncation");
    if (controls.continuous) recentre(state, hm.nc);
    return StepResult{dt, idx, field};
}

} // namespace

StepResult step_hybrid(DisplacedState& state, const HybridModel& hm, double dt, const HybridControls& controls)
{
    return step_with_rates(state, hm, dt, controls, individual_rates(hm, state.base.sector, state.base.psi));
}

TrajectoryRecord run_hybrid(const AssembledModel& model, const std::vector<double>& t_grid, std::uint64_t seed,
                            const HybridControls& controls)
{
    const auto start = std::chrono::steady_clock::now();
    const HybridModel hm = make_hybrid(model);
    TrajectoryRecord rec;
    rec.values.assign(model.observables.size(), std::vector<double>(t_grid.size(), 0.0));
    rec.jump_counts.assign(model.individual.size() + model.collective.size(), std::vector<long>(t_grid.size(), 0));
    DisplacedState state = initial_displaced_state(model, seed);
    double field_integral = 0.0;

    for (std::size_t ti = 0; ti < t_grid.size(); ++ti) {
        const double t_next = t_grid[ti];
        if (ti > 0 && t_next < t_grid[ti - 1]) throw std::invalid_argument("run_hybrid: time grid must be ascending");
        while (detail::before(state.base.t, t_next)) {
            rec.max_amplitudes = std::max<std::size_t>(rec.max_amplitudes, state.base.psi.size());
            const auto rates = individual_rates(hm, state.base.sector, state.base.psi);
            const double left = t_next - state.base.t;
            const double dt = choose_dt(detail::sum(rates), hybrid_dt_max(state, hm, controls), controls.step.p_max, left);
            const auto res = step_with_rates(state, hm, dt, controls, rates);
            if (dt == left) state.base.t = t_next;
            ++rec.steps;
            rec.dt_sum += dt;
            const double field = res.residual;
            field_integral += field * dt;
            rec.displaced_field_max = std::max(rec.displaced_field_max, field);
            if (res.channel >= 0) {
                ++rec.jumps;
                ++rec.jump_counts[res.channel][ti];
            }
        }
        for (std::size_t o = 0; o < model.observables.size(); ++o)
            rec.values[o][ti] = displaced_expectation(model.observables[o], state, hm.nc);
    }
    if (rec.dt_sum > 0) rec.displaced_field_mean = field_integral / rec.dt_sum;
    rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rec;
}

} // namespace pstraj
