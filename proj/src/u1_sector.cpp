#include "pstraj/u1_sector.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "pstraj/jump_loop.hpp"
#include "pstraj/spin_basis.hpp"

namespace pstraj {

namespace {

const char* const kRejected = "model lacks weak U(1) symmetry: ";

int two_j_of(int n, int sector)
{
    return spin::enumerate_sectors(n).at(sector).two_j;
}

// Emitter excitation change of every nonzero element of a block operator, or
// nullopt when the elements disagree.
std::optional<int> emitter_change(const BlockOperator& op, int n)
{
    const auto sectors = spin::enumerate_sectors(n);
    std::optional<int> change;
    for (const auto& b : op.blocks()) {
        const int off_from = (n - sectors[b.from].two_j) / 2;
        const int off_to = (n - sectors[b.to].two_j) / 2;
        for (int c = 0; c < b.op.outerSize(); ++c) {
            for (SparseMatrix::InnerIterator it(b.op, c); it; ++it) {
                if (std::abs(it.value()) < 1e-14) continue;
                const int d = static_cast<int>(it.row()) + off_to - static_cast<int>(it.col()) - off_from;
                if (change && *change != d) return std::nullopt;
                change = d;
            }
        }
    }
    return change ? change : std::optional<int>(0);
}

Matrix dense_operator(const std::vector<KronTerm>& terms, const AssembledModel& m)
{
    const int pd = m.space->total_dim();
    const int nc = m.nc;
    Matrix out = Matrix::Zero(pd * nc, pd * nc);
    for (const auto& t : terms) {
        const Matrix e = t.emitter_identity ? Matrix(Matrix::Identity(pd, pd)) : t.emitter.to_dense();
        const Matrix c(t.cavity_matrix);
        for (int i = 0; i < pd; ++i)
            for (int j = 0; j < pd; ++j)
                if (e(i, j) != cplx{}) out.block(i * nc, j * nc, nc, nc) += e(i, j) * c;
    }
    return out;
}

} // namespace

std::vector<Observable> excitation_observables(const AssembledModel& model)
{
    const int n = model.spec.n;
    const auto ident = BlockOperator::identity(model.space->sector_dims());
    BlockOperator emitter = model.space->collective(0.5 * sigma_z());
    emitter += (0.5 * n) * ident;
    const auto k = std::vector<KronTerm>{make_term(emitter, CavityExpr::identity(), model.nc),
                                         make_term(ident, CavityExpr::number(), model.nc)};
    std::vector<KronTerm> k2;
    k2.push_back(make_term(emitter * emitter, CavityExpr::identity(), model.nc));
    k2.push_back(make_term(ident, CavityExpr::number() * CavityExpr::number(), model.nc));
    k2.push_back(make_term(2.0 * emitter, CavityExpr::number(), model.nc));
    return {Observable{"K", k}, Observable{"K2", k2}};
}

U1Descriptor validate_u1(const AssembledModel& model)
{
    if (model.spec.d != 2) throw ModelError(std::string(kRejected) + "the excitation solver needs two-level emitters");
    const int n = model.spec.n;
    // Individual terms need not conserve K (sigma_x and sigma_y couplings
    // only do in sum), so the check is on the whole of H_eff.
    const auto small = assemble(with_size(model.spec, std::min(n, 4), 6));
    const Matrix h = dense_operator(small.h_eff, small);
    const auto kops = excitation_observables(small);
    const Matrix k = dense_operator(kops[0].terms, small);
    U1Descriptor out;
    out.commutator_norm = (h * k - k * h).norm();
    if (out.commutator_norm > 1e-10 * std::max(1.0, h.norm()))
        throw ModelError(std::string(kRejected) + "[H_eff, K] = " + std::to_string(out.commutator_norm));

    for (const auto& ch : model.individual) {
        const auto de = emitter_change(ch.op, n);
        if (!de) throw ModelError(std::string(kRejected) + "channel " + ch.label + " has no definite excitation change");
        out.delta_k.push_back(*de);
    }
    for (const auto& ch : model.collective) {
        const auto dn = ch.op.excitation_change();
        if (!dn) throw ModelError(std::string(kRejected) + "channel " + ch.label + " has no definite excitation change");
        out.delta_k.push_back(*dn);
    }
    return out;
}

namespace {

ExcitationSector sector_basis(int n, int sector, int two_j, int k)
{
    ExcitationSector s;
    s.sector = sector;
    s.two_j = two_j;
    s.k = k;
    s.offset = (n - s.two_j) / 2;
    s.dim = std::min(s.two_j, k - s.offset) + 1;
    if (s.dim <= 0) throw std::logic_error("excitation sector below the emitter ground state");
    return s;
}

} // namespace

ExcitationSector make_excitation_sector(int n, int sector, int k)
{
    return sector_basis(n, sector, two_j_of(n, sector), k);
}

U1Cache::U1Cache(const AssembledModel& model, U1Descriptor descriptor)
    : model_(&model), descriptor_(std::move(descriptor))
{
    for (const auto& s : spin::enumerate_sectors(model.spec.n)) two_j_.push_back(s.two_j);
}

ExcitationSector U1Cache::basis(int sector, int k) const
{
    return sector_basis(model_->spec.n, sector, two_j_.at(sector), k);
}

SparseMatrix U1Cache::restrict(const std::vector<KronTerm>& terms, const ExcitationSector& basis) const
{
    std::vector<Triplet> trips;
    for (const auto& t : terms) {
        if (t.emitter_identity) {
            for (int i = 0; i < basis.dim; ++i) {
                const int p = basis.photons(i);
                trips.emplace_back(i, i, t.cavity.element(p, p));
            }
            continue;
        }
        const Block* b = t.emitter.block_from(basis.sector);
        if (!b) continue;
        if (b->to != basis.sector) throw std::logic_error("U1Cache: term leaves the spin sector");
        for (int c = 0; c < std::min<int>(basis.dim, b->op.outerSize()); ++c) {
            for (SparseMatrix::InnerIterator it(b->op, c); it; ++it) {
                const int r = static_cast<int>(it.row());
                if (r >= basis.dim) continue;
                trips.emplace_back(r, c, it.value() * t.cavity.element(basis.photons(r), basis.photons(c)));
            }
        }
    }
    SparseMatrix m(basis.dim, basis.dim);
    m.setFromTriplets(trips.begin(), trips.end());
    return m;
}

const U1Cache::Entry& U1Cache::get(int sector, int k)
{
    const auto key = std::make_pair(sector, k);
    if (auto it = entries_.find(key); it != entries_.end()) return it->second;
    Entry e;
    e.basis = basis(sector, k);
    e.h_eff = restrict(model_->h_eff, e.basis);
    for (const auto& obs : model_->observables) e.observables.push_back(restrict(obs.terms, e.basis));
    return entries_.emplace(key, std::move(e)).first->second;
}

U1State initial_u1_state(const AssembledModel& model)
{
    const auto [sector, index] = model.space->uniform_state(model.spec.initial_species);
    const int n = model.spec.n;
    const int offset = (n - two_j_of(n, sector)) / 2;
    U1State s;
    s.sector = sector;
    s.k = model.spec.initial_photons + index + offset;
    const auto basis = make_excitation_sector(n, sector, s.k);
    s.psi = Matrix::Zero(basis.dim, 1);
    s.psi(index, 0) = 1.0;
    return s;
}

Matrix apply_u1_channel(U1Cache& cache, const U1State& state, int channel, int& sector, int& k)
{
    const auto& model = cache.model();
    const int n = model.spec.n;
    const int n_ind = static_cast<int>(model.individual.size());
    k = state.k + cache.descriptor().delta_k.at(channel);
    const auto& src = cache.get(state.sector, state.k).basis;
    if (channel < n_ind) {
        const Block* b = model.individual[channel].op.block_from(state.sector);
        if (!b) {
            sector = -1;
            return Matrix();
        }
        sector = b->to;
        if (k < (n - cache.two_j(sector)) / 2) return Matrix::Zero(1, 1);
        const auto tgt = cache.basis(sector, k);
        Matrix out = Matrix::Zero(tgt.dim, 1);
        for (int c = 0; c < std::min<int>(src.dim, b->op.outerSize()); ++c) {
            if (state.psi(c, 0) == cplx{}) continue;
            for (SparseMatrix::InnerIterator it(b->op, c); it; ++it) {
                const int r = static_cast<int>(it.row());
                if (r < tgt.dim) out(r, 0) += it.value() * state.psi(c, 0);
            }
        }
        return out;
    }
    sector = state.sector;
    if (k < src.offset) return Matrix::Zero(1, 1);  // lowering out of K = 0 has zero amplitude
    const auto& op = model.collective[channel - n_ind].op;
    const auto tgt = cache.basis(sector, k);
    Matrix out = Matrix::Zero(tgt.dim, 1);
    for (int i = 0; i < std::min(src.dim, tgt.dim); ++i) out(i, 0) = op.element(tgt.photons(i), src.photons(i)) * state.psi(i, 0);
    return out;
}

namespace {

struct U1Ops {
    U1Cache& cache;
    U1State& state;
    long& checks;

    const U1Cache::Entry& entry() const { return cache.get(state.sector, state.k); }

    std::vector<double> rates() const
    {
        const auto& m = cache.model();
        std::vector<double> out;
        const int channels = static_cast<int>(m.individual.size() + m.collective.size());
        for (int c = 0; c < channels; ++c) {
            int sector = 0, k = 0;
            out.push_back(apply_u1_channel(cache, state, c, sector, k).squaredNorm());
        }
        return out;
    }
    Matrix no_jump(double dt) const
    {
        const SparseMatrix& h = entry().h_eff;
        const cplx f = -I * dt;
        const Matrix& psi = state.psi;
        const Matrix k1 = f * (h * psi);
        const Matrix k2 = f * (h * (psi + 0.5 * k1));
        const Matrix k3 = f * (h * (psi + 0.5 * k2));
        const Matrix k4 = f * (h * (psi + k3));
        return psi + (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
    }
    void accept(Matrix&& psi)
    {
        // The block basis is fixed by (J, K); a shape change would mean K moved.
        if (psi.rows() != entry().basis.dim) throw std::logic_error("U(1) solver: excitation number changed between jumps");
        ++checks;
        state.psi = std::move(psi);
    }
    double norm_sq() const { return state.psi.squaredNorm(); }
    void jump(int index)
    {
        int sector = 0, k = 0;
        Matrix next = apply_u1_channel(cache, state, index, sector, k);
        if (sector < 0) throw SolverFault("jump selected a channel with no block from the current sector");
        const double norm = next.norm();
        if (norm < 1e-14) throw SolverFault("jump produced a zero vector");
        if (k < 0) throw std::logic_error("U(1) solver: negative excitation number");
        state.sector = sector;
        state.k = k;
        state.psi = next / norm;
    }
    std::size_t amplitudes() const { return state.psi.size(); }
    void observe(std::vector<std::vector<double>>& values, std::size_t ti) const
    {
        const auto& e = entry();
        const double norm_sq = state.psi.squaredNorm();
        for (std::size_t o = 0; o < e.observables.size(); ++o)
            values[o][ti] = (state.psi.adjoint() * (e.observables[o] * state.psi))(0, 0).real() / norm_sq;
    }
};

} // namespace

TrajectoryRecord run_u1(const AssembledModel& model, const U1Descriptor& descriptor, const std::vector<double>& t_grid,
                        std::uint64_t seed, const StepControls& controls)
{
    U1Cache cache(model, descriptor);
    U1State state = initial_u1_state(model);
    Rng rng(seed);
    long checks = 0;
    U1Ops ops{cache, state, checks};
    auto rec = detail::run_jump_loop(ops, t_grid, rng, controls, resolved_dt_max(model, controls), model.observables.size(),
                                     model.individual.size() + model.collective.size());
    rec.invariant_checks = checks;
    return rec;
}

} // namespace pstraj
