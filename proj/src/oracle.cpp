#include "pstraj/oracle.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "pstraj/trajectory.hpp"

namespace pstraj::oracle {

SparseMatrix kron(const SparseMatrix& a, const SparseMatrix& b)
{
    std::vector<Triplet> trips;
    trips.reserve(static_cast<std::size_t>(a.nonZeros()) * b.nonZeros());
    for (int ka = 0; ka < a.outerSize(); ++ka)
        for (SparseMatrix::InnerIterator ia(a, ka); ia; ++ia)
            for (int kb = 0; kb < b.outerSize(); ++kb)
                for (SparseMatrix::InnerIterator ib(b, kb); ib; ++ib)
                    trips.emplace_back(ia.row() * b.rows() + ib.row(), ia.col() * b.cols() + ib.col(), ia.value() * ib.value());
    SparseMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    out.setFromTriplets(trips.begin(), trips.end());
    return out;
}

namespace {

SparseMatrix term_block(const KronTerm& t, int sector, int dim, int nc)
{
    SparseMatrix e;
    if (t.emitter_identity) {
        e = sparse_identity(dim);
    } else {
        const Block* b = t.emitter.block_from(sector);
        if (!b) return SparseMatrix(dim * nc, dim * nc);
        if (b->to != sector) throw std::logic_error("term_block: term leaves the sector");
        e = b->op;
    }
    return kron(e, t.cavity_matrix);
}

SparseMatrix sum_terms(const std::vector<KronTerm>& terms, int sector, int dim, int nc)
{
    SparseMatrix out(dim * nc, dim * nc);
    for (const auto& t : terms) out += term_block(t, sector, dim, nc);
    return out;
}

double max_abs(const Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }
double max_abs(const PseudoDensityMatrix& r)
{
    double v = 0.0;
    for (const auto& b : r.blocks) v = std::max(v, max_abs(b));
    return v;
}

// Elements of a density matrix are bounded by 1; larger values (or NaN) mean
// the fixed step is unstable even if the trace happens to survive.
template <typename State>
void check_drift(double trace, const State& rho, MasterRecord& rec)
{
    const double drift = std::abs(trace - 1.0);
    rec.max_trace_drift = std::max(rec.max_trace_drift, drift);
    if (!(drift <= 1e-6)) throw SolverFault("master equation trace drifted by " + std::to_string(drift) + "; reduce dt_max");
    if (!(max_abs(rho) <= 1.0 + 1e-6)) throw SolverFault("master equation integration is unstable; reduce dt_max");
}

bool before(double t, double target)
{
    return target - t > 1e-12 * std::max(1.0, std::abs(target));
}

template <typename State, typename Rhs, typename Observe, typename Trace, typename Positivity>
MasterRecord integrate(State rho, const std::vector<double>& t_grid, double dt_max, std::size_t n_obs, Rhs rhs,
                       Observe observe, Trace trace, Positivity positivity)
{
    MasterRecord rec;
    rec.values.assign(n_obs, std::vector<double>(t_grid.size()));
    rec.min_eigenvalue = positivity(rho);
    double t = 0.0;
    for (std::size_t ti = 0; ti < t_grid.size(); ++ti) {
        while (before(t, t_grid[ti])) {
            const double left = t_grid[ti] - t;
            const int pieces = static_cast<int>(std::ceil(left / dt_max - 1e-9));
            const double dt = left / std::max(1, pieces);
            const State k1 = rhs(rho);
            const State k2 = rhs(rho + cplx(0.5 * dt) * k1);
            const State k3 = rhs(rho + cplx(0.5 * dt) * k2);
            const State k4 = rhs(rho + cplx(dt) * k3);
            rho = rho + cplx(dt / 6.0) * (k1 + cplx(2.0) * k2 + cplx(2.0) * k3 + k4);
            t = (pieces <= 1) ? t_grid[ti] : t + dt;
            ++rec.steps;
        }
        check_drift(trace(rho), rho, rec);
        for (std::size_t o = 0; o < n_obs; ++o) rec.values[o][ti] = observe(o, rho);
        rec.min_eigenvalue = std::min(rec.min_eigenvalue, positivity(rho));
    }
    return rec;
}

double default_dt(const AssembledModel& model, const MasterControls& c)
{
    if (c.dt_max > 0) return c.dt_max;
    return model.norm_estimate > 0 ? 0.25 / model.norm_estimate : 1.0;
}

} // namespace

PseudoLiouvillian build_pseudo(const AssembledModel& model)
{
    PseudoLiouvillian l;
    const int nc = model.nc;
    const auto sdims = model.space->sector_dims();
    for (int s = 0; s < static_cast<int>(sdims.size()); ++s) {
        l.dims.push_back(sdims[s] * nc);
        l.h_eff.push_back(sum_terms(model.h_eff, s, sdims[s], nc));
    }
    for (const auto& ch : model.individual) {
        std::vector<SectorChannel> blocks;
        for (const auto& b : ch.op.blocks()) blocks.push_back(SectorChannel{b.from, b.to, kron(b.op, sparse_identity(nc))});
        l.jumps.push_back(std::move(blocks));
    }
    for (const auto& ch : model.collective) {
        std::vector<SectorChannel> blocks;
        for (int s = 0; s < static_cast<int>(sdims.size()); ++s)
            blocks.push_back(SectorChannel{s, s, kron(sparse_identity(sdims[s]), ch.matrix)});
        l.jumps.push_back(std::move(blocks));
    }
    for (const auto& obs : model.observables) {
        std::vector<SparseMatrix> per;
        for (int s = 0; s < static_cast<int>(sdims.size()); ++s) per.push_back(sum_terms(obs.terms, s, sdims[s], nc));
        l.observables.push_back(std::move(per));
        l.observable_names.push_back(obs.name);
    }
    return l;
}

double PseudoDensityMatrix::trace() const
{
    double t = 0.0;
    for (const auto& b : blocks) t += b.trace().real();
    return t;
}

PseudoDensityMatrix& PseudoDensityMatrix::operator+=(const PseudoDensityMatrix& o)
{
    for (std::size_t i = 0; i < blocks.size(); ++i) blocks[i] += o.blocks[i];
    return *this;
}

PseudoDensityMatrix operator*(cplx s, PseudoDensityMatrix a)
{
    for (auto& b : a.blocks) b *= s;
    return a;
}

PseudoDensityMatrix initial_density(const AssembledModel& model)
{
    const auto psi = initial_state(model, 0).psi;
    PseudoDensityMatrix rho;
    const auto [sector, index] = model.space->uniform_state(model.spec.initial_species);
    (void)index;
    const auto sdims = model.space->sector_dims();
    for (int s = 0; s < static_cast<int>(sdims.size()); ++s) {
        const int dim = sdims[s] * model.nc;
        if (s == sector) {
            Vector v(dim);
            for (int i = 0; i < sdims[s]; ++i)
                for (int n = 0; n < model.nc; ++n) v(i * model.nc + n) = psi(i, n);
            rho.blocks.push_back(v * v.adjoint());
        } else {
            rho.blocks.push_back(Matrix::Zero(dim, dim));
        }
    }
    return rho;
}

PseudoDensityMatrix liouville_rhs(const PseudoLiouvillian& l, const PseudoDensityMatrix& rho)
{
    PseudoDensityMatrix out;
    out.blocks.resize(rho.blocks.size());
    for (std::size_t s = 0; s < rho.blocks.size(); ++s) {
        const Matrix hr = l.h_eff[s] * rho.blocks[s];
        out.blocks[s] = -I * hr + I * hr.adjoint();
    }
    for (const auto& ch : l.jumps) {
        for (const auto& b : ch) {
            const Matrix left = b.op * rho.blocks[b.from];
            out.blocks[b.to] += (b.op * left.adjoint()).adjoint();
        }
    }
    return out;
}

double expectation(const PseudoLiouvillian& l, std::size_t obs, const PseudoDensityMatrix& rho)
{
    cplx v = 0.0;
    for (std::size_t s = 0; s < rho.blocks.size(); ++s) v += (l.observables[obs][s] * rho.blocks[s]).trace();
    return v.real();
}

double min_eigenvalue(const PseudoDensityMatrix& rho)
{
    double best = 0.0;
    bool first = true;
    for (const auto& b : rho.blocks) {
        if (b.rows() == 0) continue;
        const Matrix herm = 0.5 * (b + b.adjoint());
        Eigen::SelfAdjointEigenSolver<Matrix> es(herm, Eigen::EigenvaluesOnly);
        const double m = es.eigenvalues().minCoeff();
        best = first ? m : std::min(best, m);
        first = false;
    }
    return best;
}

void require_within_cap(int n, int d, int nc)
{
    long dim = nc;
    for (int i = 0; i < n && dim <= full_space_cap; ++i) dim *= d;
    if (dim > full_space_cap)
        throw CapExceeded("oracle: d^N * N_c = " + std::to_string(d) + "^" + std::to_string(n) + " * " + std::to_string(nc) +
                          " exceeds the cap of " + std::to_string(full_space_cap) +
                          "; use the jump, hybrid or u1 solver, or reduce N or the cavity truncation");
}

FullLiouvillian build_full(const AssembledModel& model)
{
    const auto& spec = model.spec;
    require_within_cap(spec.n, spec.d, model.nc);
    int de = 1;
    for (int i = 0; i < spec.n; ++i) de *= spec.d;
    const int nc = model.nc;
    auto site = [&](const Matrix& x, int i) { return SparseMatrix(site_operator(x, i, spec.n).sparseView()); };
    auto collective = [&](const Matrix& x) { return SparseMatrix(collective_full(x, spec.n).sparseView()); };
    const SparseMatrix ie = sparse_identity(de);
    const SparseMatrix ic = sparse_identity(nc);

    FullLiouvillian l;
    l.dim = de * nc;
    SparseMatrix h(l.dim, l.dim);
    if (spec.emitter_h.size() != 0) h += kron(collective(spec.emitter_h), ic);
    h += kron(ie, spec.cavity_h.matrix(nc));
    for (const auto& c : spec.couplings) h += kron(collective(c.x), c.cavity.matrix(nc));
    SparseMatrix decay(l.dim, l.dim);
    for (const auto& d : spec.individual)
        for (int i = 0; i < spec.n; ++i) {
            SparseMatrix j = kron(site(d.op, i), ic);
            decay += SparseMatrix(j.adjoint()) * j;
            l.jumps.push_back(std::move(j));
        }
    for (const auto& c : spec.collective) {
        SparseMatrix j = kron(ie, c.op.matrix(nc));
        decay += SparseMatrix(j.adjoint()) * j;
        l.jumps.push_back(std::move(j));
    }
    l.h_eff = h - cplx(0.0, 0.5) * decay;

    l.observables.push_back(kron(ie, CavityExpr::number().matrix(nc)));
    l.observable_names.push_back("n_photon");
    if (spec.d == 2) {
        const SparseMatrix jz = collective(0.5 * sigma_z());
        const SparseMatrix jx = collective(0.5 * sigma_x());
        const SparseMatrix jy = collective(0.5 * sigma_y());
        l.observables.push_back(kron(jz, ic));
        l.observable_names.push_back("Jz");
        l.observables.push_back(kron(SparseMatrix(jx * jx + jy * jy + jz * jz), ic));
        l.observable_names.push_back("J2");
    } else {
        for (int s = 1; s <= spec.d; ++s) {
            l.observables.push_back(kron(collective(level_op(spec.d, s, s)), ic));
            l.observable_names.push_back("pop_" + std::to_string(s));
        }
    }
    return l;
}

Matrix full_initial_density(const AssembledModel& model)
{
    const auto& spec = model.spec;
    long dim_e = 1;
    long index = 0;
    for (int i = 0; i < spec.n; ++i) {
        dim_e *= spec.d;
        index = index * spec.d + (spec.initial_species - 1);
    }
    Matrix rho = Matrix::Zero(dim_e * model.nc, dim_e * model.nc);
    const long k = index * model.nc + spec.initial_photons;
    rho(k, k) = 1.0;
    return rho;
}

Matrix full_space_rhs(const FullLiouvillian& l, const Matrix& rho)
{
    const Matrix hr = l.h_eff * rho;
    Matrix out = -I * hr + I * hr.adjoint();
    for (const auto& j : l.jumps) {
        const Matrix left = j * rho;
        out += (j * left.adjoint()).adjoint();
    }
    return out;
}

PseudoDensityMatrix project_full(const FullSpaceBasis& basis, const Matrix& rho, int nc)
{
    PseudoDensityMatrix out;
    const int de = basis.full_dim();
    for (int s = 0; s < basis.sector_count(); ++s) {
        const int dim = basis.sector_dim(s);
        Matrix block = Matrix::Zero(dim * nc, dim * nc);
        for (int n = 0; n < nc; ++n)
            for (int n2 = 0; n2 < nc; ++n2) {
                Matrix sub(de, de);
                for (int a = 0; a < de; ++a)
                    for (int b = 0; b < de; ++b) sub(a, b) = rho(a * nc + n, b * nc + n2);
                for (int w = 0; w < dim; ++w)
                    for (int w2 = 0; w2 < dim; ++w2)
                        block(w * nc + n, w2 * nc + n2) =
                            (basis.vectors(s, w).adjoint() * sub * basis.vectors(s, w2)).trace();
            }
        out.blocks.push_back(std::move(block));
    }
    return out;
}

MasterRecord integrate_master(const AssembledModel& model, const std::vector<double>& t_grid, const MasterControls& controls)
{
    return integrate_master(model, initial_density(model), t_grid, controls);
}

MasterRecord integrate_master(const AssembledModel& model, PseudoDensityMatrix rho0, const std::vector<double>& t_grid,
                              const MasterControls& controls)
{
    const auto l = build_pseudo(model);
    return integrate(
        std::move(rho0), t_grid, default_dt(model, controls), l.observables.size(),
        [&](const PseudoDensityMatrix& r) { return liouville_rhs(l, r); },
        [&](std::size_t o, const PseudoDensityMatrix& r) { return expectation(l, o, r); },
        [](const PseudoDensityMatrix& r) { return r.trace(); },
        [&](const PseudoDensityMatrix& r) { return controls.track_positivity ? min_eigenvalue(r) : 0.0; });
}

MasterRecord integrate_full(const AssembledModel& model, const std::vector<double>& t_grid, const MasterControls& controls)
{
    const auto l = build_full(model);
    return integrate(
        full_initial_density(model), t_grid, default_dt(model, controls), l.observables.size(),
        [&](const Matrix& r) { return full_space_rhs(l, r); },
        [&](std::size_t o, const Matrix& r) { return (l.observables[o] * r).trace().real(); },
        [](const Matrix& r) { return r.trace().real(); },
        [&](const Matrix& r) {
            if (!controls.track_positivity) return 0.0;
            Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (r + r.adjoint()), Eigen::EigenvaluesOnly);
            return es.eigenvalues().minCoeff();
        });
}

} // namespace pstraj::oracle
