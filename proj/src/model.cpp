#include "pstraj/model.hpp"

#include <cmath>

namespace pstraj {

namespace {

bool finite(const Matrix& m)
{
    return m.allFinite();
}

bool finite(const CavityExpr& e)
{
    for (const auto& [k, c] : e.terms())
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
    return true;
}

double max_row_sum(const SparseMatrix& m)
{
    Eigen::VectorXd rows = Eigen::VectorXd::Zero(m.rows());
    for (int k = 0; k < m.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(m, k); it; ++it) rows(it.row()) += std::abs(it.value());
    return rows.size() ? rows.maxCoeff() : 0.0;
}

void check_cavity(const CavityExpr& e, const std::string& what)
{
    if (!finite(e)) throw ModelError(what + ": non-finite coefficient");
    if (e.degree() > 2) throw ModelError(what + ": cavity expressions are limited to degree 2");
}

void check_single_site(const Matrix& m, int d, const std::string& what)
{
    if (m.rows() != d || m.cols() != d) throw ModelError(what + ": expected a " + std::to_string(d) + "x" + std::to_string(d) + " operator");
    if (!finite(m)) throw ModelError(what + ": non-finite coefficient");
}

} // namespace

KronTerm make_term(BlockOperator emitter, CavityExpr cavity, int nc)
{
    KronTerm t;
    t.emitter = std::move(emitter);
    t.cavity = std::move(cavity);
    t.cavity_identity = t.cavity.terms().size() == 1 && t.cavity.coefficient(0, 0) == cplx(1.0);
    t.cavity_matrix = t.cavity.matrix(nc);
    bool ident = t.emitter.is_sector_diagonal() && static_cast<int>(t.emitter.blocks().size()) == t.emitter.sector_count();
    if (ident) {
        for (const auto& b : t.emitter.blocks()) {
            if (!b.op.isApprox(sparse_identity(b.op.rows()))) {
                ident = false;
                break;
            }
        }
    }
    t.emitter_identity = ident;
    return t;
}

AssembledModel assemble(const ModelSpec& spec)
{
    if (spec.n < 1) throw ModelError("N must be >= 1");
    if (spec.d < 2 || spec.d > 5) throw ModelError("d must be in 2..5");
    if (spec.cavity_truncation < 1) throw ModelError("cavity truncation must be >= 1");
    if (spec.initial_species < 1 || spec.initial_species > spec.d) throw ModelError("initial species out of range");
    if (spec.initial_photons < 0 || spec.initial_photons >= spec.cavity_truncation)
        throw ModelError("initial photon number must lie inside the truncation");
    if (spec.emitter_h.size() != 0) check_single_site(spec.emitter_h, spec.d, "emitter_h");
    check_cavity(spec.cavity_h, "cavity_h");
    for (const auto& c : spec.couplings) {
        check_single_site(c.x, spec.d, "coupling");
        check_cavity(c.cavity, "coupling");
    }
    for (const auto& l : spec.individual) check_single_site(l.op, spec.d, "dissipator " + l.label);
    for (const auto& c : spec.collective) check_cavity(c.op, "cavity dissipator " + c.label);

    AssembledModel m;
    m.spec = spec;
    m.nc = spec.cavity_truncation;
    m.space = make_emitter_space(spec.n, spec.d);
    const auto dims = m.space->sector_dims();
    const auto ident = BlockOperator::identity(dims);
    const int nc = m.nc;

    BlockOperator emitter_h(dims);
    if (spec.emitter_h.size() != 0) emitter_h = m.space->collective(spec.emitter_h);

    if (!emitter_h.is_zero()) m.hamiltonian.push_back(make_term(emitter_h, CavityExpr::identity(), nc));
    if (!spec.cavity_h.is_zero()) m.hamiltonian.push_back(make_term(ident, spec.cavity_h, nc));
    std::vector<KronTerm> coupling_terms;
    for (const auto& c : spec.couplings) {
        auto e = m.space->collective(c.x);
        e.prune(1e-14);
        if (e.is_zero() || c.cavity.is_zero()) continue;
        coupling_terms.push_back(make_term(std::move(e), c.cavity, nc));
    }
    m.hamiltonian.insert(m.hamiltonian.end(), coupling_terms.begin(), coupling_terms.end());

    BlockOperator decay(dims);
    for (const auto& l : spec.individual) {
        for (auto& ch : m.space->channels(l.op)) {
            ch.op.prune(1e-14);
            if (ch.op.is_zero()) continue;
            decay += ch.op.adjoint() * ch.op;
            m.individual.push_back(IndividualChannel{l.label + ":" + ch.label, std::move(ch.op)});
        }
    }
    CavityExpr loss;
    for (const auto& c : spec.collective) {
        if (c.op.is_zero()) continue;
        loss += c.op.adjoint() * c.op;
        m.collective.push_back(CollectiveChannel{c.label, c.op, c.op.matrix(nc)});
    }

    BlockOperator emitter_eff = emitter_h + cplx(0.0, -0.5) * decay;
    emitter_eff.prune(1e-15);
    if (!emitter_eff.is_zero()) m.h_eff.push_back(make_term(emitter_eff, CavityExpr::identity(), nc));
    const CavityExpr cavity_eff = spec.cavity_h + cplx(0.0, -0.5) * loss;
    if (!cavity_eff.is_zero()) m.h_eff.push_back(make_term(ident, cavity_eff, nc));
    m.h_eff.insert(m.h_eff.end(), coupling_terms.begin(), coupling_terms.end());

    for (const auto& t : m.h_eff)
        m.norm_estimate += (t.emitter_identity ? 1.0 : t.emitter.max_row_sum()) * max_row_sum(t.cavity_matrix);

    m.observables.push_back(Observable{"n_photon", {make_term(ident, CavityExpr::number(), nc)}});
    if (spec.d == 2) {
        m.observables.push_back(Observable{"Jz", {make_term(m.space->collective(0.5 * sigma_z()), CavityExpr::identity(), nc)}});
        m.observables.push_back(Observable{"J2", {make_term(m.space->total_spin_squared(), CavityExpr::identity(), nc)}});
    } else {
        for (int s = 1; s <= spec.d; ++s) {
            m.observables.push_back(Observable{"pop_" + std::to_string(s),
                                               {make_term(m.space->collective(level_op(spec.d, s, s)), CavityExpr::identity(), nc)}});
        }
    }
    return m;
}

ModelSpec with_size(ModelSpec spec, int n, int nc)
{
    // Couplings written with 1/sqrt(N) are rescaled to the new N.
    const double scale = std::sqrt(static_cast<double>(spec.n) / n);
    for (auto& c : spec.couplings) c.cavity *= scale;
    spec.n = n;
    spec.cavity_truncation = nc;
    if (spec.initial_photons >= nc) spec.initial_photons = nc - 1;
    return spec;
}

int default_truncation(int n, TruncationPolicy policy)
{
    if (n < 1) throw std::invalid_argument("default_truncation: N must be >= 1");
    if (policy == TruncationPolicy::hybrid) return 6;
    return std::max(20, (n + 1) / 2);
}

Matrix level_op(int d, int a, int b)
{
    Matrix m = Matrix::Zero(d, d);
    m(a - 1, b - 1) = 1.0;
    return m;
}

Matrix sigma_plus() { return level_op(2, 2, 1); }
Matrix sigma_minus() { return level_op(2, 1, 2); }
Matrix sigma_z() { return level_op(2, 2, 2) - level_op(2, 1, 1); }
Matrix sigma_x() { return sigma_plus() + sigma_minus(); }
Matrix sigma_y() { return I * (sigma_minus() - sigma_plus()); }

ModelSpec dicke(int n, const DickeParams& p, int nc)
{
    ModelSpec s;
    s.name = "dicke";
    s.n = n;
    s.d = 2;
    s.emitter_h = p.omega0 * sigma_z();
    s.cavity_h = CavityExpr::number(p.omegac);
    const double gc = p.g / std::sqrt(static_cast<double>(n));
    s.couplings.push_back(Coupling{sigma_x(), CavityExpr::annihilation(gc) + CavityExpr::creation(gc)});
    if (p.gamma_phi > 0) s.individual.push_back(Dissipator{"dephasing", std::sqrt(p.gamma_phi) * sigma_z()});
    if (p.gamma_down > 0) s.individual.push_back(Dissipator{"decay", std::sqrt(p.gamma_down) * sigma_minus()});
    if (p.kappa > 0) s.collective.push_back(CavityDissipator{"cavity_loss", CavityExpr::annihilation(std::sqrt(p.kappa))});
    s.cavity_truncation = nc > 0 ? nc : default_truncation(n, TruncationPolicy::jump);
    s.initial_species = 1;
    return s;
}

ModelSpec tavis_cummings(int n, const TavisCummingsParams& p, int nc)
{
    ModelSpec s;
    s.name = "tavis_cummings";
    s.n = n;
    s.d = 2;
    s.emitter_h = p.omega0 * sigma_z();
    s.cavity_h = CavityExpr::number(p.omegac);
    const double gc = p.g / std::sqrt(static_cast<double>(n));
    s.couplings.push_back(Coupling{0.5 * sigma_x(), CavityExpr::annihilation(gc) + CavityExpr::creation(gc)});
    s.couplings.push_back(Coupling{0.5 * sigma_y(), CavityExpr::annihilation(I * gc) + CavityExpr::creation(-I * gc)});
    if (p.gamma_phi > 0) s.individual.push_back(Dissipator{"dephasing", std::sqrt(p.gamma_phi) * sigma_z()});
    if (p.gamma_down > 0) s.individual.push_back(Dissipator{"decay", std::sqrt(p.gamma_down) * sigma_minus()});
    if (p.kappa > 0) s.collective.push_back(CavityDissipator{"cavity_loss", CavityExpr::annihilation(std::sqrt(p.kappa))});
    s.cavity_truncation = nc > 0 ? nc : default_truncation(n, TruncationPolicy::jump);
    s.initial_species = 2;
    return s;
}

ModelSpec three_level(int n, const ThreeLevelParams& p, int nc)
{
    ModelSpec s;
    s.name = "three_level";
    s.n = n;
    s.d = 3;
    s.emitter_h = p.omegae * level_op(3, 3, 3) + p.rabi * level_op(3, 2, 1) + std::conj(p.rabi) * level_op(3, 1, 2);
    s.cavity_h = CavityExpr::number(p.omegac);
    const double gc = p.g / std::sqrt(static_cast<double>(n));
    const auto re = CavityExpr::annihilation(0.5) + CavityExpr::creation(0.5);
    const auto im = CavityExpr::annihilation(0.5 * I) + CavityExpr::creation(-0.5 * I);
    for (int lower : {1, 2}) {
        s.couplings.push_back(Coupling{gc * (level_op(3, lower, 3) + level_op(3, 3, lower)), re});
        s.couplings.push_back(Coupling{I * gc * (level_op(3, lower, 3) - level_op(3, 3, lower)), im});
    }
    if (p.gamma_up > 0) {
        s.individual.push_back(Dissipator{"pump_13", std::sqrt(p.gamma_up) * level_op(3, 3, 1)});
        s.individual.push_back(Dissipator{"pump_23", std::sqrt(p.gamma_up) * level_op(3, 3, 2)});
    }
    if (p.gamma_down > 0) {
        s.individual.push_back(Dissipator{"decay_31", std::sqrt(p.gamma_down) * level_op(3, 1, 3)});
        s.individual.push_back(Dissipator{"decay_32", std::sqrt(p.gamma_down) * level_op(3, 2, 3)});
    }
    if (p.kappa > 0) s.collective.push_back(CavityDissipator{"cavity_loss", CavityExpr::annihilation(std::sqrt(p.kappa))});
    s.cavity_truncation = nc > 0 ? nc : default_truncation(n, TruncationPolicy::jump);
    s.initial_species = 1;
    return s;
}

} // namespace pstraj
