#pragma once

// Deterministic reference solvers: the pseudo-state master equation (blocks
// per sector) and the literal Lindblad equation on the d^N (x) N_c space.

#include <string>
#include <vector>

#include "pstraj/model.hpp"
#include "pstraj/oracle_basis.hpp"

namespace pstraj::oracle {

inline constexpr long full_space_cap = 4096;

// Throws CapExceeded when d^N * N_c > full_space_cap.
void require_within_cap(int n, int d, int nc);

SparseMatrix kron(const SparseMatrix& a, const SparseMatrix& b);

// Operators on (emitter index) (x) (Fock index), emitter-major.
struct SectorChannel {
    int from;
    int to;
    SparseMatrix op;
};

struct PseudoLiouvillian {
    std::vector<int> dims;                        // sector dim * N_c
    std::vector<SparseMatrix> h_eff;              // per sector
    std::vector<std::vector<SectorChannel>> jumps;  // per channel: blocks
    std::vector<std::vector<SparseMatrix>> observables;  // [obs][sector]
    std::vector<std::string> observable_names;
};

PseudoLiouvillian build_pseudo(const AssembledModel& model);

// Block-diagonal pseudo density matrix.
struct PseudoDensityMatrix {
    std::vector<Matrix> blocks;

    double trace() const;
    PseudoDensityMatrix& operator+=(const PseudoDensityMatrix& o);
    friend PseudoDensityMatrix operator*(cplx s, PseudoDensityMatrix a);
    friend PseudoDensityMatrix operator+(PseudoDensityMatrix a, const PseudoDensityMatrix& b) { return a += b; }
};

PseudoDensityMatrix initial_density(const AssembledModel& model);
PseudoDensityMatrix liouville_rhs(const PseudoLiouvillian& l, const PseudoDensityMatrix& rho);
double expectation(const PseudoLiouvillian& l, std::size_t obs, const PseudoDensityMatrix& rho);
double min_eigenvalue(const PseudoDensityMatrix& rho);

struct FullLiouvillian {
    int dim;
    SparseMatrix h_eff;
    std::vector<SparseMatrix> jumps;
    std::vector<SparseMatrix> observables;
    std::vector<std::string> observable_names;
};

// Literal per-site model. Throws CapExceeded above the cap.
FullLiouvillian build_full(const AssembledModel& model);
Matrix full_initial_density(const AssembledModel& model);
Matrix full_space_rhs(const FullLiouvillian& l, const Matrix& rho);

// Pseudo-state of a full-space density matrix including the cavity.
PseudoDensityMatrix project_full(const FullSpaceBasis& basis, const Matrix& rho, int nc);

struct MasterRecord {
    std::vector<std::vector<double>> values;  // [observable][time]
    double min_eigenvalue = 0.0;              // smallest over output times
    double max_trace_drift = 0.0;
    long steps = 0;
};

struct MasterControls {
    double dt_max = 0.0;  // <= 0: 0.25 / model.norm_estimate
    bool track_positivity = false;
};

// Fixed-step RK4 that lands exactly on grid points. Throws SolverFault when
// the trace drifts by more than 1e-6.
MasterRecord integrate_master(const AssembledModel& model, const std::vector<double>& t_grid,
                              const MasterControls& controls = {});
MasterRecord integrate_master(const AssembledModel& model, PseudoDensityMatrix rho0, const std::vector<double>& t_grid,
                              const MasterControls& controls = {});

MasterRecord integrate_full(const AssembledModel& model, const std::vector<double>& t_grid, const MasterControls& controls = {});

} // namespace pstraj::oracle
