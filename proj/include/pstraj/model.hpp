#pragma once

// Declarative model description and its assembly into collective operators:
//   H = sum_i h_i + sum_a (sum_i x_{i,a}) X_{c,a} + H_c
//   individual dissipators l_a acting identically on every emitter
//   collective dissipators C_a acting on the cavity.

#include <memory>
#include <string>
#include <vector>

#include "pstraj/block_operator.hpp"
#include "pstraj/cavity.hpp"
#include "pstraj/emitter_space.hpp"

namespace pstraj {

struct Coupling {
    Matrix x;           // single-site operator
    CavityExpr cavity;  // X_c
};

struct Dissipator {
    std::string label;
    Matrix op;  // rate folded in: sqrt(Gamma) * operator
};

struct CavityDissipator {
    std::string label;
    CavityExpr op;
};

struct ModelSpec {
    std::string name = "custom";
    int n = 1;
    int d = 2;
    Matrix emitter_h;
    std::vector<Coupling> couplings;
    CavityExpr cavity_h;
    std::vector<Dissipator> individual;
    std::vector<CavityDissipator> collective;
    int cavity_truncation = 20;
    // Initial product state: every emitter in `initial_species` (1-based),
    // cavity in Fock state `initial_photons`.
    int initial_species = 1;
    int initial_photons = 0;
};

// emitter (x) cavity. An identity factor is flagged so it can be skipped.
struct KronTerm {
    BlockOperator emitter;
    bool emitter_identity = false;
    CavityExpr cavity;
    SparseMatrix cavity_matrix;  // cavity on the truncated Fock basis
    bool cavity_identity = false;
};

struct IndividualChannel {
    std::string label;  // "<dissipator>:<channel>"
    BlockOperator op;
};

struct CollectiveChannel {
    std::string label;
    CavityExpr op;
    SparseMatrix matrix;
};

struct Observable {
    std::string name;
    std::vector<KronTerm> terms;  // Hermitian, sector-diagonal
};

struct AssembledModel {
    ModelSpec spec;
    std::shared_ptr<const EmitterSpace> space;
    int nc = 1;
    std::vector<KronTerm> hamiltonian;  // Hermitian part
    std::vector<KronTerm> h_eff;        // hamiltonian - (i/2)(sum L^dag L + sum C^dag C)
    std::vector<IndividualChannel> individual;
    std::vector<CollectiveChannel> collective;
    std::vector<Observable> observables;
    double norm_estimate = 0.0;  // upper bound on ||H_eff||

    int sector_count() const { return space->sector_dims().size(); }
    int sector_dim(int sector) const { return space->sectors()[sector].dim; }
};

KronTerm make_term(BlockOperator emitter, CavityExpr cavity, int nc);

// Builds every operator; zero channels are dropped. Throws ModelError on
// malformed specs.
AssembledModel assemble(const ModelSpec& spec);

// Same spec on another emitter count / truncation (used by scaling runs and
// the U(1) validation).
ModelSpec with_size(ModelSpec spec, int n, int nc);

enum class TruncationPolicy { jump, hybrid };
int default_truncation(int n, TruncationPolicy policy);

// Single-site helpers. Local index 0 is the lower level.
Matrix sigma_plus();
Matrix sigma_minus();
Matrix sigma_z();
Matrix sigma_x();
Matrix sigma_y();
Matrix level_op(int d, int a, int b);  // |a><b|, 1-based

struct DickeParams {
    double omega0 = 0.5;
    double omegac = 1.0;
    double g = 0.9;
    double kappa = 1.0;
    double gamma_down = 0.2;
    double gamma_phi = 0.1;
};
ModelSpec dicke(int n, const DickeParams& p = {}, int nc = -1);

// Rotating frame at the cavity frequency: omegac = 0 and
// omega0 = -(omegac - 2 omega0)/2 = 0.175 for the default detuning.
struct TavisCummingsParams {
    double omega0 = 0.175;
    double omegac = 0.0;
    double g = 0.4;
    double kappa = 0.01;
    double gamma_down = 1e-4;
    double gamma_phi = 0.0075;
};
ModelSpec tavis_cummings(int n, const TavisCummingsParams& p = {}, int nc = -1);

// Rotating frame at the cavity frequency (omegac = 0, omegae = omegae - omegac).
struct ThreeLevelParams {
    double omegae = 1.0;
    double omegac = 0.0;
    cplx rabi = 1.0;
    double g = 0.9;
    double kappa = 0.8;
    double gamma_up = 0.25;
    double gamma_down = 0.25;
};
ModelSpec three_level(int n, const ThreeLevelParams& p = {}, int nc = -1);

} // namespace pstraj
