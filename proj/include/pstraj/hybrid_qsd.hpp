#pragma once

// Hybrid unravelling: individual channels as quantum jumps, the cavity channel
// as complex diffusion, in a frame displaced by the classical amplitude alpha
// so that a small Fock truncation suffices.

#include <cstdint>
#include <vector>

#include "pstraj/trajectory.hpp"

namespace pstraj {

struct HybridControls {
    StepControls step;
    double ceiling = 0.5;      // largest |<a>| tolerated in the displaced frame
    bool continuous = true;    // false: alpha frozen at its initial value
    // dt keeps the per-step diffusion of <a> below ceiling / noise_margin.
    double noise_margin = 6.0;
};

struct DisplacedState {
    TrajectoryState base;
    cplx alpha{};
};

// Operators of the model split for the displaced frame.
struct HybridModel {
    struct Term {
        BlockOperator emitter;
        bool emitter_identity = false;
        double emitter_norm = 1.0;
        CavityExpr cavity;
        CavityExpr drift;  // [a, cavity]
    };
    const AssembledModel* model = nullptr;
    std::vector<Term> terms;
    BlockOperator decay;  // sum over individual channels of L^dag L
    double decay_norm = 0.0;
    bool has_cavity_channel = false;
    CavityExpr channel;   // C
    CavityExpr channel_drift;          // [a, C]
    CavityExpr channel_adjoint_drift;  // [a, C^dag]
    int nc = 1;
};

// Throws ModelError when the model has more than one cavity dissipator.
HybridModel make_hybrid(const AssembledModel& model);

// (g1 + i g2) sqrt(dt / 2).
cplx complex_wiener(Rng& rng, double dt);

// d alpha / dt from the expectation of the Heisenberg equation for a, with the
// cavity operators evaluated at alpha and emitter factors from psi.
cplx displacement_drift(const HybridModel& hm, cplx alpha, int sector, const Matrix& psi);

// RK4 for alpha with psi held fixed.
cplx update_displacement(cplx alpha, const DisplacedState& state, const HybridModel& hm, double dt);

// Folds the residual <a> of the displaced state into alpha and shifts psi by
// the matching unitary on the truncated basis. Returns the residual |<a>|.
double recentre(DisplacedState& state, int nc);

double observable_photon_number(const DisplacedState& state, int nc);
cplx displaced_field(const DisplacedState& state, int nc);

DisplacedState initial_displaced_state(const AssembledModel& model, std::uint64_t seed);

// One step: a single uniform draw decides between an individual jump and a
// deterministic RK4 + Euler-Maruyama diffusion step, followed by recentring in
// continuous mode. StepResult::residual is |<a>| before recentring. Throws
// SolverFault on a zero post-jump vector or when a diffusive step leaves the
// displaced field above the ceiling (a jump recentres without the check).
StepResult step_hybrid(DisplacedState& state, const HybridModel& hm, double dt, const HybridControls& controls);

// Largest step allowed by the displaced generator norm at the current alpha
// and by the diffusion of <a>.
double hybrid_dt_max(const DisplacedState& state, const HybridModel& hm, const HybridControls& controls);

// Observable expectation with cavity factors shifted by alpha.
double displaced_expectation(const Observable& obs, const DisplacedState& state, int nc);

TrajectoryRecord run_hybrid(const AssembledModel& model, const std::vector<double>& t_grid, std::uint64_t seed,
                            const HybridControls& controls);

} // namespace pstraj
