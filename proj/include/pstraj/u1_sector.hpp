#pragma once

// Excitation-number-conserving solver for two-level models whose effective
// Hamiltonian commutes with K = n_c + M + N/2. Between jumps the state lives
// in a (J, K) block where the photon number is fixed by M, so no cavity
// truncation is needed.

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "pstraj/trajectory.hpp"

namespace pstraj {

struct U1Descriptor {
    std::vector<int> delta_k;  // per channel: individual channels, then collective
    double commutator_norm = 0.0;
};

// Throws ModelError("model lacks weak U(1) symmetry ...") when [H_eff, K] != 0
// on a small instance or a channel has no definite excitation change.
U1Descriptor validate_u1(const AssembledModel& model);

struct ExcitationSector {
    int sector = 0;  // spin sector position
    int two_j = 0;
    int k = 0;
    int offset = 0;  // emitter excitations at M = -J, i.e. N/2 - J
    int dim = 0;     // basis: M index 0..dim-1, photons k - offset - index

    int photons(int index) const { return k - offset - index; }
};

ExcitationSector make_excitation_sector(int n, int sector, int k);

// Operators restricted to one (J, K) block, built on first use.
class U1Cache {
public:
    struct Entry {
        ExcitationSector basis;
        SparseMatrix h_eff;
        std::vector<SparseMatrix> observables;
    };

    U1Cache(const AssembledModel& model, U1Descriptor descriptor);
    const Entry& get(int sector, int k);
    ExcitationSector basis(int sector, int k) const;
    int two_j(int sector) const { return two_j_.at(sector); }
    const AssembledModel& model() const { return *model_; }
    const U1Descriptor& descriptor() const { return descriptor_; }
    std::size_t size() const { return entries_.size(); }

private:
    SparseMatrix restrict(const std::vector<KronTerm>& terms, const ExcitationSector& basis) const;
    const AssembledModel* model_;
    U1Descriptor descriptor_;
    std::vector<int> two_j_;
    std::map<std::pair<int, int>, Entry> entries_;
};

struct U1State {
    int sector = 0;
    int k = 0;
    Matrix psi;  // one column over the block basis
};

U1State initial_u1_state(const AssembledModel& model);

// L psi for one channel; `sector` and `k` receive the target block.
Matrix apply_u1_channel(U1Cache& cache, const U1State& state, int channel, int& sector, int& k);

// Same stepping rules and random-number consumption as run_trajectory, so
// matched seeds give matched trajectories.
TrajectoryRecord run_u1(const AssembledModel& model, const U1Descriptor& descriptor, const std::vector<double>& t_grid,
                        std::uint64_t seed, const StepControls& controls);

// K and K^2 as observables on the truncated generic model.
std::vector<Observable> excitation_observables(const AssembledModel& model);

} // namespace pstraj
