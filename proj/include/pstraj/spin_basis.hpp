#pragma once

// Collective (J, M) basis for N two-level emitters and the effective jump
// operators that reproduce sum_i X_i rho Y_i^dagger on permutation-symmetric
// pseudo-states.
//
// Half-integers are stored doubled: two_j = 2J, two_m = 2M. Within a sector
// the basis index is (two_m + two_j) / 2, i.e. M ascending from -J. Local
// single-site index 0 is the lower level (down), 1 the upper level (up), and
// sigma^z has eigenvalues -1, +1 on them.

#include <array>
#include <vector>

#include "pstraj/block_operator.hpp"

namespace pstraj::spin {

struct SpinSector {
    int n;              // emitter count
    int two_j;          // 2J
    double degeneracy;  // d_J; exact for n <= 50
    int dim() const { return two_j + 1; }
    int index_of(int two_m) const { return (two_m + two_j) / 2; }
    int two_m_at(int index) const { return 2 * index - two_j; }
};

// Sectors ordered by descending J.
std::vector<SpinSector> enumerate_sectors(int n);

// Position of `two_j` in enumerate_sectors(n), or -1.
int sector_position(int n, int two_j);

bool valid_sector(int n, int two_j);

// Expansion c_plus sigma^+ + c_minus sigma^- + c_z sigma^z + c_id 1.
struct SingleSiteOperator2LS {
    cplx plus{};
    cplx minus{};
    cplx z{};
    cplx id{};

    static SingleSiteOperator2LS from_matrix(const Matrix& x);
    Matrix to_matrix() const;
    bool traceless() const { return id == cplx{}; }
};

enum class Kind { raise, lower, z };

// J- and N-dependent prefactors. A value is +infinity where its denominator
// vanishes (E at J=0, G at J=0 or J=1/2).
struct PrefactorSet {
    double e;
    double f;
    double g;
};
PrefactorSet prefactors(int n, int two_j);

struct Coefficient {
    int sigma;     // M shift fixed by kind: raise +1, lower -1, z 0
    double value;  // zero when the target (J+tau, M+sigma) does not exist
};

// Matrix element f_kind(N, J, M, tau, sigma) of the effective jump operator
// for tau in {-1, 0, +1}. The tau = -1 and tau = +1 prefactors are evaluated at
// the target spin J + tau. Throws std::invalid_argument for |M| > J or J not
// valid for N.
Coefficient coefficient_f(Kind kind, int n, int two_j, int two_m, int tau);

// Per-(kind, tau) rescaling applied on top of coefficient_f; pinned to 1 by the
// full-Hilbert-space oracle tests.
double convention_scale(Kind kind, int tau);

// Weight of the identity on the tau = 0 channel (1/sqrt(E_J)) and on the
// identity-only "trace" channel (sqrt(N - 1/E_J)). Their squares sum to N.
double identity_weight_tau0(int n, int two_j);
double identity_weight_trace(int n, int two_j);

// Dense per-sector diagonals of coefficient_f for one (N, kind, tau):
// values[sector][M index].
class CoefficientTable {
public:
    explicit CoefficientTable(int n);
    int emitters() const { return n_; }
    const std::vector<SpinSector>& sectors() const { return sectors_; }
    const std::vector<double>& values(Kind kind, int tau, int sector) const;

private:
    int n_;
    std::vector<SpinSector> sectors_;
    // [kind][tau + 1][sector][m index]
    std::array<std::array<std::vector<std::vector<double>>, 3>, 3> table_;
};

std::vector<int> sector_dims(int n);

// L_{X,tau}: maps sector J to J + tau. Blocks exist only where the target
// sector exists; an all-empty operator is returned when none does.
BlockOperator build_collective_jump(const SingleSiteOperator2LS& x, const CoefficientTable& table, int tau);
BlockOperator build_collective_jump(const SingleSiteOperator2LS& x, int n, int tau);

// Identity-only channel, c_id * sqrt(N - 1/E_J) on every sector. Together
// with tau in {-1,0,+1} this completes the channel set for operators with a
// nonzero trace.
BlockOperator build_trace_channel(const SingleSiteOperator2LS& x, int n);

// sum_i X_i expressed with the standard collective spin matrix elements.
BlockOperator collective_operator(const SingleSiteOperator2LS& x, int n);

} // namespace pstraj::spin
