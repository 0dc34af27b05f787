#pragma once

// Brute-force d^N Hilbert space and its decomposition into the collective
// basis |T, W_nu>. The basis vectors are built from Casimir eigenspaces and
// lowering operators only, so they are independent of the closed-form
// coupling coefficients they are used to check.

#include <vector>

#include "pstraj/emitter_space.hpp"

namespace pstraj::oracle {

// Dense X acting on `site` of n sites (site 0 is the most significant digit).
Matrix site_operator(const Matrix& x, int site, int n);
// sum_i X_i.
Matrix collective_full(const Matrix& x, int n);

class FullSpaceBasis {
public:
    explicit FullSpaceBasis(const EmitterSpace& space);

    int full_dim() const { return full_dim_; }
    int pseudo_dim() const { return pseudo_dim_; }
    int offset(int sector) const { return offsets_.at(sector); }
    int sector_count() const { return static_cast<int>(offsets_.size()); }
    int sector_dim(int sector) const { return static_cast<int>(vectors_.at(sector).size()); }

    // Columns are |T, W> for T = 1..d_nu.
    const Matrix& vectors(int sector, int w) const { return vectors_.at(sector).at(w); }

    // sum_T |T,W><T,W'|.
    Matrix transition(int sector, int w, int w2) const;

    // rho_tilde(W, W') = Tr[B_{W W'}^dag S], block-diagonal over sectors, as a
    // dense pseudo_dim x pseudo_dim matrix.
    Matrix project(const Matrix& full) const;
    // sum rho_tilde(W, W') B_{W W'} / d_nu.
    Matrix lift(const Matrix& pseudo) const;

    // Pseudo-state of a permutation-symmetric full-space operator, checking
    // that nothing is lost (throws std::runtime_error otherwise).
    Matrix project_checked(const Matrix& full, double tol = 1e-9) const;

private:
    int n_;
    int d_;
    int full_dim_;
    int pseudo_dim_ = 0;
    std::vector<int> offsets_;
    std::vector<int> degeneracy_;
    std::vector<std::vector<Matrix>> vectors_;
};

// max |project(sum_i X_i lift(e) Y_i^dag) - sum_c L_{X,c} e L_{Y,c}^dag| over
// pseudo-state basis elements e = |W><W'| of every sector.
double channel_completeness_error(const EmitterSpace& space, const FullSpaceBasis& basis, const Matrix& x,
                                  const Matrix& y);

// max |<W| sum_c L_{X,c}^dag L_{X,c} |W'> - <W| sum_i X_i^dag X_i |W'>_oracle|.
double trace_preservation_error(const EmitterSpace& space, const FullSpaceBasis& basis, const Matrix& x);

} // namespace pstraj::oracle
