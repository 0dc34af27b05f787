#pragma once

// Uniform view of the permutation-symmetric emitter basis, backed either by
// the (J, M) spin basis (d = 2) or by Weyl tableaux (any d).

#include <memory>
#include <string>
#include <vector>

#include "pstraj/block_operator.hpp"
#include "pstraj/spin_basis.hpp"
#include "pstraj/young_basis.hpp"

namespace pstraj {

struct SectorInfo {
    std::string label;
    int dim;
    double degeneracy;     // d_J or d_nu
    std::vector<int> shape;  // Young diagram rows (for d = 2: (N/2+J, N/2-J))
};

struct EmitterChannel {
    std::string label;
    BlockOperator op;
};

class EmitterSpace {
public:
    virtual ~EmitterSpace() = default;

    int emitters() const { return n_; }
    int levels() const { return d_; }
    const std::vector<SectorInfo>& sectors() const { return sectors_; }
    std::vector<int> sector_dims() const;
    int total_dim() const;

    // sum_i X_i (sector-diagonal).
    virtual BlockOperator collective(const Matrix& x) const = 0;

    // Effective jump operators L_{X,c}. Channel labels do not depend on X, so
    // sum_i X_i rho Y_i^dag = sum_c L_{X,c} rho L_{Y,c}^dag pairs channels by
    // position.
    virtual std::vector<EmitterChannel> channels(const Matrix& x) const = 0;

    // (sector, index) of the product state with every emitter in `species`
    // (1-based).
    virtual std::pair<int, int> uniform_state(int species) const = 0;

    // Diagonal operator J(J+1) (d = 2 only).
    BlockOperator total_spin_squared() const;

protected:
    EmitterSpace(int n, int d) : n_(n), d_(d) {}
    int n_;
    int d_;
    std::vector<SectorInfo> sectors_;
};

class SpinSpace final : public EmitterSpace {
public:
    explicit SpinSpace(int n);
    BlockOperator collective(const Matrix& x) const override;
    std::vector<EmitterChannel> channels(const Matrix& x) const override;
    std::pair<int, int> uniform_state(int species) const override;

private:
    spin::CoefficientTable table_;
};

class YoungSpace final : public EmitterSpace {
public:
    YoungSpace(int n, int d);
    BlockOperator collective(const Matrix& x) const override;
    std::vector<EmitterChannel> channels(const Matrix& x) const override;
    std::pair<int, int> uniform_state(int species) const override;
    const young::YoungBasis& basis() const { return basis_; }

private:
    young::YoungBasis basis_;
};

// Spin basis for d = 2, Young basis otherwise.
std::shared_ptr<const EmitterSpace> make_emitter_space(int n, int d);

} // namespace pstraj
