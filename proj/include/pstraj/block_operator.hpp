#pragma once

#include <span>
#include <vector>

#include "pstraj/types.hpp"

namespace pstraj {

// One populated block of a BlockOperator: maps sector `from` to sector `to`.
// `op` has dimensions dim(to) x dim(from).
struct Block {
    int from;
    int to;
    SparseMatrix op;
};

// Sparse linear operator on pseudo-states organised by sector.
//
// Every operator used by the solvers maps each source sector to at most one
// target sector (jump channels shift J by a fixed tau, or a Young diagram by a
// fixed remove/add pair), so blocks are looked up by their source sector.
class BlockOperator {
public:
    BlockOperator() = default;
    explicit BlockOperator(std::vector<int> sector_dims);

    static BlockOperator identity(std::vector<int> sector_dims);

    const std::vector<int>& sector_dims() const { return dims_; }
    int sector_count() const { return static_cast<int>(dims_.size()); }

    // Accumulate scale*op into block (from -> to). Throws std::logic_error when
    // `from` already maps to a different sector.
    void add_block(int from, int to, const SparseMatrix& op, cplx scale = 1.0);

    const Block* block_from(int from) const;
    std::span<const Block> blocks() const { return blocks_; }

    // True when no block holds a nonzero entry.
    bool is_zero(double tol = 0.0) const;
    bool is_sector_diagonal() const;

    BlockOperator adjoint() const;
    BlockOperator& operator+=(const BlockOperator& other);
    BlockOperator& operator*=(cplx scale);

    // Prunes explicit zeros and removes blocks left empty.
    void prune(double tol = 0.0);

    // Max absolute row sum over all blocks (an upper bound for the 2-norm of
    // any block's action).
    double max_row_sum() const;

    friend BlockOperator operator*(const BlockOperator& a, const BlockOperator& b);
    friend BlockOperator operator+(BlockOperator a, const BlockOperator& b) { return a += b; }
    friend BlockOperator operator*(cplx s, BlockOperator a) { return a *= s; }

    // Dense matrix over the direct sum of sectors, in sector order.
    Matrix to_dense() const;

private:
    std::vector<int> dims_;
    std::vector<Block> blocks_;
    std::vector<int> index_;  // source sector -> position in blocks_, or -1
};

SparseMatrix sparse_identity(int n);

} // namespace pstraj
