#include "pstraj/block_operator.hpp"

#include <algorithm>
#include <numeric>

namespace pstraj {

SparseMatrix sparse_identity(int n)
{
    SparseMatrix m(n, n);
    m.setIdentity();
    return m;
}

BlockOperator::BlockOperator(std::vector<int> sector_dims)
    : dims_(std::move(sector_dims)), index_(dims_.size(), -1)
{
}

BlockOperator BlockOperator::identity(std::vector<int> sector_dims)
{
    BlockOperator out(std::move(sector_dims));
    for (int s = 0; s < out.sector_count(); ++s) {
        out.add_block(s, s, sparse_identity(out.dims_[s]));
    }
    return out;
}

void BlockOperator::add_block(int from, int to, const SparseMatrix& op, cplx scale)
{
    if (from < 0 || from >= sector_count() || to < 0 || to >= sector_count()) {
        throw std::out_of_range("BlockOperator: sector index out of range");
    }
    if (op.rows() != dims_[to] || op.cols() != dims_[from]) {
        throw std::invalid_argument("BlockOperator: block shape does not match sector dimensions");
    }
    const int pos = index_[from];
    if (pos < 0) {
        index_[from] = static_cast<int>(blocks_.size());
        blocks_.push_back(Block{from, to, scale * op});
        return;
    }
    Block& b = blocks_[pos];
    if (b.to != to) {
        throw std::logic_error("BlockOperator: source sector already maps to a different target");
    }
    b.op = b.op + scale * op;
}

const Block* BlockOperator::block_from(int from) const
{
    if (from < 0 || from >= sector_count()) return nullptr;
    const int pos = index_[from];
    return pos < 0 ? nullptr : &blocks_[pos];
}

bool BlockOperator::is_zero(double tol) const
{
    for (const auto& b : blocks_) {
        for (int k = 0; k < b.op.outerSize(); ++k) {
            for (SparseMatrix::InnerIterator it(b.op, k); it; ++it) {
                if (std::abs(it.value()) > tol) return false;
            }
        }
    }
    return true;
}

bool BlockOperator::is_sector_diagonal() const
{
    return std::all_of(blocks_.begin(), blocks_.end(), [](const Block& b) { return b.from == b.to; });
}

BlockOperator BlockOperator::adjoint() const
{
    BlockOperator out(dims_);
    for (const auto& b : blocks_) {
        out.add_block(b.to, b.from, SparseMatrix(b.op.adjoint()));
    }
    return out;
}

BlockOperator& BlockOperator::operator+=(const BlockOperator& other)
{
    if (dims_.empty()) {
        *this = BlockOperator(other.dims_);
    }
    if (other.dims_ != dims_) {
        throw std::invalid_argument("BlockOperator: sector layouts differ");
    }
    for (const auto& b : other.blocks_) add_block(b.from, b.to, b.op);
    return *this;
}

BlockOperator& BlockOperator::operator*=(cplx scale)
{
    for (auto& b : blocks_) b.op *= scale;
    return *this;
}

void BlockOperator::prune(double tol)
{
    std::vector<Block> kept;
    std::fill(index_.begin(), index_.end(), -1);
    for (auto& b : blocks_) {
        b.op.prune([tol](const Eigen::Index&, const Eigen::Index&, const cplx& v) { return std::abs(v) > tol; });
        if (b.op.nonZeros() == 0) continue;
        index_[b.from] = static_cast<int>(kept.size());
        kept.push_back(std::move(b));
    }
    blocks_ = std::move(kept);
}

double BlockOperator::max_row_sum() const
{
    double best = 0.0;
    for (const auto& b : blocks_) {
        Eigen::VectorXd rows = Eigen::VectorXd::Zero(b.op.rows());
        for (int k = 0; k < b.op.outerSize(); ++k) {
            for (SparseMatrix::InnerIterator it(b.op, k); it; ++it) rows(it.row()) += std::abs(it.value());
        }
        if (rows.size() > 0) best = std::max(best, rows.maxCoeff());
    }
    return best;
}

BlockOperator operator*(const BlockOperator& a, const BlockOperator& b)
{
    if (a.dims_ != b.dims_) throw std::invalid_argument("BlockOperator: sector layouts differ");
    BlockOperator out(a.dims_);
    for (const auto& inner : b.blocks_) {
        const Block* outer = a.block_from(inner.to);
        if (!outer) continue;
        out.add_block(inner.from, outer->to, SparseMatrix(outer->op * inner.op));
    }
    return out;
}

Matrix BlockOperator::to_dense() const
{
    std::vector<int> offset(dims_.size() + 1, 0);
    std::partial_sum(dims_.begin(), dims_.end(), offset.begin() + 1);
    Matrix out = Matrix::Zero(offset.back(), offset.back());
    for (const auto& b : blocks_) {
        out.block(offset[b.to], offset[b.from], dims_[b.to], dims_[b.from]) = Matrix(b.op);
    }
    return out;
}

} // namespace pstraj
