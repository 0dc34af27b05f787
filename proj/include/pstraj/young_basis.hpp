#pragma once

// d-level generalisation of the collective basis: Young diagrams label the
// sectors, Weyl tableaux (equivalently Gelfand-Tsetlin patterns) label the
// states inside a sector.
//
// Conventions: species are 1..d and map to local single-site index s-1. Rows
// of diagrams and GT patterns are 1-based in the public helpers. A GT pattern
// stores rows[k-1] with k entries for k = 1..d (bottom to top), so
// rows.back() is the diagram.

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "pstraj/block_operator.hpp"

namespace pstraj::young {

struct YoungDiagram {
    std::vector<int> rows;  // exactly d entries, non-increasing, zero padded

    int levels() const { return static_cast<int>(rows.size()); }
    int boxes() const;
    bool valid() const;
    bool operator==(const YoungDiagram&) const = default;
};

struct GTPattern {
    std::vector<std::vector<int>> rows;

    int levels() const { return static_cast<int>(rows.size()); }
    int at(int j, int k) const { return rows[k - 1][j - 1]; }
    int& at(int j, int k) { return rows[k - 1][j - 1]; }
    int row_sum(int k) const;
    YoungDiagram shape() const { return YoungDiagram{rows.back()}; }
    // Interlacing, non-negativity and a non-increasing top row.
    bool valid() const;
    // Population of species s (number of boxes labelled s).
    int population(int s) const;
    // Flattened key, top row first.
    std::vector<int> key() const;
    bool operator==(const GTPattern&) const = default;
};

struct WeylTableau {
    YoungDiagram shape;
    std::vector<std::vector<int>> entries;  // entries[row][col], species labels
};

// Vector tau_k (k = species..d) of row positions receiving the box.
struct ChangePattern {
    int species = 1;
    std::vector<int> tau;  // tau[k - species], 1-based positions

    int top() const { return tau.back(); }
    bool operator==(const ChangePattern&) const = default;
};

struct TransitionChannel {
    int row_removed;  // 1-based row losing a box (nu -> mu)
    int row_added;    // 1-based row gaining a box (mu -> lambda)
    bool operator==(const TransitionChannel&) const = default;
};

struct AllowedTransition {
    GTPattern w_nu;
    GTPattern w_mu;
    GTPattern w_lambda;
    ChangePattern removed;  // G(W_nu) - G(W_mu) = Delta_{s'}(tau')
    ChangePattern added;    // G(W_lambda) - G(W_mu) = Delta_s(tau)
};

struct ChannelTransitions {
    YoungDiagram lambda;
    YoungDiagram mu;
    TransitionChannel channel;
    std::vector<AllowedTransition> transitions;
};

// Partitions of n into at most d parts, lexicographically descending.
std::vector<YoungDiagram> enumerate_diagrams(int n, int d);

// GT patterns with top row nu, in canonical order (lexicographically
// descending, top row first).
std::vector<GTPattern> enumerate_patterns(const YoungDiagram& nu);
std::vector<WeylTableau> enumerate_weyl(const YoungDiagram& nu, int d);

// Number of standard Young tableaux of shape nu (exact; throws
// std::overflow_error when it does not fit in 64 bits).
std::uint64_t standard_count(const YoungDiagram& nu);

// standard_count as a double; falls back to the hook length formula in log
// space when the exact count overflows.
double degeneracy(const YoungDiagram& nu);

// d_mu / d_nu for mu obtained from nu by removing one corner box.
double dimension_ratio(const YoungDiagram& mu, const YoungDiagram& nu);

bool valid_tableau(const WeylTableau& w, int d);
GTPattern weyl_to_gt(const WeylTableau& w, int d);
WeylTableau gt_to_weyl(const GTPattern& g);

// base + Delta (sign = +1) or base - Delta (sign = -1); nullopt when the result
// is not a valid pattern.
std::optional<GTPattern> apply_change(const GTPattern& base, const ChangePattern& change, int sign);

// If a - b equals some Delta_s(tau), return it.
std::optional<ChangePattern> change_between(const GTPattern& a, const GTPattern& b);

// Clebsch-Gordan coefficient <W_mu ; s | W_lambda> with W_mu = W_lambda - Delta_s(tau).
// Throws std::invalid_argument when W_mu is not a valid pattern.
double zeta(const GTPattern& w_lambda, const ChangePattern& change);

// All (W_nu -> W_lambda) pairs with a valid intermediate, grouped by channel.
std::vector<ChannelTransitions> allowed_transitions(const YoungDiagram& nu);

// f_{X,mu}(W_nu, W_lambda). Zero when the transition is not allowed through mu.
cplx matrix_element_f(const Matrix& x, const YoungDiagram& mu, const GTPattern& w_nu, const GTPattern& w_lambda);

// Precomputed basis tables for N emitters with d levels; immutable after
// construction.
class YoungBasis {
public:
    YoungBasis(int n, int d);

    int emitters() const { return n_; }
    int levels() const { return d_; }
    const std::vector<YoungDiagram>& diagrams() const { return diagrams_; }
    const std::vector<GTPattern>& patterns(int sector) const { return patterns_.at(sector); }
    int sector_of(const YoungDiagram& nu) const;
    int index_of(int sector, const GTPattern& w) const;
    std::vector<int> sector_dims() const;

    // Channels in fixed order: row_removed = 1..d, row_added = 1..d.
    std::vector<TransitionChannel> channels() const;

    // L_{X,(nu-mu, lambda-mu)}.
    BlockOperator build_collective_jump_d(const Matrix& x, const TransitionChannel& channel) const;

    // sum_i X_i on every sector.
    BlockOperator collective(const Matrix& x) const;

private:
    struct CGEntry {
        int species;
        int index;  // pattern index inside the larger diagram
        double zeta;
    };
    // For a diagram and a removable row: per pattern of the smaller diagram,
    // the couplings to patterns of the larger one.
    using CGTable = std::vector<std::vector<CGEntry>>;

    const CGTable* cg_table(int sector, int row) const;

    int n_;
    int d_;
    std::vector<YoungDiagram> diagrams_;
    std::vector<std::vector<GTPattern>> patterns_;
    std::vector<std::map<std::vector<int>, int>> index_;
    std::map<std::pair<int, int>, CGTable> cg_;
    std::map<std::pair<int, int>, double> ratio_;  // (sector, row) -> d_mu / d_nu
};

} // namespace pstraj::young
