#include "pstraj/young_basis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace pstraj::young {

int YoungDiagram::boxes() const
{
    int n = 0;
    for (int r : rows) n += r;
    return n;
}

bool YoungDiagram::valid() const
{
    if (rows.empty()) return false;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i] < 0) return false;
        if (i + 1 < rows.size() && rows[i] < rows[i + 1]) return false;
    }
    return true;
}

int GTPattern::row_sum(int k) const
{
    int s = 0;
    for (int v : rows[k - 1]) s += v;
    return s;
}

bool GTPattern::valid() const
{
    const int d = levels();
    for (int k = 1; k <= d; ++k) {
        if (static_cast<int>(rows[k - 1].size()) != k) return false;
        for (int j = 1; j <= k; ++j) {
            if (at(j, k) < 0) return false;
            if (j < k && at(j, k) < at(j + 1, k)) return false;
        }
        if (k == 1) continue;
        for (int j = 1; j < k; ++j) {
            if (at(j, k - 1) > at(j, k) || at(j, k - 1) < at(j + 1, k)) return false;
        }
    }
    return true;
}

int GTPattern::population(int s) const
{
    return row_sum(s) - (s > 1 ? row_sum(s - 1) : 0);
}

std::vector<int> GTPattern::key() const
{
    std::vector<int> out;
    for (int k = levels(); k >= 1; --k) out.insert(out.end(), rows[k - 1].begin(), rows[k - 1].end());
    return out;
}

std::vector<YoungDiagram> enumerate_diagrams(int n, int d)
{
    if (d < 2) throw std::invalid_argument("enumerate_diagrams: d must be >= 2");
    if (n < 1) throw std::invalid_argument("enumerate_diagrams: N must be >= 1");
    std::vector<YoungDiagram> out;
    std::vector<int> rows(d, 0);
    std::function<void(int, int, int)> rec = [&](int row, int remaining, int cap) {
        if (row == d) {
            if (remaining == 0) out.push_back(YoungDiagram{rows});
            return;
        }
        for (int v = std::min(cap, remaining); v >= 0; --v) {
            if (v * (d - row) < remaining) break;
            rows[row] = v;
            rec(row + 1, remaining - v, v);
        }
        rows[row] = 0;
    };
    rec(0, n, n);
    return out;
}

std::vector<GTPattern> enumerate_patterns(const YoungDiagram& nu)
{
    if (!nu.valid()) throw std::invalid_argument("enumerate_patterns: invalid diagram");
    const int d = nu.levels();
    std::vector<GTPattern> out;
    GTPattern g;
    g.rows.resize(d);
    for (int k = 1; k <= d; ++k) g.rows[k - 1].assign(k, 0);
    g.rows[d - 1] = nu.rows;
    // Fill row k (k < d) entry j, iterating high to low for descending order.
    std::function<void(int, int)> rec = [&](int k, int j) {
        if (k == 0) {
            out.push_back(g);
            return;
        }
        if (j > k) {
            rec(k - 1, 1);
            return;
        }
        for (int v = g.at(j, k + 1); v >= g.at(j + 1, k + 1); --v) {
            g.at(j, k) = v;
            rec(k, j + 1);
        }
    };
    rec(d - 1, 1);
    return out;
}

bool valid_tableau(const WeylTableau& w, int d)
{
    if (!w.shape.valid() || w.shape.levels() > d) return false;
    if (w.entries.size() > w.shape.rows.size()) return false;
    for (std::size_t r = 0; r < w.shape.rows.size(); ++r) {
        const int len = w.shape.rows[r];
        if (len == 0) {
            if (r < w.entries.size() && !w.entries[r].empty()) return false;
            continue;
        }
        if (r >= w.entries.size() || static_cast<int>(w.entries[r].size()) != len) return false;
        for (int c = 0; c < len; ++c) {
            const int v = w.entries[r][c];
            if (v < 1 || v > d) return false;
            if (c > 0 && v < w.entries[r][c - 1]) return false;
            if (r > 0 && v <= w.entries[r - 1][c]) return false;
        }
    }
    return true;
}

GTPattern weyl_to_gt(const WeylTableau& w, int d)
{
    if (!valid_tableau(w, d)) throw std::invalid_argument("weyl_to_gt: invalid tableau");
    GTPattern g;
    g.rows.resize(d);
    for (int k = 1; k <= d; ++k) {
        g.rows[k - 1].assign(k, 0);
        for (int j = 1; j <= k && j <= static_cast<int>(w.entries.size()); ++j) {
            const auto& row = w.entries[j - 1];
            g.at(j, k) = static_cast<int>(std::count_if(row.begin(), row.end(), [k](int v) { return v <= k; }));
        }
    }
    return g;
}

WeylTableau gt_to_weyl(const GTPattern& g)
{
    if (!g.valid()) throw std::invalid_argument("gt_to_weyl: invalid pattern");
    const int d = g.levels();
    WeylTableau w;
    w.shape = g.shape();
    w.entries.resize(d);
    for (int j = 1; j <= d; ++j) {
        for (int k = j; k <= d; ++k) {
            const int prev = (k - 1 >= j) ? g.at(j, k - 1) : 0;
            w.entries[j - 1].insert(w.entries[j - 1].end(), g.at(j, k) - prev, k);
        }
    }
    return w;
}

std::vector<WeylTableau> enumerate_weyl(const YoungDiagram& nu, int d)
{
    YoungDiagram padded = nu;
    if (padded.levels() > d) {
        for (int r = d; r < padded.levels(); ++r)
            if (padded.rows[r] != 0) throw std::invalid_argument("enumerate_weyl: more than d rows");
    }
    padded.rows.resize(d, 0);
    std::vector<WeylTableau> out;
    for (const auto& g : enumerate_patterns(padded)) out.push_back(gt_to_weyl(g));
    return out;
}

namespace {

std::uint64_t standard_count_rec(std::vector<int> rows, std::map<std::vector<int>, std::uint64_t>& memo)
{
    while (!rows.empty() && rows.back() == 0) rows.pop_back();
    if (rows.empty()) return 1;
    if (auto it = memo.find(rows); it != memo.end()) return it->second;
    std::uint64_t total = 0;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const bool corner = (r + 1 == rows.size()) || rows[r] > rows[r + 1];
        if (!corner) continue;
        auto smaller = rows;
        --smaller[r];
        const std::uint64_t part = standard_count_rec(smaller, memo);
        if (__builtin_add_overflow(total, part, &total))
            throw std::overflow_error("standard_count: result exceeds 64 bits");
    }
    memo.emplace(rows, total);
    return total;
}

int column_length(const YoungDiagram& y, int col)
{
    int len = 0;
    for (int r : y.rows)
        if (r >= col) ++len;
    return len;
}

} // namespace

std::uint64_t standard_count(const YoungDiagram& nu)
{
    if (!nu.valid()) throw std::invalid_argument("standard_count: invalid diagram");
    std::map<std::vector<int>, std::uint64_t> memo;
    return standard_count_rec(nu.rows, memo);
}

double degeneracy(const YoungDiagram& nu)
{
    double log_d = std::lgamma(nu.boxes() + 1.0);
    for (int i = 1; i <= nu.levels(); ++i)
        for (int j = 1; j <= nu.rows[i - 1]; ++j) log_d -= std::log(nu.rows[i - 1] - j + column_length(nu, j) - i + 1.0);
    const double approx = std::exp(log_d);
    if (approx < 1e15) return static_cast<double>(standard_count(nu));
    return approx;
}

double dimension_ratio(const YoungDiagram& mu, const YoungDiagram& nu)
{
    if (mu.levels() != nu.levels() || mu.boxes() + 1 != nu.boxes())
        throw std::invalid_argument("dimension_ratio: mu must be nu minus one box");
    int removed = -1;
    for (int r = 0; r < nu.levels(); ++r) {
        const int diff = nu.rows[r] - mu.rows[r];
        if (diff == 1 && removed < 0) removed = r;
        else if (diff != 0) throw std::invalid_argument("dimension_ratio: mu must be nu minus one box");
    }
    // Hooks of nu that shrink by one when the corner (r, c) is removed.
    const int r = removed + 1;
    const int c = nu.rows[removed];
    auto hook = [&](int i, int j) { return nu.rows[i - 1] - j + column_length(nu, j) - i + 1; };
    double ratio = 1.0;
    for (int j = 1; j < c; ++j) {
        const int h = hook(r, j);
        ratio *= static_cast<double>(h) / (h - 1);
    }
    for (int i = 1; i < r; ++i) {
        const int h = hook(i, c);
        ratio *= static_cast<double>(h) / (h - 1);
    }
    return ratio / nu.boxes();
}

std::optional<GTPattern> apply_change(const GTPattern& base, const ChangePattern& change, int sign)
{
    const int d = base.levels();
    if (change.species < 1 || change.species > d) return std::nullopt;
    if (static_cast<int>(change.tau.size()) != d - change.species + 1) return std::nullopt;
    GTPattern out = base;
    for (int k = change.species; k <= d; ++k) {
        const int t = change.tau[k - change.species];
        if (t < 1 || t > k) return std::nullopt;
        out.at(t, k) += sign;
    }
    if (!out.valid()) return std::nullopt;
    return out;
}

std::optional<ChangePattern> change_between(const GTPattern& a, const GTPattern& b)
{
    const int d = a.levels();
    if (b.levels() != d) return std::nullopt;
    ChangePattern change;
    change.species = 0;
    for (int k = 1; k <= d; ++k) {
        int pos = 0;
        for (int j = 1; j <= k; ++j) {
            const int diff = a.at(j, k) - b.at(j, k);
            if (diff == 0) continue;
            if (diff != 1 || pos != 0) return std::nullopt;
            pos = j;
        }
        if (pos == 0) {
            if (change.species != 0) return std::nullopt;
            continue;
        }
        if (change.species == 0) change.species = k;
        change.tau.push_back(pos);
    }
    if (change.species == 0) return std::nullopt;
    return change;
}

double zeta(const GTPattern& w_lambda, const ChangePattern& change)
{
    const auto w_mu = apply_change(w_lambda, change, -1);
    if (!w_mu) throw std::invalid_argument("zeta: intermediate pattern is not valid");
    const int d = w_lambda.levels();
    const int s = change.species;
    auto p = [&](int j, int k) -> long long { return static_cast<long long>(w_mu->at(j, k)) + k - j; };
    auto tau = [&](int k) { return change.tau[k - s]; };

    long long num = 1;
    long long den = 1;
    {
        const int ts = tau(s);
        for (int k = 1; k <= s - 1; ++k) num *= p(ts, s) - p(k, s - 1);
        for (int k = 1; k <= s; ++k)
            if (k != ts) den *= p(ts, s) - p(k, s);
    }
    long double ratio = static_cast<long double>(num) / static_cast<long double>(den);
    double sign = 1.0;
    for (int l = s + 1; l <= d; ++l) {
        const int tl = tau(l);
        const int tp = tau(l - 1);
        if (tp - tl < 0) sign = -sign;
        long long n1 = 1, d1 = 1, n2 = 1, d2 = 1;
        for (int k = 1; k <= l; ++k) {
            if (k == tl) continue;
            n1 *= p(tp, l - 1) - p(k, l) + 1;
            d1 *= p(tl, l) - p(k, l);
        }
        for (int k = 1; k <= l - 1; ++k) {
            if (k == tp) continue;
            n2 *= p(tl, l) - p(k, l - 1);
            d2 *= p(tp, l - 1) - p(k, l - 1) + 1;
        }
        ratio *= static_cast<long double>(n1) / static_cast<long double>(d1);
        ratio *= static_cast<long double>(n2) / static_cast<long double>(d2);
    }
    if (ratio < 0) {
        if (ratio > -1e-15L) ratio = 0;
        else throw std::logic_error("zeta: negative radicand");
    }
    return sign * static_cast<double>(std::sqrt(ratio));
}

namespace {

// All (s, tau) with tau_d == top_row such that base + Delta_s(tau) is valid.
std::vector<std::pair<ChangePattern, GTPattern>> additions(const GTPattern& base, int top_row)
{
    const int d = base.levels();
    std::vector<std::pair<ChangePattern, GTPattern>> out;
    for (int s = 1; s <= d; ++s) {
        ChangePattern ch;
        ch.species = s;
        ch.tau.assign(d - s + 1, 1);
        std::function<void(int)> rec = [&](int k) {
            if (k == d) {
                ch.tau[d - s] = top_row;
                if (auto g = apply_change(base, ch, +1)) out.emplace_back(ch, *g);
                return;
            }
            for (int t = 1; t <= k; ++t) {
                ch.tau[k - s] = t;
                rec(k + 1);
            }
        };
        rec(s);
    }
    return out;
}

bool removable(const YoungDiagram& y, int r)
{
    const int i = r - 1;
    if (y.rows[i] == 0) return false;
    return i + 1 == y.levels() || y.rows[i] > y.rows[i + 1];
}

bool addable(const YoungDiagram& y, int a)
{
    const int i = a - 1;
    return i == 0 || y.rows[i - 1] > y.rows[i];
}

} // namespace

std::vector<ChannelTransitions> allowed_transitions(const YoungDiagram& nu)
{
    const int d = nu.levels();
    std::vector<ChannelTransitions> out;
    for (int r = 1; r <= d; ++r) {
        if (!removable(nu, r)) continue;
        YoungDiagram mu = nu;
        --mu.rows[r - 1];
        const auto mu_patterns = enumerate_patterns(mu);
        for (int a = 1; a <= d; ++a) {
            if (!addable(mu, a)) continue;
            YoungDiagram lambda = mu;
            ++lambda.rows[a - 1];
            ChannelTransitions ct{lambda, mu, TransitionChannel{r, a}, {}};
            for (const auto& wm : mu_patterns) {
                const auto from = additions(wm, r);
                const auto to = additions(wm, a);
                for (const auto& [cn, wn] : from)
                    for (const auto& [cl, wl] : to)
                        ct.transitions.push_back(AllowedTransition{wn, wm, wl, cn, cl});
            }
            out.push_back(std::move(ct));
        }
    }
    return out;
}

cplx matrix_element_f(const Matrix& x, const YoungDiagram& mu, const GTPattern& w_nu, const GTPattern& w_lambda)
{
    const int d = w_nu.levels();
    if (x.rows() != d || x.cols() != d) throw std::invalid_argument("matrix_element_f: operator size must be d");
    if (mu.levels() != d || mu.boxes() + 1 != w_nu.shape().boxes()) return 0.0;
    const YoungDiagram nu = w_nu.shape();
    {
        const auto diff_nu = nu.rows;
        int extra = 0;
        for (int i = 0; i < d; ++i) {
            const int diff = diff_nu[i] - mu.rows[i];
            if (diff < 0 || diff > 1) return 0.0;
            extra += diff;
        }
        if (extra != 1) return 0.0;
    }
    cplx sum = 0.0;
    for (const auto& wm : enumerate_patterns(mu)) {
        const auto cn = change_between(w_nu, wm);
        const auto cl = change_between(w_lambda, wm);
        if (!cn || !cl) continue;
        sum += zeta(w_lambda, *cl) * zeta(w_nu, *cn) * x(cl->species - 1, cn->species - 1);
    }
    return std::sqrt(nu.boxes() * dimension_ratio(mu, nu)) * sum;
}

YoungBasis::YoungBasis(int n, int d) : n_(n), d_(d)
{
    diagrams_ = enumerate_diagrams(n, d);
    for (const auto& nu : diagrams_) {
        patterns_.push_back(enumerate_patterns(nu));
        std::map<std::vector<int>, int> idx;
        for (int i = 0; i < static_cast<int>(patterns_.back().size()); ++i) idx.emplace(patterns_.back()[i].key(), i);
        index_.push_back(std::move(idx));
    }

    // Clebsch-Gordan tables, one per (diagram, removable row). zeta is
    // memoised on (W_mu, s, tau) since many tables share intermediates.
    std::map<std::pair<std::vector<int>, std::vector<int>>, double> memo;
    for (int sec = 0; sec < static_cast<int>(diagrams_.size()); ++sec) {
        const auto& nu = diagrams_[sec];
        for (int r = 1; r <= d_; ++r) {
            if (!removable(nu, r)) continue;
            YoungDiagram mu = nu;
            --mu.rows[r - 1];
            const auto mu_patterns = enumerate_patterns(mu);
            CGTable table(mu_patterns.size());
            for (std::size_t im = 0; im < mu_patterns.size(); ++im) {
                for (const auto& [ch, wn] : additions(mu_patterns[im], r)) {
                    std::vector<int> tag{ch.species};
                    tag.insert(tag.end(), ch.tau.begin(), ch.tau.end());
                    auto key = std::make_pair(mu_patterns[im].key(), std::move(tag));
                    auto it = memo.find(key);
                    if (it == memo.end()) it = memo.emplace(std::move(key), zeta(wn, ch)).first;
                    table[im].push_back(CGEntry{ch.species, index_of(sec, wn), it->second});
                }
            }
            cg_.emplace(std::make_pair(sec, r), std::move(table));
            ratio_.emplace(std::make_pair(sec, r), dimension_ratio(mu, nu));
        }
    }
}

int YoungBasis::sector_of(const YoungDiagram& nu) const
{
    for (int i = 0; i < static_cast<int>(diagrams_.size()); ++i)
        if (diagrams_[i] == nu) return i;
    return -1;
}

int YoungBasis::index_of(int sector, const GTPattern& w) const
{
    const auto& idx = index_.at(sector);
    auto it = idx.find(w.key());
    return it == idx.end() ? -1 : it->second;
}

std::vector<int> YoungBasis::sector_dims() const
{
    std::vector<int> dims;
    for (const auto& p : patterns_) dims.push_back(static_cast<int>(p.size()));
    return dims;
}

std::vector<TransitionChannel> YoungBasis::channels() const
{
    std::vector<TransitionChannel> out;
    for (int r = 1; r <= d_; ++r)
        for (int a = 1; a <= d_; ++a) out.push_back(TransitionChannel{r, a});
    return out;
}

const YoungBasis::CGTable* YoungBasis::cg_table(int sector, int row) const
{
    auto it = cg_.find({sector, row});
    return it == cg_.end() ? nullptr : &it->second;
}

BlockOperator YoungBasis::build_collective_jump_d(const Matrix& x, const TransitionChannel& channel) const
{
    if (x.rows() != d_ || x.cols() != d_) throw std::invalid_argument("build_collective_jump_d: operator size must be d");
    const auto r = channel.row_removed;
    const auto a = channel.row_added;
    if (r < 1 || r > d_ || a < 1 || a > d_) throw std::invalid_argument("build_collective_jump_d: invalid channel");
    BlockOperator out(sector_dims());
    for (int sec = 0; sec < static_cast<int>(diagrams_.size()); ++sec) {
        const CGTable* from = cg_table(sec, r);
        if (!from) continue;
        YoungDiagram lambda = diagrams_[sec];
        --lambda.rows[r - 1];
        ++lambda.rows[a - 1];
        if (!lambda.valid()) continue;
        const int target = sector_of(lambda);
        if (target < 0) continue;
        const CGTable* to = cg_table(target, a);
        if (!to) continue;
        const double pref = std::sqrt(n_ * ratio_.at({sec, r}));
        std::vector<Triplet> trips;
        for (std::size_t im = 0; im < from->size(); ++im) {
            for (const auto& en : (*from)[im]) {
                for (const auto& el : (*to)[im]) {
                    const cplx xv = x(el.species - 1, en.species - 1);
                    if (xv == cplx{}) continue;
                    trips.emplace_back(el.index, en.index, pref * en.zeta * el.zeta * xv);
                }
            }
        }
        if (trips.empty()) continue;
        SparseMatrix op(static_cast<int>(patterns_[target].size()), static_cast<int>(patterns_[sec].size()));
        op.setFromTriplets(trips.begin(), trips.end());
        out.add_block(sec, target, op);
    }
    out.prune(1e-14);
    return out;
}

BlockOperator YoungBasis::collective(const Matrix& x) const
{
    BlockOperator out(sector_dims());
    for (int r = 1; r <= d_; ++r) {
        BlockOperator ch = build_collective_jump_d(x, TransitionChannel{r, r});
        // Rescale by the identity's weight on this channel, sqrt(N d_mu/d_nu).
        for (const auto& b : ch.blocks()) {
            if (b.from != b.to) continue;
            out.add_block(b.from, b.to, b.op, std::sqrt(n_ * ratio_.at({b.from, r})));
        }
    }
    out.prune(1e-14);
    return out;
}

} // namespace pstraj::young
