#include "pstraj/emitter_space.hpp"

#include <stdexcept>

namespace pstraj {

std::vector<int> EmitterSpace::sector_dims() const
{
    std::vector<int> dims;
    for (const auto& s : sectors_) dims.push_back(s.dim);
    return dims;
}

int EmitterSpace::total_dim() const
{
    int n = 0;
    for (const auto& s : sectors_) n += s.dim;
    return n;
}

BlockOperator EmitterSpace::total_spin_squared() const
{
    if (d_ != 2) throw ModelError("J(J+1) is only defined for two-level emitters");
    BlockOperator out(sector_dims());
    for (int i = 0; i < static_cast<int>(sectors_.size()); ++i) {
        const double j = 0.5 * (sectors_[i].shape[0] - sectors_[i].shape[1]);
        out.add_block(i, i, sparse_identity(sectors_[i].dim), j * (j + 1));
    }
    out.prune();
    return out;
}

SpinSpace::SpinSpace(int n) : EmitterSpace(n, 2), table_(n)
{
    for (const auto& s : table_.sectors()) {
        sectors_.push_back(SectorInfo{"J=" + std::to_string(s.two_j) + "/2", s.dim(), s.degeneracy,
                                      {(n + s.two_j) / 2, (n - s.two_j) / 2}});
    }
}

BlockOperator SpinSpace::collective(const Matrix& x) const
{
    return spin::collective_operator(spin::SingleSiteOperator2LS::from_matrix(x), n_);
}

std::vector<EmitterChannel> SpinSpace::channels(const Matrix& x) const
{
    const auto op = spin::SingleSiteOperator2LS::from_matrix(x);
    std::vector<EmitterChannel> out;
    for (int tau : {-1, 0, 1}) {
        out.push_back(EmitterChannel{"tau=" + std::string(tau < 0 ? "-1" : tau > 0 ? "+1" : "0"),
                                     spin::build_collective_jump(op, table_, tau)});
    }
    out.push_back(EmitterChannel{"trace", spin::build_trace_channel(op, n_)});
    return out;
}

std::pair<int, int> SpinSpace::uniform_state(int species) const
{
    if (species == 1) return {0, 0};
    if (species == 2) return {0, n_};
    throw std::invalid_argument("uniform_state: species must be 1 or 2");
}

YoungSpace::YoungSpace(int n, int d) : EmitterSpace(n, d), basis_(n, d)
{
    const auto& diagrams = basis_.diagrams();
    for (int i = 0; i < static_cast<int>(diagrams.size()); ++i) {
        std::string label = "nu=(";
        for (int r = 0; r < d; ++r) label += (r ? "," : "") + std::to_string(diagrams[i].rows[r]);
        label += ")";
        sectors_.push_back(SectorInfo{label, static_cast<int>(basis_.patterns(i).size()),
                                      young::degeneracy(diagrams[i]), diagrams[i].rows});
    }
}

BlockOperator YoungSpace::collective(const Matrix& x) const { return basis_.collective(x); }

std::vector<EmitterChannel> YoungSpace::channels(const Matrix& x) const
{
    std::vector<EmitterChannel> out;
    for (const auto& ch : basis_.channels()) {
        out.push_back(EmitterChannel{"r" + std::to_string(ch.row_removed) + "a" + std::to_string(ch.row_added),
                                     basis_.build_collective_jump_d(x, ch)});
    }
    return out;
}

std::pair<int, int> YoungSpace::uniform_state(int species) const
{
    if (species < 1 || species > d_) throw std::invalid_argument("uniform_state: species out of range");
    young::GTPattern g;
    g.rows.resize(d_);
    for (int k = 1; k <= d_; ++k) {
        g.rows[k - 1].assign(k, 0);
        if (k >= species) g.rows[k - 1][0] = n_;
    }
    return {0, basis_.index_of(0, g)};
}

std::shared_ptr<const EmitterSpace> make_emitter_space(int n, int d)
{
    if (n < 1) throw ModelError("emitter count must be >= 1");
    if (d == 2) return std::make_shared<SpinSpace>(n);
    if (d < 2 || d > 5) throw ModelError("levels per emitter must be in 2..5");
    return std::make_shared<YoungSpace>(n, d);
}

} // namespace pstraj
