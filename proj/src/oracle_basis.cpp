#include "pstraj/oracle_basis.hpp"

#include <cmath>
#include <map>
#include <random>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace pstraj::oracle {

namespace {

int ipow(int b, int e)
{
    int v = 1;
    for (int i = 0; i < e; ++i) v *= b;
    return v;
}

Matrix unit(int d, int a, int b)
{
    Matrix m = Matrix::Zero(d, d);
    m(a, b) = 1.0;
    return m;
}

double casimir_value(const young::GTPattern& g, int k)
{
    double v = 0.0;
    for (int j = 1; j <= k; ++j) v += g.at(j, k) * (g.at(j, k) + k + 1.0 - 2.0 * j);
    return v;
}

} // namespace

Matrix site_operator(const Matrix& x, int site, int n)
{
    const int d = static_cast<int>(x.rows());
    const int left = ipow(d, site);
    const int right = ipow(d, n - site - 1);
    Matrix out = Matrix::Zero(left * d * right, left * d * right);
    for (int l = 0; l < left; ++l)
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b)
                for (int r = 0; r < right; ++r)
                    out((l * d + a) * right + r, (l * d + b) * right + r) = x(a, b);
    return out;
}

Matrix collective_full(const Matrix& x, int n)
{
    const int d = static_cast<int>(x.rows());
    Matrix out = Matrix::Zero(ipow(d, n), ipow(d, n));
    for (int i = 0; i < n; ++i) out += site_operator(x, i, n);
    return out;
}

FullSpaceBasis::FullSpaceBasis(const EmitterSpace& space)
    : n_(space.emitters()), d_(space.levels()), full_dim_(ipow(space.levels(), space.emitters()))
{
    if (full_dim_ > 4096) throw std::invalid_argument("FullSpaceBasis: d^N exceeds 4096");

    std::vector<std::vector<Matrix>> e(d_, std::vector<Matrix>(d_));
    for (int a = 0; a < d_; ++a)
        for (int b = 0; b < d_; ++b) e[a][b] = collective_full(unit(d_, a, b), n_);

    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> uni(0.5, 1.5);
    std::vector<double> weights(d_ + 1);
    for (auto& w : weights) w = uni(rng);
    Matrix mix = Matrix::Zero(full_dim_, full_dim_);
    for (int k = 2; k <= d_; ++k) {
        Matrix c = Matrix::Zero(full_dim_, full_dim_);
        for (int a = 0; a < k; ++a)
            for (int b = 0; b < k; ++b) c += e[a][b] * e[b][a];
        mix += weights[k] * c;
    }

    // Group computational states by species counts; each group is an
    // invariant subspace of the Casimirs.
    std::map<std::vector<int>, std::vector<int>> weight_blocks;
    for (int idx = 0; idx < full_dim_; ++idx) {
        std::vector<int> counts(d_, 0);
        int v = idx;
        for (int i = 0; i < n_; ++i) {
            ++counts[v % d_];
            v /= d_;
        }
        weight_blocks[counts].push_back(idx);
    }

    struct Eigenspace {
        Matrix vecs;
        bool used = false;
    };
    // (counts) -> list of (eigenvalue, vectors)
    std::map<std::vector<int>, std::vector<std::pair<double, Eigenspace>>> spaces;
    for (const auto& [counts, members] : weight_blocks) {
        const int m = static_cast<int>(members.size());
        Matrix sub(m, m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) sub(i, j) = mix(members[i], members[j]);
        Eigen::SelfAdjointEigenSolver<Matrix> es(sub);
        auto& list = spaces[counts];
        for (int i = 0; i < m; ++i) {
            Vector full = Vector::Zero(full_dim_);
            for (int r = 0; r < m; ++r) full(members[r]) = es.eigenvectors()(r, i);
            const double ev = es.eigenvalues()(i);
            if (!list.empty() && std::abs(list.back().first - ev) < 1e-8) {
                auto& vecs = list.back().second.vecs;
                vecs.conservativeResize(Eigen::NoChange, vecs.cols() + 1);
                vecs.col(vecs.cols() - 1) = full;
            } else {
                list.push_back({ev, Eigenspace{full, false}});
            }
        }
    }

    auto eigenspace_for = [&](const young::GTPattern& g) -> Eigenspace& {
        std::vector<int> counts(d_);
        for (int s = 1; s <= d_; ++s) counts[s - 1] = g.population(s);
        double ev = 0.0;
        for (int k = 2; k <= d_; ++k) ev += weights[k] * casimir_value(g, k);
        auto it = spaces.find(counts);
        if (it == spaces.end()) throw std::logic_error("FullSpaceBasis: missing weight block");
        for (auto& [val, space] : it->second) {
            if (std::abs(val - ev) < 1e-7) {
                if (space.used) throw std::logic_error("FullSpaceBasis: Casimir signatures collide");
                space.used = true;
                return space;
            }
        }
        throw std::logic_error("FullSpaceBasis: no eigenspace for pattern");
    };

    const auto& sectors = space.sectors();
    for (int sec = 0; sec < static_cast<int>(sectors.size()); ++sec) {
        young::YoungDiagram nu{sectors[sec].shape};
        const auto patterns = young::enumerate_patterns(nu);
        const int deg = static_cast<int>(std::llround(young::degeneracy(nu)));
        std::vector<Matrix> vecs(patterns.size());
        std::vector<Matrix> projectors(patterns.size());
        for (std::size_t w = 0; w < patterns.size(); ++w) {
            const Matrix& v = eigenspace_for(patterns[w]).vecs;
            if (v.cols() != deg) throw std::logic_error("FullSpaceBasis: eigenspace dimension mismatch");
            projectors[w] = v * v.adjoint();
            if (w == 0) vecs[0] = v;
        }
        for (std::size_t w = 1; w < patterns.size(); ++w) {
            bool built = false;
            for (int k = 1; k < d_ && !built; ++k) {
                for (int j = 1; j <= k && !built; ++j) {
                    young::GTPattern parent = patterns[w];
                    ++parent.at(j, k);
                    if (!parent.valid()) continue;
                    std::size_t pw = 0;
                    while (pw < w && !(patterns[pw] == parent)) ++pw;
                    if (pw == w) continue;
                    Matrix cand = projectors[w] * e[k][k - 1] * vecs[pw];
                    const double norm = cand.col(0).norm();
                    if (norm < 1e-10) continue;
                    vecs[w] = cand / norm;
                    built = true;
                }
            }
            if (!built) throw std::logic_error("FullSpaceBasis: could not reach pattern");
        }
        offsets_.push_back(pseudo_dim_);
        pseudo_dim_ += static_cast<int>(patterns.size());
        degeneracy_.push_back(deg);
        vectors_.push_back(std::move(vecs));
    }
}

Matrix FullSpaceBasis::transition(int sector, int w, int w2) const
{
    return vectors(sector, w) * vectors(sector, w2).adjoint();
}

Matrix FullSpaceBasis::project(const Matrix& full) const
{
    Matrix out = Matrix::Zero(pseudo_dim_, pseudo_dim_);
    for (int sec = 0; sec < static_cast<int>(vectors_.size()); ++sec) {
        const int dim = static_cast<int>(vectors_[sec].size());
        for (int w = 0; w < dim; ++w)
            for (int w2 = 0; w2 < dim; ++w2)
                out(offsets_[sec] + w, offsets_[sec] + w2) =
                    (vectors(sec, w).adjoint() * full * vectors(sec, w2)).trace();
    }
    return out;
}

Matrix FullSpaceBasis::lift(const Matrix& pseudo) const
{
    Matrix out = Matrix::Zero(full_dim_, full_dim_);
    for (int sec = 0; sec < static_cast<int>(vectors_.size()); ++sec) {
        const int dim = static_cast<int>(vectors_[sec].size());
        for (int w = 0; w < dim; ++w)
            for (int w2 = 0; w2 < dim; ++w2) {
                const cplx c = pseudo(offsets_[sec] + w, offsets_[sec] + w2);
                if (c != cplx{}) out += (c / static_cast<double>(degeneracy_[sec])) * transition(sec, w, w2);
            }
    }
    return out;
}

Matrix FullSpaceBasis::project_checked(const Matrix& full, double tol) const
{
    Matrix pseudo = project(full);
    if ((lift(pseudo) - full).cwiseAbs().maxCoeff() > tol)
        throw std::runtime_error("project_checked: operator is not permutation symmetric");
    return pseudo;
}

double channel_completeness_error(const EmitterSpace& space, const FullSpaceBasis& basis, const Matrix& x,
                                  const Matrix& y)
{
    const int n = space.emitters();
    std::vector<Matrix> xs(n);
    std::vector<Matrix> ys(n);
    for (int i = 0; i < n; ++i) {
        xs[i] = site_operator(x, i, n);
        ys[i] = site_operator(y, i, n).adjoint();
    }
    const auto lx = space.channels(x);
    const auto ly = space.channels(y);
    std::vector<Matrix> dx;
    std::vector<Matrix> dy;
    for (std::size_t c = 0; c < lx.size(); ++c) {
        dx.push_back(lx[c].op.to_dense());
        dy.push_back(ly[c].op.to_dense().adjoint());
    }
    double err = 0.0;
    const auto& sectors = space.sectors();
    for (int sec = 0; sec < static_cast<int>(sectors.size()); ++sec) {
        for (int a = 0; a < sectors[sec].dim; ++a) {
            for (int b = 0; b < sectors[sec].dim; ++b) {
                Matrix e = Matrix::Zero(basis.pseudo_dim(), basis.pseudo_dim());
                e(basis.offset(sec) + a, basis.offset(sec) + b) = 1.0;
                const Matrix full = basis.lift(e);
                Matrix acted = Matrix::Zero(basis.full_dim(), basis.full_dim());
                for (int i = 0; i < n; ++i) acted += xs[i] * full * ys[i];
                const Matrix expected = basis.project(acted);
                Matrix got = Matrix::Zero(basis.pseudo_dim(), basis.pseudo_dim());
                for (std::size_t c = 0; c < dx.size(); ++c) got += dx[c] * e * dy[c];
                err = std::max(err, (expected - got).cwiseAbs().maxCoeff());
            }
        }
    }
    return err;
}

double trace_preservation_error(const EmitterSpace& space, const FullSpaceBasis& basis, const Matrix& x)
{
    const int n = space.emitters();
    Matrix full = Matrix::Zero(basis.full_dim(), basis.full_dim());
    for (int i = 0; i < n; ++i) {
        const Matrix xi = site_operator(x, i, n);
        full += xi.adjoint() * xi;
    }
    Matrix expected = Matrix::Zero(basis.pseudo_dim(), basis.pseudo_dim());
    const auto& sectors = space.sectors();
    for (int sec = 0; sec < static_cast<int>(sectors.size()); ++sec)
        for (int a = 0; a < sectors[sec].dim; ++a)
            for (int b = 0; b < sectors[sec].dim; ++b)
                expected(basis.offset(sec) + a, basis.offset(sec) + b) =
                    (basis.vectors(sec, a).col(0).adjoint() * full * basis.vectors(sec, b).col(0))(0, 0);
    Matrix got = Matrix::Zero(basis.pseudo_dim(), basis.pseudo_dim());
    for (const auto& ch : space.channels(x)) {
        const Matrix l = ch.op.to_dense();
        got += l.adjoint() * l;
    }
    return (expected - got).cwiseAbs().maxCoeff();
}

} // namespace pstraj::oracle
