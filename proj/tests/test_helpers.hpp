#pragma once

#include <cmath>
#include <numeric>
#include <vector>

#include "pstraj/model.hpp"

namespace testing_helpers {

using namespace pstraj;

inline Matrix dense_kron(const Matrix& a, const Matrix& b)
{
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline Matrix dense_term(const KronTerm& t, int pseudo_dim)
{
    const Matrix e = t.emitter_identity ? Matrix(Matrix::Identity(pseudo_dim, pseudo_dim)) : t.emitter.to_dense();
    return dense_kron(e, Matrix(t.cavity_matrix));
}

inline Matrix dense_sum(const std::vector<KronTerm>& terms, const AssembledModel& m)
{
    const int pd = m.space->total_dim();
    Matrix out = Matrix::Zero(pd * m.nc, pd * m.nc);
    for (const auto& t : terms) out += dense_term(t, pd);
    return out;
}

inline std::vector<double> grid(double t_end, int points)
{
    std::vector<double> g(points);
    for (int i = 0; i < points; ++i) g[i] = t_end * i / (points - 1);
    return g;
}

struct Stats {
    std::vector<double> mean;
    std::vector<double> stderr_;
};

inline Stats stats(const std::vector<std::vector<double>>& samples)
{
    const std::size_t n = samples.size();
    const std::size_t t = samples.front().size();
    Stats s{std::vector<double>(t, 0.0), std::vector<double>(t, 0.0)};
    for (std::size_t j = 0; j < t; ++j) {
        double m = 0;
        for (const auto& x : samples) m += x[j];
        m /= n;
        double v = 0;
        for (const auto& x : samples) v += (x[j] - m) * (x[j] - m);
        s.mean[j] = m;
        s.stderr_[j] = n > 1 ? std::sqrt(v / (n - 1) / n) : 0.0;
    }
    return s;
}

} // namespace testing_helpers
