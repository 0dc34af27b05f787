#include "pstraj/spin_basis.hpp"

#include <cmath>
#include <limits>

namespace pstraj::spin {

namespace {

double binomial(int n, int k)
{
    if (k < 0 || k > n) return 0.0;
    k = std::min(k, n - k);
    double c = 1.0;
    for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
    return std::round(c);
}

constexpr double kInf = std::numeric_limits<double>::infinity();

int kind_index(Kind kind) { return static_cast<int>(kind); }

int kind_sigma(Kind kind)
{
    switch (kind) {
    case Kind::raise: return +1;
    case Kind::lower: return -1;
    case Kind::z: return 0;
    }
    return 0;
}

} // namespace

bool valid_sector(int n, int two_j)
{
    return n >= 1 && two_j >= 0 && two_j <= n && (n - two_j) % 2 == 0;
}

std::vector<SpinSector> enumerate_sectors(int n)
{
    if (n < 1) throw std::invalid_argument("enumerate_sectors: N must be >= 1");
    std::vector<SpinSector> out;
    for (int two_j = n; two_j >= 0; two_j -= 2) {
        const int k = (n - two_j) / 2;
        out.push_back(SpinSector{n, two_j, binomial(n, k) - binomial(n, k - 1)});
    }
    return out;
}

int sector_position(int n, int two_j)
{
    return valid_sector(n, two_j) ? (n - two_j) / 2 : -1;
}

std::vector<int> sector_dims(int n)
{
    std::vector<int> dims;
    for (const auto& s : enumerate_sectors(n)) dims.push_back(s.dim());
    return dims;
}

SingleSiteOperator2LS SingleSiteOperator2LS::from_matrix(const Matrix& x)
{
    if (x.rows() != 2 || x.cols() != 2) {
        throw std::invalid_argument("single-site operator for a two-level emitter must be 2x2");
    }
    SingleSiteOperator2LS out;
    out.plus = x(1, 0);
    out.minus = x(0, 1);
    out.z = 0.5 * (x(1, 1) - x(0, 0));
    out.id = 0.5 * (x(1, 1) + x(0, 0));
    return out;
}

Matrix SingleSiteOperator2LS::to_matrix() const
{
    Matrix x(2, 2);
    x << id - z, minus, plus, id + z;
    return x;
}

PrefactorSet prefactors(int n, int two_j)
{
    const double tj = two_j;
    PrefactorSet p;
    p.e = two_j == 0 ? kInf : (n + 2.0) / (tj * (tj + 2.0));
    p.f = (n + tj + 4.0) / (2.0 * (tj + 2.0) * (tj + 3.0));
    p.g = two_j <= 1 ? kInf : (n - tj + 2.0) / (2.0 * tj * (tj - 1.0));
    return p;
}

double convention_scale(Kind, int)
{
    return 1.0;
}

Coefficient coefficient_f(Kind kind, int n, int two_j, int two_m, int tau)
{
    if (!valid_sector(n, two_j)) throw std::invalid_argument("coefficient_f: J not valid for N");
    if (std::abs(two_m) > two_j || (two_j - two_m) % 2 != 0) {
        throw std::invalid_argument("coefficient_f: M not valid for J");
    }
    if (tau < -1 || tau > 1) throw std::invalid_argument("coefficient_f: tau must be -1, 0 or +1");

    const int sigma = kind_sigma(kind);
    const int target_j = two_j + 2 * tau;
    const int target_m = two_m + 2 * sigma;
    if (!valid_sector(n, target_j) || std::abs(target_m) > target_j) return {sigma, 0.0};

    const long a = (two_j + two_m) / 2;  // J + M
    const long b = (two_j - two_m) / 2;  // J - M

    // Polynomial factor and sign first; the prefactor is only evaluated when
    // the polynomial is nonzero, so its poles are never reached.
    long poly = 0;
    double sign = 1.0;
    double scale = 1.0;
    switch (kind) {
    case Kind::raise:
        if (tau == 0) poly = (a + 1) * b;
        if (tau == -1) { poly = b * (b - 1); sign = -1.0; }
        if (tau == +1) poly = (a + 1) * (a + 2);
        break;
    case Kind::lower:
        if (tau == 0) poly = a * (b + 1);
        if (tau == -1) poly = a * (a - 1);
        if (tau == +1) { poly = (b + 1) * (b + 2); sign = -1.0; }
        break;
    case Kind::z:
        scale = 2.0;
        if (tau == 0) {
            if (two_m == 0) return {sigma, 0.0};
            const double e = (n + 2.0) / (double(two_j) * (two_j + 2.0));
            return {sigma, convention_scale(kind, tau) * std::sqrt(e) * two_m};
        }
        if (tau == -1) { poly = a * b; sign = -1.0; }
        if (tau == +1) { poly = (a + 1) * (b + 1); sign = -1.0; }
        break;
    }
    if (poly == 0) return {sigma, 0.0};

    const double tj = two_j;
    double pref = 0.0;
    if (tau == 0) pref = (n + 2.0) / (tj * (tj + 2.0));                    // E at J
    if (tau == -1) pref = (n + tj + 2.0) / (2.0 * tj * (tj + 1.0));        // F at J-1
    if (tau == +1) pref = (n - tj) / (2.0 * (tj + 2.0) * (tj + 1.0));      // G at J+1
    return {sigma, convention_scale(kind, tau) * sign * scale * std::sqrt(pref * double(poly))};
}

double identity_weight_tau0(int n, int two_j)
{
    return std::sqrt(double(two_j) * (two_j + 2.0) / (n + 2.0));
}

double identity_weight_trace(int n, int two_j)
{
    const double num = double(n) * (n + 2.0) - double(two_j) * (two_j + 2.0);
    return std::sqrt(std::max(0.0, num) / (n + 2.0));
}

CoefficientTable::CoefficientTable(int n) : n_(n), sectors_(enumerate_sectors(n))
{
    for (Kind kind : {Kind::raise, Kind::lower, Kind::z}) {
        for (int tau = -1; tau <= 1; ++tau) {
            auto& per_sector = table_[kind_index(kind)][tau + 1];
            per_sector.resize(sectors_.size());
            for (std::size_t s = 0; s < sectors_.size(); ++s) {
                const auto& sec = sectors_[s];
                auto& vals = per_sector[s];
                vals.resize(sec.dim());
                for (int i = 0; i < sec.dim(); ++i) {
                    vals[i] = coefficient_f(kind, n, sec.two_j, sec.two_m_at(i), tau).value;
                }
            }
        }
    }
}

const std::vector<double>& CoefficientTable::values(Kind kind, int tau, int sector) const
{
    return table_[kind_index(kind)][tau + 1].at(sector);
}

BlockOperator build_collective_jump(const SingleSiteOperator2LS& x, const CoefficientTable& table, int tau)
{
    const int n = table.emitters();
    const auto& sectors = table.sectors();
    BlockOperator out(sector_dims(n));
    for (std::size_t s = 0; s < sectors.size(); ++s) {
        const auto& sec = sectors[s];
        const int target = sector_position(n, sec.two_j + 2 * tau);
        if (target < 0) continue;
        const auto& tsec = sectors[target];

        std::vector<Triplet> trips;
        auto put = [&](Kind kind, cplx c) {
            if (c == cplx{}) return;
            const auto& vals = table.values(kind, tau, static_cast<int>(s));
            const int sigma = kind == Kind::raise ? 1 : (kind == Kind::lower ? -1 : 0);
            for (int i = 0; i < sec.dim(); ++i) {
                if (vals[i] == 0.0) continue;
                const int row = tsec.index_of(sec.two_m_at(i) + 2 * sigma);
                trips.emplace_back(row, i, c * vals[i]);
            }
        };
        put(Kind::raise, x.plus);
        put(Kind::lower, x.minus);
        put(Kind::z, x.z);
        if (tau == 0 && x.id != cplx{}) {
            const double w = identity_weight_tau0(n, sec.two_j);
            for (int i = 0; i < sec.dim() && w != 0.0; ++i) trips.emplace_back(i, i, x.id * w);
        }
        SparseMatrix block(tsec.dim(), sec.dim());
        block.setFromTriplets(trips.begin(), trips.end());
        out.add_block(static_cast<int>(s), target, block);
    }
    return out;
}

BlockOperator build_collective_jump(const SingleSiteOperator2LS& x, int n, int tau)
{
    return build_collective_jump(x, CoefficientTable(n), tau);
}

BlockOperator build_trace_channel(const SingleSiteOperator2LS& x, int n)
{
    const auto sectors = enumerate_sectors(n);
    BlockOperator out(sector_dims(n));
    for (std::size_t s = 0; s < sectors.size(); ++s) {
        const int dim = sectors[s].dim();
        SparseMatrix block = sparse_identity(dim) * (x.id * identity_weight_trace(n, sectors[s].two_j));
        out.add_block(static_cast<int>(s), static_cast<int>(s), block);
    }
    return out;
}

BlockOperator collective_operator(const SingleSiteOperator2LS& x, int n)
{
    const auto sectors = enumerate_sectors(n);
    BlockOperator out(sector_dims(n));
    for (std::size_t s = 0; s < sectors.size(); ++s) {
        const auto& sec = sectors[s];
        std::vector<Triplet> trips;
        for (int i = 0; i < sec.dim(); ++i) {
            const long a = (sec.two_j + sec.two_m_at(i)) / 2;
            const long b = (sec.two_j - sec.two_m_at(i)) / 2;
            const cplx diag = x.z * double(sec.two_m_at(i)) + x.id * double(n);
            if (diag != cplx{}) trips.emplace_back(i, i, diag);
            if (i + 1 < sec.dim() && x.plus != cplx{}) {
                trips.emplace_back(i + 1, i, x.plus * std::sqrt(double(b * (a + 1))));
            }
            if (i > 0 && x.minus != cplx{}) {
                trips.emplace_back(i - 1, i, x.minus * std::sqrt(double(a * (b + 1))));
            }
        }
        SparseMatrix block(sec.dim(), sec.dim());
        block.setFromTriplets(trips.begin(), trips.end());
        out.add_block(static_cast<int>(s), static_cast<int>(s), block);
    }
    return out;
}

} // namespace pstraj::spin
