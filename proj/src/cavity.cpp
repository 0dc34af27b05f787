#include "pstraj/cavity.hpp"

#include <cmath>
#include <sstream>

namespace pstraj {

namespace {

double binomial(int n, int k)
{
    if (k < 0 || k > n) return 0.0;
    double c = 1.0;
    for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
    return c;
}

double factorial(int n)
{
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

// n! / (n-q)!
double falling(int n, int q)
{
    double v = 1.0;
    for (int i = 0; i < q; ++i) v *= n - i;
    return v;
}

cplx ipow(cplx x, int n)
{
    cplx v = 1.0;
    for (int i = 0; i < n; ++i) v *= x;
    return v;
}

} // namespace

CavityExpr CavityExpr::monomial(int p, int q, cplx c)
{
    if (p < 0 || q < 0) throw std::invalid_argument("CavityExpr: negative power");
    CavityExpr e;
    if (c != cplx{}) e.terms_[{p, q}] = c;
    return e;
}

cplx CavityExpr::coefficient(int p, int q) const
{
    auto it = terms_.find({p, q});
    return it == terms_.end() ? cplx{} : it->second;
}

bool CavityExpr::is_zero(double tol) const
{
    for (const auto& [k, c] : terms_)
        if (std::abs(c) > tol) return false;
    return true;
}

int CavityExpr::degree() const
{
    int d = 0;
    for (const auto& [k, c] : terms_) d = std::max(d, k.first + k.second);
    return d;
}

cplx CavityExpr::element(int row, int col) const
{
    cplx v = 0.0;
    for (const auto& [k, c] : terms_) {
        const auto [p, q] = k;
        if (col < q || row != col - q + p) continue;
        v += c * std::sqrt(falling(col, q) * falling(row, p));
    }
    return v;
}

SparseMatrix CavityExpr::matrix(int nc) const
{
    if (nc < 1) throw std::invalid_argument("CavityExpr::matrix: truncation must be >= 1");
    std::vector<Triplet> trips;
    for (int col = 0; col < nc; ++col) {
        for (const auto& [k, c] : terms_) {
            const int row = col - k.second + k.first;
            if (col < k.second || row >= nc) continue;
            trips.emplace_back(row, col, c * std::sqrt(falling(col, k.second) * falling(row, k.first)));
        }
    }
    SparseMatrix m(nc, nc);
    m.setFromTriplets(trips.begin(), trips.end());
    return m;
}

CavityExpr CavityExpr::adjoint() const
{
    CavityExpr out;
    for (const auto& [k, c] : terms_) out.terms_[{k.second, k.first}] += std::conj(c);
    return out;
}

CavityExpr CavityExpr::shifted(cplx alpha) const
{
    CavityExpr out;
    for (const auto& [k, c] : terms_) {
        const auto [p, q] = k;
        for (int i = 0; i <= p; ++i) {
            for (int j = 0; j <= q; ++j) {
                const cplx w = binomial(p, i) * binomial(q, j) * ipow(std::conj(alpha), p - i) * ipow(alpha, q - j);
                out.terms_[{i, j}] += c * w;
            }
        }
    }
    out.prune();
    return out;
}

CavityExpr CavityExpr::derivative_creation() const
{
    CavityExpr out;
    for (const auto& [k, c] : terms_) {
        if (k.first > 0) out.terms_[{k.first - 1, k.second}] += c * static_cast<double>(k.first);
    }
    out.prune();
    return out;
}

cplx CavityExpr::classical(cplx alpha) const
{
    cplx v{};
    for (const auto& [k, c] : terms_) v += c * ipow(std::conj(alpha), k.first) * ipow(alpha, k.second);
    return v;
}

std::optional<int> CavityExpr::excitation_change() const
{
    std::optional<int> change;
    for (const auto& [k, c] : terms_) {
        if (c == cplx{}) continue;
        const int dk = k.first - k.second;
        if (change && *change != dk) return std::nullopt;
        change = dk;
    }
    return change ? change : std::optional<int>(0);
}

CavityExpr& CavityExpr::operator+=(const CavityExpr& other)
{
    for (const auto& [k, c] : other.terms_) terms_[k] += c;
    prune();
    return *this;
}

CavityExpr& CavityExpr::operator*=(cplx s)
{
    for (auto& [k, c] : terms_) c *= s;
    prune();
    return *this;
}

CavityExpr operator*(const CavityExpr& a, const CavityExpr& b)
{
    // a^dag^p a^q a^dag^r a^s = sum_k C(q,k) C(r,k) k! a^dag^(p+r-k) a^(q+s-k)
    CavityExpr out;
    for (const auto& [ka, ca] : a.terms_) {
        for (const auto& [kb, cb] : b.terms_) {
            const auto [p, q] = ka;
            const auto [r, s] = kb;
            for (int k = 0; k <= std::min(q, r); ++k) {
                const double w = binomial(q, k) * binomial(r, k) * factorial(k);
                out.terms_[{p + r - k, q + s - k}] += ca * cb * w;
            }
        }
    }
    out.prune();
    return out;
}

void CavityExpr::prune()
{
    for (auto it = terms_.begin(); it != terms_.end();) {
        if (it->second == cplx{}) it = terms_.erase(it);
        else ++it;
    }
}

std::string CavityExpr::to_string() const
{
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [k, c] : terms_) {
        if (!first) os << " + ";
        first = false;
        os << "(" << c.real() << (c.imag() < 0 ? "-" : "+") << std::abs(c.imag()) << "i)";
        for (int i = 0; i < k.first; ++i) os << " adag";
        for (int i = 0; i < k.second; ++i) os << " a";
    }
    return os.str();
}

} // namespace pstraj
