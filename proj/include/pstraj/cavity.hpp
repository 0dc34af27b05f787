#pragma once

// Polynomials in the cavity ladder operators, kept in normal order so that
// matrix elements are available without a truncation (the U(1) solver relies
// on this) as well as on a truncated Fock basis 0..N_c-1.

#include <map>
#include <optional>
#include <string>
#include <utility>

#include "pstraj/types.hpp"

namespace pstraj {

class CavityExpr {
public:
    // (creation power p, annihilation power q) -> coefficient of a^dag^p a^q.
    using Terms = std::map<std::pair<int, int>, cplx>;

    CavityExpr() = default;
    static CavityExpr identity(cplx c = 1.0) { return monomial(0, 0, c); }
    static CavityExpr annihilation(cplx c = 1.0) { return monomial(0, 1, c); }
    static CavityExpr creation(cplx c = 1.0) { return monomial(1, 0, c); }
    static CavityExpr number(cplx c = 1.0) { return monomial(1, 1, c); }
    static CavityExpr monomial(int p, int q, cplx c);

    const Terms& terms() const { return terms_; }
    cplx coefficient(int p, int q) const;
    bool is_zero(double tol = 0.0) const;
    int degree() const;

    // <row| expr |col> on the untruncated Fock space.
    cplx element(int row, int col) const;
    SparseMatrix matrix(int nc) const;

    CavityExpr adjoint() const;
    // expr with a -> a + alpha.
    CavityExpr shifted(cplx alpha) const;
    // [a, expr] = d expr / d a^dag.
    CavityExpr derivative_creation() const;
    // Value with a -> alpha, a^dag -> conj(alpha).
    cplx classical(cplx alpha) const;
    // Photon-number change if every term shares it.
    std::optional<int> excitation_change() const;

    CavityExpr& operator+=(const CavityExpr& other);
    CavityExpr& operator*=(cplx s);
    friend CavityExpr operator+(CavityExpr a, const CavityExpr& b) { return a += b; }
    friend CavityExpr operator*(cplx s, CavityExpr a) { return a *= s; }
    friend CavityExpr operator*(const CavityExpr& a, const CavityExpr& b);

    std::string to_string() const;

private:
    void prune();
    Terms terms_;
};

} // namespace pstraj
