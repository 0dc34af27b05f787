#include <doctest.h>

#include "pstraj/cavity.hpp"

using namespace pstraj;

TEST_CASE("fock matrices")
{
    const Matrix a = CavityExpr::annihilation().matrix(4);
    CHECK(a(0, 1) == cplx(1.0));
    CHECK(std::abs(a(2, 3) - std::sqrt(3.0)) < 1e-15);
    const Matrix n = CavityExpr::number().matrix(4);
    CHECK((n - (Matrix(a.adjoint()) * a)).norm() < 1e-14);
    CHECK(CavityExpr::number().element(7, 7) == cplx(7.0));
    CHECK(CavityExpr::creation().element(4, 3) == cplx(2.0));
}

TEST_CASE("normal ordering of products")
{
    const auto a = CavityExpr::annihilation();
    const auto ad = CavityExpr::creation();
    const auto aad = a * ad;  // a a^dag = a^dag a + 1
    CHECK(aad.coefficient(1, 1) == cplx(1.0));
    CHECK(aad.coefficient(0, 0) == cplx(1.0));
    const auto sq = (a + ad) * (a + ad);
    CHECK(sq.coefficient(2, 0) == cplx(1.0));
    CHECK(sq.coefficient(0, 2) == cplx(1.0));
    CHECK(sq.coefficient(1, 1) == cplx(2.0));
    CHECK(sq.coefficient(0, 0) == cplx(1.0));
    for (int r = 0; r < 6; ++r)
        for (int c = 0; c < 6; ++c) {
            cplx direct = 0;
            for (int k = 0; k < 8; ++k) direct += (a + ad).element(r, k) * (a + ad).element(k, c);
            CHECK(std::abs(direct - sq.element(r, c)) < 1e-12);
        }
}

TEST_CASE("displacement shift")
{
    const cplx alpha(0.3, -0.7);
    const auto n = CavityExpr::number().shifted(alpha);
    CHECK(n.coefficient(1, 1) == cplx(1.0));
    CHECK(std::abs(n.coefficient(1, 0) - alpha) < 1e-15);
    CHECK(std::abs(n.coefficient(0, 1) - std::conj(alpha)) < 1e-15);
    CHECK(std::abs(n.coefficient(0, 0) - std::norm(alpha)) < 1e-15);
    const auto aa = CavityExpr::monomial(0, 2, 1.0).shifted(alpha);
    CHECK(std::abs(aa.coefficient(0, 1) - 2.0 * alpha) < 1e-15);
    CHECK(std::abs(aa.coefficient(0, 0) - alpha * alpha) < 1e-15);
    CHECK(CavityExpr::annihilation().shifted(0.0).coefficient(0, 1) == cplx(1.0));
}

TEST_CASE("excitation change")
{
    CHECK(CavityExpr::annihilation().excitation_change() == -1);
    CHECK(CavityExpr::number().excitation_change() == 0);
    CHECK(!(CavityExpr::annihilation() + CavityExpr::creation()).excitation_change());
    CHECK(CavityExpr().excitation_change() == 0);
}

TEST_CASE("adjoint")
{
    const auto e = CavityExpr::annihilation(cplx(1, 2)) + CavityExpr::number(3.0);
    const Matrix m = e.matrix(5);
    CHECK((Matrix(e.adjoint().matrix(5)) - Matrix(m.adjoint())).norm() < 1e-14);
}
