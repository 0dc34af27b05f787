#include <doctest.h>

#include "pstraj/model.hpp"
#include "test_helpers.hpp"

using namespace pstraj;
using namespace testing_helpers;

TEST_CASE("dicke assembles with the default parameters")
{
    const auto m = assemble(dicke(4, DickeParams{}, 8));
    CHECK(m.individual.size() == 6);
    CHECK(m.collective.size() == 1);
    for (const auto& ch : m.individual) CHECK(ch.label.find("trace") == std::string::npos);
    CHECK(m.spec.emitter_h(1, 1) == cplx(0.5));
    CHECK(m.observables.size() == 3);
    CHECK(m.observables[0].name == "n_photon");
}

TEST_CASE("tavis-cummings conserves excitations")
{
    const auto m = assemble(tavis_cummings(4, TavisCummingsParams{}, 6));
    const Matrix h = dense_sum(m.h_eff, m);
    // n_c + M + N/2 on the emitter-major basis.
    const int pd = m.space->total_dim();
    Matrix k = Matrix::Zero(pd * m.nc, pd * m.nc);
    int offset = 0;
    for (const auto& s : m.space->sectors()) {
        for (int i = 0; i < s.dim; ++i)
            for (int n = 0; n < m.nc; ++n) {
                const int two_j = s.shape[0] - s.shape[1];
                const double mval = 0.5 * (2 * i - two_j);
                k((offset + i) * m.nc + n, (offset + i) * m.nc + n) = n + mval + 2.0;
            }
        offset += s.dim;
    }
    CHECK((h * k - k * h).norm() < 1e-12);

    const auto d = assemble(dicke(4, DickeParams{}, 6));
    const Matrix hd = dense_sum(d.h_eff, d);
    CHECK((hd * k - k * hd).norm() > 0.1);
}

TEST_CASE("three-level model")
{
    const auto spec = three_level(3, ThreeLevelParams{}, 5);
    CHECK(spec.individual.size() == 4);
    CHECK(spec.couplings.size() == 4);
    const auto m = assemble(spec);
    CHECK(m.collective.size() == 1);
    CHECK(m.observables.size() == 4);
    CHECK(m.observables[3].name == "pop_3");
    // Coupling reduces to (g/sqrt(N)) (s13 a^dag + s31 a).
    Matrix total = Matrix::Zero(3 * 5, 3 * 5);
    for (const auto& c : spec.couplings) total += dense_kron(c.x, Matrix(c.cavity.matrix(5)));
    const double gc = 0.9 / std::sqrt(3.0);
    Matrix want = Matrix::Zero(15, 15);
    for (int lower : {1, 2}) {
        want += gc * dense_kron(level_op(3, lower, 3), Matrix(CavityExpr::creation().matrix(5)));
        want += gc * dense_kron(level_op(3, 3, lower), Matrix(CavityExpr::annihilation().matrix(5)));
    }
    CHECK((total - want).norm() < 1e-12);
}

TEST_CASE("hamiltonian part is hermitian and the rest is the decay")
{
    for (const auto& spec : {dicke(3, DickeParams{}, 5), tavis_cummings(3, TavisCummingsParams{}, 5), three_level(2, ThreeLevelParams{}, 4)}) {
        const auto m = assemble(spec);
        const Matrix h = dense_sum(m.hamiltonian, m);
        CHECK((h - h.adjoint()).norm() < 1e-12);
        const Matrix heff = dense_sum(m.h_eff, m);
        const int pd = m.space->total_dim();
        Matrix decay = Matrix::Zero(pd * m.nc, pd * m.nc);
        for (const auto& ch : m.individual) {
            const Matrix l = dense_kron(ch.op.to_dense(), Matrix::Identity(m.nc, m.nc));
            decay += l.adjoint() * l;
        }
        for (const auto& ch : m.collective) {
            const Matrix c = dense_kron(Matrix::Identity(pd, pd), Matrix(ch.matrix));
            decay += c.adjoint() * c;
        }
        const Matrix anti = (heff - heff.adjoint()) / cplx(0.0, 2.0);
        CHECK((anti + 0.5 * decay).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((0.5 * (heff + heff.adjoint()) - h).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("block structure of channels")
{
    const auto m = assemble(dicke(5, DickeParams{}, 4));
    for (const auto& ch : m.individual) {
        std::vector<int> seen(m.sector_count(), 0);
        for (const auto& b : ch.op.blocks()) CHECK(++seen[b.from] == 1);
    }
    for (const auto& t : m.h_eff)
        if (!t.emitter_identity) CHECK(t.emitter.is_sector_diagonal());
}

TEST_CASE("default truncation")
{
    CHECK(default_truncation(10, TruncationPolicy::jump) == 20);
    CHECK(default_truncation(100, TruncationPolicy::jump) == 50);
    CHECK(default_truncation(101, TruncationPolicy::jump) == 51);
    CHECK(default_truncation(1000, TruncationPolicy::hybrid) == 6);
}

TEST_CASE("malformed specs are rejected")
{
    auto s = dicke(2);
    s.emitter_h = Matrix::Identity(3, 3);
    CHECK_THROWS_AS(assemble(s), ModelError);
    s = dicke(2);
    s.cavity_truncation = 0;
    CHECK_THROWS_AS(assemble(s), ModelError);
    s = dicke(2);
    s.cavity_h = CavityExpr::monomial(2, 1, 1.0);
    CHECK_THROWS_AS(assemble(s), ModelError);
    s = dicke(2);
    s.d = 7;
    CHECK_THROWS_AS(assemble(s), ModelError);
}

TEST_CASE("with_size rescales the coupling")
{
    const auto s = with_size(dicke(4), 16, 10);
    CHECK(s.n == 16);
    CHECK(s.cavity_truncation == 10);
    CHECK(std::abs(s.couplings[0].cavity.coefficient(0, 1) - cplx(0.9 / 4.0)) < 1e-14);
}
