#include <doctest.h>

#include <random>

#include "pstraj/oracle.hpp"
#include "test_helpers.hpp"

using namespace pstraj;
using namespace pstraj::oracle;
using namespace testing_helpers;

namespace {

PseudoDensityMatrix random_hermitian(const PseudoLiouvillian& l, unsigned seed)
{
    std::srand(seed);
    PseudoDensityMatrix r;
    for (int d : l.dims) {
        Matrix m = Matrix::Random(d, d);
        r.blocks.push_back(m + m.adjoint());
    }
    return r;
}

ModelSpec cavity_only(double kappa, int photons)
{
    ModelSpec s;
    s.n = 1;
    s.d = 2;
    s.cavity_h = CavityExpr::number(0.7);
    s.collective.push_back(CavityDissipator{"loss", CavityExpr::annihilation(std::sqrt(kappa))});
    s.cavity_truncation = photons + 2;
    s.initial_photons = photons;
    return s;
}

} // namespace

TEST_CASE("rhs is traceless")
{
    for (const auto& spec : {dicke(3, DickeParams{}, 5), three_level(2, ThreeLevelParams{}, 4)}) {
        const auto l = build_pseudo(assemble(spec));
        const auto rhs = liouville_rhs(l, random_hermitian(l, 3));
        CHECK(std::abs(rhs.trace()) < 1e-12);
    }
}

TEST_CASE("zero liouvillian keeps the state")
{
    ModelSpec s;
    s.n = 2;
    s.cavity_truncation = 3;
    const auto rec = integrate_master(assemble(s), grid(2.0, 3));
    CHECK(rec.values[2][0] == doctest::Approx(2.0));
    CHECK(rec.values[2][2] == doctest::Approx(2.0));
    CHECK(rec.values[1][2] == doctest::Approx(-1.0));
}

TEST_CASE("pure cavity decay")
{
    const auto rec = integrate_master(assemble(cavity_only(0.8, 3)), grid(3.0, 7), MasterControls{0.005, false});
    for (std::size_t i = 0; i < 7; ++i) CHECK(std::abs(rec.values[0][i] - 3.0 * std::exp(-0.8 * 3.0 * i / 6)) < 1e-8);
}

TEST_CASE("single emitter decay")
{
    ModelSpec s;
    s.n = 1;
    s.individual.push_back(Dissipator{"decay", std::sqrt(0.5) * sigma_minus()});
    s.cavity_truncation = 1;
    s.initial_species = 2;
    const auto rec = integrate_master(assemble(s), grid(4.0, 5), MasterControls{0.01, false});
    for (std::size_t i = 0; i < 5; ++i) CHECK(std::abs(rec.values[1][i] - (std::exp(-0.5 * i) - 0.5)) < 1e-9);
}

TEST_CASE("pseudo-state and full-space evolutions agree")
{
    const std::vector<ModelSpec> specs{dicke(2, DickeParams{}, 6), dicke(3, DickeParams{}, 4),
                                       tavis_cummings(2, TavisCummingsParams{0.175, 0.0, 0.4, 0.3, 0.05, 0.1}, 4),
                                       three_level(2, ThreeLevelParams{}, 3)};
    for (const auto& spec : specs) {
        const auto m = assemble(spec);
        const auto t = grid(3.0, 4);
        const MasterControls c{0.01, true};
        const auto pseudo = integrate_master(m, t, c);
        const auto full = integrate_full(m, t, c);
        for (std::size_t o = 0; o < pseudo.values.size(); ++o)
            for (std::size_t i = 0; i < t.size(); ++i) CHECK(std::abs(pseudo.values[o][i] - full.values[o][i]) < 1e-8);
        CHECK(pseudo.min_eigenvalue > -1e-8);
        CHECK(full.min_eigenvalue > -1e-8);
        CHECK(pseudo.max_trace_drift < 1e-10);
    }
}

TEST_CASE("projected full-space state equals the pseudo-state")
{
    for (const auto& spec : {dicke(3, DickeParams{}, 3), three_level(2, ThreeLevelParams{}, 3)}) {
        const auto m = assemble(spec);
        const FullSpaceBasis basis(*m.space);
        const auto lp = build_pseudo(m);
        const auto lf = build_full(m);
        auto rho = initial_density(m);
        Matrix full = full_initial_density(m);
        const double dt = 0.01;
        for (int step = 0; step < 100; ++step) {
            const auto k1 = liouville_rhs(lp, rho);
            const auto k2 = liouville_rhs(lp, rho + cplx(0.5 * dt) * k1);
            const auto k3 = liouville_rhs(lp, rho + cplx(0.5 * dt) * k2);
            const auto k4 = liouville_rhs(lp, rho + cplx(dt) * k3);
            rho = rho + cplx(dt / 6.0) * (k1 + cplx(2.0) * k2 + cplx(2.0) * k3 + k4);
            const Matrix f1 = full_space_rhs(lf, full);
            const Matrix f2 = full_space_rhs(lf, full + 0.5 * dt * f1);
            const Matrix f3 = full_space_rhs(lf, full + 0.5 * dt * f2);
            const Matrix f4 = full_space_rhs(lf, full + dt * f3);
            full += dt / 6.0 * (f1 + 2.0 * f2 + 2.0 * f3 + f4);
        }
        const auto projected = project_full(basis, full, m.nc);
        double err = 0;
        for (std::size_t s = 0; s < rho.blocks.size(); ++s)
            err = std::max(err, (projected.blocks[s] - rho.blocks[s]).cwiseAbs().maxCoeff());
        CHECK(err < 1e-8);
        CHECK(std::abs(rho.trace() - 1.0) < 1e-10);
        for (const auto& b : rho.blocks) CHECK((b - b.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("full-space cap")
{
    CHECK_THROWS_AS(build_full(assemble(dicke(20, DickeParams{}, 20))), std::invalid_argument);
    CHECK_NOTHROW(build_full(assemble(dicke(8, DickeParams{}, 16))));
}

TEST_CASE("trace drift is a fault")
{
    CHECK_THROWS_AS(integrate_master(assemble(dicke(2, DickeParams{}, 6)), grid(5.0, 2), MasterControls{2.0, false}),
                    SolverFault);
}
