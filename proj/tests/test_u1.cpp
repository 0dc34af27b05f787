#include <doctest.h>

#include "pstraj/u1_sector.hpp"
#include "test_helpers.hpp"

using namespace pstraj;
using namespace testing_helpers;

TEST_CASE("tavis-cummings passes the U(1) check")
{
    const auto m = assemble(tavis_cummings(4, TavisCummingsParams{}, 8));
    const auto d = validate_u1(m);
    REQUIRE(d.delta_k.size() == m.individual.size() + m.collective.size());
    CHECK(d.commutator_norm < 1e-12);
    for (std::size_t i = 0; i < m.individual.size(); ++i) {
        const auto& label = m.individual[i].label;
        INFO(label);
        if (label.rfind("dephasing", 0) == 0) CHECK(d.delta_k[i] == 0);
        if (label.rfind("decay", 0) == 0) CHECK(d.delta_k[i] == -1);
    }
    CHECK(d.delta_k.back() == -1);
}

TEST_CASE("counter-rotating and multi-level models are rejected")
{
    const auto dicke_model = assemble(dicke(3, DickeParams{}, 6));
    try {
        validate_u1(dicke_model);
        FAIL("expected rejection");
    } catch (const ModelError& e) {
        CHECK(std::string(e.what()).find("lacks weak U(1) symmetry") != std::string::npos);
    }
    CHECK_THROWS_AS(validate_u1(assemble(three_level(2, ThreeLevelParams{}, 4))), ModelError);
}

TEST_CASE("decoupled model is accepted")
{
    auto p = DickeParams{};
    p.g = 0.0;
    CHECK_NOTHROW(validate_u1(assemble(dicke(3, p, 6))));
}

TEST_CASE("excitation sectors")
{
    const auto m = assemble(tavis_cummings(6, TavisCummingsParams{}, 8));
    const auto s = initial_u1_state(m);
    CHECK(s.k == 6);
    CHECK(s.sector == 0);
    REQUIRE(s.psi.rows() == 7);
    CHECK(s.psi(6, 0) == cplx(1.0));

    const auto full = make_excitation_sector(6, 0, 6);
    CHECK(full.dim == 7);
    for (int i = 0; i < full.dim; ++i) CHECK(full.photons(i) == 6 - i);
    const auto low = make_excitation_sector(6, 0, 2);
    CHECK(low.dim == 3);
    const auto j1 = make_excitation_sector(6, 2, 2);  // J = 1: offset 2
    CHECK(j1.offset == 2);
    CHECK(j1.dim == 1);
    CHECK_THROWS(make_excitation_sector(6, 2, 1));
}

TEST_CASE("matched seeds give matched trajectories")
{
    TavisCummingsParams p;
    p.gamma_down = 0.05;
    p.gamma_phi = 0.05;
    p.kappa = 0.2;
    const auto m = assemble(tavis_cummings(6, p, 10));
    const auto d = validate_u1(m);
    const auto t = grid(15.0, 31);
    double worst = 0.0;
    long jumps = 0;
    for (int seed = 0; seed < 20; ++seed) {
        const auto a = run_trajectory(m, t, seed, StepControls{});
        const auto b = run_u1(m, d, t, seed, StepControls{});
        CHECK(a.steps == b.steps);
        CHECK(a.jumps == b.jumps);
        jumps += b.jumps;
        for (std::size_t o = 0; o < m.observables.size(); ++o)
            for (std::size_t i = 0; i < t.size(); ++i) worst = std::max(worst, std::abs(a.values[o][i] - b.values[o][i]));
        CHECK(b.max_amplitudes <= 7);
        // Every no-jump segment is checked, including the one leading up to a jump.
        CHECK(b.invariant_checks >= b.steps - b.jumps);
        CHECK(b.invariant_checks <= b.steps);
    }
    CHECK(jumps > 20);
    CHECK(worst < 1e-8);
}

TEST_CASE("photon decay without emitters coupled")
{
    ModelSpec s;
    s.n = 2;
    s.cavity_h = CavityExpr::number(0.3);
    const double kappa = 0.7;
    s.collective.push_back(CavityDissipator{"loss", CavityExpr::annihilation(std::sqrt(kappa))});
    s.cavity_truncation = 2;
    s.initial_photons = 1;
    const auto m = assemble(s);
    const auto d = validate_u1(m);
    const auto t = grid(3.0, 7);
    std::vector<std::vector<double>> samples;
    for (int i = 0; i < 10000; ++i) samples.push_back(run_u1(m, d, t, 300 + i, StepControls{}).values[0]);
    const auto st = stats(samples);
    for (std::size_t i = 1; i < t.size(); ++i)
        CHECK(std::abs(st.mean[i] - std::exp(-kappa * t[i])) < 3 * st.stderr_[i] + 1e-12);
}

TEST_CASE("generic trajectories keep a definite excitation number")
{
    auto m = assemble(tavis_cummings(5, TavisCummingsParams{0.175, 0.0, 0.4, 0.3, 0.1, 0.1}, 8));
    m.observables = excitation_observables(m);
    const auto t = grid(10.0, 21);
    for (int seed = 0; seed < 10; ++seed) {
        const auto rec = run_trajectory(m, t, seed, StepControls{});
        for (std::size_t i = 0; i < t.size(); ++i) {
            const double k = rec.values[0][i];
            CHECK(std::abs(k - std::round(k)) < 1e-9);
            CHECK(std::abs(rec.values[1][i] - k * k) < 1e-8);
        }
    }
}
