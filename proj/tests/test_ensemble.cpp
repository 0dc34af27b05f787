#include <doctest.h>

#include <cmath>

#include "pstraj/ensemble.hpp"
#include "test_helpers.hpp"

using namespace pstraj;
using namespace testing_helpers;

namespace {

EnsembleConfig small_config(Solver solver, int workers)
{
    EnsembleConfig c;
    c.n_trajectories = 24;
    c.master_seed = 99;
    c.t_grid = grid(2.0, 5);
    c.solver = solver;
    c.workers = workers;
    c.keep_series = true;
    return c;
}

} // namespace

TEST_CASE("splitmix finaliser")
{
    // First SplitMix64 output for state 0.
    CHECK(mix64(0) == 0xe220a8397b1dcdafULL);
    CHECK(trajectory_seed(1, 2) == trajectory_seed(1, 2));
    CHECK(trajectory_seed(1, 2) != trajectory_seed(2, 1));
    CHECK(trajectory_seed(1, 2) != trajectory_seed(1, 3));
}

TEST_CASE("solver names round-trip")
{
    for (Solver s : {Solver::jump, Solver::hybrid, Solver::u1, Solver::oracle}) CHECK(parse_solver(solver_name(s)) == s);
    CHECK_THROWS_AS(parse_solver("euler"), std::invalid_argument);
}

TEST_CASE("results do not depend on the worker count")
{
    const auto m = assemble(dicke(3, DickeParams{}, 6));
    for (Solver s : {Solver::jump, Solver::hybrid}) {
        const auto a = run_ensemble(m, small_config(s, 1));
        const auto b = run_ensemble(m, small_config(s, 2));
        const auto c = run_ensemble(m, small_config(s, 4));
        CHECK(a.mean == b.mean);
        CHECK(a.mean == c.mean);
        CHECK(a.stderr_ == c.stderr_);
        CHECK(a.series == c.series);
        CHECK(a.steps == c.steps);
    }
    const auto tc = assemble(tavis_cummings(4, TavisCummingsParams{}, 6));
    CHECK(run_ensemble(tc, small_config(Solver::u1, 1)).mean == run_ensemble(tc, small_config(Solver::u1, 3)).mean);
}

TEST_CASE("oracle solver returns the master equation")
{
    const auto m = assemble(dicke(2, DickeParams{}, 6));
    auto c = small_config(Solver::oracle, 1);
    c.n_trajectories = 1;
    const auto rec = run_ensemble(m, c);
    const auto ref = oracle::integrate_master(m, c.t_grid);
    CHECK(rec.mean == ref.values);
    CHECK(std::isnan(rec.stderr_[0][1]));

    const auto big = assemble(dicke(20, DickeParams{}, 20));
    CHECK_THROWS_AS(run_ensemble(big, c), CapExceeded);
}

TEST_CASE("a failing trajectory aborts the run")
{
    const auto m = assemble(dicke(2, DickeParams{}, 6));
    auto c = small_config(Solver::hybrid, 2);
    c.hybrid.continuous = false;
    c.hybrid.ceiling = 1e-4;
    try {
        run_ensemble(m, c);
        FAIL("expected a fault");
    } catch (const SolverFault& e) {
        CHECK(std::string(e.what()).rfind("trajectory ", 0) == 0);
    }
}

TEST_CASE("u1 solver needs the symmetry")
{
    const auto m = assemble(dicke(2, DickeParams{}, 6));
    CHECK_THROWS_AS(run_ensemble(m, small_config(Solver::u1, 1)), ModelError);
}

TEST_CASE("disjoint seeds agree statistically")
{
    const auto m = assemble(dicke(2, DickeParams{}, 8));
    auto c = small_config(Solver::jump, 1);
    c.n_trajectories = 400;
    c.keep_series = false;
    const auto a = run_ensemble(m, c);
    c.master_seed = 12345;
    const auto b = run_ensemble(m, c);
    for (std::size_t o = 0; o < a.names.size(); ++o) {
        for (std::size_t i = 1; i < c.t_grid.size(); ++i) {
            const double se = std::hypot(a.stderr_[o][i], b.stderr_[o][i]);
            CHECK(std::abs(a.mean[o][i] - b.mean[o][i]) < 3 * se + 1e-12);
        }
    }
}

TEST_CASE("stderr is the sample deviation over sqrt(n)")
{
    const auto m = assemble(dicke(2, DickeParams{}, 6));
    const auto rec = run_ensemble(m, small_config(Solver::jump, 1));
    std::vector<std::vector<double>> samples;
    for (const auto& s : rec.series) samples.push_back(s[0]);
    const auto st = stats(samples);
    for (std::size_t i = 0; i < rec.t.size(); ++i) {
        CHECK(rec.mean[0][i] == doctest::Approx(st.mean[i]).epsilon(1e-12));
        CHECK(rec.stderr_[0][i] == doctest::Approx(st.stderr_[i]).epsilon(1e-9));
    }
}

TEST_CASE("log-log slopes")
{
    CHECK(loglog_slope({1, 2, 4, 8}, {3, 6, 12, 24}) == doctest::Approx(1.0));
    CHECK(loglog_slope({2, 4, 8}, {4, 16, 64}) == doctest::Approx(2.0));
    CHECK_THROWS(loglog_slope({1}, {1}));
}

TEST_CASE("scaling report")
{
    EnsembleConfig c = small_config(Solver::u1, 1);
    c.n_trajectories = 2;
    c.keep_series = false;
    const auto family = [](int n) { return tavis_cummings(n, TavisCummingsParams{}, 4); };
    CHECK_THROWS(scaling_report(family, {8, 4}, c));
    const auto r = scaling_report(family, {4, 8, 16}, c);
    REQUIRE(r.rows.size() == 3);
    CHECK(r.rows[2].amplitudes == 17);
    CHECK(r.memory_slope == doctest::Approx(loglog_slope({4, 8, 16}, {5, 9, 17})));
}
