#include <doctest.h>

#include <cmath>
#include <string>

#include "pstraj/ensemble.hpp"
#include "pstraj/u1_sector.hpp"
#include "test_helpers.hpp"

using namespace pstraj;
using namespace testing_helpers;

namespace {

EnsembleConfig ensemble(Solver solver, long n, std::uint64_t seed, std::vector<double> t)
{
    EnsembleConfig c;
    c.solver = solver;
    c.n_trajectories = n;
    c.master_seed = seed;
    c.t_grid = std::move(t);
    return c;
}

// Largest |a - b| in units of the combined stderr; exact agreement where
// both errors vanish counts as zero.
double worst_sigma(const EnsembleRecord& a, const EnsembleRecord& b, std::size_t obs)
{
    double worst = 0;
    for (std::size_t i = 0; i < a.t.size(); ++i) {
        const double sa = std::isnan(a.stderr_[obs][i]) ? 0.0 : a.stderr_[obs][i];
        const double sb = std::isnan(b.stderr_[obs][i]) ? 0.0 : b.stderr_[obs][i];
        const double diff = std::abs(a.mean[obs][i] - b.mean[obs][i]);
        if (diff < 1e-9) continue;
        worst = std::max(worst, diff / std::hypot(sa, sb));
    }
    return worst;
}

void check_against_oracle(const ModelSpec& spec, const std::vector<double>& t, long trajectories, const StepControls& controls = {})
{
    const auto m = assemble(spec);
    auto c = ensemble(Solver::jump, trajectories, 2024, t);
    c.controls = controls;
    const auto traj = run_ensemble(m, c);
    const auto exact = run_ensemble(m, ensemble(Solver::oracle, 1, 0, t));
    for (std::size_t o = 0; o < traj.names.size(); ++o) {
        INFO(spec.name << " N=" << spec.n << " " << traj.names[o]);
        CHECK(worst_sigma(traj, exact, o) < 3.0);
    }
}

} // namespace

TEST_CASE("jump ensembles reproduce the master equation, two-level emitters")
{
    const auto t = grid(3.0, 7);
    for (int n = 1; n <= 4; ++n) check_against_oracle(dicke(n, DickeParams{}, 6), t, 2000);
}

TEST_CASE("jump ensembles reproduce the master equation, three-level emitters")
{
    const auto t = grid(3.0, 7);
    for (int n = 1; n <= 3; ++n) check_against_oracle(three_level(n, ThreeLevelParams{}, 6), t, 2000);
}

TEST_CASE("waiting-time sampling reproduces the master equation")
{
    StepControls c;
    c.waiting_time = true;
    check_against_oracle(dicke(3, DickeParams{}, 6), grid(3.0, 7), 2000, c);
}

TEST_CASE("halving the step leaves the ensemble unchanged")
{
    const auto m = assemble(dicke(3, DickeParams{}, 6));
    auto c = ensemble(Solver::jump, 1000, 5, grid(3.0, 7));
    c.controls.dt_max = 0.02;
    const auto coarse = run_ensemble(m, c);
    c.controls.dt_max = 0.01;
    const auto fine = run_ensemble(m, c);
    for (std::size_t o = 0; o < coarse.names.size(); ++o) {
        INFO(coarse.names[o]);
        CHECK(worst_sigma(coarse, fine, o) < 3.0);
    }
}

TEST_CASE("hybrid and jump ensembles agree")
{
    const auto t = grid(2.0, 5);
    for (int n : {4, 6}) {
        const auto jump = run_ensemble(assemble(dicke(n, DickeParams{}, 16)), ensemble(Solver::jump, 600, 31, t));
        const auto hybrid = run_ensemble(assemble(dicke(n, DickeParams{}, 6)), ensemble(Solver::hybrid, 600, 32, t));
        for (std::size_t o = 0; o < jump.names.size(); ++o) {
            INFO("N=" << n << " " << jump.names[o]);
            CHECK(worst_sigma(jump, hybrid, o) < 3.0);
        }
        CHECK(hybrid.displaced_field_mean < 0.1);
    }
}

TEST_CASE("excitation-sector and generic ensembles agree")
{
    const auto t = grid(10.0, 11);
    for (int n : {4, 8}) {
        auto spec = tavis_cummings(n, TavisCummingsParams{}, n + 1);
        spec.initial_species = 2;
        const auto m = assemble(spec);
        const auto generic = run_ensemble(m, ensemble(Solver::jump, 1000, 41, t));
        const auto u1 = run_ensemble(m, ensemble(Solver::u1, 1000, 42, t));
        for (std::size_t o = 0; o < generic.names.size(); ++o) {
            INFO("N=" << n << " " << generic.names[o]);
            CHECK(worst_sigma(generic, u1, o) < 3.0);
        }
        CHECK(u1.invariant_checks > 0);
    }
}
