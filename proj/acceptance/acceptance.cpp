// Acceptance suite. Prints one PASS/FAIL line per criterion; optional
// arguments select criteria by number.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "pstraj/config.hpp"
#include "pstraj/ensemble.hpp"
#include "pstraj/oracle_basis.hpp"
#include "pstraj/spin_basis.hpp"
#include "pstraj/u1_sector.hpp"
#include "pstraj/young_basis.hpp"

using namespace pstraj;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::vector<double> grid(double t_end, int points)
{
    std::vector<double> g(points);
    for (int i = 0; i < points; ++i) g[i] = t_end * i / (points - 1);
    return g;
}

EnsembleConfig ensemble(Solver solver, long n, std::uint64_t seed, std::vector<double> t)
{
    EnsembleConfig c;
    c.solver = solver;
    c.n_trajectories = n;
    c.master_seed = seed;
    c.t_grid = std::move(t);
    return c;
}

std::size_t index_of(const EnsembleRecord& r, const std::string& name)
{
    const auto it = std::find(r.names.begin(), r.names.end(), name);
    if (it == r.names.end()) throw std::runtime_error("missing observable " + name);
    return it - r.names.begin();
}

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

Outcome channel_completeness()
{
    const std::vector<Matrix> ops{sigma_plus(), sigma_minus(), sigma_z(), Matrix::Identity(2, 2)};
    double worst = 0;
    for (int n = 1; n <= 4; ++n) {
        SpinSpace space(n);
        oracle::FullSpaceBasis basis(space);
        for (const auto& x : ops)
            for (const auto& y : ops) worst = std::max(worst, oracle::channel_completeness_error(space, basis, x, y));
    }
    return {worst < 1e-10, "max error " + fmt("%.2e", worst)};
}

Outcome qutrit_completeness()
{
    double worst = 0;
    for (int n = 2; n <= 3; ++n) {
        YoungSpace space(n, 3);
        oracle::FullSpaceBasis basis(space);
        for (int a = 1; a <= 3; ++a)
            for (int b = 1; b <= 3; ++b)
                for (int c = 1; c <= 3; ++c)
                    for (int e = 1; e <= 3; ++e)
                        worst = std::max(worst, oracle::channel_completeness_error(space, basis, level_op(3, a, b),
                                                                                   level_op(3, c, e)));
    }
    return {worst < 1e-9, "max error " + fmt("%.2e", worst)};
}

const std::vector<double> kDickeTimes = grid(8.0, 17);

const EnsembleRecord& dicke_oracle()
{
    static const EnsembleRecord rec =
        run_ensemble(assemble(dicke(4, DickeParams{}, 20)), ensemble(Solver::oracle, 1, 0, kDickeTimes));
    return rec;
}

Outcome jump_vs_oracle()
{
    const auto& exact = dicke_oracle();
    const auto rec = run_ensemble(assemble(dicke(4, DickeParams{}, 20)), ensemble(Solver::jump, 2000, 3001, kDickeTimes));
    const double s = worst_sigma(rec, exact, index_of(rec, "n_photon"));
    return {s < 3.0, "worst n_photon deviation " + fmt("%.2f", s) + " sigma"};
}

Outcome hybrid_vs_oracle()
{
    const auto& exact = dicke_oracle();
    const auto rec = run_ensemble(assemble(dicke(4, DickeParams{}, 6)), ensemble(Solver::hybrid, 2000, 4001, kDickeTimes));
    const double s = worst_sigma(rec, exact, index_of(rec, "n_photon"));
    return {s < 3.0 && rec.displaced_field_mean < 0.1,
            "worst n_photon deviation " + fmt("%.2f", s) + " sigma, mean displaced |<a>| " +
                fmt("%.3g", rec.displaced_field_mean)};
}

// Generic no-jump steps on the truncated model must leave <K> and Var(K) unchanged.
double generic_k_drift(const AssembledModel& m, int trajectories, double t_end)
{
    const auto k_obs = excitation_observables(m);
    double worst = 0;
    for (int i = 0; i < trajectories; ++i) {
        auto st = initial_state(m, trajectory_seed(77, i));
        const double dt = resolved_dt_max(m, StepControls{});
        while (st.t < t_end) {
            const double k0 = expectation(k_obs[0], st.sector, st.psi);
            const auto res = step(st, m, std::min(dt, t_end - st.t));
            if (res.channel >= 0) continue;
            const double k1 = expectation(k_obs[0], st.sector, st.psi);
            const double var = expectation(k_obs[1], st.sector, st.psi) - k1 * k1;
            worst = std::max({worst, std::abs(k1 - k0), std::abs(var)});
        }
    }
    return worst;
}

Outcome u1_vs_generic()
{
    auto spec = tavis_cummings(6, TavisCummingsParams{}, 7);
    spec.initial_species = 2;
    const auto m = assemble(spec);
    const auto t = grid(20.0, 21);
    const auto generic = run_ensemble(m, ensemble(Solver::jump, 2000, 5001, t));
    const auto u1 = run_ensemble(m, ensemble(Solver::u1, 2000, 5002, t));
    double worst = 0;
    for (std::size_t o = 0; o < generic.names.size(); ++o) worst = std::max(worst, worst_sigma(generic, u1, o));
    long free_steps = 0;
    for (std::size_t i = 0; i < u1.steps.size(); ++i) free_steps += u1.steps[i] - u1.jumps[i];
    const double drift = generic_k_drift(m, 50, 20.0);
    return {worst < 3.0 && u1.invariant_checks >= free_steps && drift < 1e-9,
            "worst deviation " + fmt("%.2f", worst) + " sigma, " + std::to_string(u1.invariant_checks) +
                " fixed-K segments, generic K drift " + fmt("%.1e", drift)};
}

struct Peak {
    double time = 0;
    double height = 0;
    bool rings = false;
};

// Global maximum, then a dip below 80% of it and a later rise of at least 10%
// of the peak above the dip.
Peak find_peak(const std::vector<double>& t, const std::vector<double>& y)
{
    const auto top = std::max_element(y.begin(), y.end()) - y.begin();
    Peak p{t[top], y[top], false};
    double dip = y[top];
    for (std::size_t i = top; i < y.size(); ++i) {
        dip = std::min(dip, y[i]);
        if (dip < 0.8 * p.height && y[i] - dip > 0.1 * p.height) p.rings = true;
    }
    return p;
}

Outcome superradiant_ordering()
{
    const auto t = grid(24.0, 97);
    std::vector<Peak> peaks;
    std::string detail;
    for (int n : {20, 50}) {
        auto spec = tavis_cummings(n, TavisCummingsParams{});
        spec.initial_species = 2;
        const auto rec = run_ensemble(assemble(spec), ensemble(Solver::u1, 400, 6000 + n, t));
        const auto p = find_peak(rec.t, rec.mean[index_of(rec, "n_photon")]);
        peaks.push_back(p);
        detail += "N=" + std::to_string(n) + " peak " + fmt("%.2f", p.height) + " at t=" + fmt("%.2f", p.time) +
                  (p.rings ? " rings" : " no ringing") + "; ";
    }
    const bool rings = peaks[0].rings && peaks[1].rings;
    const bool ordered = peaks[1].time < peaks[0].time;
    detail += ordered ? "peak time decreases with N" : "peak time does not decrease with N";
    return {rings && ordered, detail};
}

Outcome scaling()
{
    const auto family = [](ModelSpec (*make)(int, int)) {
        return [make](int n) { return make(n, 6); };
    };
    auto c = ensemble(Solver::jump, 4, 7001, grid(0.5, 3));
    const auto jump = scaling_report(family([](int n, int nc) { return dicke(n, DickeParams{}, nc); }),
                                     {64, 128, 256, 512, 1024}, c);
    c.solver = Solver::u1;
    const auto u1 = scaling_report(
        family([](int n, int nc) {
            auto s = tavis_cummings(n, TavisCummingsParams{}, nc);
            s.initial_species = 2;
            return s;
        }),
        {64, 128, 256, 512, 1024}, c);
    c.solver = Solver::hybrid;
    c.n_trajectories = 2;
    const auto hybrid =
        scaling_report(family([](int n, int nc) { return dicke(n, DickeParams{}, nc); }), {128, 256, 512, 1024}, c);
    const bool a = std::abs(jump.step_cost_slope - 1.0) <= 0.3;
    const bool b = std::abs(u1.memory_slope - 1.0) <= 0.1;
    const bool hc = hybrid.dt_inverse_n && std::abs(hybrid.total_time_slope - 2.0) <= 0.4;
    return {a && b && hc, std::string("(a) jump step cost slope ") + fmt("%.2f", jump.step_cost_slope) +
                              (a ? "" : " out of range") + ", (b) u1 memory slope " + fmt("%.3f", u1.memory_slope) +
                              (b ? "" : " out of range") + ", (c) hybrid total-time slope " +
                              fmt("%.2f", hybrid.total_time_slope) + " with dt slope " +
                              fmt("%.2f", hybrid.dt_slope) + (hc ? "" : " out of range")};
}

Outcome combinatorics()
{
    bool ok = true;
    for (int n = 1; n <= 10; ++n) {
        double total = 0;
        for (const auto& s : spin::enumerate_sectors(n)) total += s.degeneracy * s.dim();
        ok = ok && total == std::pow(2.0, n);
    }
    long patterns = 0;
    for (int n = 1; n <= 5; ++n)
        for (int d = 2; d <= 4; ++d) {
            std::uint64_t total = 0;
            for (const auto& nu : young::enumerate_diagrams(n, d)) {
                const auto ps = young::enumerate_patterns(nu);
                total += young::standard_count(nu) * ps.size();
                for (const auto& g : ps) {
                    ++patterns;
                    const auto w = young::gt_to_weyl(g);
                    ok = ok && g.valid() && young::valid_tableau(w, d) && young::weyl_to_gt(w, d) == g;
                }
            }
            ok = ok && total == static_cast<std::uint64_t>(std::llround(std::pow(d, n)));
        }
    return {ok, "sum rules exact, " + std::to_string(patterns) + " GT patterns round-tripped"};
}

const char* kDeterminismConfig = R"(model:
  builtin: dicke
  n: 4
  cavity_truncation: 12
solver: jump
ensemble:
  trajectories: 200
  seed: 99
  t_end: 5
  points: 26
observables: [n_photon, Jz, J2]
)";

Outcome determinism()
{
    auto cfg = parse_config(kDeterminismConfig);
    const auto m = assemble(cfg.model);
    cfg.ensemble.workers = 1;
    const auto one = csv_text(run_ensemble(m, cfg.ensemble), cfg.observables);
    cfg.ensemble.workers = 4;
    const auto four = csv_text(run_ensemble(m, cfg.ensemble), cfg.observables);
    return {one == four, std::to_string(one.size()) + " bytes, " + (one == four ? "identical" : "different")};
}

struct Criterion {
    int number;
    const char* name;
    double limit_seconds;
    std::function<Outcome()> run;
};

} // namespace

int main(int argc, char** argv)
{
    const std::vector<Criterion> all{
        {1, "two-level channel completeness", 10, channel_completeness},
        {2, "three-level channel completeness", 60, qutrit_completeness},
        {3, "jump ensemble vs master equation", 900, jump_vs_oracle},
        {4, "hybrid ensemble vs master equation", 900, hybrid_vs_oracle},
        {5, "excitation-sector vs generic solver", 600, u1_vs_generic},
        {6, "superradiant peak ordering", 1200, superradiant_ordering},
        {7, "scaling", 1800, scaling},
        {8, "combinatorics", 10, combinatorics},
        {9, "determinism across workers", 120, determinism},
    };
    std::set<int> chosen;
    for (int i = 1; i < argc; ++i) chosen.insert(std::atoi(argv[i]));

    int failed = 0;
    for (const auto& c : all) {
        if (!chosen.empty() && !chosen.count(c.number)) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = secs <= c.limit_seconds;
        const bool pass = o.pass && in_time;
        failed += !pass;
        std::printf("criterion %d %s: %s (%s; %.1f s of %.0f s)\n", c.number, c.name, pass ? "PASS" : "FAIL",
                    o.detail.c_str(), secs, c.limit_seconds);
        std::fflush(stdout);
    }
    std::printf("%d criteria failed\n", failed);
    return 0;
}
