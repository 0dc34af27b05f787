#include "pstraj/ensemble.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <optional>
#include <thread>

#include "pstraj/u1_sector.hpp"

namespace pstraj {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Neumaier summation.
struct CompensatedSum {
    double sum = 0.0;
    double carry = 0.0;
    void add(double x)
    {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x)) carry += (sum - t) + x;
        else carry += (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + carry; }
};

EnsembleRecord run_oracle(const AssembledModel& model, const EnsembleConfig& config)
{
    oracle::require_within_cap(model.spec.n, model.spec.d, model.nc);
    const auto rec = oracle::integrate_master(model, config.t_grid, config.master);
    EnsembleRecord out;
    for (const auto& o : model.observables) out.names.push_back(o.name);
    out.t = config.t_grid;
    out.mean = rec.values;
    out.stderr_.assign(out.names.size(), std::vector<double>(out.t.size(), kNaN));
    out.total_steps = rec.steps;
    return out;
}

} // namespace

std::string solver_name(Solver s)
{
    switch (s) {
    case Solver::jump: return "jump";
    case Solver::hybrid: return "hybrid";
    case Solver::u1: return "u1";
    case Solver::oracle: return "oracle";
    }
    return "jump";
}

Solver parse_solver(const std::string& name)
{
    if (name == "jump") return Solver::jump;
    if (name == "hybrid") return Solver::hybrid;
    if (name == "u1") return Solver::u1;
    if (name == "oracle") return Solver::oracle;
    throw std::invalid_argument("unknown solver '" + name + "' (expected jump, hybrid, u1 or oracle)");
}

std::uint64_t mix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t trajectory_seed(std::uint64_t master_seed, std::uint64_t index)
{
    return mix64(mix64(master_seed) ^ mix64(index ^ 0x5851f42d4c957f2dULL));
}

EnsembleRecord run_ensemble(const AssembledModel& model, const EnsembleConfig& config)
{
    if (config.t_grid.empty()) throw std::invalid_argument("run_ensemble: empty time grid");
    if (config.solver == Solver::oracle) return run_oracle(model, config);
    if (config.n_trajectories < 1) throw std::invalid_argument("run_ensemble: need at least one trajectory");
    if (config.workers < 1) throw std::invalid_argument("run_ensemble: need at least one worker");

    std::optional<U1Descriptor> u1;
    if (config.solver == Solver::u1) u1 = validate_u1(model);
    if (config.solver == Solver::hybrid) make_hybrid(model);

    const long n = config.n_trajectories;
    std::vector<TrajectoryRecord> records(n);
    std::atomic<long> next{0};
    std::atomic<bool> abort{false};
    std::mutex fail_mutex;
    long fail_index = -1;
    std::string fail_message;

    const auto worker = [&] {
        while (!abort.load()) {
            const long i = next.fetch_add(1);
            if (i >= n) return;
            const std::uint64_t seed = trajectory_seed(config.master_seed, static_cast<std::uint64_t>(i));
            try {
                switch (config.solver) {
                case Solver::jump: records[i] = run_trajectory(model, config.t_grid, seed, config.controls); break;
                case Solver::hybrid: records[i] = run_hybrid(model, config.t_grid, seed, config.hybrid); break;
                case Solver::u1: records[i] = run_u1(model, *u1, config.t_grid, seed, config.controls); break;
                case Solver::oracle: break;
                }
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(fail_mutex);
                if (fail_index < 0 || i < fail_index) {
                    fail_index = i;
                    fail_message = e.what();
                }
                abort.store(true);
            }
        }
    };
    const int workers = static_cast<int>(std::min<long>(config.workers, n));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (fail_index >= 0) throw SolverFault("trajectory " + std::to_string(fail_index) + ": " + fail_message);

    EnsembleRecord out;
    for (const auto& o : model.observables) out.names.push_back(o.name);
    out.t = config.t_grid;
    const std::size_t n_obs = out.names.size();
    const std::size_t n_t = out.t.size();
    out.mean.assign(n_obs, std::vector<double>(n_t, 0.0));
    out.stderr_.assign(n_obs, std::vector<double>(n_t, kNaN));
    for (std::size_t o = 0; o < n_obs; ++o) {
        for (std::size_t j = 0; j < n_t; ++j) {
            CompensatedSum s;
            for (long i = 0; i < n; ++i) s.add(records[i].values[o][j]);
            const double mean = s.value() / n;
            out.mean[o][j] = mean;
            if (n > 1) {
                CompensatedSum v;
                for (long i = 0; i < n; ++i) {
                    const double d = records[i].values[o][j] - mean;
                    v.add(d * d);
                }
                out.stderr_[o][j] = std::sqrt(v.value() / (n - 1) / n);
            }
        }
    }
    CompensatedSum field;
    for (long i = 0; i < n; ++i) {
        const auto& r = records[i];
        out.wall_seconds.push_back(r.wall_seconds);
        out.steps.push_back(r.steps);
        out.jumps.push_back(r.jumps);
        out.total_steps += r.steps;
        out.total_dt += r.dt_sum;
        out.max_amplitudes = std::max(out.max_amplitudes, r.max_amplitudes);
        out.invariant_checks += r.invariant_checks;
        field.add(r.displaced_field_mean);
        out.displaced_field_max = std::max(out.displaced_field_max, r.displaced_field_max);
        if (config.keep_series) out.series.push_back(r.values);
    }
    out.displaced_field_mean = field.value() / n;
    return out;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("loglog_slope: need two or more points");
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= x.size();
    my /= y.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = std::log(x[i]) - mx;
        sxy += dx * (std::log(y[i]) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

ScalingReport scaling_report(const std::function<ModelSpec(int)>& family, const std::vector<int>& ns,
                             const EnsembleConfig& config)
{
    if (ns.size() < 2) throw std::invalid_argument("scaling_report: need at least two values of N");
    for (std::size_t i = 1; i < ns.size(); ++i)
        if (ns[i] <= ns[i - 1]) throw std::invalid_argument("scaling_report: N list must be ascending");
    if (config.solver == Solver::oracle) throw std::invalid_argument("scaling_report: the oracle solver has no trajectories");

    ScalingReport report;
    std::vector<double> xs, step_cost, total, dts, memory;
    for (int n : ns) {
        const auto model = assemble(family(n));
        const auto rec = run_ensemble(model, config);
        ScalingRow row;
        row.n = n;
        double wall = 0;
        for (double w : rec.wall_seconds) wall += w;
        row.steps = rec.total_steps;
        row.dt_mean = rec.total_steps ? rec.total_dt / rec.total_steps : 0.0;
        row.step_seconds = rec.total_steps ? wall / rec.total_steps : 0.0;
        row.trajectory_seconds = wall / rec.wall_seconds.size();
        row.amplitudes = static_cast<double>(rec.max_amplitudes);
        report.rows.push_back(row);
        xs.push_back(n);
        step_cost.push_back(row.step_seconds);
        total.push_back(row.trajectory_seconds);
        dts.push_back(row.dt_mean);
        memory.push_back(row.amplitudes);
    }
    report.step_cost_slope = loglog_slope(xs, step_cost);
    report.total_time_slope = loglog_slope(xs, total);
    report.dt_slope = loglog_slope(xs, dts);
    report.memory_slope = loglog_slope(xs, memory);
    report.dt_inverse_n = std::abs(report.dt_slope + 1.0) <= 0.3;
    return report;
}

} // namespace pstraj
