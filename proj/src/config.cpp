#include "pstraj/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>
#include <yaml-cpp/yaml.h>

#include "pstraj/u1_sector.hpp"

#ifndef PSTRAJ_VERSION
#define PSTRAJ_VERSION "unknown"
#endif

namespace pstraj {

namespace {

int line_of(const YAML::Node& node)
{
    return node.IsDefined() && node.Mark().line >= 0 ? node.Mark().line + 1 : 0;
}

std::string join(const std::string& path, const std::string& key)
{
    return path.empty() ? key : path + "." + key;
}

// A mapping node with a strict key set.
class Section {
public:
    Section(YAML::Node node, std::string path, std::set<std::string> allowed, int parent_line)
        : node_(std::move(node)), path_(std::move(path))
    {
        if (!node_.IsMap()) throw ConfigError(path_, node_.IsDefined() ? line_of(node_) : parent_line, "expected a mapping");
        for (const auto& kv : node_) {
            const auto key = kv.first.as<std::string>();
            if (!allowed.count(key)) throw ConfigError(join(path_, key), line_of(kv.first), "unknown key");
        }
    }

    bool has(const std::string& key) const { return static_cast<bool>(node_[key]); }
    YAML::Node get(const std::string& key) const { return node_[key]; }
    std::string path(const std::string& key) const { return join(path_, key); }
    int line() const { return line_of(node_); }
    int line(const std::string& key) const { return has(key) ? line_of(node_[key]) : line(); }

    template <typename T>
    T scalar(const std::string& key, const char* what) const
    {
        const auto n = node_[key];
        if (!n.IsScalar()) throw ConfigError(path(key), line_of(n), std::string("expected ") + what);
        try {
            return n.as<T>();
        } catch (const YAML::Exception&) {
            throw ConfigError(path(key), line_of(n), std::string("expected ") + what);
        }
    }

    double number(const std::string& key, double fallback) const
    {
        if (!has(key)) return fallback;
        const double v = scalar<double>(key, "a number");
        if (!std::isfinite(v)) throw ConfigError(path(key), line(key), "must be finite");
        return v;
    }
    double rate(const std::string& key, double fallback) const
    {
        const double v = number(key, fallback);
        if (v < 0) throw ConfigError(path(key), line(key), "rates must be >= 0");
        return v;
    }
    long integer(const std::string& key, long fallback, long min) const
    {
        if (!has(key)) return fallback;
        const long v = scalar<long>(key, "an integer");
        if (v < min) throw ConfigError(path(key), line(key), "must be >= " + std::to_string(min));
        return v;
    }
    bool flag(const std::string& key, bool fallback) const { return has(key) ? scalar<bool>(key, "true or false") : fallback; }
    std::string text(const std::string& key, const std::string& fallback) const
    {
        return has(key) ? scalar<std::string>(key, "a string") : fallback;
    }

private:
    YAML::Node node_;
    std::string path_;
};

cplx complex_value(const YAML::Node& n, const std::string& path)
{
    try {
        if (n.IsScalar()) return cplx(n.as<double>(), 0.0);
        if (n.IsSequence() && n.size() == 2) return cplx(n[0].as<double>(), n[1].as<double>());
    } catch (const YAML::Exception&) {
    }
    throw ConfigError(path, line_of(n), "expected a number or [re, im]");
}

Matrix matrix_value(const YAML::Node& n, const std::string& path, int d)
{
    if (!n.IsSequence() || static_cast<int>(n.size()) != d) throw ConfigError(path, line_of(n), "expected " + std::to_string(d) + " rows");
    Matrix m(d, d);
    for (int r = 0; r < d; ++r) {
        const auto row = n[r];
        if (!row.IsSequence() || static_cast<int>(row.size()) != d)
            throw ConfigError(path, line_of(row), "expected " + std::to_string(d) + " entries per row");
        for (int c = 0; c < d; ++c) m(r, c) = complex_value(row[c], path);
    }
    return m;
}

// [{p: creation power, q: annihilation power, c: coefficient}, ...]
CavityExpr cavity_value(const YAML::Node& n, const std::string& path)
{
    if (!n.IsSequence()) throw ConfigError(path, line_of(n), "expected a list of {p, q, c} terms");
    CavityExpr e;
    for (const auto& item : n) {
        Section t(item, path, {"p", "q", "c"}, line_of(n));
        const long p = t.integer("p", 0, 0);
        const long q = t.integer("q", 0, 0);
        if (!t.has("c")) throw ConfigError(t.path("c"), t.line(), "missing required key");
        e += CavityExpr::monomial(static_cast<int>(p), static_cast<int>(q), complex_value(t.get("c"), t.path("c")));
    }
    return e;
}

struct ParamRef {
    const char* key;
    double* value;
    bool is_rate;
};

void apply_params(const Section* params, const std::vector<ParamRef>& refs, RunConfig& out)
{
    for (const auto& r : refs) {
        if (params) *r.value = r.is_rate ? params->rate(r.key, *r.value) : params->number(r.key, *r.value);
        out.parameters.emplace_back(r.key, format_double(*r.value));
    }
}

std::set<std::string> keys_of(const std::vector<ParamRef>& refs, std::set<std::string> extra = {})
{
    for (const auto& r : refs) extra.insert(r.key);
    return extra;
}

void parse_builtin(const Section& m, Solver solver, RunConfig& out)
{
    const std::string name = m.text("builtin", "");
    const YAML::Node params_node = m.get("params");
    const long n = m.integer("n", -1, 1);
    if (n < 0) throw ConfigError(m.path("n"), m.line(), "missing required key");
    const int nc_default = default_truncation(static_cast<int>(n), solver == Solver::hybrid ? TruncationPolicy::hybrid
                                                                                            : TruncationPolicy::jump);
    const int nc = static_cast<int>(m.integer("cavity_truncation", nc_default, 1));
    out.model_name = name;

    const auto section = [&](const std::set<std::string>& allowed) -> std::optional<Section> {
        if (!params_node) return std::nullopt;
        return Section(params_node, m.path("params"), allowed, m.line("params"));
    };

    if (name == "dicke") {
        DickeParams p;
        const std::vector<ParamRef> refs{{"omega0", &p.omega0, false}, {"omegac", &p.omegac, false},
                                         {"g", &p.g, false},           {"kappa", &p.kappa, true},
                                         {"gamma_down", &p.gamma_down, true}, {"gamma_phi", &p.gamma_phi, true}};
        const auto s = section(keys_of(refs));
        apply_params(s ? &*s : nullptr, refs, out);
        out.model = dicke(static_cast<int>(n), p, nc);
    } else if (name == "tavis_cummings") {
        TavisCummingsParams p;
        const std::vector<ParamRef> refs{{"omega0", &p.omega0, false}, {"omegac", &p.omegac, false},
                                         {"g", &p.g, false},           {"kappa", &p.kappa, true},
                                         {"gamma_down", &p.gamma_down, true}, {"gamma_phi", &p.gamma_phi, true}};
        const auto s = section(keys_of(refs));
        apply_params(s ? &*s : nullptr, refs, out);
        out.model = tavis_cummings(static_cast<int>(n), p, nc);
    } else if (name == "three_level") {
        ThreeLevelParams p;
        const std::vector<ParamRef> refs{{"omegae", &p.omegae, false}, {"omegac", &p.omegac, false},
                                         {"g", &p.g, false},           {"kappa", &p.kappa, true},
                                         {"gamma_up", &p.gamma_up, true}, {"gamma_down", &p.gamma_down, true}};
        const auto s = section(keys_of(refs, {"rabi"}));
        apply_params(s ? &*s : nullptr, refs, out);
        if (s && s->has("rabi")) p.rabi = complex_value(s->get("rabi"), s->path("rabi"));
        out.parameters.emplace_back("rabi", format_double(p.rabi.real()) + (p.rabi.imag() != 0 ? "+" + format_double(p.rabi.imag()) + "i" : ""));
        out.model = three_level(static_cast<int>(n), p, nc);
    } else {
        throw ConfigError(m.path("builtin"), m.line("builtin"), "unknown builtin '" + name + "' (expected dicke, tavis_cummings or three_level)");
    }
    out.parameters.emplace_back("n", std::to_string(n));
    out.parameters.emplace_back("cavity_truncation", std::to_string(nc));
    out.model.initial_species = static_cast<int>(m.integer("initial_species", out.model.initial_species, 1));
    out.model.initial_photons = static_cast<int>(m.integer("initial_photons", out.model.initial_photons, 0));
}

void parse_inline(const Section& outer, Solver solver, RunConfig& out)
{
    const Section m(outer.get("inline"), outer.path("inline"),
                    {"name", "n", "d", "emitter_h", "cavity_h", "couplings", "individual", "collective", "cavity_truncation",
                     "initial_species", "initial_photons"},
                    outer.line("inline"));
    ModelSpec s;
    s.name = m.text("name", "inline");
    const long n = m.integer("n", -1, 1);
    if (n < 0) throw ConfigError(m.path("n"), m.line(), "missing required key");
    s.n = static_cast<int>(n);
    s.d = static_cast<int>(m.integer("d", 2, 2));
    if (s.d > 5) throw ConfigError(m.path("d"), m.line("d"), "must be <= 5");
    if (m.has("emitter_h")) s.emitter_h = matrix_value(m.get("emitter_h"), m.path("emitter_h"), s.d);
    if (m.has("cavity_h")) s.cavity_h = cavity_value(m.get("cavity_h"), m.path("cavity_h"));
    if (m.has("couplings")) {
        const auto list = m.get("couplings");
        if (!list.IsSequence()) throw ConfigError(m.path("couplings"), m.line("couplings"), "expected a list");
        for (const auto& item : list) {
            Section c(item, m.path("couplings"), {"x", "cavity"}, m.line("couplings"));
            if (!c.has("x") || !c.has("cavity")) throw ConfigError(c.path("x"), c.line(), "coupling needs x and cavity");
            s.couplings.push_back(Coupling{matrix_value(c.get("x"), c.path("x"), s.d), cavity_value(c.get("cavity"), c.path("cavity"))});
        }
    }
    if (m.has("individual")) {
        const auto list = m.get("individual");
        if (!list.IsSequence()) throw ConfigError(m.path("individual"), m.line("individual"), "expected a list");
        for (const auto& item : list) {
            Section c(item, m.path("individual"), {"label", "op", "rate"}, m.line("individual"));
            if (!c.has("op")) throw ConfigError(c.path("op"), c.line(), "missing required key");
            const double rate = c.rate("rate", 1.0);
            s.individual.push_back(Dissipator{c.text("label", "individual"), std::sqrt(rate) * matrix_value(c.get("op"), c.path("op"), s.d)});
        }
    }
    if (m.has("collective")) {
        const auto list = m.get("collective");
        if (!list.IsSequence()) throw ConfigError(m.path("collective"), m.line("collective"), "expected a list");
        for (const auto& item : list) {
            Section c(item, m.path("collective"), {"label", "op", "rate"}, m.line("collective"));
            if (!c.has("op")) throw ConfigError(c.path("op"), c.line(), "missing required key");
            const double rate = c.rate("rate", 1.0);
            s.collective.push_back(CavityDissipator{c.text("label", "collective"), std::sqrt(rate) * cavity_value(c.get("op"), c.path("op"))});
        }
    }
    const int nc_default = default_truncation(s.n, solver == Solver::hybrid ? TruncationPolicy::hybrid : TruncationPolicy::jump);
    s.cavity_truncation = static_cast<int>(m.integer("cavity_truncation", nc_default, 1));
    s.initial_species = static_cast<int>(m.integer("initial_species", 1, 1));
    s.initial_photons = static_cast<int>(m.integer("initial_photons", 0, 0));
    if (s.initial_species > s.d) throw ConfigError(m.path("initial_species"), m.line("initial_species"), "must be <= d");

    // Shape and finiteness errors surface here, on a small copy.
    try {
        assemble(with_size(s, std::min(s.n, 2), std::min(s.cavity_truncation, 4)));
    } catch (const ModelError& e) {
        throw ConfigError(outer.path("inline"), outer.line("inline"), e.what());
    }
    out.model_name = "inline";
    out.model = std::move(s);
    out.parameters.emplace_back("n", std::to_string(out.model.n));
    out.parameters.emplace_back("d", std::to_string(out.model.d));
    out.parameters.emplace_back("cavity_truncation", std::to_string(out.model.cavity_truncation));
}

std::vector<double> parse_grid(const Section& e)
{
    if (e.has("times")) {
        if (e.has("t_end") || e.has("points")) throw ConfigError(e.path("times"), e.line("times"), "give either times or t_end/points");
        const auto list = e.get("times");
        if (!list.IsSequence() || list.size() == 0) throw ConfigError(e.path("times"), e.line("times"), "expected a non-empty list");
        std::vector<double> t;
        for (const auto& v : list) {
            try {
                t.push_back(v.as<double>());
            } catch (const YAML::Exception&) {
                throw ConfigError(e.path("times"), line_of(v), "expected a number");
            }
            if (t.back() < 0 || (t.size() > 1 && t.back() <= t[t.size() - 2]))
                throw ConfigError(e.path("times"), line_of(v), "times must be >= 0 and strictly ascending");
        }
        return t;
    }
    if (!e.has("t_end")) throw ConfigError(e.path("t_end"), e.line(), "missing required key (or give times)");
    const double t_end = e.number("t_end", 0.0);
    if (t_end <= 0) throw ConfigError(e.path("t_end"), e.line("t_end"), "must be > 0");
    const long points = e.integer("points", 101, 2);
    std::vector<double> t(points);
    for (long i = 0; i < points; ++i) t[i] = t_end * static_cast<double>(i) / static_cast<double>(points - 1);
    return t;
}

} // namespace

ConfigError::ConfigError(const std::string& key, int line, const std::string& message)
    : std::runtime_error((key.empty() ? std::string("config") : key) + (line > 0 ? " (line " + std::to_string(line) + ")" : "") +
                         ": " + message),
      key_(key), line_(line)
{
}

std::vector<std::string> observable_names(const ModelSpec& spec)
{
    std::vector<std::string> names{"n_photon"};
    if (spec.d == 2) {
        names.push_back("Jz");
        names.push_back("J2");
    } else {
        for (int s = 1; s <= spec.d; ++s) names.push_back("pop_" + std::to_string(s));
    }
    return names;
}

RunConfig parse_config(const std::string& text, std::optional<Solver> solver_override)
{
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError("", e.mark.line + 1, e.msg);
    }
    const Section top(root, "", {"model", "solver", "ensemble", "controls", "hybrid", "oracle", "observables", "output"}, 1);
    RunConfig out;
    out.source = text;

    Solver solver = Solver::jump;
    if (top.has("solver")) {
        try {
            solver = parse_solver(top.text("solver", "jump"));
        } catch (const std::invalid_argument& e) {
            throw ConfigError("solver", top.line("solver"), e.what());
        }
    }
    if (solver_override) solver = *solver_override;
    out.ensemble.solver = solver;

    if (!top.has("model")) throw ConfigError("model", 0, "missing required key");
    const Section model(top.get("model"), "model",
                        {"builtin", "n", "cavity_truncation", "params", "initial_species", "initial_photons", "inline"},
                        top.line("model"));
    if (model.has("builtin") == model.has("inline")) throw ConfigError("model", model.line(), "give exactly one of builtin or inline");
    if (model.has("builtin")) parse_builtin(model, solver, out);
    else parse_inline(model, solver, out);
    const auto& spec = out.model;
    if (spec.initial_species > spec.d) throw ConfigError("model.initial_species", model.line("initial_species"), "must be <= d");
    if (spec.initial_photons >= spec.cavity_truncation)
        throw ConfigError("model.initial_photons", model.line("initial_photons"), "must lie inside the cavity truncation");

    if (solver == Solver::u1) {
        try {
            validate_u1(assemble(with_size(spec, std::min(spec.n, 4), std::min(spec.cavity_truncation, 6))));
        } catch (const ModelError& e) {
            throw ConfigError("solver", top.line("solver"), e.what());
        }
    }
    if (solver == Solver::hybrid && spec.collective.size() > 1)
        throw ConfigError("solver", top.line("solver"), "hybrid solver supports a single cavity dissipator");

    if (!top.has("ensemble")) throw ConfigError("ensemble", 0, "missing required key");
    const Section ens(top.get("ensemble"), "ensemble", {"trajectories", "seed", "workers", "t_end", "points", "times"}, top.line("ensemble"));
    out.ensemble.n_trajectories = ens.integer("trajectories", 100, 1);
    if (ens.has("seed")) out.ensemble.master_seed = ens.scalar<std::uint64_t>("seed", "a non-negative 64-bit integer");
    out.ensemble.workers = static_cast<int>(ens.integer("workers", 1, 1));
    out.ensemble.t_grid = parse_grid(ens);

    if (top.has("controls")) {
        const Section c(top.get("controls"), "controls", {"p_max", "dt_max", "rk_safety", "waiting_time", "norm_probability"},
                        top.line("controls"));
        auto& sc = out.ensemble.controls;
        sc.p_max = c.number("p_max", sc.p_max);
        if (!(sc.p_max > 0 && sc.p_max < 1)) throw ConfigError(c.path("p_max"), c.line("p_max"), "must lie in (0, 1)");
        sc.dt_max = c.number("dt_max", sc.dt_max);
        sc.rk_safety = c.number("rk_safety", sc.rk_safety);
        if (sc.rk_safety <= 0) throw ConfigError(c.path("rk_safety"), c.line("rk_safety"), "must be > 0");
        sc.waiting_time = c.flag("waiting_time", sc.waiting_time);
        sc.norm_probability = c.flag("norm_probability", sc.norm_probability);
    }
    out.ensemble.hybrid.step = out.ensemble.controls;
    if (top.has("hybrid")) {
        const Section h(top.get("hybrid"), "hybrid", {"ceiling", "displacement", "noise_margin"}, top.line("hybrid"));
        auto& hc = out.ensemble.hybrid;
        hc.ceiling = h.number("ceiling", hc.ceiling);
        if (hc.ceiling <= 0) throw ConfigError(h.path("ceiling"), h.line("ceiling"), "must be > 0");
        hc.noise_margin = h.number("noise_margin", hc.noise_margin);
        if (hc.noise_margin <= 0) throw ConfigError(h.path("noise_margin"), h.line("noise_margin"), "must be > 0");
        const auto mode = h.text("displacement", "continuous");
        if (mode != "continuous" && mode != "frozen")
            throw ConfigError(h.path("displacement"), h.line("displacement"), "expected continuous or frozen");
        hc.continuous = mode == "continuous";
    }
    if (top.has("oracle")) {
        const Section o(top.get("oracle"), "oracle", {"dt_max"}, top.line("oracle"));
        out.ensemble.master.dt_max = o.number("dt_max", 0.0);
    }
    if (top.has("observables")) {
        const auto list = top.get("observables");
        if (!list.IsSequence()) throw ConfigError("observables", top.line("observables"), "expected a list");
        const auto known = observable_names(spec);
        for (const auto& v : list) {
            const auto name = v.as<std::string>();
            if (std::find(known.begin(), known.end(), name) == known.end())
                throw ConfigError("observables", line_of(v), "unknown observable '" + name + "'");
            out.observables.push_back(name);
        }
    }
    if (top.has("output")) {
        const Section o(top.get("output"), "output", {"path"}, top.line("output"));
        out.output_path = o.text("path", "");
    }
    return out;
}

RunConfig load_config(const std::string& path, std::optional<Solver> solver)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), solver);
}

std::string format_double(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string csv_text(const EnsembleRecord& record, const std::vector<std::string>& order)
{
    std::vector<std::size_t> cols;
    if (order.empty()) {
        for (std::size_t i = 0; i < record.names.size(); ++i) cols.push_back(i);
    } else {
        for (const auto& name : order) {
            const auto it = std::find(record.names.begin(), record.names.end(), name);
            if (it == record.names.end()) throw std::invalid_argument("csv_text: unknown observable '" + name + "'");
            cols.push_back(static_cast<std::size_t>(it - record.names.begin()));
        }
    }
    std::string out = "t";
    for (auto c : cols) out += "," + record.names[c] + "_mean," + record.names[c] + "_stderr";
    out += "\n";
    for (std::size_t i = 0; i < record.t.size(); ++i) {
        out += format_double(record.t[i]);
        for (auto c : cols) out += "," + format_double(record.mean[c][i]) + "," + format_double(record.stderr_[c][i]);
        out += "\n";
    }
    return out;
}

namespace {

nlohmann::json resolved(const RunConfig& c)
{
    nlohmann::json j;
    j["model"]["name"] = c.model_name;
    for (const auto& [k, v] : c.parameters) j["model"]["parameters"][k] = v;
    j["model"]["initial_species"] = c.model.initial_species;
    j["model"]["initial_photons"] = c.model.initial_photons;
    const auto& e = c.ensemble;
    j["solver"] = solver_name(e.solver);
    j["ensemble"]["trajectories"] = e.n_trajectories;
    j["ensemble"]["seed"] = e.master_seed;
    j["ensemble"]["workers"] = e.workers;
    j["ensemble"]["times"] = e.t_grid;
    j["controls"]["p_max"] = e.controls.p_max;
    j["controls"]["dt_max"] = e.controls.dt_max;
    j["controls"]["rk_safety"] = e.controls.rk_safety;
    j["controls"]["waiting_time"] = e.controls.waiting_time;
    j["controls"]["norm_probability"] = e.controls.norm_probability;
    j["hybrid"]["ceiling"] = e.hybrid.ceiling;
    j["hybrid"]["displacement"] = e.hybrid.continuous ? "continuous" : "frozen";
    j["hybrid"]["noise_margin"] = e.hybrid.noise_margin;
    j["oracle"]["dt_max"] = e.master.dt_max;
    j["observables"] = c.observables;
    j["output"]["path"] = c.output_path;
    return j;
}

} // namespace

std::string sidecar_text(const RunConfig& config, const EnsembleRecord& record)
{
    nlohmann::json j;
    j["code_version"] = code_version();
    j["solver"] = solver_name(config.ensemble.solver);
    j["seed"] = config.ensemble.master_seed;
    j["config"] = resolved(config);
    j["config_source"] = config.source;
    j["trajectory_wall_seconds"] = record.wall_seconds;
    j["trajectory_steps"] = record.steps;
    j["trajectory_jumps"] = record.jumps;
    j["total_steps"] = record.total_steps;
    j["max_amplitudes"] = record.max_amplitudes;
    if (config.ensemble.solver == Solver::hybrid) {
        j["displaced_field_mean"] = record.displaced_field_mean;
        j["displaced_field_max"] = record.displaced_field_max;
    }
    if (config.ensemble.solver == Solver::u1) j["invariant_checks"] = record.invariant_checks;
    return j.dump(2) + "\n";
}

std::string scaling_csv(const ScalingReport& report)
{
    std::string out = "n,dt_mean,step_seconds,trajectory_seconds,amplitudes,steps\n";
    for (const auto& r : report.rows) {
        out += std::to_string(r.n) + "," + format_double(r.dt_mean) + "," + format_double(r.step_seconds) + "," +
               format_double(r.trajectory_seconds) + "," + format_double(r.amplitudes) + "," + std::to_string(r.steps) + "\n";
    }
    return out;
}

std::string scaling_json(const RunConfig& config, const ScalingReport& report)
{
    nlohmann::json j;
    j["code_version"] = code_version();
    j["config"] = resolved(config);
    j["slopes"]["step_cost"] = report.step_cost_slope;
    j["slopes"]["total_time"] = report.total_time_slope;
    j["slopes"]["dt"] = report.dt_slope;
    j["slopes"]["memory"] = report.memory_slope;
    j["dt_inverse_n"] = report.dt_inverse_n;
    for (const auto& r : report.rows) {
        j["rows"].push_back({{"n", r.n},
                             {"dt_mean", r.dt_mean},
                             {"step_seconds", r.step_seconds},
                             {"trajectory_seconds", r.trajectory_seconds},
                             {"amplitudes", r.amplitudes},
                             {"steps", r.steps}});
    }
    return j.dump(2) + "\n";
}

void write_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << text;
    out.close();
    if (!out) throw IoError("failed writing '" + path + "'");
}

const char* code_version() { return PSTRAJ_VERSION; }

} // namespace pstraj
