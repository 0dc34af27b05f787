#include <doctest.h>

#include <cmath>
#include <limits>

#include "pstraj/config.hpp"

using namespace pstraj;

namespace {

const char* kDicke = R"(model:
  builtin: dicke
  n: 4
  cavity_truncation: 20
  params:
    omega0: 0.5
    omegac: 1.0
    g: 0.9
    kappa: 1.0
    gamma_down: 0.2
    gamma_phi: 0.1
solver: jump
ensemble:
  trajectories: 10
  seed: 7
  t_end: 1
  points: 6
)";

std::string with(std::string text, const std::string& from, const std::string& to)
{
    const auto at = text.find(from);
    REQUIRE(at != std::string::npos);
    return text.replace(at, from.size(), to);
}

ConfigError error_of(const std::string& text)
{
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e;
    }
    FAIL("expected a config error");
    return ConfigError("", 0, "");
}

} // namespace

TEST_CASE("builtin dicke config")
{
    const auto c = parse_config(kDicke);
    CHECK(c.model_name == "dicke");
    CHECK(c.model.n == 4);
    CHECK(c.model.cavity_truncation == 20);
    CHECK(c.ensemble.n_trajectories == 10);
    CHECK(c.ensemble.master_seed == 7);
    CHECK(c.ensemble.t_grid == std::vector<double>{0, 0.2, 0.4, 0.6, 0.8, 1});
    CHECK(c.model.individual.size() == 2);
    CHECK(c.model.collective.size() == 1);
}

TEST_CASE("negative rate names the key")
{
    const auto e = error_of(with(kDicke, "gamma_down: 0.2", "gamma_down: -0.1"));
    CHECK(e.key() == "model.params.gamma_down");
    CHECK(e.line() == 10);
}

TEST_CASE("u1 on dicke is rejected")
{
    const auto e = error_of(with(kDicke, "solver: jump", "solver: u1"));
    CHECK(e.key() == "solver");
    CHECK(std::string(e.what()).find("model lacks weak U(1) symmetry") != std::string::npos);
    CHECK_NOTHROW(parse_config(with(with(kDicke, "solver: jump", "solver: u1"), "builtin: dicke", "builtin: tavis_cummings")));
}

TEST_CASE("strict schema")
{
    auto e = error_of(with(kDicke, "  seed: 7", "  seed: 7\n  colour: red"));
    CHECK(e.key() == "ensemble.colour");
    CHECK(e.line() == 16);
    e = error_of(with(kDicke, "solver: jump", "solver: euler"));
    CHECK(e.key() == "solver");
    e = error_of(with(kDicke, "  n: 4\n", ""));
    CHECK(e.key() == "model.n");
    e = error_of(with(kDicke, "  n: 4", "  n: 0"));
    CHECK(e.key() == "model.n");
    e = error_of(with(kDicke, "  builtin: dicke", "  builtin: rabi"));
    CHECK(e.key() == "model.builtin");
    e = error_of(with(kDicke, "    g: 0.9", "    g: strong"));
    CHECK(e.key() == "model.params.g");
    e = error_of(std::string(kDicke) + "observables: [n_photon, pop_1]\n");
    CHECK(e.key() == "observables");
    e = error_of("model: [1, 2\n");
    CHECK(e.line() >= 1);
}

TEST_CASE("solver override is validated")
{
    CHECK(parse_config(kDicke, Solver::hybrid).ensemble.solver == Solver::hybrid);
    CHECK_THROWS_AS(parse_config(kDicke, Solver::u1), ConfigError);
    const auto text = with(kDicke, "  cavity_truncation: 20\n", "");
    CHECK(parse_config(text, Solver::hybrid).model.cavity_truncation == 6);
}

TEST_CASE("inline model")
{
    const char* text = R"(model:
  inline:
    n: 2
    d: 2
    emitter_h: [[-0.5, 0], [0, 0.5]]
    cavity_h: [{p: 1, q: 1, c: 1.0}]
    couplings:
      - x: [[0, 1], [1, 0]]
        cavity: [{p: 1, q: 0, c: 0.3}, {p: 0, q: 1, c: 0.3}]
    individual:
      - label: decay
        op: [[0, 1], [0, 0]]
        rate: 0.2
    collective:
      - label: loss
        op: [{p: 0, q: 1, c: 1.0}]
    cavity_truncation: 6
solver: oracle
ensemble:
  times: [0, 0.5, 1.0]
)";
    const auto c = parse_config(text);
    const auto m = assemble(c.model);
    CHECK(m.nc == 6);
    CHECK(m.collective.size() == 1);
    CHECK(c.ensemble.t_grid.size() == 3);
    const auto rec = run_ensemble(m, c.ensemble);
    CHECK(rec.mean[0][2] > 0);

    CHECK(error_of(with(text, "rate: 0.2", "rate: -1")).key() == "model.inline.individual.rate");
    CHECK(error_of(with(text, "times: [0, 0.5, 1.0]", "times: [0, 1.0, 0.5]")).key() == "ensemble.times");
}

TEST_CASE("csv text")
{
    EnsembleRecord r;
    r.names = {"n_photon", "Jz"};
    r.t = {0.0, 0.1};
    r.mean = {{0.0, 1.0 / 3.0}, {-1.0, -0.5}};
    r.stderr_ = {{std::numeric_limits<double>::quiet_NaN(), 1e-20}, {0.0, 0.25}};
    CHECK(csv_text(r, {}) == "t,n_photon_mean,n_photon_stderr,Jz_mean,Jz_stderr\n"
                             "0,0,nan,-1,0\n"
                             "0.1,0.3333333333333333,1e-20,-0.5,0.25\n");
    CHECK(csv_text(r, {"Jz"}) == "t,Jz_mean,Jz_stderr\n0,-1,0\n0.1,-0.5,0.25\n");
    CHECK_THROWS(csv_text(r, {"J2"}));
    CHECK(format_double(0.1 + 0.2) == "0.30000000000000004");
}

TEST_CASE("csv bytes are reproducible")
{
    auto c = parse_config(kDicke);
    const auto m = assemble(c.model);
    const auto a = csv_text(run_ensemble(m, c.ensemble), c.observables);
    c.ensemble.workers = 3;
    const auto b = csv_text(run_ensemble(m, c.ensemble), c.observables);
    CHECK(a == b);
}

TEST_CASE("sidecar carries the resolved run")
{
    const auto c = parse_config(kDicke);
    const auto rec = run_ensemble(assemble(c.model), c.ensemble);
    const auto side = sidecar_text(c, rec);
    for (const char* key : {"\"code_version\"", "\"seed\": 7", "\"solver\": \"jump\"", "\"trajectory_wall_seconds\"",
                            "\"gamma_down\": \"0.2\""})
        CHECK(side.find(key) != std::string::npos);
}
