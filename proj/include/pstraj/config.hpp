#pragma once

// YAML run configuration and result files.
//
//   model:            builtin + overrides, or `inline` with a full model
//   solver:           jump | hybrid | u1 | oracle
//   ensemble:         trajectories, seed, workers, t_end + points or times
//   controls:         p_max, dt_max, rk_safety, waiting_time, norm_probability
//   hybrid:           ceiling, displacement (continuous | frozen), noise_margin
//   oracle:           dt_max
//   observables:      output column order (default: every observable)
//   output:           path

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pstraj/ensemble.hpp"

namespace pstraj {

class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& key, int line, const std::string& message);
    const std::string& key() const { return key_; }
    int line() const { return line_; }  // 1-based, 0 when unknown

private:
    std::string key_;
    int line_;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string model_name;  // builtin name or "inline"
    ModelSpec model;
    std::vector<std::pair<std::string, std::string>> parameters;  // resolved model parameters
    EnsembleConfig ensemble;
    std::vector<std::string> observables;
    std::string output_path;
    std::string source;  // configuration text as given
};

// Throws ConfigError naming the offending key and line. `solver` replaces
// the configured solver before validation.
RunConfig parse_config(const std::string& text, std::optional<Solver> solver = std::nullopt);
// Throws IoError when the file cannot be read.
RunConfig load_config(const std::string& path, std::optional<Solver> solver = std::nullopt);

// Observable names an assembled model of this spec will carry.
std::vector<std::string> observable_names(const ModelSpec& spec);

// Shortest round-trip decimal text, locale independent.
std::string format_double(double v);

// "t,<name>_mean,<name>_stderr,..." in `order`; empty order means every
// observable. Undefined stderr is written as "nan".
std::string csv_text(const EnsembleRecord& record, const std::vector<std::string>& order);

// JSON metadata: resolved configuration, solver, seed, code version and
// per-trajectory wall times.
std::string sidecar_text(const RunConfig& config, const EnsembleRecord& record);

std::string scaling_csv(const ScalingReport& report);
std::string scaling_json(const RunConfig& config, const ScalingReport& report);

// Throws IoError.
void write_file(const std::string& path, const std::string& text);

const char* code_version();

} // namespace pstraj
