#pragma once

#include "pestctl/control.hpp"

#include <map>
#include <string>
#include <vector>

namespace pestctl {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : ConfigError {
    using ConfigError::ConfigError;
};

struct UnknownKey : ConfigError {
    using ConfigError::ConfigError;
};

struct InvariantViolation : ConfigError {
    using ConfigError::ConfigError;
};

/// Where a configuration value came from, echoed into every output header.
/// "model" defaults are the published parameter set of this system;
/// "tool" defaults (phi, grid, relaxation, tolerances) are artifact choices.
enum class ValueSource { ModelDefault, ToolDefault, ConfigFile, Override };

const char* to_string(ValueSource s);

struct ScanSpec {
    bool present = false;
    std::string parameter;        // model parameter name, e.g. "alpha"
    double lo = 0.0;
    double hi = 0.0;
    std::size_t n = 0;
    std::vector<double> values;   // explicit list; overrides lo/hi/n

    std::vector<double> grid() const;
};

struct ScenarioConfig {
    ModelParams params;
    State initial_state{0.2, 0.07, 0.05, 0.5};
    double t0 = 0.0;
    double tf = 600.0;
    double h = 0.05;
    ObjectiveWeights weights;
    double relaxation = 0.5;
    double tol = 1e-3;
    std::size_t max_iter = 200;
    ScanSpec scan;
    std::string output_dir = ".";
    std::vector<std::pair<std::string, std::string>> overrides;
    std::map<std::string, ValueSource> sources;  // key -> provenance

    /// Integration grid; optimal-control runs default to a 60-day horizon
    /// unless tf was set explicitly.
    TimeGrid grid(bool optimal_control_horizon = false) const;

    void validate() const;

    /// Provenance-annotated listing of every setting, one line per key.
    std::vector<std::string> echo_lines() const;
};

/// Parse the flat "key = value" format ('#' starts a comment). Unknown keys,
/// malformed lines and invariant violations raise the errors above.
ScenarioConfig load_config(const std::string& path);

/// Start from pure defaults (no file).
ScenarioConfig default_config();

/// Apply one "key=value" override (the CLI --set flag).
void apply_override(ScenarioConfig& cfg, const std::string& assignment);

/// Set one model parameter by name; false if the name is unknown.
bool set_model_parameter(ModelParams& p, const std::string& name, double value);

/// Read one model parameter by name.
double get_model_parameter(const ModelParams& p, const std::string& name);

bool is_model_parameter(const std::string& name);

}  // namespace pestctl
