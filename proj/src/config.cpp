#include "pestctl/config.hpp"

#include "pestctl/csv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace pestctl {

namespace {

const char* kModelParamNames[] = {"r",  "K",     "alpha", "phi",   "a",     "m1",  "m2",
                                  "lambda", "d", "delta", "gamma", "sigma", "eta", "omega"};

// phi has no published value; 0.5 is this tool's choice.
bool is_tool_default_key(const std::string& key) {
    static const char* keys[] = {"phi", "t0", "tf", "h", "relaxation", "tol",
                                 "max_iter", "output_dir"};
    return std::find_if(std::begin(keys), std::end(keys),
                        [&](const char* k) { return key == k; }) != std::end(keys);
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& text, int line) {
    char* end = nullptr;
    const std::string t = trim(text);
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size() || !std::isfinite(v)) {
        throw ParseError("line " + std::to_string(line) + ": value of '" + key +
                         "' is not a finite number: '" + t + "'");
    }
    return v;
}

std::size_t parse_count(const std::string& key, const std::string& text, int line) {
    const double v = parse_double(key, text, line);
    if (v < 0.0 || v != std::floor(v) || v > 1e9) {
        throw ParseError("line " + std::to_string(line) + ": value of '" + key +
                         "' is not a nonnegative integer");
    }
    return static_cast<std::size_t>(v);
}

std::vector<double> parse_list(const std::string& key, const std::string& text, int line) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(key, item, line));
    if (out.empty()) {
        throw ParseError("line " + std::to_string(line) + ": '" + key + "' needs at least one value");
    }
    return out;
}

void assign(ScenarioConfig& cfg, const std::string& key, const std::string& value, int line,
            ValueSource source) {
    if (is_model_parameter(key)) {
        set_model_parameter(cfg.params, key, parse_double(key, value, line));
    } else if (key == "X0") {
        cfg.initial_state.X = parse_double(key, value, line);
    } else if (key == "S0") {
        cfg.initial_state.S = parse_double(key, value, line);
    } else if (key == "I0") {
        cfg.initial_state.I = parse_double(key, value, line);
    } else if (key == "A0") {
        cfg.initial_state.A = parse_double(key, value, line);
    } else if (key == "t0") {
        cfg.t0 = parse_double(key, value, line);
    } else if (key == "tf") {
        cfg.tf = parse_double(key, value, line);
    } else if (key == "h") {
        cfg.h = parse_double(key, value, line);
    } else if (key == "P1") {
        cfg.weights.P1 = parse_double(key, value, line);
    } else if (key == "P2") {
        cfg.weights.P2 = parse_double(key, value, line);
    } else if (key == "P3") {
        cfg.weights.P3 = parse_double(key, value, line);
    } else if (key == "Q") {
        cfg.weights.Q = parse_double(key, value, line);
    } else if (key == "R") {
        cfg.weights.R = parse_double(key, value, line);
    } else if (key == "relaxation") {
        cfg.relaxation = parse_double(key, value, line);
    } else if (key == "tol") {
        cfg.tol = parse_double(key, value, line);
    } else if (key == "max_iter") {
        cfg.max_iter = parse_count(key, value, line);
    } else if (key == "scan_param") {
        cfg.scan.present = true;
        cfg.scan.parameter = trim(value);
    } else if (key == "scan_lo") {
        cfg.scan.present = true;
        cfg.scan.lo = parse_double(key, value, line);
    } else if (key == "scan_hi") {
        cfg.scan.present = true;
        cfg.scan.hi = parse_double(key, value, line);
    } else if (key == "scan_n") {
        cfg.scan.present = true;
        cfg.scan.n = parse_count(key, value, line);
    } else if (key == "scan_values") {
        cfg.scan.present = true;
        cfg.scan.values = parse_list(key, value, line);
    } else if (key == "output_dir") {
        cfg.output_dir = trim(value);
    } else {
        throw UnknownKey("line " + std::to_string(line) + ": unknown key '" + key + "'");
    }
    cfg.sources[key] = source;
}

}  // namespace

const char* to_string(ValueSource s) {
    switch (s) {
        case ValueSource::ModelDefault: return "model-default";
        case ValueSource::ToolDefault: return "tool-default";
        case ValueSource::ConfigFile: return "config";
        case ValueSource::Override: return "override";
    }
    return "?";
}

bool is_model_parameter(const std::string& name) {
    return std::find_if(std::begin(kModelParamNames), std::end(kModelParamNames),
                        [&](const char* k) { return name == k; }) !=
           std::end(kModelParamNames);
}

bool set_model_parameter(ModelParams& p, const std::string& name, double value) {
    if (name == "r") p.r = value;
    else if (name == "K") p.K = value;
    else if (name == "alpha") p.alpha = value;
    else if (name == "phi") p.phi = value;
    else if (name == "a") p.a = value;
    else if (name == "m1") p.m1 = value;
    else if (name == "m2") p.m2 = value;
    else if (name == "lambda") p.lambda = value;
    else if (name == "d") p.d = value;
    else if (name == "delta") p.delta = value;
    else if (name == "gamma") p.gamma = value;
    else if (name == "sigma") p.sigma = value;
    else if (name == "eta") p.eta = value;
    else if (name == "omega") p.omega = value;
    else return false;
    return true;
}

double get_model_parameter(const ModelParams& p, const std::string& name) {
    if (name == "r") return p.r;
    if (name == "K") return p.K;
    if (name == "alpha") return p.alpha;
    if (name == "phi") return p.phi;
    if (name == "a") return p.a;
    if (name == "m1") return p.m1;
    if (name == "m2") return p.m2;
    if (name == "lambda") return p.lambda;
    if (name == "d") return p.d;
    if (name == "delta") return p.delta;
    if (name == "gamma") return p.gamma;
    if (name == "sigma") return p.sigma;
    if (name == "eta") return p.eta;
    if (name == "omega") return p.omega;
    throw UnknownKey("unknown model parameter '" + name + "'");
}

std::vector<double> ScanSpec::grid() const {
    if (!values.empty()) return values;
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(n == 1 ? lo
                             : lo + (hi - lo) * static_cast<double>(i) /
                                        static_cast<double>(n - 1));
    }
    return out;
}

TimeGrid ScenarioConfig::grid(bool optimal_control_horizon) const {
    double end = tf;
    const auto it = sources.find("tf");
    const bool tf_user_set =
        it != sources.end() &&
        (it->second == ValueSource::ConfigFile || it->second == ValueSource::Override);
    if (optimal_control_horizon && !tf_user_set) end = 60.0;
    const auto steps = static_cast<std::size_t>(std::llround((end - t0) / h));
    return TimeGrid{t0, end, std::max<std::size_t>(1, steps)};
}

void ScenarioConfig::validate() const {
    try {
        params.validate();
        weights.validate();
    } catch (const std::invalid_argument& e) {
        throw InvariantViolation(e.what());
    }
    if (!initial_state.nonnegative() || !initial_state.finite()) {
        throw InvariantViolation("initial state must be finite and nonnegative");
    }
    if (!(tf > t0)) throw InvariantViolation("tf must exceed t0");
    if (!(h > 0.0) || h > tf - t0) throw InvariantViolation("h must lie in (0, tf - t0]");
    if (!(relaxation > 0.0 && relaxation <= 1.0)) {
        throw InvariantViolation("relaxation must lie in (0, 1]");
    }
    if (!(tol > 0.0)) throw InvariantViolation("tol must be positive");
    if (max_iter < 1) throw InvariantViolation("max_iter must be at least 1");
    if (scan.present) {
        if (scan.parameter.empty()) {
            throw InvariantViolation("scan requires scan_param");
        }
        if (!is_model_parameter(scan.parameter)) {
            throw InvariantViolation("scan_param '" + scan.parameter +
                                     "' is not a model parameter");
        }
        if (scan.values.empty()) {
            if (scan.n < 2) throw InvariantViolation("scan_n must be at least 2");
            if (!(scan.lo < scan.hi)) throw InvariantViolation("scan needs scan_lo < scan_hi");
            if (!(scan.lo > 0.0)) throw InvariantViolation("scan bounds must be positive");
        } else {
            for (double v : scan.values) {
                if (!(v > 0.0)) throw InvariantViolation("scan values must be positive");
            }
        }
    }
}

std::vector<std::string> ScenarioConfig::echo_lines() const {
    auto source_of = [&](const std::string& key) -> std::string {
        const auto it = sources.find(key);
        if (it != sources.end()) return to_string(it->second);
        return is_tool_default_key(key) ? to_string(ValueSource::ToolDefault)
                                        : to_string(ValueSource::ModelDefault);
    };
    std::vector<std::string> lines;
    auto push = [&](const std::string& key, const std::string& value) {
        std::string note;
        if (key == "phi" && source_of(key) == to_string(ValueSource::ToolDefault)) {
            note = "  (no published value; artifact choice)";
        }
        lines.push_back(key + " = " + value + "  [" + source_of(key) + "]" + note);
    };
    for (const char* name : kModelParamNames) {
        push(name, fmt17(get_model_parameter(params, name)));
    }
    push("X0", fmt17(initial_state.X));
    push("S0", fmt17(initial_state.S));
    push("I0", fmt17(initial_state.I));
    push("A0", fmt17(initial_state.A));
    push("t0", fmt17(t0));
    push("tf", fmt17(tf));
    push("h", fmt17(h));
    push("P1", fmt17(weights.P1));
    push("P2", fmt17(weights.P2));
    push("P3", fmt17(weights.P3));
    push("Q", fmt17(weights.Q));
    push("R", fmt17(weights.R));
    push("relaxation", fmt17(relaxation));
    push("tol", fmt17(tol));
    push("max_iter", std::to_string(max_iter));
    if (scan.present) {
        lines.push_back("scan_param = " + scan.parameter + "  [" + source_of("scan_param") + "]");
        if (!scan.values.empty()) {
            std::string vals;
            for (std::size_t i = 0; i < scan.values.size(); ++i) {
                if (i) vals += ", ";
                vals += fmt17(scan.values[i]);
            }
            lines.push_back("scan_values = " + vals + "  [" + source_of("scan_values") + "]");
        } else {
            lines.push_back("scan_lo = " + fmt17(scan.lo) + "  [" + source_of("scan_lo") + "]");
            lines.push_back("scan_hi = " + fmt17(scan.hi) + "  [" + source_of("scan_hi") + "]");
            lines.push_back("scan_n = " + std::to_string(scan.n) + "  [" + source_of("scan_n") +
                            "]");
        }
    }
    return lines;
}

ScenarioConfig default_config() {
    return ScenarioConfig{};
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file: " + path);
    ScenarioConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw ParseError("line " + std::to_string(lineno) + ": expected 'key = value'");
        }
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty()) {
            throw ParseError("line " + std::to_string(lineno) + ": empty key");
        }
        assign(cfg, key, value, lineno, ValueSource::ConfigFile);
    }
    cfg.validate();
    return cfg;
}

void apply_override(ScenarioConfig& cfg, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) {
        throw ParseError("--set expects key=value, got '" + assignment + "'");
    }
    const std::string key = trim(assignment.substr(0, eq));
    const std::string value = trim(assignment.substr(eq + 1));
    assign(cfg, key, value, 0, ValueSource::Override);
    cfg.overrides.emplace_back(key, value);
}

}  // namespace pestctl
