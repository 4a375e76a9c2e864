#include "cel/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "cel/errors.hpp"
#include "cel/fields.hpp"
#include "cel/presets.hpp"

namespace cel {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

/// Drops a trailing comment that is not inside a string.
std::string strip_comment(const std::string& s) {
    bool in_str = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"' && (i == 0 || s[i - 1] != '\\')) in_str = !in_str;
        if (s[i] == '#' && !in_str) return s.substr(0, i);
    }
    return s;
}

double parse_real(const std::string& v) {
    const std::string s = trim(v);
    if (s.empty()) throw ConfigurationError("expected a number");
    errno = 0;
    char* end = nullptr;
    const double x = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(x))
        throw ConfigurationError("expected a number, got '" + s + "'");
    return x;
}

long long parse_integer(const std::string& v) {
    const std::string s = trim(v);
    errno = 0;
    char* end = nullptr;
    const long long x = std::strtoll(s.c_str(), &end, 10);
    if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE)
        throw ConfigurationError("expected an integer, got '" + s + "'");
    return x;
}

std::string parse_string(const std::string& v) {
    const std::string s = trim(v);
    if (s.size() < 2 || s.front() != '"' || s.back() != '"')
        throw ConfigurationError("expected a double-quoted string, got '" + s + "'");
    std::string out;
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
        if (s[i] == '\\' && i + 2 < s.size()) {
            const char c = s[++i];
            out += c == 'n' ? '\n' : c == 't' ? '\t' : c;
        } else if (s[i] == '"') {
            throw ConfigurationError("unescaped quote inside string");
        } else {
            out += s[i];
        }
    }
    return out;
}

std::vector<double> parse_real_array(const std::string& v) {
    const std::string s = trim(v);
    if (s.size() < 2 || s.front() != '[' || s.back() != ']') throw ConfigurationError("expected an array [a, b, ...]");
    std::vector<double> out;
    const std::string body = trim(s.substr(1, s.size() - 2));
    if (body.empty()) return out;
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_real(item));
    return out;
}

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        out += c;
    }
    return out + "\"";
}

std::string real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    std::string s = buf;
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return s;
}

}  // namespace

bool ExperimentConfig::operator==(const ExperimentConfig& o) const {
    return preset == o.preset && input == o.input && n == o.n && L == o.L && dt == o.dt && T == o.T &&
           checkpoints == o.checkpoints && method == o.method && eps_list == o.eps_list && seed == o.seed &&
           kmax == o.kmax && output == o.output && ensemble == o.ensemble && flow_dt == o.flow_dt;
}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = {"preset", "input", "n",    "L",      "dt",       "T",      "checkpoints",
                                                  "method", "eps_list", "seed", "kmax", "output", "ensemble", "flow_dt"};
    return keys;
}

void set_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "preset") {
        cfg.preset = parse_string(value);
    } else if (key == "input") {
        cfg.input = parse_string(value);
    } else if (key == "n") {
        const long long v = parse_integer(value);
        if (v <= 0 || v > (1 << 14)) throw ConfigurationError("n out of range");
        cfg.n = static_cast<int>(v);
    } else if (key == "L") {
        cfg.L = parse_real(value);
    } else if (key == "dt") {
        cfg.dt = parse_real(value);
    } else if (key == "T") {
        cfg.T = parse_real(value);
    } else if (key == "checkpoints") {
        const long long v = parse_integer(value);
        if (v <= 0 || v > 100000) throw ConfigurationError("checkpoints out of range");
        cfg.checkpoints = static_cast<int>(v);
    } else if (key == "method") {
        cfg.method = parse_method(parse_string(value));
    } else if (key == "eps_list") {
        cfg.eps_list = parse_real_array(value);
    } else if (key == "seed") {
        const long long v = parse_integer(value);
        if (v < 0) throw ConfigurationError("seed must be nonnegative");
        cfg.seed = static_cast<std::uint64_t>(v);
    } else if (key == "kmax") {
        cfg.kmax = parse_real(value);
    } else if (key == "output") {
        cfg.output = parse_string(value);
    } else if (key == "ensemble") {
        const long long v = parse_integer(value);
        if (v <= 0 || v > 100000) throw ConfigurationError("ensemble out of range");
        cfg.ensemble = static_cast<int>(v);
    } else if (key == "flow_dt") {
        cfg.flow_dt = parse_real(value);
    } else {
        std::string valid;
        for (const std::string& k : config_keys()) valid += (valid.empty() ? "" : ", ") + k;
        throw ConfigurationError("unknown key '" + key + "' (valid: " + valid + ")");
    }
}

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::vector<std::string> seen;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string body = trim(strip_comment(line));
        if (body.empty()) continue;
        auto where = [&](const std::string& msg) {
            return ConfigurationError(source + ":" + std::to_string(lineno) + ": " + msg);
        };
        if (body.front() == '[') throw where("tables are not supported; use flat key = value lines");
        const auto eq = body.find('=');
        if (eq == std::string::npos) throw where("expected 'key = value'");
        const std::string key = trim(body.substr(0, eq));
        const std::string value = trim(body.substr(eq + 1));
        if (key.empty()) throw where("missing key before '='");
        for (const std::string& k : seen)
            if (k == key) throw where("duplicate key '" + key + "'");
        seen.push_back(key);
        try {
            set_config_value(cfg, key, value);
        } catch (const ConfigurationError& e) {
            throw where(key + ": " + e.what());
        }
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

std::string emit_config(const ExperimentConfig& cfg) {
    std::string s;
    s += "preset = " + quote(cfg.preset) + "\n";
    s += "input = " + quote(cfg.input) + "\n";
    s += "n = " + std::to_string(cfg.n) + "\n";
    s += "L = " + real(cfg.L) + "\n";
    s += "dt = " + real(cfg.dt) + "\n";
    s += "T = " + real(cfg.T) + "\n";
    s += "checkpoints = " + std::to_string(cfg.checkpoints) + "\n";
    s += "method = " + quote(method_name(cfg.method)) + "\n";
    s += "eps_list = [";
    for (std::size_t i = 0; i < cfg.eps_list.size(); ++i) s += (i ? ", " : "") + real(cfg.eps_list[i]);
    s += "]\n";
    s += "seed = " + std::to_string(cfg.seed) + "\n";
    s += "kmax = " + real(cfg.kmax) + "\n";
    s += "output = " + quote(cfg.output) + "\n";
    s += "ensemble = " + std::to_string(cfg.ensemble) + "\n";
    s += "flow_dt = " + real(cfg.flow_dt) + "\n";
    return s;
}

void validate_config(const ExperimentConfig& cfg) {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) throw ConfigurationError(std::string(name) + " must be positive");
    };
    positive(cfg.L, "L");
    positive(cfg.dt, "dt");
    positive(cfg.T, "T");
    positive(cfg.kmax, "kmax");
    positive(cfg.flow_dt, "flow_dt");
    if (cfg.checkpoints < 2) throw ConfigurationError("checkpoints must be at least 2");
    if (cfg.ensemble < 1) throw ConfigurationError("ensemble must be positive");
    if (cfg.input.empty() && !is_preset_name(cfg.preset))
        throw ConfigurationError("unknown preset '" + cfg.preset +
                                 "' (valid: zero, gaussian, dipole, random_bandlimited, shear_patch_smoothed)");
    if (cfg.output.empty()) throw ConfigurationError("output directory must be set");
    const Grid2D grid(cfg.n, cfg.L);  // validates n
    for (double e : cfg.eps_list)
        if (!(e >= 4.0 * grid.dx() * (1.0 - 1e-12)) || e > cfg.L / 4.0 * (1.0 + 1e-12))
            throw ConfigurationError("eps_list entries must lie in [4 dx, L/4]");
}

std::vector<double> effective_eps_list(const ExperimentConfig& cfg) {
    if (!cfg.eps_list.empty()) return cfg.eps_list;
    const double dx = 2.0 * cfg.L / cfg.n;
    std::vector<double> out;
    for (double m : {4.0, 8.0, 16.0})
        if (m * dx <= cfg.L / 4.0 * (1.0 + 1e-12)) out.push_back(m * dx);
    return out;
}

}  // namespace cel
