/// @file config.hpp
/// @brief Experiment configuration: flat key = value files (a TOML subset).
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cel/solver.hpp"

namespace cel {

struct ExperimentConfig {
    std::string preset = "gaussian";
    std::string input;  ///< snapshot path; overrides preset when set
    int n = 256;
    double L = 6.283185307179586;
    double dt = 1e-3;
    double T = 1.0;
    int checkpoints = 21;
    Method method = Method::spectral;
    std::vector<double> eps_list;  ///< empty: 4 dx, 8 dx, 16 dx
    std::uint64_t seed = 1;
    double kmax = 4.0;
    std::string output = "cel_out";
    int ensemble = 50;
    double flow_dt = 0.01;

    bool operator==(const ExperimentConfig& o) const;
};

/// Keys in emission order.
const std::vector<std::string>& config_keys();

/// Errors carry "<source>:<line>: ..." positions.
ExperimentConfig parse_config(const std::string& text, const std::string& source = "<config>");
ExperimentConfig load_config(const std::string& path);
std::string emit_config(const ExperimentConfig& cfg);

/// Sets one key from its textual value, as if read from a config file.
void set_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// Static checks: positivity, grid shape, method, preset name, eps range.
void validate_config(const ExperimentConfig& cfg);

/// eps_list, or the default multiples of dx.
std::vector<double> effective_eps_list(const ExperimentConfig& cfg);

}  // namespace cel
