/// @file cel.cpp
/// @brief Command-line front end: run, verify, norms, oracle-compare.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "cel/biot_savart.hpp"
#include "cel/config.hpp"
#include "cel/errors.hpp"
#include "cel/experiment.hpp"
#include "cel/norms.hpp"
#include "cel/presets.hpp"

using namespace cel;

// ============================================================================
// Config flags
// ============================================================================

namespace {

struct ConfigFlags {
    std::string config_path;
    std::map<std::string, std::string> raw;  // key -> value text
    std::vector<double> eps;
};

const std::vector<std::string> kStringKeys = {"preset", "input", "method", "output"};

void add_config_flags(CLI::App* app, ConfigFlags& f) {
    app->add_option("--config", f.config_path, "Config file (flat key = value)");
    for (const std::string& key : config_keys()) {
        if (key == "eps_list") continue;
        std::string flag = "--" + key;
        for (char& c : flag)
            if (c == '_') c = '-';
        app->add_option_function<std::string>(flag, [&f, key](const std::string& v) { f.raw[key] = v; },
                                              "Override config key " + key);
    }
    app->add_option("--eps-list", f.eps, "Mollification radii")->delimiter(',');
}

void apply_overrides(ExperimentConfig& cfg, const ConfigFlags& f) {
    for (const auto& [key, value] : f.raw) {
        bool quoted = false;
        for (const std::string& s : kStringKeys) quoted = quoted || s == key;
        try {
            set_config_value(cfg, key, quoted ? "\"" + value + "\"" : value);
        } catch (const ConfigurationError& e) {
            throw ConfigurationError("--" + key + ": " + e.what());
        }
    }
    if (!f.eps.empty()) cfg.eps_list = f.eps;
    validate_config(cfg);
}

ExperimentConfig build_config(const ConfigFlags& f) {
    ExperimentConfig cfg = f.config_path.empty() ? ExperimentConfig{} : load_config(f.config_path);
    apply_overrides(cfg, f);
    return cfg;
}

std::string joined_check_names() {
    std::string s;
    for (const std::string& n : ledger_check_names()) s += (s.empty() ? "" : ", ") + n;
    return s;
}

void print_checks(const std::vector<InequalityCheck>& checks) {
    for (const InequalityCheck& c : checks) std::printf("%s\n", format_check(c).c_str());
}

// ============================================================================
// Subcommands
// ============================================================================

int cmd_run(const ConfigFlags& flags) {
    const ExperimentConfig cfg = build_config(flags);
    ensure_output_dir(cfg.output);
    const ScalarField w0 = initial_field(cfg);
    std::fprintf(stderr, "simulating %s n=%d T=%g dt=%g (%s)\n", cfg.input.empty() ? cfg.preset.c_str() : cfg.input.c_str(),
                 w0.grid().n(), cfg.T, cfg.dt, method_name(cfg.method).c_str());
    const Trajectory tr = run_simulation(cfg, w0);
    const std::vector<InequalityCheck> checks = evaluate_checks(cfg, &tr, ledger_check_names(), stderr);
    write_run_outputs(cfg, tr, checks);
    print_checks(checks);
    const int code = ledger_exit_code(checks);
    std::printf("outputs written to %s; %s\n", cfg.output.c_str(), code == 0 ? "all checks pass" : "failed checks present");
    return code;
}

int cmd_verify(const ConfigFlags& flags, const std::vector<std::string>& names, const std::string& stored) {
    if (names.empty()) {
        std::fprintf(stderr, "usage: cel verify --checks NAME[,NAME...] [config flags] [--stored DIR]\nvalid checks: %s\n",
                     joined_check_names().c_str());
        return 1;
    }
    for (const std::string& n : names) {
        bool ok = false;
        for (const std::string& v : ledger_check_names()) ok = ok || v == n;
        if (!ok) {
            std::fprintf(stderr, "unknown check '%s'; valid checks: %s\n", n.c_str(), joined_check_names().c_str());
            return 1;
        }
    }
    ExperimentConfig cfg;
    Trajectory tr;
    const bool need = needs_trajectory(names);
    if (!stored.empty()) {
        tr = load_trajectory(stored, &cfg);
        if (!flags.config_path.empty()) cfg = load_config(flags.config_path);
        apply_overrides(cfg, flags);
    } else {
        cfg = build_config(flags);
        if (need) {
            const ScalarField w0 = initial_field(cfg);
            std::fprintf(stderr, "simulating %s n=%d T=%g dt=%g\n", cfg.input.empty() ? cfg.preset.c_str() : cfg.input.c_str(),
                         w0.grid().n(), cfg.T, cfg.dt);
            tr = run_simulation(cfg, w0);
        }
    }
    const std::vector<InequalityCheck> checks = evaluate_checks(cfg, need ? &tr : nullptr, names, stderr);
    print_checks(checks);
    return ledger_exit_code(checks);
}

int cmd_norms(const std::string& path, const std::vector<double>& tails) {
    const ScalarField f = read_snapshot(path);
    const NormReport r = norm_report(f, 0.0, tails);
    write_norm_csv_header(stdout);
    write_norm_csv_row(stdout, r);
    if (!tails.empty()) {
        std::printf("R,tail\n");
        for (const auto& [R, m] : r.tail) std::printf("%.17g,%.17g\n", R, m);
    }
    return 0;
}

int cmd_oracle(int n, double L, const std::string& preset, double radius, std::uint64_t seed) {
    const Grid2D g(n, L);
    const ScalarField w = make_preset(preset, g, seed);
    const double r = radius > 0.0 ? radius : L / 2.0;
    const OracleComparison c = compare_spectral_direct(w, r);
    std::printf("preset,n,L,radius,raw_rel_l2,aligned_rel_l2,mean_u1,mean_u2\n");
    std::printf("%s,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", preset.c_str(), n, L, r, c.raw_rel_l2, c.aligned_rel_l2,
                c.mean_u1, c.mean_u2);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"2D Euler vorticity simulator and inequality ledger"};
    app.require_subcommand(1);

    ConfigFlags run_flags;
    CLI::App* run = app.add_subcommand("run", "Simulate, evaluate the full ledger, write outputs");
    add_config_flags(run, run_flags);

    ConfigFlags verify_flags;
    std::vector<std::string> check_names;
    std::string stored;
    CLI::App* verify = app.add_subcommand("verify", "Evaluate selected ledger checks");
    add_config_flags(verify, verify_flags);
    verify->add_option("--checks", check_names, "Check names")->delimiter(',');
    verify->add_option("--stored", stored, "Reuse the trajectory stored in a run output directory");

    std::string snapshot;
    std::vector<double> tails;
    CLI::App* norms = app.add_subcommand("norms", "Norm report of a field snapshot");
    norms->add_option("snapshot", snapshot, "Snapshot file (CEL1 format)")->required();
    norms->add_option("--tail", tails, "Tail radii")->delimiter(',');

    int on = 128;
    double oL = 2.0 * M_PI, oradius = 0.0;
    std::string opreset = "dipole";
    std::uint64_t oseed = 1;
    CLI::App* oracle = app.add_subcommand("oracle-compare", "Spectral vs direct Biot-Savart velocity");
    oracle->add_option("--n", on, "Grid points per axis (<= 128)");
    oracle->add_option("--L", oL, "Box half-width");
    oracle->add_option("--preset", opreset, "Initial field preset");
    oracle->add_option("--radius", oradius, "Comparison radius (default L/2)");
    oracle->add_option("--seed", oseed, "Seed for random presets");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*run) return cmd_run(run_flags);
        if (*verify) return cmd_verify(verify_flags, check_names, stored);
        if (*norms) return cmd_norms(snapshot, tails);
        if (*oracle) return cmd_oracle(on, oL, opreset, oradius, oseed);
    } catch (const ConfigurationError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
    } catch (const IoError& e) {
        std::fprintf(stderr, "i/o error: %s\n", e.what());
    } catch (const InstabilityError& e) {
        std::fprintf(stderr, "instability: %s\n", e.what());
    } catch (const DomainError& e) {
        std::fprintf(stderr, "domain error: %s\n", e.what());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
    }
    return 1;
}
