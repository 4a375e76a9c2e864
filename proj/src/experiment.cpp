#include "cel/experiment.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cel/biot_savart.hpp"
#include "cel/errors.hpp"
#include "cel/presets.hpp"

namespace cel {

namespace fs = std::filesystem;

namespace {

void say(std::FILE* log, const std::string& s) {
    if (!log) return;
    std::fprintf(log, "%s\n", s.c_str());
    std::fflush(log);
}

bool wants(const std::vector<std::string>& names, const char* n) {
    return std::find(names.begin(), names.end(), n) != names.end();
}

InequalityCheck skipped(const std::string& name, const std::string& why) {
    InequalityCheck c;
    c.name = name;
    c.anchor = "not evaluated";
    c.verdict = Verdict::empty_range;
    c.notes = why;
    return c;
}

std::string field_name(std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "omega_%03zu.cel", i);
    return buf;
}

}  // namespace

const std::vector<std::string>& ledger_check_names() {
    static const std::vector<std::string> names = {
        "lp_conservation", "velocity_sup",    "sup_mixed",       "criticality",    "lemma28",
        "apriori_envelope", "dini_velocity",  "double_exponential", "lipschitz_time", "flow_gradient",
        "weak_solution",   "compactness",     "holder_lorentz",  "lorentz_nesting", "sobolev_lorentz",
        "near_far"};
    return names;
}

bool needs_trajectory(const std::vector<std::string>& names) {
    for (const char* n : {"lp_conservation", "velocity_sup", "sup_mixed", "criticality", "apriori_envelope",
                          "dini_velocity", "double_exponential", "lipschitz_time", "flow_gradient", "weak_solution",
                          "compactness"})
        if (wants(names, n)) return true;
    return false;
}

ScalarField initial_field(const ExperimentConfig& cfg) {
    if (!cfg.input.empty()) return read_snapshot(cfg.input);
    return make_preset(cfg.preset, Grid2D(cfg.n, cfg.L), cfg.seed, cfg.kmax);
}

Trajectory run_simulation(const ExperimentConfig& cfg, const ScalarField& omega0) {
    Trajectory tr = simulate(omega0, cfg.T, cfg.dt, even_checkpoints(cfg.T, cfg.checkpoints), cfg.method,
                             weak_form_presets());
    return tr;
}

Trajectory load_trajectory(const std::string& dir, ExperimentConfig* cfg_out) {
    const ExperimentConfig cfg = load_config((fs::path(dir) / "config.toml").string());
    const std::string times_path = (fs::path(dir) / "fields" / "times.csv").string();
    std::ifstream in(times_path);
    if (!in) throw IoError("cannot read " + times_path);
    Trajectory tr;
    tr.config.T = cfg.T;
    tr.config.dt = cfg.dt;
    tr.config.method = cfg.method;
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string idx, t;
        if (!std::getline(ss, idx, ',') || !std::getline(ss, t)) throw IoError("malformed row in " + times_path);
        ScalarField w = read_snapshot((fs::path(dir) / "fields" / field_name(std::stoul(idx))).string());
        const VelocityField u = velocity_spectral(w);
        tr.times.push_back(std::stod(t));
        tr.velocity_sup.push_back(velocity_sup(u));
        tr.gradient_sup.push_back(gradient_sup(u.grad));
        tr.fields.push_back(std::move(w));
    }
    if (tr.fields.empty()) throw IoError("no stored fields under " + dir);
    tr.initial_mean = integrate(tr.fields[0]) / (4.0 * tr.fields[0].grid().half_width() * tr.fields[0].grid().half_width());
    if (cfg_out) *cfg_out = cfg;
    return tr;
}

std::vector<InequalityCheck> evaluate_checks(const ExperimentConfig& cfg, const Trajectory* traj,
                                             const std::vector<std::string>& names, std::FILE* log) {
    for (const std::string& n : names)
        if (!wants(ledger_check_names(), n.c_str())) throw ConfigurationError("unknown check '" + n + "'");
    if (needs_trajectory(names) && !traj) throw ConfigurationError("requested checks need a trajectory");

    TrajectorySummary s;
    if (traj) {
        say(log, "computing checkpoint norms");
        s = summarize(*traj);
    }
    const Grid2D grid = traj ? traj->fields[0].grid() : Grid2D(cfg.n, cfg.L);
    std::vector<ScalarField> ensemble;
    auto get_ensemble = [&]() -> const std::vector<ScalarField>& {
        if (ensemble.empty()) {
            say(log, "building " + std::to_string(cfg.ensemble) + "-field ensemble");
            ensemble = random_ensemble(grid, static_cast<std::size_t>(cfg.ensemble), cfg.seed);
        }
        return ensemble;
    };

    std::vector<InequalityCheck> out;
    double C28 = 0.0;
    const bool need28 = wants(names, "lemma28") || wants(names, "apriori_envelope");
    if (need28) {
        std::vector<ScalarField> f = get_ensemble();
        if (traj) f.push_back(traj->fields[0]);
        say(log, "lemma28");
        InequalityCheck c = check_lemma28(f);
        C28 = c.fitted_constant;
        if (wants(names, "lemma28")) out.push_back(std::move(c));
    }
    auto run = [&](const char* name, auto&& fn) {
        if (!wants(names, name)) return;
        say(log, name);
        out.push_back(fn());
    };
    run("lp_conservation", [&] { return check_lp_conservation(s); });
    run("velocity_sup", [&] { return check_velocity_sup(s); });
    run("sup_mixed", [&] { return check_sup_mixed(s); });
    run("criticality", [&] {
        if (s.t.size() < 5) return skipped("criticality", "needs at least 5 checkpoints");
        return check_criticality(s);
    });
    run("apriori_envelope", [&] {
        if (!(C28 > 0.0)) return skipped("apriori_envelope", "lemma28 constant is zero");
        InequalityCheck c = check_apriori_envelope(s, C28);
        c.notes += (c.notes.empty() ? "" : "; ") + std::string("C taken from lemma28");
        return c;
    });
    double Cd = 0.0;
    run("dini_velocity", [&] {
        InequalityCheck c = check_dini_velocity(s);
        Cd = c.fitted_constant;
        return c;
    });
    run("double_exponential", [&] {
        if (s.T < 1.0) return skipped("double_exponential", "needs T >= 1");
        if (!wants(names, "dini_velocity")) Cd = check_dini_velocity(s).fitted_constant;
        return check_double_exponential(s, Cd);
    });
    run("lipschitz_time", [&] { return check_lipschitz_time(*traj); });
    run("flow_gradient", [&] { return check_flow_gradient(*traj, cfg.flow_dt); });
    run("weak_solution", [&] { return check_weak_solution(*traj, weak_form_presets()); });
    if (wants(names, "compactness")) {
        const std::vector<double> eps = effective_eps_list(cfg);
        say(log, "compactness (" + std::to_string(eps.size()) + " mollified runs)");
        if (eps.empty()) {
            out.push_back(skipped("compactness", "no admissible eps for this grid"));
        } else {
            CompactnessOptions opt;
            opt.flow_dt = cfg.flow_dt;
            opt.checkpoints = cfg.checkpoints;
            for (InequalityCheck& c : check_compactness_diagnostics(*traj, eps, opt)) out.push_back(std::move(c));
        }
    }
    run("holder_lorentz", [&] { return check_holder_lorentz(get_ensemble()); });
    run("lorentz_nesting", [&] { return check_lorentz_nesting(get_ensemble()); });
    run("sobolev_lorentz", [&] { return check_sobolev_lorentz(get_ensemble()); });
    if (wants(names, "near_far")) {
        say(log, "near_far");
        const Grid2D small(std::min(grid.n(), 64), grid.half_width());
        const std::size_t count = std::min<std::size_t>(static_cast<std::size_t>(cfg.ensemble), 20);
        for (InequalityCheck& c : check_near_far(random_ensemble(small, count, cfg.seed))) out.push_back(std::move(c));
    }
    return out;
}

int ledger_exit_code(const std::vector<InequalityCheck>& checks) {
    for (const InequalityCheck& c : checks)
        if (c.failed()) return 2;
    return 0;
}

void ensure_output_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory: " + dir);
    const fs::path probe = fs::path(dir) / ".cel_write_test";
    std::FILE* fp = std::fopen(probe.string().c_str(), "wb");
    if (!fp) throw IoError("output directory not writable: " + dir);
    std::fclose(fp);
    fs::remove(probe, ec);
}

void write_run_outputs(const ExperimentConfig& cfg, const Trajectory& traj, const std::vector<InequalityCheck>& checks) {
    const fs::path root(cfg.output);
    ensure_output_dir(root.string());
    ensure_output_dir((root / "fields").string());
    {
        std::FILE* fp = std::fopen((root / "config.toml").string().c_str(), "wb");
        if (!fp) throw IoError("cannot write config.toml");
        std::fputs(emit_config(cfg).c_str(), fp);
        std::fclose(fp);
    }
    std::FILE* tfp = std::fopen((root / "fields" / "times.csv").string().c_str(), "wb");
    if (!tfp) throw IoError("cannot write fields/times.csv");
    std::fputs("index,t\n", tfp);
    for (std::size_t i = 0; i < traj.fields.size(); ++i) {
        write_snapshot((root / "fields" / field_name(i)).string(), traj.fields[i]);
        std::fprintf(tfp, "%zu,%.17g\n", i, traj.times[i]);
    }
    std::fclose(tfp);

    std::FILE* nfp = std::fopen((root / "norms.csv").string().c_str(), "wb");
    if (!nfp) throw IoError("cannot write norms.csv");
    write_norm_csv_header(nfp);
    for (std::size_t i = 0; i < traj.fields.size(); ++i) write_norm_csv_row(nfp, norm_report(traj.fields[i], traj.times[i]));
    std::fclose(nfp);

    write_ledger_csv((root / "ledger.csv").string(), checks);
    write_ledger_summary((root / "summary.txt").string(), checks);
}

}  // namespace cel
