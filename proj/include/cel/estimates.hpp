/// @file estimates.hpp
/// @brief Inequality ledger: envelope checkers, fitted constants, trajectory
/// and ensemble checks, ledger CSV and summary output.
#pragma once

#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "cel/biot_savart.hpp"
#include "cel/fields.hpp"
#include "cel/norms.hpp"
#include "cel/solver.hpp"

namespace cel {

enum class Verdict { pass, fail, premise_not_satisfied, empty_range, blow_up, inconclusive };

std::string verdict_name(Verdict v);

/// One named inequality lhs <= rhs sampled at a list of points (usually times).
struct InequalityCheck {
    std::string name;
    std::string anchor;
    std::vector<double> t;
    std::vector<double> lhs;
    std::vector<double> rhs;
    double fitted_constant = 0.0;
    bool fitted = false;  ///< fitted_constant is the deliverable; passes by construction
    double margin = 0.0;  ///< min over samples of rhs - lhs
    double tolerance = 0.0;
    Verdict verdict = Verdict::pass;
    bool pass = true;
    std::string notes;
    std::vector<std::pair<std::string, double>> extras;

    void add(double time, double l, double r);
    /// margin, pass and verdict from the samples; keeps a preset non-pass verdict.
    void finalize();
    bool failed() const { return verdict == Verdict::fail; }
    double extra(const std::string& key) const;
};

/// Smallest C (up to rounding, then nudged upward) with lhs[i] <= C * scale[i] for all i.
/// Samples with scale 0 must have lhs <= 0; otherwise the result is +inf.
double fit_linear_constant(const std::vector<double>& lhs, const std::vector<double>& scale);

// ============================================================================
// Envelopes
// ============================================================================

/// L(t) <= alpha(t) exp(int_0^t beta), given L(t) <= alpha(t) + int_0^t beta L.
InequalityCheck gronwall_envelope(const std::vector<double>& t, const std::vector<double>& L,
                                  const std::vector<double>& alpha, const std::vector<double>& beta,
                                  double tolerance = 1e-9);

/// rho(t) <= Phi^{-1}(Phi(beta) - int gamma) for mu(r) = r^m, m >= 1.
/// m = 1: beta exp(G); m > 1: (beta^{1-m} - (m-1) G)^{-1/(m-1)} while positive.
InequalityCheck osgood_envelope(const std::vector<double>& t, const std::vector<double>& rho, double beta,
                                const std::vector<double>& gamma, double mu_exponent, double tolerance = 1e-9);

/// Cumulative trapezoid integral on the given nodes, starting at 0.
std::vector<double> cumulative_trapezoid(const std::vector<double>& t, const std::vector<double>& f);

// ============================================================================
// Trajectory checks
// ============================================================================

/// Norms of every checkpoint, computed once and shared by the checks.
struct TrajectorySummary {
    std::vector<double> t;
    std::vector<NormReport> norms;
    std::vector<double> velocity_sup;
    std::vector<double> gradient_sup;
    double T = 0.0;
    double dt = 0.0;
};

TrajectorySummary summarize(const Trajectory& traj);

InequalityCheck check_criticality(const TrajectorySummary& s);
InequalityCheck check_criticality(const Trajectory& traj);

/// C > 0; also reports M = W0 / (1 - C T W0) as extra "M" (inf when C T W0 >= 1).
InequalityCheck check_apriori_envelope(const TrajectorySummary& s, double C);
InequalityCheck check_apriori_envelope(const Trajectory& traj, double C);

/// max over nonzero fields of ||grad u||_inf / ||w||_{W^{2,1}}.
InequalityCheck check_lemma28(const std::vector<ScalarField>& fields);

InequalityCheck check_dini_velocity(const TrajectorySummary& s);
InequalityCheck check_dini_velocity(const Trajectory& traj);

/// C from check_dini_velocity; requires T >= 1.
InequalityCheck check_double_exponential(const TrajectorySummary& s, double C);
InequalityCheck check_double_exponential(const Trajectory& traj);

/// ||w(t_{i+1}) - w(t_i)||_{W^{1,1}} <= C |t_{i+1} - t_i|; extra "M2" is (max W21)^2.
InequalityCheck check_lipschitz_time(const Trajectory& traj);

/// max over p in {1, 2, inf} of relative Lp drift <= 1e-3.
InequalityCheck check_lp_conservation(const TrajectorySummary& s, double tolerance = 1e-3);

/// ||u||_inf <= ||w||_1 + ||w||_inf at each checkpoint.
InequalityCheck check_velocity_sup(const TrajectorySummary& s);

/// ||w||_inf <= ||d1 d2 w||_1 at each checkpoint.
InequalityCheck check_sup_mixed(const TrajectorySummary& s);

/// Forward flow gradients: ||grad X^t||_inf <= exp(int_0^t ||grad u||_inf).
InequalityCheck check_flow_gradient(const Trajectory& traj, double flow_dt);

/// Weak-form residual of each probe, from the per-step record when present,
/// else from checkpoint fields.
InequalityCheck check_weak_solution(const Trajectory& traj, const std::vector<TestFunction>& probes);

/// Residual per probe, same order as probes.
std::vector<double> weak_residuals(const Trajectory& traj, const std::vector<TestFunction>& probes);

struct CompactnessOptions {
    std::vector<double> tail_radii;  ///< empty: {L/4, L/2}
    std::vector<double> deltas = {0.01, 0.05, 0.1, 0.5};
    double flow_dt = 0.01;
    int checkpoints = 21;
};

/// Tails, translation modulus and small-set concentration of mollified runs.
/// eps in [4 dx, L/4].
std::vector<InequalityCheck> check_compactness_diagnostics(const Trajectory& traj, const std::vector<double>& eps_list,
                                                           const CompactnessOptions& opt = {});

// ============================================================================
// Ensemble checks
// ============================================================================

/// int |f g| <= ||f||_{(2,1)} ||g||_{(2,inf)} over consecutive pairs (i, i+1 mod N).
InequalityCheck check_holder_lorentz(const std::vector<ScalarField>& fields);

/// ||f||_{(2,inf)} <= ||f||_{(2,1)}.
InequalityCheck check_lorentz_nesting(const std::vector<ScalarField>& fields);

/// max ||f||_{(2,1)} / || |grad f| ||_1, compared with 1/sqrt(pi) (sharp) plus slack.
InequalityCheck check_sobolev_lorentz(const std::vector<ScalarField>& fields, double slack = 0.02);

/// far part vs C ||w||_1, near part vs C (dini + ||w||_inf), near + far vs direct gradient.
std::vector<InequalityCheck> check_near_far(const std::vector<ScalarField>& fields);

// ============================================================================
// Output
// ============================================================================

/// check,t,lhs,rhs,margin,fitted_C,pass
void write_ledger_csv(const std::string& path, const std::vector<InequalityCheck>& checks);
void write_ledger_summary(const std::string& path, const std::vector<InequalityCheck>& checks);
std::string format_check(const InequalityCheck& c);

}  // namespace cel
