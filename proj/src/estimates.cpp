#include "cel/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cel/errors.hpp"
#include "cel/flow.hpp"
#include "cel/rearrange.hpp"

namespace cel {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

void require_common_grid(std::size_t n, std::initializer_list<std::size_t> sizes, const char* what) {
    for (std::size_t s : sizes)
        if (s != n) throw ConfigurationError(std::string(what) + ": sampled series must share one time grid");
}

/// Smallest C >= 0 with lhs <= C * scale * exp(C * rate), per sample, by bisection.
double solve_exp_constant(double lhs, double scale, double rate) {
    if (lhs <= 0.0) return 0.0;
    if (scale <= 0.0) return kInf;
    auto h = [&](double C) { return C * scale * std::exp(C * rate) - lhs; };
    double lo = 0.0, hi = lhs / scale;
    if (h(hi) < 0.0) hi *= 2.0;  // unreachable for rate >= 0; kept for safety
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (h(mid) >= 0.0 ? hi : lo) = mid;
    }
    return hi;
}

double grad_l1(const ScalarField& f) {
    const ScalarField d1 = spectral_derivative(f, 1, 1), d2 = spectral_derivative(f, 2, 1);
    double s = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) s += std::hypot(d1[k], d2[k]);
    return s * f.grid().cell_area();
}

double grad_l2(const ScalarField& f) {
    const ScalarField d1 = spectral_derivative(f, 1, 1), d2 = spectral_derivative(f, 2, 1);
    double s = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) s += d1[k] * d1[k] + d2[k] * d2[k];
    return std::sqrt(s * f.grid().cell_area());
}

/// |d11 f| + |d12 f| + |d22 f| pointwise.
ScalarField hessian_abs_sum(const ScalarField& f) {
    const std::vector<ScalarField> d = spectral_partials(f, {{2, 0}, {1, 1}, {0, 2}});
    std::vector<double> v(f.size());
    for (std::size_t k = 0; k < f.size(); ++k) v[k] = std::fabs(d[0][k]) + std::fabs(d[1][k]) + std::fabs(d[2][k]);
    return ScalarField(f.grid(), std::move(v));
}

}  // namespace

std::string verdict_name(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::fail: return "fail";
        case Verdict::premise_not_satisfied: return "premise-not-satisfied";
        case Verdict::empty_range: return "empty-range";
        case Verdict::blow_up: return "blow-up";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "unknown";
}

void InequalityCheck::add(double time, double l, double r) {
    t.push_back(time);
    lhs.push_back(l);
    rhs.push_back(r);
}

void InequalityCheck::finalize() {
    margin = kInf;
    for (std::size_t i = 0; i < lhs.size(); ++i) margin = std::min(margin, rhs[i] - lhs[i]);
    if (lhs.empty()) margin = 0.0;
    pass = margin >= -tolerance;
    if (verdict == Verdict::pass || verdict == Verdict::fail) verdict = pass ? Verdict::pass : Verdict::fail;
}

double InequalityCheck::extra(const std::string& key) const {
    for (const auto& [k, v] : extras)
        if (k == key) return v;
    return std::numeric_limits<double>::quiet_NaN();
}

double fit_linear_constant(const std::vector<double>& lhs, const std::vector<double>& scale) {
    double C = 0.0;
    for (std::size_t i = 0; i < lhs.size(); ++i) {
        if (scale[i] > 0.0)
            C = std::max(C, lhs[i] / scale[i]);
        else if (lhs[i] > 0.0)
            return kInf;
    }
    for (std::size_t i = 0; i < lhs.size(); ++i)
        while (scale[i] > 0.0 && C * scale[i] < lhs[i]) C = std::nextafter(C, kInf);
    return C;
}

std::vector<double> cumulative_trapezoid(const std::vector<double>& t, const std::vector<double>& f) {
    require_common_grid(t.size(), {f.size()}, "cumulative_trapezoid");
    std::vector<double> out(t.size(), 0.0);
    for (std::size_t i = 1; i < t.size(); ++i) out[i] = out[i - 1] + 0.5 * (t[i] - t[i - 1]) * (f[i] + f[i - 1]);
    return out;
}

// ============================================================================
// Envelopes
// ============================================================================

InequalityCheck gronwall_envelope(const std::vector<double>& t, const std::vector<double>& L,
                                  const std::vector<double>& alpha, const std::vector<double>& beta,
                                  double tolerance) {
    require_common_grid(t.size(), {L.size(), alpha.size(), beta.size()}, "gronwall_envelope");
    for (std::size_t i = 1; i < alpha.size(); ++i)
        if (alpha[i] < alpha[i - 1]) throw DomainError("gronwall_envelope: alpha must be nondecreasing");
    InequalityCheck c;
    c.name = "gronwall";
    c.anchor = "Gronwall lemma, alpha nondecreasing";
    c.tolerance = tolerance;
    std::vector<double> bl(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) bl[i] = beta[i] * L[i];
    const std::vector<double> IbL = cumulative_trapezoid(t, bl);
    const std::vector<double> Ib = cumulative_trapezoid(t, beta);
    bool premise = true;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double p = alpha[i] + IbL[i];
        if (L[i] > p + tolerance * std::max(1.0, std::fabs(p))) premise = false;
        c.add(t[i], L[i], alpha[i] * std::exp(Ib[i]));
    }
    c.finalize();
    if (!premise) {
        c.verdict = Verdict::premise_not_satisfied;
        c.notes = "integral premise L <= alpha + int beta L violated on the samples";
    }
    return c;
}

InequalityCheck osgood_envelope(const std::vector<double>& t, const std::vector<double>& rho, double beta,
                                const std::vector<double>& gamma, double mu_exponent, double tolerance) {
    require_common_grid(t.size(), {rho.size(), gamma.size()}, "osgood_envelope");
    if (!(mu_exponent >= 1.0)) throw DomainError("osgood_envelope: mu exponent must be >= 1");
    if (!(beta > 0.0)) throw DomainError("osgood_envelope: beta must be positive");
    InequalityCheck c;
    c.name = "osgood";
    c.anchor = "Osgood lemma, mu(r) = r^m";
    c.tolerance = tolerance;
    c.extras.emplace_back("mu_exponent", mu_exponent);
    const std::vector<double> G = cumulative_trapezoid(t, gamma);
    const double m = mu_exponent;
    double blow_up = kInf;
    for (std::size_t i = 0; i < t.size(); ++i) {
        double bound;
        if (m == 1.0) {
            bound = beta * std::exp(G[i]);
        } else {
            const double base = std::pow(beta, 1.0 - m) - (m - 1.0) * G[i];
            if (base <= 0.0) {
                if (blow_up == kInf) {
                    // linear interpolation of G between the last admissible sample and this one
                    const double crit = std::pow(beta, 1.0 - m) / (m - 1.0);
                    const double g0 = i > 0 ? G[i - 1] : 0.0, t0 = i > 0 ? t[i - 1] : t[i];
                    blow_up = G[i] > g0 ? t0 + (crit - g0) / (G[i] - g0) * (t[i] - t0) : t[i];
                }
                continue;
            }
            bound = std::pow(base, -1.0 / (m - 1.0));
        }
        c.add(t[i], rho[i], bound);
    }
    c.finalize();
    if (blow_up < kInf) {
        c.verdict = Verdict::blow_up;
        c.extras.emplace_back("blow_up_time", blow_up);
        c.notes = "envelope blows up at t = " + fmt("%.6g", blow_up) + "; later samples not bounded";
    }
    return c;
}

// ============================================================================
// Trajectory checks
// ============================================================================

TrajectorySummary summarize(const Trajectory& traj) {
    TrajectorySummary s;
    s.t = traj.times;
    s.velocity_sup = traj.velocity_sup;
    s.gradient_sup = traj.gradient_sup;
    s.T = traj.config.T;
    s.dt = traj.config.dt;
    s.norms.reserve(traj.fields.size());
    for (std::size_t i = 0; i < traj.fields.size(); ++i) s.norms.push_back(norm_report(traj.fields[i], traj.times[i]));
    return s;
}

InequalityCheck check_criticality(const TrajectorySummary& s) {
    const std::size_t N = s.t.size();
    if (N < 5) throw ConfigurationError("check_criticality needs at least 5 checkpoints");
    InequalityCheck c;
    c.name = "criticality";
    c.anchor = "d/dt ||w||_{W^{2,1}} <= C ||grad u||_inf ||w||_{W^{2,1}}";
    c.fitted = true;
    std::vector<double> l, sc;
    for (std::size_t i = 1; i + 1 < N; ++i) {
        l.push_back((s.norms[i + 1].w21 - s.norms[i - 1].w21) / (s.t[i + 1] - s.t[i - 1]));
        sc.push_back(s.gradient_sup[i] * s.norms[i].w21);
    }
    const double C = fit_linear_constant(l, sc);
    c.fitted_constant = C;
    for (std::size_t k = 0; k < l.size(); ++k) c.add(s.t[k + 1], l[k], C == kInf ? kInf : C * sc[k]);
    c.finalize();
    if (C == kInf) {
        c.verdict = Verdict::fail;
        c.pass = false;
        c.notes = "norm grows where ||grad u||_inf ||w|| vanishes; no finite constant";
    } else {
        c.notes = "centered differences at interior checkpoints";
    }
    return c;
}

InequalityCheck check_criticality(const Trajectory& traj) { return check_criticality(summarize(traj)); }

InequalityCheck check_apriori_envelope(const TrajectorySummary& s, double C) {
    if (!(C > 0.0)) throw ConfigurationError("check_apriori_envelope needs C > 0");
    InequalityCheck c;
    c.name = "apriori_envelope";
    c.anchor = "||w(t)||_{W^{2,1}} <= W0 / (1 - C t W0)";
    c.fitted_constant = C;
    const double W0 = s.norms.empty() ? 0.0 : s.norms[0].w21;
    for (std::size_t i = 0; i < s.t.size(); ++i) {
        const double d = 1.0 - C * s.t[i] * W0;
        if (d <= 0.0) continue;
        c.add(s.t[i], s.norms[i].w21, W0 / d);
    }
    const double dT = 1.0 - C * s.T * W0;
    c.extras.emplace_back("W0", W0);
    c.extras.emplace_back("M", dT > 0.0 ? W0 / dT : kInf);
    c.extras.emplace_back("admissible_until", W0 > 0.0 ? 1.0 / (C * W0) : kInf);
    c.finalize();
    if (c.t.empty()) {
        c.verdict = Verdict::empty_range;
        c.notes = "no checkpoint with t < 1/(C W0)";
    } else if (c.t.size() < s.t.size()) {
        c.notes = "checkpoints beyond t = 1/(C W0) skipped";
    }
    return c;
}

InequalityCheck check_apriori_envelope(const Trajectory& traj, double C) {
    return check_apriori_envelope(summarize(traj), C);
}

InequalityCheck check_lemma28(const std::vector<ScalarField>& fields) {
    if (fields.size() < 10) throw ConfigurationError("check_lemma28 needs at least 10 fields");
    InequalityCheck c;
    c.name = "lemma28";
    c.anchor = "||grad u||_inf <= C ||w||_{W^{2,1}}";
    c.fitted = true;
    std::vector<double> l, sc, idx;
    std::size_t skipped = 0;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        const double w = sobolev_norm(fields[i], 2);
        if (w == 0.0) {
            ++skipped;
            continue;
        }
        l.push_back(gradient_sup(velocity_gradient(fields[i])));
        sc.push_back(w);
        idx.push_back(static_cast<double>(i));
    }
    const double C = fit_linear_constant(l, sc);
    c.fitted_constant = C;
    for (std::size_t k = 0; k < l.size(); ++k) c.add(idx[k], l[k], C * sc[k]);
    c.finalize();
    c.extras.emplace_back("members", static_cast<double>(l.size()));
    c.notes = "sample index in column t";
    if (skipped) c.notes += "; " + std::to_string(skipped) + " zero field(s) skipped";
    return c;
}

InequalityCheck check_dini_velocity(const TrajectorySummary& s) {
    InequalityCheck c;
    c.name = "dini_velocity";
    c.anchor = "||grad u(t)||_inf <= C (||w0||_1 + ||w0||_inf + |w0|_D) exp(C ||w0||_inf t)";
    c.fitted = true;
    if (s.t.empty()) return c;
    const NormReport& n0 = s.norms[0];
    const double A = n0.l1 + n0.linf + n0.dini, b = n0.linf;
    double C = 0.0;
    for (std::size_t i = 0; i < s.t.size(); ++i) C = std::max(C, solve_exp_constant(s.gradient_sup[i], A, b * s.t[i]));
    if (C < kInf) {
        for (std::size_t i = 0; i < s.t.size(); ++i)
            while (C * A * std::exp(C * b * s.t[i]) < s.gradient_sup[i]) C = std::nextafter(C, kInf);
    }
    c.fitted_constant = C;
    for (std::size_t i = 0; i < s.t.size(); ++i)
        c.add(s.t[i], s.gradient_sup[i], C == kInf ? kInf : C * A * std::exp(C * b * s.t[i]));
    c.extras.emplace_back("A", A);
    c.extras.emplace_back("dini0", n0.dini);
    c.finalize();
    if (C == kInf) {
        c.verdict = Verdict::fail;
        c.pass = false;
        c.notes = "nonzero velocity gradient from data with A = 0";
    }
    return c;
}

InequalityCheck check_dini_velocity(const Trajectory& traj) { return check_dini_velocity(summarize(traj)); }

InequalityCheck check_double_exponential(const TrajectorySummary& s, double C) {
    if (s.T < 1.0) throw ConfigurationError("check_double_exponential needs a horizon T >= 1");
    InequalityCheck c;
    c.name = "double_exponential";
    c.anchor = "||w(t)||_{W^{2,1}} <= W0 exp(||w0||_inf^-1 A exp(C ||w0||_inf t))";
    c.fitted_constant = C;
    if (s.t.empty()) return c;
    const NormReport& n0 = s.norms[0];
    const double A = n0.l1 + n0.linf + n0.dini, b = n0.linf, W0 = n0.w21;
    for (std::size_t i = 0; i < s.t.size(); ++i) {
        const double r = b > 0.0 ? W0 * std::exp(A / b * std::exp(C * b * s.t[i])) : 0.0;
        c.add(s.t[i], s.norms[i].w21, r);
    }
    c.finalize();
    if (b == 0.0) c.notes = "zero initial vorticity: trivial";
    return c;
}

InequalityCheck check_double_exponential(const Trajectory& traj) {
    const TrajectorySummary s = summarize(traj);
    return check_double_exponential(s, check_dini_velocity(s).fitted_constant);
}

InequalityCheck check_lipschitz_time(const Trajectory& traj) {
    InequalityCheck c;
    c.name = "lipschitz_time";
    c.anchor = "||w(t) - w(s)||_{W^{1,1}} <= C |t - s|";
    c.fitted = true;
    std::vector<double> l, sc, tt;
    double M = 0.0;
    for (std::size_t i = 0; i < traj.fields.size(); ++i) {
        M = std::max(M, sobolev_norm(traj.fields[i], 2));
        if (i == 0) continue;
        l.push_back(sobolev_norm(traj.fields[i] - traj.fields[i - 1], 1));
        sc.push_back(traj.times[i] - traj.times[i - 1]);
        tt.push_back(traj.times[i]);
    }
    const double C = fit_linear_constant(l, sc);
    c.fitted_constant = C;
    for (std::size_t k = 0; k < l.size(); ++k) c.add(tt[k], l[k], C * sc[k]);
    c.extras.emplace_back("M2", M * M);
    c.extras.emplace_back("C_over_M2", M > 0.0 ? C / (M * M) : 0.0);
    c.finalize();
    c.notes = "consecutive checkpoints; M = max ||w||_{W^{2,1}}";
    return c;
}

InequalityCheck check_lp_conservation(const TrajectorySummary& s, double tolerance) {
    InequalityCheck c;
    c.name = "lp_conservation";
    c.anchor = "||w(t)||_p = ||w0||_p, p = 1, 2, inf";
    if (s.t.empty()) return c;
    const NormReport& n0 = s.norms[0];
    const double ref[3] = {n0.l1, n0.l2, n0.linf};
    double worst[3] = {0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < s.t.size(); ++i) {
        const double v[3] = {s.norms[i].l1, s.norms[i].l2, s.norms[i].linf};
        double m = 0.0;
        for (int p = 0; p < 3; ++p) {
            const double d = std::fabs(v[p] - ref[p]) / (ref[p] > 0.0 ? ref[p] : 1.0);
            worst[p] = std::max(worst[p], d);
            m = std::max(m, d);
        }
        c.add(s.t[i], m, tolerance);
    }
    c.extras.emplace_back("drift_l1", worst[0]);
    c.extras.emplace_back("drift_l2", worst[1]);
    c.extras.emplace_back("drift_linf", worst[2]);
    c.finalize();
    c.notes = "lhs is the largest relative drift over p";
    return c;
}

InequalityCheck check_velocity_sup(const TrajectorySummary& s) {
    InequalityCheck c;
    c.name = "velocity_sup";
    c.anchor = "||u||_inf <= ||w||_1 + ||w||_inf";
    for (std::size_t i = 0; i < s.t.size(); ++i) c.add(s.t[i], s.velocity_sup[i], s.norms[i].l1 + s.norms[i].linf);
    c.finalize();
    return c;
}

InequalityCheck check_sup_mixed(const TrajectorySummary& s) {
    InequalityCheck c;
    c.name = "sup_mixed";
    c.anchor = "||w||_inf <= ||d1 d2 w||_1";
    c.tolerance = 1e-8;
    for (std::size_t i = 0; i < s.t.size(); ++i) c.add(s.t[i], s.norms[i].linf, s.norms[i].sup_mixed);
    c.finalize();
    return c;
}

InequalityCheck check_flow_gradient(const Trajectory& traj, double flow_dt) {
    InequalityCheck c;
    c.name = "flow_gradient";
    c.anchor = "||grad X||_inf <= exp(int_0^t ||grad u||_inf)";
    if (traj.fields.empty()) return c;
    const GridSampler sampler = GridSampler::from_vorticity(traj.times, traj.fields, false);
    const std::vector<FlowMap> flows =
        advance_flow_sequence(sampler, traj.fields[0].grid(), traj.times, flow_dt, false);
    const std::vector<double> I = cumulative_trapezoid(traj.times, traj.gradient_sup);
    double jd = 0.0;
    for (std::size_t i = 0; i < flows.size(); ++i) {
        c.add(traj.times[i], flow_gradient_bounds(flows[i]).sup_grad, std::exp(I[i]));
        jd = std::max(jd, jacobian_defect(flows[i]));
    }
    c.extras.emplace_back("jacobian_defect", jd);
    c.finalize();
    c.notes = "forward flow; the inverse map has the same operator-norm sup since det = 1";
    return c;
}

std::vector<double> weak_residuals(const Trajectory& traj, const std::vector<TestFunction>& probes) {
    std::vector<double> out;
    if (traj.fields.empty()) return std::vector<double>(probes.size(), 0.0);
    const Grid2D& g = traj.fields[0].grid();
    for (const TestFunction& p : probes) p.require_inside(g);
    const WeakFormRecord& w = traj.weak;
    bool dense = w.names.size() == probes.size() && w.times.size() >= 2;
    for (std::size_t j = 0; dense && j < probes.size(); ++j) dense = w.names[j] == probes[j].name;
    if (dense) {
        for (std::size_t j = 0; j < probes.size(); ++j) {
            const double I = cumulative_trapezoid(w.times, w.integrand[j]).back();
            out.push_back(std::fabs(w.pairing[j].back() - w.pairing[j].front() - I));
        }
        return out;
    }
    // checkpoint fallback
    std::vector<std::vector<double>> pair(probes.size()), integ(probes.size());
    for (std::size_t i = 0; i < traj.fields.size(); ++i) {
        const ScalarField& om = traj.fields[i];
        const VelocityField u = velocity_spectral(om, false);
        const double t = traj.times[i];
        for (std::size_t j = 0; j < probes.size(); ++j) {
            double a = 0.0, b = 0.0;
            for (std::size_t k = 0; k < g.size(); ++k) {
                const Point x = g.node(k);
                const double phi = probes[j].value(t, x);
                if (phi == 0.0) continue;
                const Point gr = probes[j].gradient(t, x);
                a += phi * om[k];
                b += (probes[j].time_derivative(t, x) + u.u1[k] * gr.x1 + u.u2[k] * gr.x2) * om[k];
            }
            pair[j].push_back(a * g.cell_area());
            integ[j].push_back(b * g.cell_area());
        }
    }
    for (std::size_t j = 0; j < probes.size(); ++j) {
        const double I = cumulative_trapezoid(traj.times, integ[j]).back();
        out.push_back(std::fabs(pair[j].back() - pair[j].front() - I));
    }
    return out;
}

InequalityCheck check_weak_solution(const Trajectory& traj, const std::vector<TestFunction>& probes) {
    InequalityCheck c;
    c.name = "weak_solution";
    c.anchor = "int phi(T) w(T) - int phi(0) w0 = int int (d_t phi + u . grad phi) w";
    const std::vector<double> res = weak_residuals(traj, probes);
    if (traj.fields.empty()) return c;
    const Grid2D& g = traj.fields[0].grid();
    const double W11 = sobolev_norm(traj.fields[0], 1);
    for (std::size_t j = 0; j < probes.size(); ++j) {
        double s0 = 0.0, s1 = 0.0, st = 0.0;
        for (double t : traj.times)
            for (std::size_t k = 0; k < g.size(); ++k) {
                const Point x = g.node(k);
                const Point gr = probes[j].gradient(t, x);
                s0 = std::max(s0, std::fabs(probes[j].value(t, x)));
                s1 = std::max(s1, std::hypot(gr.x1, gr.x2));
                st = std::max(st, std::fabs(probes[j].time_derivative(t, x)));
            }
        const double c1 = s0 + s1 + st;
        c.add(static_cast<double>(j), res[j], 1e-3 * c1 * W11);
        c.extras.emplace_back("residual_" + probes[j].name, res[j]);
        c.extras.emplace_back("normalization_" + probes[j].name, c1 * W11);
    }
    c.finalize();
    const bool dense = !traj.weak.names.empty();
    c.notes = std::string(dense ? "per-step" : "checkpoint") + " trapezoid in time; probe index in column t";
    return c;
}

std::vector<InequalityCheck> check_compactness_diagnostics(const Trajectory& traj, const std::vector<double>& eps_list,
                                                           const CompactnessOptions& opt) {
    if (traj.fields.empty()) throw ConfigurationError("compactness diagnostics need a trajectory");
    const ScalarField& w0 = traj.fields[0];
    const Grid2D& g = w0.grid();
    const double L = g.half_width(), dx = g.dx();
    for (double e : eps_list)
        if (!(e >= 4.0 * dx * (1.0 - 1e-12)) || e > L / 4.0 * (1.0 + 1e-12))
            throw DomainError("mollification parameter " + fmt("%g", e) + " outside [4 dx, L/4]");
    const double T = traj.config.T;
    const std::vector<double> diag = {0.0, 0.5 * T, T};
    const std::vector<double> radii = opt.tail_radii.empty() ? std::vector<double>{L / 4.0, L / 2.0} : opt.tail_radii;
    const std::vector<Point> shifts = {{dx, 0.0}, {0.0, 4.0 * dx}, {3.0 * dx, 5.0 * dx}};

    struct Run {
        double eps;
        std::vector<ScalarField> fields;  // at diag times
        InequalityCheck tails;
    };
    std::vector<Run> runs;
    double M = 0.0;
    for (double eps : eps_list) {
        Run r;
        r.eps = eps;
        const ScalarField w0e = mollify(w0, eps);
        std::vector<double> cps = even_checkpoints(T, std::max(opt.checkpoints, 3));
        cps.push_back(0.5 * T);
        const Trajectory tr = simulate(w0e, T, traj.config.dt, cps, traj.config.method);
        for (const ScalarField& f : tr.fields) M = std::max(M, sobolev_norm(f, 2));
        const GridSampler sampler = GridSampler::from_vorticity(tr.times, tr.fields, true);
        const double gl2 = grad_l2(w0e);

        InequalityCheck& c = r.tails;
        c.name = "tails[eps=" + fmt("%.6g", eps) + "]";
        c.anchor = "tail of w^eps(t) below composed tails of w0^eps";
        for (double td : diag) {
            std::size_t idx = 0;
            while (idx + 1 < tr.times.size() && std::fabs(tr.times[idx] - td) > 1e-12 * std::max(1.0, T)) ++idx;
            const ScalarField& wt = tr.fields[idx];
            r.fields.push_back(wt);
            double gsup = 1.0, l2g2 = 0.0, vmax = 0.0;
            for (std::size_t k = 0; k <= idx; ++k) vmax = std::max(vmax, tr.velocity_sup[k]);
            if (td > 0.0) {
                const FlowMap inv = advance_flow(sampler, g, td, 0.0, opt.flow_dt, true);
                const FlowGradientBounds b = flow_gradient_bounds(inv);
                gsup = b.sup_grad;
                l2g2 = b.l2_grad2;
            }
            const double s = td * vmax;
            for (double R : radii) {
                const double Rs = std::max(0.0, R - s);
                const double E0 = tail_mass(w0e, Rs, 0), E01 = tail_mass(w0e, Rs, 1), E012 = tail_mass(w0e, Rs, 2);
                const double rhs = E0 + std::sqrt(2.0) * gsup * (E01 - E0) +
                                   2.0 * std::sqrt(2.0) * gsup * gsup * (E012 - E01) + 2.0 * l2g2 * gl2;
                c.add(td, tail_mass(wt, R, 2), rhs);
            }
        }
        c.finalize();
        c.notes = "one row per (t, R) with R in {" + fmt("%.6g", radii.front()) + ", " + fmt("%.6g", radii.back()) +
                  "}; displacement bound t max ||u||_inf";
        runs.push_back(std::move(r));
    }

    std::vector<InequalityCheck> out;
    for (Run& r : runs) out.push_back(std::move(r.tails));
    for (const Run& r : runs) {
        InequalityCheck c;
        c.name = "equicontinuity[eps=" + fmt("%.6g", r.eps) + "]";
        c.anchor = "int |w^eps(t, x + h) - w^eps(t, x)| dx <= |h| M";
        for (std::size_t i = 0; i < diag.size(); ++i)
            for (const Point& h : shifts) c.add(diag[i], translation_modulus(r.fields[i], h), std::hypot(h.x1, h.x2) * M);
        c.extras.emplace_back("M", M);
        c.finalize();
        c.notes = "M = max over eps and t of ||w^eps(t)||_{W^{2,1}}";
        out.push_back(std::move(c));
    }
    for (double delta : opt.deltas) {
        InequalityCheck c;
        c.name = "equiintegrability[delta=" + fmt("%.6g", delta) + "]";
        c.anchor = "sup over eps of int_0^delta (|D^2 w^eps(t)|)^*";
        std::vector<double> sup(diag.size(), 0.0);
        for (const Run& r : runs)
            for (std::size_t i = 0; i < diag.size(); ++i)
                sup[i] = std::max(sup[i], small_set_concentration(hessian_abs_sum(r.fields[i]), delta));
        for (std::size_t i = 0; i < diag.size(); ++i) c.add(diag[i], sup[i], 10.0 * sup[0]);
        c.extras.emplace_back("delta", delta);
        c.finalize();
        c.notes = "rhs is 10x the t = 0 value";
        out.push_back(std::move(c));
    }
    return out;
}

// ============================================================================
// Ensemble checks
// ============================================================================

InequalityCheck check_holder_lorentz(const std::vector<ScalarField>& fields) {
    if (fields.size() < 2) throw ConfigurationError("check_holder_lorentz needs at least 2 fields");
    InequalityCheck c;
    c.name = "holder_lorentz";
    c.anchor = "int |f g| <= ||f||_{(2,1)} ||g||_{(2,inf)}";
    for (std::size_t i = 0; i < fields.size(); ++i) {
        const ScalarField& f = fields[i];
        const ScalarField& h = fields[(i + 1) % fields.size()];
        c.add(static_cast<double>(i), integrate(f.times(h).abs()), lorentz_norm(f, 2.0, 1.0) * lorentz_norm(h, 2.0, kInf));
    }
    c.finalize();
    c.notes = "pair (i, i+1 mod N) in column t";
    return c;
}

InequalityCheck check_lorentz_nesting(const std::vector<ScalarField>& fields) {
    InequalityCheck c;
    c.name = "lorentz_nesting";
    c.anchor = "||f||_{(2,inf)} <= ||f||_{(2,1)}";
    double worst = 0.0;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        const RearrangementProfile p = decreasing_rearrangement(fields[i]);
        const double a = lorentz_norm(p, 2.0, kInf), b = lorentz_norm(p, 2.0, 1.0);
        c.add(static_cast<double>(i), a, b);
        if (b > 0.0) worst = std::max(worst, a / b);
    }
    c.extras.emplace_back("max_ratio", worst);
    c.finalize();
    if (!c.pass) {
        c.verdict = Verdict::inconclusive;
        c.notes = "constant 1 exceeded; max ratio " + fmt("%.6g", worst);
    }
    return c;
}

InequalityCheck check_sobolev_lorentz(const std::vector<ScalarField>& fields, double slack) {
    InequalityCheck c;
    c.name = "sobolev_lorentz";
    c.anchor = "||f||_{(2,1)} <= C || |grad f| ||_1";
    const double sharp = 1.0 / std::sqrt(M_PI);
    std::vector<double> l, sc;
    for (const ScalarField& f : fields) {
        l.push_back(lorentz_norm(f, 2.0, 1.0));
        sc.push_back(grad_l1(f));
    }
    c.fitted_constant = fit_linear_constant(l, sc);
    for (std::size_t i = 0; i < l.size(); ++i) c.add(static_cast<double>(i), l[i], (1.0 + slack) * sharp * sc[i]);
    c.extras.emplace_back("sharp_constant", sharp);
    c.extras.emplace_back("ratio_to_sharp", c.fitted_constant / sharp);
    c.finalize();
    c.notes = "fitted_C is the empirical constant; rhs uses 1/sqrt(pi) with " + fmt("%g", 100.0 * slack) + "% slack";
    return c;
}

std::vector<InequalityCheck> check_near_far(const std::vector<ScalarField>& fields) {
    InequalityCheck far, near, sum;
    far.name = "near_far_far";
    far.anchor = "||far part||_inf <= C ||w||_1";
    far.fitted = true;
    near.name = "near_far_near";
    near.anchor = "||near part||_inf <= C (|w|_D + ||w||_inf)";
    near.fitted = true;
    sum.name = "near_far_sum";
    sum.anchor = "near + far = K * grad w";
    const KernelCutoff cut;
    std::vector<double> lf, sf, ln, sn;
    double worst = 0.0;
    for (const ScalarField& w : fields) {
        const NearFar nf = near_far_split(w, cut);
        const VelocityField d = velocity_direct(w);
        lf.push_back(gradient_sup(nf.far));
        sf.push_back(lp_norm(w, 1.0));
        ln.push_back(gradient_sup(nf.near));
        sn.push_back(dini_seminorm(w) + max_abs(w));
        double err = 0.0, ref = 0.0;
        for (int c = 0; c < 4; ++c)
            for (std::size_t k = 0; k < w.size(); ++k) {
                err = std::max(err, std::fabs(nf.near[c][k] + nf.far[c][k] - d.grad[c][k]));
                ref = std::max(ref, std::fabs(d.grad[c][k]));
            }
        const double rel = ref > 0.0 ? err / ref : err;
        worst = std::max(worst, rel);
        sum.add(static_cast<double>(sum.t.size()), rel, 1e-3);
    }
    far.fitted_constant = fit_linear_constant(lf, sf);
    near.fitted_constant = fit_linear_constant(ln, sn);
    for (std::size_t i = 0; i < lf.size(); ++i) {
        far.add(static_cast<double>(i), lf[i], far.fitted_constant * sf[i]);
        near.add(static_cast<double>(i), ln[i], near.fitted_constant * sn[i]);
    }
    far.finalize();
    near.finalize();
    sum.extras.emplace_back("max_rel_error", worst);
    sum.finalize();
    sum.notes = "relative sup error against the direct-quadrature gradient";
    return {far, near, sum};
}

// ============================================================================
// Output
// ============================================================================

void write_ledger_csv(const std::string& path, const std::vector<InequalityCheck>& checks) {
    std::FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) throw IoError("cannot open ledger for writing: " + path);
    std::fputs("check,t,lhs,rhs,margin,fitted_C,pass\n", fp);
    for (const InequalityCheck& c : checks) {
        for (std::size_t i = 0; i < c.t.size(); ++i) {
            const bool ok = c.rhs[i] - c.lhs[i] >= -c.tolerance;
            std::fprintf(fp, "%s,%.17g,%.17g,%.17g,%.17g,", c.name.c_str(), c.t[i], c.lhs[i], c.rhs[i],
                         c.rhs[i] - c.lhs[i]);
            if (c.fitted || c.fitted_constant != 0.0) std::fprintf(fp, "%.17g", c.fitted_constant);
            std::fprintf(fp, ",%s\n", ok ? "true" : "false");
        }
    }
    if (std::fclose(fp) != 0) throw IoError("error writing ledger: " + path);
}

std::string format_check(const InequalityCheck& c) {
    std::string s = c.name + ": " + verdict_name(c.verdict);
    s += "  margin=" + fmt("%.6g", c.margin);
    if (c.fitted || c.fitted_constant != 0.0) s += "  C=" + fmt("%.6g", c.fitted_constant);
    s += "  samples=" + std::to_string(c.t.size());
    for (const auto& [k, v] : c.extras) s += "  " + k + "=" + fmt("%.6g", v);
    s += "\n    " + c.anchor;
    if (!c.notes.empty()) s += "\n    " + c.notes;
    return s;
}

void write_ledger_summary(const std::string& path, const std::vector<InequalityCheck>& checks) {
    std::FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) throw IoError("cannot open summary for writing: " + path);
    std::size_t failed = 0;
    for (const InequalityCheck& c : checks) {
        std::fprintf(fp, "%s\n", format_check(c).c_str());
        failed += c.failed() ? 1 : 0;
    }
    std::fprintf(fp, "\n%zu check(s), %zu failed\n", checks.size(), failed);
    if (std::fclose(fp) != 0) throw IoError("error writing summary: " + path);
}

}  // namespace cel
