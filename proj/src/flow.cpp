#include "cel/flow.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>

#include "cel/parallel.hpp"

namespace cel {

// ============================================================================
// Samplers
// ============================================================================

GridSampler::GridSampler(std::vector<double> times, const std::vector<VelocityField>& fields, bool with_hessian,
                         double hold_until)
    : grid_(fields.empty() ? throw ConfigurationError("velocity sampler needs at least one snapshot")
                           : fields.front().grid()),
      times_(std::move(times)),
      hess_(with_hessian) {
    if (times_.size() != fields.size()) throw ConfigurationError("sampler times and snapshots differ in count");
    for (std::size_t k = 1; k < times_.size(); ++k)
        if (!(times_[k] > times_[k - 1])) throw ConfigurationError("sampler times must increase strictly");
    lo_ = times_.front();
    hi_ = times_.size() == 1 ? std::max(hold_until, lo_) : times_.back();
    for (const VelocityField& v : fields) {
        if (v.grid() != grid_) throw ConfigurationError("sampler snapshots live on different grids");
        Snap s;
        s.comp.push_back(v.u1.values());
        s.comp.push_back(v.u2.values());
        for (const ScalarField& g : v.grad) s.comp.push_back(g.values());
        if (hess_) {
            for (const ScalarField* c : {&v.u1, &v.u2})
                for (ScalarField& h : spectral_partials(*c, {{2, 0}, {1, 1}, {0, 2}})) s.comp.push_back(h.values());
        }
        snaps_.push_back(std::move(s));
    }
}

GridSampler GridSampler::from_vorticity(const std::vector<double>& times, const std::vector<ScalarField>& omegas,
                                        bool with_hessian) {
    std::vector<VelocityField> v;
    v.reserve(omegas.size());
    for (const ScalarField& w : omegas) v.push_back(velocity_spectral(w));
    return GridSampler(times, v, with_hessian);
}

GridSampler GridSampler::frozen(const VelocityField& u, double t_min, double t_max, bool with_hessian) {
    return GridSampler({t_min}, {u}, with_hessian, t_max);
}

VelocitySample GridSampler::evaluate(double t, Point x, int order) const {
    const double slack = 1e-12 * std::max(1.0, std::fabs(hi_) + std::fabs(lo_));
    if (t < lo_ - slack || t > hi_ + slack) throw DomainError("velocity sampler queried outside its time range");
    if (order >= 2 && !hess_) throw ConfigurationError("sampler built without second derivatives");
    const CubicStencil st(grid_, x);
    const int ncomp = order <= 0 ? 2 : (order == 1 ? 6 : 12);
    double val[12] = {};
    if (snaps_.size() == 1) {
        for (int c = 0; c < ncomp; ++c) val[c] = st.apply(snaps_[0].comp[c].data());
    } else {
        std::size_t k = static_cast<std::size_t>(std::upper_bound(times_.begin(), times_.end(), t) - times_.begin());
        k = std::clamp<std::size_t>(k, 1, times_.size() - 1);
        const double ta = times_[k - 1], tb = times_[k];
        const double th = std::clamp((t - ta) / (tb - ta), 0.0, 1.0);
        for (int c = 0; c < ncomp; ++c) {
            const double a = st.apply(snaps_[k - 1].comp[c].data());
            const double b = th == 0.0 ? a : st.apply(snaps_[k].comp[c].data());
            val[c] = (1.0 - th) * a + th * b;
        }
    }
    VelocitySample s;
    s.u1 = val[0];
    s.u2 = val[1];
    for (int c = 0; c < 4; ++c) s.grad[c] = val[2 + c];
    for (int c = 0; c < 6; ++c) s.hess[c] = val[6 + c];
    return s;
}

// ============================================================================
// Integration
// ============================================================================

namespace {

/// X (2), G (4), H (8).
struct State {
    double v[14];
};

int state_size(int order) { return order == 0 ? 2 : (order == 1 ? 6 : 14); }

inline int hidx(int a, int b) { return a == b ? (a == 0 ? 0 : 2) : 1; }

void rhs(const VelocitySampler& vel, double t, const State& s, int order, State& out) {
    const VelocitySample u = vel.evaluate(t, {s.v[0], s.v[1]}, order);
    out.v[0] = u.u1;
    out.v[1] = u.u2;
    if (order == 0) return;
    const double* G = s.v + 2;
    for (int k = 0; k < 2; ++k)
        for (int j = 0; j < 2; ++j) out.v[2 + 2 * k + j] = u.grad[2 * k] * G[j] + u.grad[2 * k + 1] * G[2 + j];
    if (order == 1) return;
    const double* H = s.v + 6;
    for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                double acc = 0.0;
                for (int l = 0; l < 2; ++l)
                    for (int m = 0; m < 2; ++m) acc += u.hess[3 * k + hidx(l, m)] * G[2 * l + i] * G[2 * m + j];
                for (int m = 0; m < 2; ++m) acc += u.grad[2 * k + m] * H[4 * m + 2 * i + j];
                out.v[6 + 4 * k + 2 * i + j] = acc;
            }
}

void rk4_step(const VelocitySampler& vel, double t, double h, State& s, int order) {
    const int m = state_size(order);
    State k1, k2, k3, k4, tmp;
    rhs(vel, t, s, order, k1);
    for (int i = 0; i < m; ++i) tmp.v[i] = s.v[i] + 0.5 * h * k1.v[i];
    rhs(vel, t + 0.5 * h, tmp, order, k2);
    for (int i = 0; i < m; ++i) tmp.v[i] = s.v[i] + 0.5 * h * k2.v[i];
    rhs(vel, t + 0.5 * h, tmp, order, k3);
    for (int i = 0; i < m; ++i) tmp.v[i] = s.v[i] + h * k3.v[i];
    rhs(vel, t + h, tmp, order, k4);
    for (int i = 0; i < m; ++i) s.v[i] += h / 6.0 * (k1.v[i] + 2.0 * k2.v[i] + 2.0 * k3.v[i] + k4.v[i]);
}

struct Segment {
    double a, b;
    long steps;
};

std::vector<Segment> plan_segments(const VelocitySampler& vel, double t0, double t1, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("flow time step must be positive");
    const double lo = std::min(t0, t1), hi = std::max(t0, t1);
    const double slack = 1e-12 * std::max(1.0, std::fabs(lo) + std::fabs(hi));
    if (lo < vel.t_min() - slack || hi > vel.t_max() + slack)
        throw DomainError("flow interval lies outside the velocity sampler's time range");
    std::vector<double> cuts = {t0};
    std::vector<double> bp = vel.breakpoints();
    if (t1 < t0) std::reverse(bp.begin(), bp.end());
    for (double b : bp)
        if (b > lo + slack && b < hi - slack) cuts.push_back(b);
    cuts.push_back(t1);
    std::vector<Segment> segs;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double len = std::fabs(cuts[i + 1] - cuts[i]);
        if (len == 0.0) continue;
        long steps = std::max(1L, static_cast<long>(std::ceil(len / dt - 1e-9)));
        segs.push_back({cuts[i], cuts[i + 1], steps});
    }
    return segs;
}

void integrate_states(const VelocitySampler& vel, std::vector<State>& states, double t0, double t1, double dt,
                      int order) {
    const std::vector<Segment> segs = plan_segments(vel, t0, t1, dt);
    std::atomic<bool> bad{false};
    parallel_for(states.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
            State& s = states[p];
            for (const Segment& sg : segs) {
                const double h = (sg.b - sg.a) / static_cast<double>(sg.steps);
                for (long k = 0; k < sg.steps; ++k) {
                    const double t = k + 1 == sg.steps ? sg.b - h : sg.a + k * h;
                    rk4_step(vel, t, h, s, order);
                }
            }
            if (!std::isfinite(s.v[0]) || !std::isfinite(s.v[1])) bad = true;
        }
    }, 64);
    if (bad) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "non-finite particle position while integrating flow from t=%g to t=%g with dt=%g",
                      t0, t1, dt);
        throw InstabilityError(buf);
    }
}

}  // namespace

FlowMap identity_flow(const Grid2D& grid, double t, bool with_second_gradient) {
    FlowMap f{grid, t, t, {}, {}, {}, {}};
    f.positions.resize(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) f.positions[k] = grid.node(k);
    f.grad.assign(grid.size(), Mat2{1.0, 0.0, 0.0, 1.0});
    if (with_second_gradient) f.grad2.assign(grid.size(), Tensor222{});
    f.jac.assign(grid.size(), 1.0);
    return f;
}

namespace {

std::vector<State> identity_states(const Grid2D& grid) {
    std::vector<State> states(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        State& s = states[k];
        std::fill(std::begin(s.v), std::end(s.v), 0.0);
        const Point p = grid.node(k);
        s.v[0] = p.x1;
        s.v[1] = p.x2;
        s.v[2] = 1.0;
        s.v[5] = 1.0;
    }
    return states;
}

FlowMap to_flow_map(const Grid2D& grid, const std::vector<State>& states, double t0, double t1, int order) {
    const bool with_second_gradient = order == 2;
    FlowMap f{grid, t0, t1, {}, {}, {}, {}};
    f.positions.resize(grid.size());
    f.grad.resize(grid.size());
    f.jac.resize(grid.size());
    if (with_second_gradient) f.grad2.resize(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const State& s = states[k];
        f.positions[k] = {s.v[0], s.v[1]};
        for (int c = 0; c < 4; ++c) f.grad[k][c] = s.v[2 + c];
        if (with_second_gradient)
            for (int c = 0; c < 8; ++c) f.grad2[k][c] = s.v[6 + c];
        f.jac[k] = s.v[2] * s.v[5] - s.v[3] * s.v[4];
        for (int c = 0; c < state_size(order); ++c)
            if (!std::isfinite(s.v[c])) throw InstabilityError("non-finite flow gradient; reduce dt");
    }
    return f;
}

}  // namespace

FlowMap advance_flow(const VelocitySampler& velocity_at, const Grid2D& grid, double t0, double t1, double dt,
                     bool with_second_gradient) {
    const int order = with_second_gradient ? 2 : 1;
    std::vector<State> states = identity_states(grid);
    integrate_states(velocity_at, states, t0, t1, dt, order);
    return to_flow_map(grid, states, t0, t1, order);
}

std::vector<FlowMap> advance_flow_sequence(const VelocitySampler& velocity_at, const Grid2D& grid,
                                           const std::vector<double>& times, double dt, bool with_second_gradient) {
    if (times.empty()) return {};
    const int order = with_second_gradient ? 2 : 1;
    std::vector<State> states = identity_states(grid);
    std::vector<FlowMap> out;
    out.push_back(to_flow_map(grid, states, times.front(), times.front(), order));
    for (std::size_t i = 1; i < times.size(); ++i) {
        integrate_states(velocity_at, states, times[i - 1], times[i], dt, order);
        out.push_back(to_flow_map(grid, states, times.front(), times[i], order));
    }
    return out;
}

std::vector<Point> advance_points(const VelocitySampler& velocity_at, const std::vector<Point>& start, double t0,
                                  double t1, double dt) {
    std::vector<State> states(start.size());
    for (std::size_t k = 0; k < start.size(); ++k) {
        states[k].v[0] = start[k].x1;
        states[k].v[1] = start[k].x2;
    }
    integrate_states(velocity_at, states, t0, t1, dt, 0);
    std::vector<Point> out(start.size());
    for (std::size_t k = 0; k < start.size(); ++k) out[k] = {states[k].v[0], states[k].v[1]};
    return out;
}

// ============================================================================
// Transport and bounds
// ============================================================================

ScalarField transport_by_characteristics(const ScalarField& omega0, const FlowMap& inverse_flow) {
    if (omega0.grid() != inverse_flow.grid) throw ConfigurationError("transport: flow and field grids differ");
    if (inverse_flow.t1 > inverse_flow.t0) throw ConfigurationError("transport needs an inverse flow (t -> 0)");
    std::vector<double> v(omega0.size());
    parallel_for(v.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t k = b; k < e; ++k) v[k] = sample_one(omega0, inverse_flow.positions[k]);
    }, 256);
    return ScalarField(omega0.grid(), std::move(v));
}

FlowGradientBounds flow_gradient_bounds(const FlowMap& flow) {
    if (flow.grad.size() != flow.grid.size()) throw ConfigurationError("flow map carries no gradient data");
    FlowGradientBounds b;
    for (const Mat2& m : flow.grad) b.sup_grad = std::max(b.sup_grad, operator_norm(m[0], m[1], m[2], m[3]));
    if (flow.grad2.size() != flow.grid.size()) {
        b.l2_grad2 = std::numeric_limits<double>::quiet_NaN();
        return b;
    }
    double s = 0.0;
    for (const Tensor222& h : flow.grad2)
        for (double x : h) s += x * x;
    b.l2_grad2 = std::sqrt(s * flow.grid.cell_area());
    return b;
}

double jacobian_defect(const FlowMap& flow) {
    double m = 0.0;
    for (double j : flow.jac) m = std::max(m, std::fabs(j - 1.0));
    return m;
}

void write_flow_csv(const std::string& path, const FlowMap& flow) {
    std::FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) throw IoError("cannot open csv for writing: " + path);
    std::fputs("a1,a2,x1,x2,j11,j12,j21,j22,det\n", fp);
    for (std::size_t k = 0; k < flow.positions.size(); ++k) {
        const Point a = flow.grid.node(k);
        const Mat2& g = flow.grad[k];
        std::fprintf(fp, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", a.x1, a.x2, flow.positions[k].x1,
                     flow.positions[k].x2, g[0], g[1], g[2], g[3], flow.jac[k]);
    }
    std::fclose(fp);
}

}  // namespace cel
