#include "cel/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "cel/biot_savart.hpp"
#include "cel/norms.hpp"
#include "cel/parallel.hpp"
#include "cel/spectral.hpp"

namespace cel {

std::string method_name(Method m) { return m == Method::spectral ? "spectral" : "semi_lagrangian"; }

Method parse_method(const std::string& s) {
    if (s == "spectral") return Method::spectral;
    if (s == "semi_lagrangian") return Method::semi_lagrangian;
    throw ConfigurationError("unknown method '" + s + "' (valid: spectral, semi_lagrangian)");
}

// ============================================================================
// Mollifier
// ============================================================================

Mollifier::Mollifier(const Grid2D& grid, double epsilon) : grid_(grid), eps_(epsilon) {
    if (!(epsilon > 0.0) || epsilon > grid.half_width() / 4.0 * (1.0 + 1e-12))
        throw DomainError("mollifier epsilon must lie in (0, L/4]");
    const double dx = grid.dx();
    const int R = static_cast<int>(std::ceil(epsilon / dx));
    double sum = 0.0;
    for (int b = -R; b <= R; ++b)
        for (int a = -R; a <= R; ++a) {
            const double s2 = (static_cast<double>(a) * a + static_cast<double>(b) * b) * dx * dx / (epsilon * epsilon);
            if (s2 >= 1.0) continue;
            const double w = std::exp(-1.0 / (1.0 - s2));
            taps_.push_back({a, b, w});
            sum += w;
        }
    for (Tap& t : taps_) t.w /= sum;
}

double Mollifier::weight_sum() const {
    double s = 0.0;
    for (const Tap& t : taps_) s += t.w;
    return s;
}

ScalarField Mollifier::apply(const ScalarField& f) const {
    if (f.grid() != grid_) throw ConfigurationError("mollifier built for a different grid");
    const int n = grid_.n();
    std::vector<double> out(f.size(), 0.0);
    const double* src = f.data();
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t rb, std::size_t re) {
        for (std::size_t i2 = rb; i2 < re; ++i2)
            for (int i1 = 0; i1 < n; ++i1) {
                double acc = 0.0;
                for (const Tap& t : taps_) {
                    const int j1 = ((i1 - t.a) % n + n) % n;
                    const int j2 = ((static_cast<int>(i2) - t.b) % n + n) % n;
                    acc += t.w * src[static_cast<std::size_t>(j2) * n + j1];
                }
                out[i2 * n + i1] = acc;
            }
    }, 4);
    return ScalarField(grid_, std::move(out));
}

ScalarField mollify(const ScalarField& f, double epsilon) { return Mollifier(f.grid(), epsilon).apply(f); }

// ============================================================================
// Test functions
// ============================================================================

namespace {

/// exp(1 - 1/(1 - s)) for s = |y|^2 < 1, with d/ds.
inline void bump_s(double s, double& b, double& db) {
    if (s >= 1.0) {
        b = db = 0.0;
        return;
    }
    const double q = 1.0 / (1.0 - s);
    b = std::exp(1.0 - q);
    db = -b * q * q;
}

}  // namespace

double TestFunction::value(double t, Point x) const {
    const double y1 = (x.x1 - center.x1) / radius, y2 = (x.x2 - center.x2) / radius;
    double b, db;
    bump_s(y1 * y1 + y2 * y2, b, db);
    return a(t) * (1.0 + c1 * x.x1 + c2 * x.x2) * b;
}

double TestFunction::time_derivative(double t, Point x) const {
    const double y1 = (x.x1 - center.x1) / radius, y2 = (x.x2 - center.x2) / radius;
    double b, db;
    bump_s(y1 * y1 + y2 * y2, b, db);
    return da(t) * (1.0 + c1 * x.x1 + c2 * x.x2) * b;
}

Point TestFunction::gradient(double t, Point x) const {
    const double y1 = (x.x1 - center.x1) / radius, y2 = (x.x2 - center.x2) / radius;
    double b, db;
    bump_s(y1 * y1 + y2 * y2, b, db);
    const double p = 1.0 + c1 * x.x1 + c2 * x.x2;
    const double at = a(t);
    return {at * (c1 * b + p * db * 2.0 * y1 / radius), at * (c2 * b + p * db * 2.0 * y2 / radius)};
}

void TestFunction::require_inside(const Grid2D& grid) const {
    const double reach = std::max(std::fabs(center.x1), std::fabs(center.x2)) + radius;
    if (reach >= grid.half_width() - grid.dx())
        throw ConfigurationError("test function '" + name + "' support touches the box boundary");
}

std::vector<TestFunction> weak_form_presets() {
    std::vector<TestFunction> v;
    v.push_back({"bump_static", {0.0, 0.0}, 2.5, 0.0, 0.0, [](double) { return 1.0; }, [](double) { return 0.0; }});
    v.push_back({"bump_cos", {0.5, -0.5}, 2.0, 0.0, 0.0, [](double t) { return std::cos(t); },
                 [](double t) { return -std::sin(t); }});
    v.push_back({"bump_linear", {-1.0, 0.5}, 1.5, 0.0, 0.0, [](double t) { return 1.0 + t; },
                 [](double) { return 1.0; }});
    v.push_back({"tilted_decay", {0.0, 1.0}, 2.0, 0.5, -0.3, [](double t) { return std::exp(-t); },
                 [](double t) { return -std::exp(-t); }});
    v.push_back({"bump_sin", {1.0, 1.0}, 1.8, 0.0, 0.0, [](double t) { return std::sin(t + 0.3); },
                 [](double t) { return std::cos(t + 0.3); }});
    return v;
}

// ============================================================================
// Simulation
// ============================================================================

namespace {

struct SpectralOps {
    Grid2D grid;
    std::vector<double> k1, k2;  // by column / row
    std::vector<char> keep;      // 2/3 rule, half-spectrum layout

    explicit SpectralOps(const Grid2D& g) : grid(g) {
        const int n = g.n();
        k1.resize(n / 2 + 1);
        k2.resize(n);
        for (int j = 0; j <= n / 2; ++j) k1[j] = wavenumber(g, j);
        for (int j = 0; j < n; ++j) k2[j] = wavenumber(g, signed_mode(j, n));
        keep.resize(static_cast<std::size_t>(n) * (n / 2 + 1));
        const int cut = n / 3;
        for (int j2 = 0; j2 < n; ++j2)
            for (int j1 = 0; j1 <= n / 2; ++j1)
                keep[static_cast<std::size_t>(j2) * (n / 2 + 1) + j1] =
                    (j1 <= cut && std::abs(signed_mode(j2, n)) <= cut) ? 1 : 0;
    }

    void mask(Spectrum& s) const {
        for (std::size_t i = 0; i < s.data.size(); ++i)
            if (!keep[i]) s.data[i] = 0.0;
    }

    /// u1, u2 and d1 w, d2 w spectra from w.
    void velocity_and_gradient(const Spectrum& w, Spectrum* u1, Spectrum* u2, Spectrum* w1, Spectrum* w2) const {
        const int n = grid.n(), c = n / 2 + 1;
        const cplx I(0.0, 1.0);
        for (Spectrum* s : {u1, u2, w1, w2})
            if (s) *s = w;
        for (int j2 = 0; j2 < n; ++j2)
            for (int j1 = 0; j1 < c; ++j1) {
                const std::size_t idx = static_cast<std::size_t>(j2) * c + j1;
                const double a = k1[j1], b = k2[j2];
                const double kk = a * a + b * b;
                const bool n1 = j1 == n / 2, n2 = j2 == n / 2;
                const cplx v = w.data[idx];
                if (u1) u1->data[idx] = (kk == 0.0 || n2) ? cplx(0.0) : I * b * v / kk;
                if (u2) u2->data[idx] = (kk == 0.0 || n1) ? cplx(0.0) : -I * a * v / kk;
                if (w1) w1->data[idx] = n1 ? cplx(0.0) : I * a * v;
                if (w2) w2->data[idx] = n2 ? cplx(0.0) : I * b * v;
            }
    }

    Spectrum rhs(const Spectrum& w) const {
        Spectrum u1, u2, w1, w2;
        velocity_and_gradient(w, &u1, &u2, &w1, &w2);
        const std::vector<double> U1 = inverse_fft(u1), U2 = inverse_fft(u2);
        const std::vector<double> W1 = inverse_fft(w1), W2 = inverse_fft(w2);
        std::vector<double> N(U1.size());
        for (std::size_t k = 0; k < N.size(); ++k) N[k] = U1[k] * W1[k] + U2[k] * W2[k];
        Spectrum out = forward_fft(grid, N.data());
        for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] = keep[i] ? -out.data[i] : cplx(0.0);
        return out;
    }
};

class WeakRecorder {
public:
    /// With ops the probe gradients are taken from the 2/3-projected probe, which is the
    /// pairing the spectral scheme conserves exactly; without, the analytic gradient is used.
    WeakRecorder(const Grid2D& grid, const std::vector<TestFunction>& probes, const SpectralOps* ops)
        : grid_(grid), probes_(probes) {
        rec_.names.reserve(probes.size());
        rec_.pairing.resize(probes.size());
        rec_.integrand.resize(probes.size());
        const std::size_t N = grid.size();
        for (const TestFunction& p : probes) {
            p.require_inside(grid);
            rec_.names.push_back(p.name);
            TestFunction unit = p;
            unit.a = [](double) { return 1.0; };
            std::vector<double> psi(N), g1(N), g2(N);
            for (std::size_t k = 0; k < N; ++k) {
                const Point x = grid.node(k);
                psi[k] = unit.value(0.0, x);
                const Point g = unit.gradient(0.0, x);
                g1[k] = g.x1;
                g2[k] = g.x2;
            }
            if (ops) {
                Spectrum s = forward_fft(grid, psi.data());
                ops->mask(s);
                Spectrum s1, s2;
                ops->velocity_and_gradient(s, nullptr, nullptr, &s1, &s2);
                g1 = inverse_fft(s1);
                g2 = inverse_fft(s2);
            }
            psi_.push_back(std::move(psi));
            g1_.push_back(std::move(g1));
            g2_.push_back(std::move(g2));
        }
    }

    bool active() const { return !probes_.empty(); }

    void observe(double t, const double* w, const double* u1, const double* u2) {
        if (!active()) return;
        rec_.times.push_back(t);
        const std::size_t N = grid_.size();
        for (std::size_t j = 0; j < probes_.size(); ++j) {
            const double* psi = psi_[j].data();
            const double* g1 = g1_[j].data();
            const double* g2 = g2_[j].data();
            double pair = 0.0, adv = 0.0;
            for (std::size_t k = 0; k < N; ++k) {
                pair += psi[k] * w[k];
                adv += (u1[k] * g1[k] + u2[k] * g2[k]) * w[k];
            }
            const TestFunction& p = probes_[j];
            rec_.pairing[j].push_back(p.a(t) * pair * grid_.cell_area());
            rec_.integrand[j].push_back((p.da(t) * pair + p.a(t) * adv) * grid_.cell_area());
        }
    }

    WeakFormRecord take() { return std::move(rec_); }

private:
    Grid2D grid_;
    std::vector<TestFunction> probes_;
    WeakFormRecord rec_;
    std::vector<std::vector<double>> psi_, g1_, g2_;
};

std::vector<double> normalize_checkpoints(const std::vector<double>& cps, double T) {
    std::vector<double> t;
    for (double c : cps) {
        if (!(c >= 0.0) || c > T * (1.0 + 1e-12)) throw ConfigurationError("checkpoints must lie in [0, T]");
        t.push_back(std::min(c, T));
    }
    t.push_back(0.0);
    t.push_back(T);
    std::sort(t.begin(), t.end());
    std::vector<double> out;
    for (double c : t)
        if (out.empty() || c - out.back() > 1e-12 * std::max(1.0, T)) out.push_back(c);
    out.back() = T;
    return out;
}

long steps_for(double len, double dt) { return std::max(1L, static_cast<long>(std::ceil(len / dt - 1e-9))); }

void store_checkpoint(Trajectory& tr, double t, ScalarField w) {
    const VelocityField u = velocity_spectral(w);
    tr.times.push_back(t);
    tr.velocity_sup.push_back(velocity_sup(u));
    tr.gradient_sup.push_back(gradient_sup(u.grad));
    tr.fields.push_back(std::move(w));
}

[[noreturn]] void unstable(double t_good, double dt) {
    char buf[200];
    std::snprintf(buf, sizeof buf, "non-finite vorticity after t=%.6g (last good time) with dt=%g", t_good, dt);
    throw InstabilityError(buf);
}

void run_spectral(const ScalarField& omega0, const std::vector<double>& times, double dt, Trajectory& tr,
                  WeakRecorder& weak) {
    const Grid2D& g = omega0.grid();
    const SpectralOps ops(g);
    Spectrum w = forward_fft(omega0);
    ops.mask(w);
    auto observe = [&](double t) {
        if (!weak.active()) return;
        Spectrum u1, u2;
        ops.velocity_and_gradient(w, &u1, &u2, nullptr, nullptr);
        const std::vector<double> W = inverse_fft(w), U1 = inverse_fft(u1), U2 = inverse_fft(u2);
        weak.observe(t, W.data(), U1.data(), U2.data());
    };
    store_checkpoint(tr, 0.0, inverse_fft_field(g, w));
    observe(0.0);
    double t = 0.0;
    for (std::size_t seg = 1; seg < times.size(); ++seg) {
        const double a = times[seg - 1], b = times[seg];
        const long m = steps_for(b - a, dt);
        const double h = (b - a) / static_cast<double>(m);
        for (long k = 0; k < m; ++k) {
            const Spectrum k1 = ops.rhs(w);
            Spectrum tmp = w;
            for (std::size_t i = 0; i < tmp.data.size(); ++i) tmp.data[i] = w.data[i] + 0.5 * h * k1.data[i];
            const Spectrum k2 = ops.rhs(tmp);
            for (std::size_t i = 0; i < tmp.data.size(); ++i) tmp.data[i] = w.data[i] + 0.5 * h * k2.data[i];
            const Spectrum k3 = ops.rhs(tmp);
            for (std::size_t i = 0; i < tmp.data.size(); ++i) tmp.data[i] = w.data[i] + h * k3.data[i];
            const Spectrum k4 = ops.rhs(tmp);
            bool finite = true;
            for (std::size_t i = 0; i < w.data.size(); ++i) {
                w.data[i] += h / 6.0 * (k1.data[i] + 2.0 * k2.data[i] + 2.0 * k3.data[i] + k4.data[i]);
                if (!std::isfinite(w.data[i].real()) || !std::isfinite(w.data[i].imag())) finite = false;
            }
            if (!finite) unstable(t, dt);
            t = (k + 1 == m) ? b : a + (k + 1) * h;
            observe(t);
        }
        std::vector<double> phys = inverse_fft(w);
        for (double v : phys)
            if (!std::isfinite(v)) unstable(a, dt);
        store_checkpoint(tr, b, ScalarField(g, std::move(phys)));
    }
}

void run_semi_lagrangian(const ScalarField& omega0, const std::vector<double>& times, double dt, Trajectory& tr,
                         WeakRecorder& weak) {
    const Grid2D& g = omega0.grid();
    const std::size_t N = g.size();
    std::vector<Point> nodes(N);
    for (std::size_t k = 0; k < N; ++k) nodes[k] = g.node(k);
    std::vector<double> d1(N, 0.0), d2(N, 0.0);  // backward-map displacement, periodic
    ScalarField w = omega0;
    store_checkpoint(tr, 0.0, w);
    double t = 0.0;
    VelocityField u = velocity_spectral(w, false);
    if (weak.active()) weak.observe(0.0, w.data(), u.u1.data(), u.u2.data());
    for (std::size_t seg = 1; seg < times.size(); ++seg) {
        const double a = times[seg - 1], b = times[seg];
        const long m = steps_for(b - a, dt);
        const double h = (b - a) / static_cast<double>(m);
        for (long k = 0; k < m; ++k) {
            const double tn = t;
            const double tn1 = (k + 1 == m) ? b : a + (k + 1) * h;
            // Velocity frozen at the start of the step.
            const GridSampler frozen = GridSampler::frozen(u, tn, tn1, false);
            const std::vector<Point> dep = advance_points(frozen, nodes, tn1, tn, tn1 - tn);
            const ScalarField D1(g, d1), D2(g, d2);
            std::vector<double> nd1(N), nd2(N), nw(N);
            bool finite = true;
            for (std::size_t q = 0; q < N; ++q) {
                const CubicStencil st(g, dep[q]);
                const Point back{dep[q].x1 + st.apply(D1.data()), dep[q].x2 + st.apply(D2.data())};
                nd1[q] = back.x1 - nodes[q].x1;
                nd2[q] = back.x2 - nodes[q].x2;
                nw[q] = sample_one(omega0, back);
                if (!std::isfinite(nw[q])) finite = false;
            }
            if (!finite) unstable(tn, dt);
            d1.swap(nd1);
            d2.swap(nd2);
            w = ScalarField(g, std::move(nw));
            t = tn1;
            u = velocity_spectral(w, false);
            if (weak.active()) weak.observe(t, w.data(), u.u1.data(), u.u2.data());
        }
        store_checkpoint(tr, b, w);
    }
}

}  // namespace

std::vector<double> even_checkpoints(double T, int count) {
    if (count < 2) throw ConfigurationError("need at least 2 checkpoints");
    std::vector<double> t(count);
    for (int i = 0; i < count; ++i) t[i] = T * i / (count - 1);
    t.back() = T;
    return t;
}

double cfl_limit(const ScalarField& omega0) {
    const double us = velocity_sup(velocity_spectral(omega0, false));
    if (us == 0.0) return std::numeric_limits<double>::infinity();
    return 0.5 * omega0.grid().dx() / us;
}

Trajectory simulate(const ScalarField& omega0, double T, double dt, const std::vector<double>& checkpoints,
                    Method method, const std::vector<TestFunction>& probes) {
    if (!(T > 0.0) || !std::isfinite(T)) throw ConfigurationError("horizon T must be positive");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigurationError("time step dt must be positive");
    const double limit = cfl_limit(omega0);
    if (dt > limit) {
        char buf[200];
        std::snprintf(buf, sizeof buf, "CFL violated: dt*|u0|/dx = %.4g > 0.5; use dt <= %.6g", 0.5 * dt / limit,
                      limit);
        throw ConfigurationError(buf);
    }
    Trajectory tr;
    tr.config = {T, dt, method};
    tr.initial_mean = integrate(omega0) / (4.0 * omega0.grid().half_width() * omega0.grid().half_width());
    const std::vector<double> times = normalize_checkpoints(checkpoints, T);
    const SpectralOps ops(omega0.grid());
    WeakRecorder weak(omega0.grid(), probes, method == Method::spectral ? &ops : nullptr);
    if (method == Method::spectral)
        run_spectral(omega0, times, dt, tr, weak);
    else
        run_semi_lagrangian(omega0, times, dt, tr, weak);
    tr.weak = weak.take();
    return tr;
}

double cross_validate(const ScalarField& omega0, double T, double dt) {
    const double l1 = lp_norm(omega0, 1.0);
    if (l1 == 0.0) return 0.0;
    const Trajectory a = simulate(omega0, T, dt, {0.0, T}, Method::spectral);
    const Trajectory b = simulate(omega0, T, dt, {0.0, T}, Method::semi_lagrangian);
    return lp_norm(a.fields.back() - b.fields.back(), 1.0) / l1;
}

}  // namespace cel
