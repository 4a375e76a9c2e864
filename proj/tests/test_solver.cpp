/// @file test_solver.cpp
/// @brief Mollifier, test functions, spectral and semi-Lagrangian transport.

#include <doctest.h>

#include <cmath>

#include "cel/biot_savart.hpp"
#include "cel/errors.hpp"
#include "cel/norms.hpp"
#include "cel/presets.hpp"
#include "cel/solver.hpp"
#include "oracles.hpp"

using namespace cel;

namespace {

double enstrophy(const ScalarField& w) { return oracle::inner(w, w); }

double energy(const ScalarField& w) {
    const VelocityField u = velocity_spectral(w, false);
    return 0.5 * (oracle::inner(u.u1, u.u1) + oracle::inner(u.u2, u.u2));
}

ScalarField shift(const ScalarField& f, int s1, int s2) {
    const Grid2D& g = f.grid();
    const int n = g.n();
    std::vector<double> v(g.size());
    for (int i2 = 0; i2 < n; ++i2)
        for (int i1 = 0; i1 < n; ++i1) v[g.index(i1, i2)] = f.at(((i1 - s1) % n + n) % n, ((i2 - s2) % n + n) % n);
    return ScalarField(g, v);
}

}  // namespace

TEST_SUITE("solver") {

// ============================================================================
// Mollifier
// ============================================================================

TEST_CASE("mollifier taps") {
    const Grid2D g(64, M_PI);
    for (double eps : {4 * g.dx(), 0.5, M_PI / 4.0}) {
        const Mollifier m(g, eps);
        CHECK(m.epsilon() == eps);
        CHECK(m.weight_sum() == doctest::Approx(1.0).epsilon(1e-12));
        double wmax = 0.0;
        for (const Mollifier::Tap& t : m.taps()) {
            CHECK(t.w > 0.0);
            CHECK(std::hypot(t.a, t.b) * g.dx() < eps);
            wmax = std::max(wmax, t.w);
        }
        // Radial: the center carries the largest weight.
        for (const Mollifier::Tap& t : m.taps())
            if (t.a == 0 && t.b == 0) CHECK(t.w == wmax);
    }
}

TEST_CASE("mollification preserves constants, mass and sign and contracts Lp") {
    const Grid2D g(64, M_PI);
    const Mollifier m(g, 0.4);
    const ScalarField c = ScalarField::constant(g, 2.5);
    CHECK(oracle::max_abs_diff(m.apply(c), c) <= 1e-12);
    for (const ScalarField& f : field_suite(g, 5)) {
        const ScalarField r = m.apply(f);
        CHECK(integrate(r) == doctest::Approx(integrate(f)).epsilon(1e-10).scale(lp_norm(f, 1.0)));
        for (double p : {1.0, 2.0, 3.0}) CHECK(lp_norm(r, p) <= lp_norm(f, p) * (1.0 + 1e-12));
        CHECK(max_abs(r) <= max_abs(f) * (1.0 + 1e-12));
    }
    const ScalarField pos = ScalarField::from_function(g, [](double x1, double) { return x1 > 0.0 ? 1.0 : 0.0; });
    const ScalarField r = m.apply(pos);
    for (std::size_t k = 0; k < g.size(); ++k) {
        CHECK(r[k] >= 0.0);
        CHECK(r[k] <= 1.0 + 1e-12);
    }
}

TEST_CASE("mollification commutes with grid translations and spectral derivatives") {
    const Grid2D g(64, M_PI);
    const Mollifier m(g, 0.5);
    const ScalarField f = preset_random_bandlimited(g, 8, 4.0);
    CHECK(oracle::max_abs_diff(m.apply(shift(f, 3, -5)), shift(m.apply(f), 3, -5)) <= 1e-13);
    const ScalarField a = m.apply(spectral_derivative(f, 1, 1));
    const ScalarField b = spectral_derivative(m.apply(f), 1, 1);
    CHECK(oracle::max_abs_diff(a, b) <= 1e-10 * max_abs(a));
}

TEST_CASE("mollification commutes with all derivatives up to order two and contracts W^{k,1}") {
    const Grid2D g(128, 2.0 * M_PI);
    const std::vector<ScalarField> suite = field_suite(g, 2);
    const Mollifier m(g, 4.0 * g.dx());
    for (std::size_t i : {std::size_t{0}, std::size_t{1}, std::size_t{6}, std::size_t{12}}) {
        const ScalarField& f = suite[i];
        const ScalarField fe = m.apply(f);
        for (int p = 0; p <= 2; ++p)
            for (int q = 0; p + q <= 2; ++q) {
                if (p + q == 0) continue;
                CHECK(oracle::max_abs_diff(spectral_partial(fe, p, q), m.apply(spectral_partial(f, p, q))) <= 1e-8);
            }
        for (int k : {0, 1, 2}) CHECK(sobolev_norm(fe, k) <= sobolev_norm(f, k) + 1e-8);
    }
}

TEST_CASE("mollification converges as epsilon shrinks") {
    const Grid2D g(256, M_PI);
    const ScalarField f = preset_random_bandlimited(g, 2, 3.0);
    double prev = INFINITY;
    for (double eps : {0.75, 0.4, 0.2, 0.1}) {
        const double e = oracle::max_abs_diff(mollify(f, eps), f);
        CHECK(e < prev);
        prev = e;
    }
    CHECK(prev <= 0.05 * max_abs(f));
    const ScalarField smooth = preset_gaussian(Grid2D(256, 2.0 * M_PI));
    const double dx = smooth.grid().dx();
    CHECK(lp_norm(mollify(smooth, 2.0 * dx) - smooth, 1.0) < lp_norm(mollify(smooth, 4.0 * dx) - smooth, 1.0));
}

TEST_CASE("mollifier domain errors") {
    const Grid2D g(32, 2.0);
    CHECK_THROWS_AS(Mollifier(g, 0.0), DomainError);
    CHECK_THROWS_AS(Mollifier(g, -1.0), DomainError);
    CHECK_THROWS_AS(Mollifier(g, 0.6), DomainError);
    CHECK_NOTHROW(Mollifier(g, 0.5));
    const Mollifier m(g, 0.5);
    CHECK_THROWS_AS(m.apply(ScalarField(Grid2D(64, 2.0))), ConfigurationError);
}

// ============================================================================
// Test functions
// ============================================================================

TEST_CASE("test function derivatives match finite differences") {
    for (const TestFunction& phi : weak_form_presets()) {
        CAPTURE(phi.name);
        const double h = 1e-6;
        for (const Point x : {Point{0.1, 0.2}, Point{-0.7, 0.9}, Point{1.0, -0.3}})
            for (double t : {0.0, 0.4}) {
                const Point gr = phi.gradient(t, x);
                CHECK(gr.x1 == doctest::Approx((phi.value(t, {x.x1 + h, x.x2}) - phi.value(t, {x.x1 - h, x.x2})) / (2 * h))
                                   .epsilon(1e-6));
                CHECK(gr.x2 == doctest::Approx((phi.value(t, {x.x1, x.x2 + h}) - phi.value(t, {x.x1, x.x2 - h})) / (2 * h))
                                   .epsilon(1e-6));
                CHECK(phi.time_derivative(t, x) ==
                      doctest::Approx((phi.value(t + h, x) - phi.value(t - h, x)) / (2 * h)).epsilon(1e-6));
            }
        CHECK(phi.value(0.3, {phi.center.x1 + phi.radius, phi.center.x2}) == 0.0);
        CHECK_NOTHROW(phi.require_inside(Grid2D(64, 2.0 * M_PI)));
        CHECK_THROWS_AS(phi.require_inside(Grid2D(64, 2.0)), ConfigurationError);
    }
}

// ============================================================================
// Simulation
// ============================================================================

TEST_CASE("method names") {
    CHECK(parse_method("spectral") == Method::spectral);
    CHECK(parse_method("semi_lagrangian") == Method::semi_lagrangian);
    CHECK(method_name(Method::semi_lagrangian) == "semi_lagrangian");
    CHECK_THROWS_AS(parse_method("euler"), ConfigurationError);
}

TEST_CASE("checkpoints always include 0 and T") {
    const Grid2D g(16, M_PI);
    const Trajectory tr = simulate(preset_zero(g), 1.0, 0.1, {0.5, 0.5}, Method::spectral);
    CHECK(tr.times == std::vector<double>{0.0, 0.5, 1.0});
    CHECK(tr.fields.size() == 3);
    CHECK(tr.velocity_sup.size() == 3);
    CHECK(tr.gradient_sup.size() == 3);
    CHECK(even_checkpoints(2.0, 5) == std::vector<double>{0.0, 0.5, 1.0, 1.5, 2.0});
    CHECK_THROWS_AS(even_checkpoints(1.0, 1), ConfigurationError);
    CHECK_THROWS_AS(simulate(preset_zero(g), 1.0, 0.1, {1.5}, Method::spectral), ConfigurationError);
}

TEST_CASE("zero vorticity stays zero") {
    const Grid2D g(32, M_PI);
    for (Method m : {Method::spectral, Method::semi_lagrangian}) {
        const Trajectory tr = simulate(preset_zero(g), 0.5, 0.05, even_checkpoints(0.5, 3), m);
        for (const ScalarField& w : tr.fields) CHECK(max_abs(w) == 0.0);
        CHECK(tr.initial_mean == 0.0);
    }
    CHECK(std::isinf(cfl_limit(preset_zero(g))));
    CHECK(cross_validate(preset_zero(g), 0.5, 0.05) == 0.0);
}

TEST_CASE("CFL refusal and invalid horizons") {
    const Grid2D g(64, 2.0 * M_PI);
    const ScalarField w = preset_dipole(g);
    const double lim = cfl_limit(w);
    CHECK(lim == doctest::Approx(0.5 * g.dx() / velocity_sup(velocity_spectral(w, false))));
    CHECK_THROWS_AS(simulate(w, 1.0, 1.01 * lim, {}, Method::spectral), ConfigurationError);
    CHECK_THROWS_AS(simulate(w, 0.0, 0.01, {}, Method::spectral), ConfigurationError);
    CHECK_THROWS_AS(simulate(w, 1.0, -0.01, {}, Method::spectral), ConfigurationError);
}

TEST_CASE("radial vortex is nearly steady") {
    // Periodic images break radial symmetry; the drift falls like L^-4.
    const Grid2D big(256, 8.0 * M_PI);
    const ScalarField wb = preset_gaussian(big);
    CHECK(lp_norm(simulate(wb, 1.0, 0.01, {}, Method::spectral).fields.back() - wb, 1.0) <= 1e-6 * lp_norm(wb, 1.0));
    const Grid2D g(128, 2.0 * M_PI);
    const ScalarField w = preset_gaussian(g);
    const Trajectory tr = simulate(w, 1.0, 0.01, {}, Method::spectral);
    const double drift = lp_norm(tr.fields.back() - w, 1.0) / lp_norm(w, 1.0);
    CHECK(drift >= 1e-5);
    CHECK(drift <= 1e-3);
    const Trajectory sl = simulate(w, 1.0, 0.01, {}, Method::semi_lagrangian);
    CHECK(oracle::max_abs_diff(sl.fields.back(), w) <= 1e-4);
    CHECK(cross_validate(w, 1.0, 0.01) <= 1e-4);
}

TEST_CASE("spectral method conserves mass, enstrophy and energy") {
    const Grid2D g(64, M_PI);
    const ScalarField w0 = preset_random_bandlimited(g, 6, 4.0);
    const double dt = 0.5 * cfl_limit(w0);
    const Trajectory tr = simulate(w0, 1.0, dt, even_checkpoints(1.0, 5), Method::spectral);
    const ScalarField& first = tr.fields.front();
    CHECK(oracle::max_abs_diff(tr.fields.back(), first) >= 0.05 * max_abs(first));
    for (const ScalarField& w : tr.fields) {
        CHECK(integrate(w) == doctest::Approx(integrate(first)).scale(lp_norm(first, 1.0)).epsilon(1e-12));
        CHECK(enstrophy(w) == doctest::Approx(enstrophy(first)).epsilon(1e-8));
        CHECK(energy(w) == doctest::Approx(energy(first)).epsilon(1e-8));
    }
}

TEST_CASE("Lp norms along both schemes") {
    const Grid2D g(128, 2.0 * M_PI);
    const ScalarField w0 = preset_dipole(g);
    for (Method m : {Method::spectral, Method::semi_lagrangian}) {
        const Trajectory tr = simulate(w0, 1.0, 0.01, even_checkpoints(1.0, 3), m);
        for (const ScalarField& w : tr.fields)
            for (double p : {1.0, 2.0, 4.0}) CHECK(lp_norm(w, p) == doctest::Approx(lp_norm(w0, p)).epsilon(1e-3));
        for (std::size_t i = 0; i < tr.times.size(); ++i) {
            const VelocityField u = velocity_spectral(tr.fields[i]);
            CHECK(tr.velocity_sup[i] == doctest::Approx(velocity_sup(u)));
            CHECK(tr.gradient_sup[i] == doctest::Approx(gradient_sup(u.grad)));
        }
    }
}

TEST_CASE("weak-form record layout") {
    const Grid2D g(64, 2.0 * M_PI);
    const std::vector<TestFunction> probes = weak_form_presets();
    const Trajectory tr = simulate(preset_gaussian(g), 0.1, 0.02, {}, Method::spectral, probes);
    REQUIRE(tr.weak.names.size() == probes.size());
    CHECK(tr.weak.times.size() == 6);
    CHECK(tr.weak.times.front() == 0.0);
    CHECK(tr.weak.times.back() == doctest::Approx(0.1));
    for (std::size_t p = 0; p < probes.size(); ++p) {
        CHECK(tr.weak.names[p] == probes[p].name);
        CHECK(tr.weak.pairing[p].size() == 6);
        CHECK(tr.weak.integrand[p].size() == 6);
    }
    // Static probe at t=0: pairing is the quadrature of phi * omega.
    const ScalarField phi = ScalarField::from_function(g, [&](double x1, double x2) { return probes[0].value(0.0, {x1, x2}); });
    CHECK(tr.weak.pairing[0][0] == doctest::Approx(oracle::inner(phi, tr.fields[0])).epsilon(1e-12));
    CHECK(simulate(preset_gaussian(g), 0.1, 0.02, {}, Method::spectral).weak.names.empty());
}

TEST_CASE("spectral and semi-Lagrangian agree on the dipole" * doctest::test_suite("slow")) {
    const Grid2D g(256, 2.0 * M_PI);
    const ScalarField w0 = preset_dipole(g);
    const double a = cross_validate(w0, 1.0, 1e-3);
    const double b = cross_validate(w0, 1.0, 5e-4);
    MESSAGE("cross_validate dt=1e-3: " << a << ", dt=5e-4: " << b << ", ratio " << b / a);
    CHECK(a <= 5e-3);
    // halving: within 20% of an exact factor two
    CHECK(b <= 0.6 * a);
}

}  // TEST_SUITE
