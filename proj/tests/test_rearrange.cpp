/// @file test_rearrange.cpp
/// @brief Distribution function, decreasing rearrangement, Lorentz norms, small-set concentration.

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "cel/errors.hpp"
#include "cel/presets.hpp"
#include "cel/rearrange.hpp"
#include "oracles.hpp"

using namespace cel;

namespace {

/// L = 2, n = 16: cells of area 1/16, so k cells have measure k/16.
const Grid2D kSmall(16, 2.0);

ScalarField first_cells(std::size_t count, double level) {
    std::vector<double> v(kSmall.size(), 0.0);
    for (std::size_t k = 0; k < count; ++k) v[(k * 37) % kSmall.size()] = level;  // 37 is coprime to 256
    return ScalarField(kSmall, std::move(v));
}

}  // namespace

TEST_SUITE("rearrange") {

// ============================================================================
// Distribution function
// ============================================================================

TEST_CASE("two-level function") {
    const ScalarField f = first_cells(48, 2.0);  // 2 * indicator of a set of measure 3
    CHECK(distribution_function(f, 1.0) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(distribution_function(f, 2.0) == 0.0);
    CHECK(distribution_function(f, 0.0) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK_THROWS_AS(distribution_function(f, -0.1), DomainError);
}

TEST_CASE("Gaussian level set at e^{-1} is the unit disk") {
    const Grid2D g(256, 2.0 * M_PI);
    CHECK(distribution_function(preset_gaussian(g), std::exp(-1.0)) == doctest::Approx(M_PI).epsilon(0.02));
}

TEST_CASE("distribution function is nonincreasing") {
    const Grid2D g(64, 3.0);
    const ScalarField f = preset_random_bandlimited(g, 4, 3.0);
    double prev = distribution_function(f, 0.0);
    for (int k = 1; k <= 200; ++k) {
        const double d = distribution_function(f, 0.01 * k);
        CHECK(d <= prev);
        prev = d;
    }
}

// ============================================================================
// Rearrangement
// ============================================================================

TEST_CASE("rearrangement of a step function") {
    const RearrangementProfile p = decreasing_rearrangement(first_cells(48, 2.0));
    CHECK(p.total_measure() == doctest::Approx(16.0));
    CHECK(p.at(0.0) == 2.0);
    CHECK(p.at(2.999) == 2.0);
    CHECK(p.at(3.0) == 0.0);
    CHECK(p.at(100.0) == 0.0);
    CHECK_THROWS_AS(p.at(-1.0), DomainError);
    const RearrangementProfile z = decreasing_rearrangement(ScalarField(kSmall));
    for (double v : z.values) CHECK(v == 0.0);
}

TEST_CASE("rearrangement invariance of Lp norms") {
    const Grid2D g(64, 3.0);
    for (const ScalarField& f : field_suite(g, 11)) {
        const RearrangementProfile p = decreasing_rearrangement(f);
        CHECK(std::is_sorted(p.values.rbegin(), p.values.rend()));
        CHECK(p.total_measure() == doctest::Approx(36.0).epsilon(1e-14));
        for (double q : {1.0, 2.0, 4.0}) {
            const double direct = oracle::grid_lp(f, q);
            CHECK(std::fabs(p.lp_norm(q) - direct) <= 1e-10 * direct);
        }
    }
}

// ============================================================================
// Lorentz norms
// ============================================================================

TEST_CASE("Lorentz norms of an indicator of measure 4") {
    const ScalarField f = first_cells(64, 1.0);
    CHECK(lorentz_norm(f, 2.0, 1.0) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(lorentz_norm(f, 2.0, 2.0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(lorentz_norm(f, 2.0, 2.0) == doctest::Approx(oracle::grid_lp(f, 2.0)).epsilon(1e-12));
    // sup_t t^{1/2} f*(t) is approached at t -> 4.
    CHECK(lorentz_norm(f, 2.0, INFINITY) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(lorentz_norm(ScalarField(kSmall), 2.0, 1.0) == 0.0);
    CHECK(lorentz_norm(ScalarField(kSmall), 2.0, INFINITY) == 0.0);
    CHECK_THROWS_AS(lorentz_norm(f, 0.5, 1.0), DomainError);
    CHECK_THROWS_AS(lorentz_norm(f, 2.0, 0.5), DomainError);
}

TEST_CASE("L^(p,p) equals L^p on the field suite") {
    const Grid2D g(64, 3.0);
    for (const ScalarField& f : field_suite(g, 5))
        for (double p : {1.0, 2.0, 3.0}) {
            const double direct = oracle::grid_lp(f, p);
            CHECK(std::fabs(lorentz_norm(f, p, p) - direct) <= 1e-10 * direct);
        }
}

TEST_CASE("Lorentz (2,1) of a step profile against a per-step closed form") {
    // f* takes values v_k on [k w, (k+1) w): int t^{-1/2} f* = sum v_k 2 (sqrt((k+1) w) - sqrt(k w)).
    const Grid2D g(32, 1.0);
    const ScalarField f = preset_random_bandlimited(g, 2, 3.0);
    std::vector<double> v;
    for (double x : f.values()) v.push_back(std::fabs(x));
    std::sort(v.rbegin(), v.rend());
    const double w = g.cell_area();
    long double acc = 0.0L;
    for (std::size_t k = 0; k < v.size(); ++k)
        acc += static_cast<long double>(v[k]) * 2.0L * (std::sqrt((k + 1.0L) * w) - std::sqrt(static_cast<long double>(k) * w));
    CHECK(lorentz_norm(f, 2.0, 1.0) == doctest::Approx(static_cast<double>(acc)).epsilon(1e-12));
}

TEST_CASE("Lorentz nesting and Hoelder-Lorentz on random pairs") {
    const Grid2D g(64, 3.0);
    const std::vector<ScalarField> e = random_ensemble(g, 50, 3);
    for (std::size_t i = 0; i < e.size(); ++i) {
        const ScalarField& f = e[i];
        const ScalarField& h = e[(i + 1) % e.size()];
        CHECK(lorentz_norm(f, 2.0, INFINITY) <= lorentz_norm(f, 2.0, 1.0));
        const double lhs = integrate(f.times(h).abs());
        CHECK(lhs <= lorentz_norm(f, 2.0, 1.0) * lorentz_norm(h, 2.0, INFINITY));
    }
}

// ============================================================================
// Small-set concentration
// ============================================================================

TEST_CASE("concentration of an indicator") {
    const ScalarField f = first_cells(64, 1.0);
    CHECK(small_set_concentration(f, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(small_set_concentration(f, 10.0) == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(small_set_concentration(f, 0.0) == 0.0);
    CHECK_THROWS_AS(small_set_concentration(f, -1.0), DomainError);
}

TEST_CASE("concentration dominates random subsets and matches level sets") {
    const ScalarField f = preset_random_bandlimited(kSmall, 8, 3.0);
    const double w = kSmall.cell_area();
    Rng rng(99);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t count = 1 + static_cast<std::size_t>(rng.uniform() * 40.0);
        const double delta = count * w;
        std::vector<std::size_t> idx(kSmall.size());
        for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = k;
        for (std::size_t k = 0; k < count; ++k) std::swap(idx[k], idx[k + static_cast<std::size_t>(rng.uniform() * (idx.size() - k))]);
        double mass = 0.0;
        for (std::size_t k = 0; k < count; ++k) mass += std::fabs(f[idx[k]]) * w;
        CHECK(mass <= small_set_concentration(f, delta) + 1e-15);
    }
    // Best super-level set {|f| >= s} with measure <= delta, by exhaustive search over s.
    for (std::size_t count : {1u, 5u, 17u, 64u, 200u}) {
        const double delta = count * w;
        double best = 0.0;
        for (double s : f.values()) {
            double m = 0.0, mass = 0.0;
            for (double v : f.values())
                if (std::fabs(v) >= std::fabs(s)) {
                    m += w;
                    mass += std::fabs(v) * w;
                }
            if (m <= delta * (1.0 + 1e-12)) best = std::max(best, mass);
        }
        CHECK(std::fabs(small_set_concentration(f, delta) - best) <= 1e-10);
    }
}

TEST_CASE("concentration is nondecreasing and concave") {
    const Grid2D g(32, 2.0);
    const ScalarField f = preset_random_bandlimited(g, 6, 4.0);
    std::vector<double> c;
    for (int k = 0; k <= 100; ++k) c.push_back(small_set_concentration(f, 0.05 * k));
    for (std::size_t k = 1; k < c.size(); ++k) CHECK(c[k] >= c[k - 1]);
    for (std::size_t k = 1; k + 1 < c.size(); ++k) CHECK(c[k + 1] - c[k] <= c[k] - c[k - 1] + 1e-14);
}

TEST_CASE("profile csv") {
    const std::string path = (std::filesystem::temp_directory_path() / "cel_profile.csv").string();
    write_profile_csv(path, decreasing_rearrangement(first_cells(3, 1.0)));
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "t,fstar");
    std::getline(in, line);
    CHECK(line == "0,1");
    std::filesystem::remove(path);
}

}  // TEST_SUITE
