/// @file test_norms.cpp
/// @brief Lp, Sobolev, sup-via-mixed, modulus of continuity, Dini, translation modulus, tail mass.

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "cel/errors.hpp"
#include "cel/norms.hpp"
#include "cel/presets.hpp"
#include "cel/rearrange.hpp"
#include "oracles.hpp"

using namespace cel;

namespace {

/// Hoelder profile A (1 - min(|x|, 1)^alpha): modulus exactly A r^alpha for r <= 1.
ScalarField hoelder_cusp(const Grid2D& g, double A, double alpha) {
    return ScalarField::from_function(g, [=](double x1, double x2) {
        return A * (1.0 - std::pow(std::min(1.0, std::hypot(x1, x2)), alpha));
    });
}

}  // namespace

TEST_SUITE("norms") {

// ============================================================================
// Lp and Sobolev
// ============================================================================

TEST_CASE("Lp norms against direct sums") {
    const Grid2D g(64, 3.0);
    const ScalarField f = preset_random_bandlimited(g, 1, 3.0);
    for (double p : {1.0, 2.0, 3.5}) CHECK(lp_norm(f, p) == doctest::Approx(oracle::grid_lp(f, p)).epsilon(1e-13));
    CHECK(lp_norm(f, INFINITY) == max_abs(f));
    CHECK_THROWS_AS(lp_norm(f, 0.5), DomainError);
}

TEST_CASE("Sobolev norm of zero") {
    const Grid2D g(32, 2.0);
    for (int k : {0, 1, 2}) CHECK(sobolev_norm(ScalarField(g), k) == 0.0);
    CHECK_THROWS_AS(sobolev_norm(ScalarField(g), 3), DomainError);
}

TEST_CASE("Gaussian W^{1,1} norm is pi + 4 sqrt(pi)") {
    for (int n : {128, 256}) {
        const Grid2D g(n, 2.0 * M_PI);
        const ScalarField f = preset_gaussian(g);
        CHECK(std::fabs(sobolev_norm(f, 0) - M_PI) <= 1e-6);
        CHECK(std::fabs(sobolev_norm(f, 1) - (M_PI + 4.0 * std::sqrt(M_PI))) <= 1e-6);
    }
}

TEST_CASE("Gaussian W^{2,1} norm against the closed form") {
    // int |d11 f| = sqrt(pi) * 4 sqrt(2) e^{-1/2}; int |d12 f| = 4.
    // The mixed term keeps an O(dx^2) quadrature error from the kink of |x2| on the x2 = 0 row.
    const Grid2D g(256, 2.0 * M_PI);
    const double exact = M_PI + 4.0 * std::sqrt(M_PI) + 2.0 * std::sqrt(M_PI) * 4.0 * std::sqrt(2.0) * std::exp(-0.5) + 4.0;
    CHECK(sobolev_norm(preset_gaussian(g), 2) == doctest::Approx(exact).epsilon(1e-4));
}

TEST_CASE("W^{2,1} dominates W^{1,1} on 20 random fields") {
    const Grid2D g(64, 3.0);
    for (const ScalarField& f : random_ensemble(g, 20, 21)) {
        CHECK(sobolev_norm(f, 2) >= sobolev_norm(f, 1));
        CHECK(sobolev_norm(f, 1) >= sobolev_norm(f, 0));
    }
}

// ============================================================================
// Sup via mixed derivative
// ============================================================================

TEST_CASE("sup via mixed derivative: Gaussian and zero") {
    const Grid2D g(256, 2.0 * M_PI);
    const SupMixed r = sup_via_mixed_derivative(preset_gaussian(g));
    CHECK(r.sup == doctest::Approx(1.0).epsilon(1e-14));
    // Exact value 4; the outer quadrature error is O(dx^2), 1.6e-3 at this grid.
    CHECK(r.mixed_l1 == doctest::Approx(4.0).epsilon(1e-3));
    CHECK(r.ok);
    // Tail mass beyond L/2 = pi is pi e^{-pi^2}, far above 1e-8 of the L1 norm.
    CHECK(r.inconclusive);
    const SupMixed z = sup_via_mixed_derivative(ScalarField(g));
    CHECK(z.sup == 0.0);
    CHECK(z.mixed_l1 == 0.0);
    CHECK(z.ok);
}

TEST_CASE("sup via mixed derivative on 20 compactly supported fields") {
    const Grid2D g(128, 2.0 * M_PI);
    for (const ScalarField& f : random_ensemble(g, 20, 40)) {
        const SupMixed r = sup_via_mixed_derivative(f);
        CHECK(r.ok);
        CHECK_FALSE(r.inconclusive);
        CHECK(r.sup <= r.mixed_l1);
    }
}

TEST_CASE("sup via mixed derivative flags wide support") {
    const Grid2D g(64, 2.0);
    const ScalarField f = ScalarField::from_function(g, [](double x1, double x2) {
        return std::cos(M_PI * x1 / 2.0) * std::cos(M_PI * x2 / 2.0) + 1.0;
    });
    CHECK(sup_via_mixed_derivative(f).inconclusive);
}

// ============================================================================
// Modulus of continuity and Dini seminorm
// ============================================================================

TEST_CASE("modulus of a constant is zero") {
    const Grid2D g(64, 2.0);
    const ScalarField f = ScalarField::constant(g, 3.0);
    for (double r : {g.dx(), 0.3, 1.0, 4.0}) CHECK(modulus_of_continuity(f, r) == 0.0);
    CHECK(dini_seminorm(f) == 0.0);
}

TEST_CASE("modulus of the hat function is r") {
    const Grid2D g(128, 4.0);
    const ScalarField f = oracle::hat(g);
    for (int k : {1, 2, 5, 10, 16}) {
        const double r = k * g.dx();
        CHECK(modulus_of_continuity(f, r) == doctest::Approx(r).epsilon(1e-12));
    }
    CHECK_THROWS_AS(modulus_of_continuity(f, 0.5 * g.dx()), DomainError);
    CHECK_THROWS_AS(modulus_of_continuity(f, 9.0), DomainError);
}

TEST_CASE("modulus is monotone, sign symmetric and subadditive") {
    const Grid2D g(64, 3.0);
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const ScalarField f = preset_random_bandlimited(g, seed, 4.0);
        std::vector<double> radii;
        for (int k = 1; k <= 20; ++k) radii.push_back(k * g.dx());
        const std::vector<double> m = modulus_profile(f, radii);
        for (std::size_t i = 1; i < m.size(); ++i) CHECK(m[i] >= m[i - 1]);
        for (std::size_t i = 0; i < m.size(); ++i)
            CHECK(modulus_of_continuity(f, radii[i]) == doctest::Approx(m[i]).epsilon(1e-15));
        // A lattice offset of length <= 2r splits into two of length <= r + dx / sqrt(2).
        for (std::size_t i = 0; 2 * i + 1 < m.size(); ++i) CHECK(m[2 * i + 1] <= 2.0 * m[i + 1] + 1e-8);
        const ScalarField neg = -f;
        CHECK(modulus_of_continuity(neg, 0.4) == doctest::Approx(modulus_of_continuity(f, 0.4)).epsilon(1e-15));
    }
}

TEST_CASE("modulus of the hat function is subadditive") {
    const Grid2D g(128, 4.0);
    const ScalarField f = oracle::hat(g);
    for (int k = 1; k <= 8; ++k)
        CHECK(modulus_of_continuity(f, 2 * k * g.dx()) <= 2.0 * modulus_of_continuity(f, k * g.dx()) + 1e-8);
}

TEST_CASE("Dini seminorm of the hat function is 1") {
    const Grid2D g(256, 4.0);
    CHECK(dini_seminorm(oracle::hat(g)) == doctest::Approx(1.0).epsilon(0.03));
    CHECK(dini_radii(g).size() >= 40);
}

TEST_CASE("Dini seminorm is homogeneous") {
    const Grid2D g(64, 3.0);
    const ScalarField f = preset_random_bandlimited(g, 12, 3.0);
    CHECK(dini_seminorm(f * 7.0) == doctest::Approx(7.0 * dini_seminorm(f)).epsilon(1e-10));
}

TEST_CASE("Dini seminorm of a Hoelder cusp is at most A / alpha") {
    const Grid2D g(256, 2.0 * M_PI);
    for (double alpha : {0.5, 0.75, 1.0}) {
        const double A = 2.0;
        CHECK(dini_seminorm(hoelder_cusp(g, A, alpha)) <= A / alpha * 1.05);
    }
}

// ============================================================================
// Translation modulus and tails
// ============================================================================

TEST_CASE("translation modulus") {
    const Grid2D g(128, 4.0);
    const ScalarField sq = oracle::indicator(g, [](double x1, double x2) {
        return x1 >= -0.5 && x1 < 0.5 && x2 >= -0.5 && x2 < 0.5;
    });
    CHECK(translation_modulus(sq, {0.0, 0.0}) == 0.0);
    for (int k : {1, 3, 8}) {
        const double d = k * g.dx();
        CHECK(translation_modulus(sq, {d, 0.0}) == doctest::Approx(2.0 * d).epsilon(1e-12));
    }
    const double d = 0.3;  // off grid: interpolation error of order dx along the two moving edges
    CHECK(std::fabs(translation_modulus(sq, {d, 0.0}) - 2.0 * d) <= 4.0 * g.dx());
    const ScalarField f = preset_random_bandlimited(g, 3, 3.0);
    for (Point h : {Point{0.1, 0.0}, Point{0.05, -0.2}, Point{0.31, 0.17}}) {
        const double len = std::hypot(h.x1, h.x2);
        CHECK(translation_modulus(f, h) <= len * sobolev_norm(f, 1) + g.dx() * 1e-3);
    }
}

TEST_CASE("tail mass") {
    const Grid2D g(128, 2.0 * M_PI);
    const ScalarField gs = preset_gaussian(g);
    CHECK(tail_mass(gs, 4.0, 0) <= 1e-5);
    CHECK(tail_mass(gs, 0.0, 2) == sobolev_norm(gs, 2));
    CHECK(tail_mass(gs, 0.0, 1) == sobolev_norm(gs, 1));
    CHECK_THROWS_AS(tail_mass(gs, 7.0, 0), DomainError);
    CHECK_THROWS_AS(tail_mass(gs, 1.0, 3), DomainError);
    // Closed form for order 0: pi e^{-R^2}.
    CHECK(tail_mass(gs, 1.0, 0) == doctest::Approx(M_PI * std::exp(-1.0)).epsilon(0.02));
    for (const ScalarField& f : {preset_dipole(g), preset_random_bandlimited(g, 4, 3.0)}) {
        double prev = INFINITY;
        for (double R = 0.0; R <= g.half_width(); R += 0.25) {
            const double t = tail_mass(f, R, 2);
            CHECK(t <= prev * (1.0 + 1e-12));
            prev = t;
        }
    }
}

TEST_CASE("tail mass of first derivatives of a Gaussian") {
    // int_{|x| >= R} |d1 f| = int_R^inf int_0^{2 pi} 2 r |cos t| e^{-r^2} r dt dr = 8 int_R^inf r^2 e^{-r^2} dr,
    // and the same for d2.
    const Grid2D g(256, 2.0 * M_PI);
    const ScalarField gs = preset_gaussian(g);
    for (double R : {0.5, 1.0, 2.0}) {
        const double tail = 16.0 * (0.5 * R * std::exp(-R * R) + 0.25 * std::sqrt(M_PI) * std::erfc(R));
        const double got = tail_mass(gs, R, 1) - tail_mass(gs, R, 0);
        CHECK(got == doctest::Approx(tail).epsilon(1e-3));
    }
}

// ============================================================================
// Report
// ============================================================================

TEST_CASE("norm report invariants and csv") {
    const Grid2D g(64, 3.0);
    for (const ScalarField& f : field_suite(g, 2)) {
        const NormReport r = norm_report(f, 0.5, {1.0});
        CHECK(r.w11 <= r.w21);
        CHECK(r.linf <= r.sup_mixed + 1e-8);
        for (double v : {r.l1, r.l2, r.linf, r.w11, r.w21, r.sup_mixed, r.dini, r.grad_lorentz21}) CHECK(v >= 0.0);
        CHECK(r.w11 == doctest::Approx(sobolev_norm(f, 1)).epsilon(1e-14));
        CHECK(r.w21 == doctest::Approx(sobolev_norm(f, 2)).epsilon(1e-14));
        CHECK(r.tail.size() == 1);
    }
    const std::string path = (std::filesystem::temp_directory_path() / "cel_norms.csv").string();
    std::FILE* fp = std::fopen(path.c_str(), "wb");
    write_norm_csv_header(fp);
    write_norm_csv_row(fp, norm_report(preset_gaussian(g), 0.0));
    std::fclose(fp);
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "t,l1,l2,linf,w11,w21,mixed,dini,grad_lorentz21");
    std::getline(in, line);
    CHECK(std::count(line.begin(), line.end(), ',') == 8);
    std::filesystem::remove(path);
}

TEST_CASE("Sobolev-Lorentz ratio of disks is 1 / sqrt(pi)") {
    // ||1_B||_{(2,1)} = 2 sqrt(pi) rho and | grad 1_B | has total variation 2 pi rho.
    const Grid2D g(256, 4.0);
    const ScalarField disk = ScalarField::from_function(g, [](double x1, double x2) {
        return 0.5 * std::erfc((std::hypot(x1, x2) - 1.0) / 0.05);
    });
    const auto d = spectral_partials(disk, {{1, 0}, {0, 1}});
    std::vector<double> mag(disk.size());
    for (std::size_t k = 0; k < mag.size(); ++k) mag[k] = std::hypot(d[0][k], d[1][k]);
    const double ratio = lorentz_norm(disk, 2.0, 1.0) / lp_norm(ScalarField(g, mag), 1.0);
    CHECK(ratio == doctest::Approx(1.0 / std::sqrt(M_PI)).epsilon(0.03));
}

}  // TEST_SUITE
