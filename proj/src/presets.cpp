#include "cel/presets.hpp"

#include <cmath>
#include <numbers>

namespace cel {

ScalarField preset_zero(const Grid2D& grid) { return ScalarField(grid); }

ScalarField preset_gaussian(const Grid2D& grid) {
    return ScalarField::from_function(grid, [](double x1, double x2) { return std::exp(-(x1 * x1 + x2 * x2)); });
}

ScalarField preset_dipole(const Grid2D& grid) {
    return ScalarField::from_function(grid,
                                      [](double x1, double x2) { return -2.0 * x1 * std::exp(-(x1 * x1 + x2 * x2)); });
}

ScalarField preset_random_bandlimited(const Grid2D& grid, std::uint64_t seed, double kmax) {
    if (!(kmax >= 1.0)) throw DomainError("random_bandlimited needs kmax >= 1");
    struct Mode {
        double k1, k2, amp, phase;
    };
    Rng rng(seed);
    std::vector<Mode> modes;
    const int K = static_cast<int>(std::floor(kmax));
    for (int k2 = -K; k2 <= K; ++k2)
        for (int k1 = 0; k1 <= K; ++k1) {
            if (k1 == 0 && k2 < 0) continue;
            if (k1 * k1 + k2 * k2 > kmax * kmax) continue;
            const double amp = rng.uniform(-1.0, 1.0);
            const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
            modes.push_back({static_cast<double>(k1), static_cast<double>(k2), amp, phase});
        }
    const double norm = 1.0 / std::sqrt(static_cast<double>(modes.size()));
    const double sigma = 0.5;
    return ScalarField::from_function(grid, [&](double x1, double x2) {
        double s = 0.0;
        for (const Mode& m : modes) s += m.amp * std::cos(m.k1 * x1 + m.k2 * x2 + m.phase);
        return norm * s * std::exp(-(x1 * x1 + x2 * x2) / (2.0 * sigma * sigma));
    });
}

ScalarField preset_shear_patch_smoothed(const Grid2D& grid) {
    return ScalarField::from_function(grid, [](double x1, double x2) {
        const double fade = std::exp(-std::pow(x1 / 1.5, 4));
        return fade * 0.5 * (1.0 + std::tanh((0.16 - x2 * x2) / 0.1));
    });
}

bool is_preset_name(const std::string& name) {
    return name == "zero" || name == "gaussian" || name == "dipole" || name == "random_bandlimited" ||
           name == "shear_patch_smoothed";
}

ScalarField make_preset(const std::string& name, const Grid2D& grid, std::uint64_t seed, double kmax) {
    if (name == "zero") return preset_zero(grid);
    if (name == "gaussian") return preset_gaussian(grid);
    if (name == "dipole") return preset_dipole(grid);
    if (name == "random_bandlimited") return preset_random_bandlimited(grid, seed, kmax);
    if (name == "shear_patch_smoothed") return preset_shear_patch_smoothed(grid);
    throw ConfigurationError("unknown preset '" + name +
                             "' (valid: zero, gaussian, dipole, random_bandlimited, shear_patch_smoothed)");
}

std::vector<ScalarField> random_ensemble(const Grid2D& grid, std::size_t count, std::uint64_t seed) {
    std::vector<ScalarField> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
        out.push_back(preset_random_bandlimited(grid, seed + i, 2.0 + static_cast<double>(i % 5)));
    return out;
}

std::vector<ScalarField> field_suite(const Grid2D& grid, std::uint64_t seed) {
    std::vector<ScalarField> out;
    auto gauss = [&](double a, double c1, double c2, double s) {
        return ScalarField::from_function(grid, [=](double x1, double x2) {
            const double r2 = (x1 - c1) * (x1 - c1) + (x2 - c2) * (x2 - c2);
            return a * std::exp(-r2 / (s * s));
        });
    };
    auto indicator = [&](double a, auto inside) {
        return ScalarField::from_function(grid, [=](double x1, double x2) { return inside(x1, x2) ? a : 0.0; });
    };
    out.push_back(preset_gaussian(grid));
    out.push_back(preset_dipole(grid));
    out.push_back(preset_shear_patch_smoothed(grid));
    out.push_back(gauss(2.0, 0.3, -0.2, 0.7));
    out.push_back(gauss(-1.5, -0.5, 0.4, 0.5));
    out.push_back(gauss(1.0, 0.0, 0.0, 1.3) - gauss(0.8, 0.4, 0.4, 0.6));
    out.push_back(indicator(1.0, [](double x1, double x2) { return x1 * x1 + x2 * x2 < 1.0; }));
    out.push_back(indicator(2.0, [](double x1, double x2) { return std::fabs(x1) < 0.5 && std::fabs(x2) < 0.5; }));
    out.push_back(indicator(-1.0, [](double x1, double x2) {
        const double r2 = x1 * x1 + x2 * x2;
        return r2 > 0.25 && r2 < 1.44;
    }));
    out.push_back(indicator(1.0, [](double x1, double x2) { return x1 * x1 + x2 * x2 < 0.64; }) +
                  indicator(0.5, [](double x1, double x2) { return std::fabs(x1 - 1.2) < 0.4 && std::fabs(x2) < 0.8; }));
    for (std::size_t i = 0; i < 10; ++i)
        out.push_back(preset_random_bandlimited(grid, seed + i, 2.0 + static_cast<double>(i % 5)));
    return out;
}

}  // namespace cel
