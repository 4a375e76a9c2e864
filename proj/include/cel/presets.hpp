/// @file presets.hpp
/// @brief Named initial vorticities and seeded field ensembles.
#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "cel/fields.hpp"

namespace cel {

/// Portable uniform doubles on top of mt19937_64 (whose output sequence is fixed by the standard).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }

private:
    std::mt19937_64 eng_;
};

ScalarField preset_zero(const Grid2D& grid);
/// exp(-|x|^2)
ScalarField preset_gaussian(const Grid2D& grid);
/// d_1 exp(-|x|^2)
ScalarField preset_dipole(const Grid2D& grid);
/// Random trigonometric polynomial, integer wavevectors with |k| <= kmax,
/// under a Gaussian window of width 1/2 centred at the origin.
ScalarField preset_random_bandlimited(const Grid2D& grid, std::uint64_t seed, double kmax);
/// Smoothed horizontal strip of vorticity with a quartic-exponential fade in x1.
ScalarField preset_shear_patch_smoothed(const Grid2D& grid);

/// Names: zero, gaussian, dipole, random_bandlimited, shear_patch_smoothed.
ScalarField make_preset(const std::string& name, const Grid2D& grid, std::uint64_t seed = 1, double kmax = 4.0);
bool is_preset_name(const std::string& name);

/// 20 fields: Gaussians, dipole, shear patch, indicators of disks/squares/annuli, random members.
std::vector<ScalarField> field_suite(const Grid2D& grid, std::uint64_t seed);

/// count random_bandlimited members with seeds seed, seed+1, ... and kmax cycling through 2..6.
std::vector<ScalarField> random_ensemble(const Grid2D& grid, std::size_t count, std::uint64_t seed);

}  // namespace cel
