/// @file norms.hpp
/// @brief Lp, W^{k,1}, sup-via-mixed-derivative, modulus of continuity, Dini
/// seminorm, translation modulus, tail mass.
#pragma once

#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "cel/fields.hpp"

namespace cel {

/// p = +inf gives the max norm.
double lp_norm(const ScalarField& f, double p);

/// ||f||_1 + sum over 1 <= |s| <= k of ||D^s f||_1.
double sobolev_norm(const ScalarField& f, int k);

struct SupMixed {
    double sup = 0.0;
    double mixed_l1 = 0.0;
    bool ok = true;
    bool inconclusive = false;  ///< support reaches |x| >= L/2
};
SupMixed sup_via_mixed_derivative(const ScalarField& f);

/// max_x (f(x) - min of f over the discrete disk of radius r around x).
double modulus_of_continuity(const ScalarField& f, double r);
/// Same quantity at several ascending radii, sharing one incremental min-filter.
std::vector<double> modulus_profile(const ScalarField& f, const std::vector<double>& radii);

double dini_seminorm(const ScalarField& f);
/// Radii used by dini_seminorm (log-spaced, dx to 1).
std::vector<double> dini_radii(const Grid2D& grid);

/// int |f(x+h) - f(x)| dx, periodic.
double translation_modulus(const ScalarField& f, Point h);

/// sum over |a| <= max_order of int_{|x| >= R} |D^a f|.
double tail_mass(const ScalarField& f, double R, int max_order);

/// ||(|d1 f|^2 + |d2 f|^2)^{1/2}||_{L^(2,1)}.
double gradient_lorentz21(const ScalarField& f);

struct NormReport {
    double time = 0.0;
    double l1 = 0.0, l2 = 0.0, linf = 0.0;
    double w11 = 0.0, w21 = 0.0;
    double sup_mixed = 0.0;
    double dini = 0.0;
    double grad_lorentz21 = 0.0;
    double mean = 0.0;
    std::vector<std::pair<double, double>> tail;
};

NormReport norm_report(const ScalarField& f, double time, const std::vector<double>& tail_radii = {});

void write_norm_csv_header(std::FILE* fp);
void write_norm_csv_row(std::FILE* fp, const NormReport& r);

}  // namespace cel
