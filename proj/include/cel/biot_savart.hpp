/// @file biot_savart.hpp
/// @brief Velocity from vorticity: periodic spectral inversion, free-space
/// direct quadrature, near/far split of the velocity gradient.
#pragma once

#include <array>

#include "cel/fields.hpp"

namespace cel {

/// Radial cutoff: 1 on [0, 1/2], 0 on [1, inf), smooth monotone between.
class KernelCutoff {
public:
    double value(double r) const;
    double slope(double r) const;
};

using GradientFields = std::array<ScalarField, 4>;

/// u = (d2 psi, -d1 psi) with -lap psi = omega - mean(omega) on the torus.
/// Gradient fields are left zero when with_gradient is false.
VelocityField velocity_spectral(const ScalarField& omega, bool with_gradient = true);

/// Spectral d_j u_i, ordered as VelocityField::grad.
GradientFields velocity_gradient(const ScalarField& omega);

/// Free-space K * omega over the box, K(x) = x^perp / (2 pi |x|^2). n <= 128.
VelocityField velocity_direct(const ScalarField& omega);

struct NearFar {
    GradientFields near;
    GradientFields far;
};

/// Split of K * grad(omega) with weights phi(|x-y|) and 1 - phi(|x-y|). n <= 128.
NearFar near_far_split(const ScalarField& omega, const KernelCutoff& cutoff);

/// max over x of |u(x)|.
double velocity_sup(const VelocityField& u);

/// Largest singular value of [[a, b], [c, d]].
double operator_norm(double a, double b, double c, double d);

/// max over x of the operator norm of the gradient matrix.
double gradient_sup(const GradientFields& g);

struct OracleComparison {
    double raw_rel_l2 = 0.0;      ///< spectral vs direct, no adjustment
    double aligned_rel_l2 = 0.0;  ///< after adding the direct field's box mean to the spectral field
    double mean_u1 = 0.0;         ///< box mean of the direct field
    double mean_u2 = 0.0;
    double radius = 0.0;          ///< comparison region |x| <= radius
};

OracleComparison compare_spectral_direct(const ScalarField& omega, double radius);

}  // namespace cel
