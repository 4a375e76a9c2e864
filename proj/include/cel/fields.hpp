/// @file fields.hpp
/// @brief Periodic grid functions on [-L, L)^2: storage, spectral derivatives,
/// bicubic sampling, quadrature and snapshot files.
#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "cel/errors.hpp"

namespace cel {

struct Point {
    double x1 = 0.0;
    double x2 = 0.0;
};

/// Uniform periodic grid, n points per axis, node i at -L + i*dx.
class Grid2D {
public:
    Grid2D(int n, double half_width);

    int n() const { return n_; }
    double half_width() const { return L_; }
    double dx() const { return dx_; }
    double cell_area() const { return dx_ * dx_; }
    std::size_t size() const { return static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_); }
    double coord(int i) const { return -L_ + i * dx_; }
    /// Row-major: x1 varies fastest.
    std::size_t index(int i1, int i2) const {
        return static_cast<std::size_t>(i2) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(i1);
    }
    Point node(std::size_t k) const {
        return {coord(static_cast<int>(k % n_)), coord(static_cast<int>(k / n_))};
    }

    bool operator==(const Grid2D& o) const { return n_ == o.n_ && L_ == o.L_; }
    bool operator!=(const Grid2D& o) const { return !(*this == o); }

private:
    int n_;
    double L_;
    double dx_;
};

/// Real samples on a grid. Immutable once built; every sample finite.
class ScalarField {
public:
    explicit ScalarField(const Grid2D& grid);  ///< zero field
    ScalarField(const Grid2D& grid, std::vector<double> values);

    static ScalarField from_function(const Grid2D& grid, const std::function<double(double, double)>& f);
    static ScalarField constant(const Grid2D& grid, double c);

    const Grid2D& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    const double* data() const { return values_.data(); }
    double operator[](std::size_t k) const { return values_[k]; }
    double at(int i1, int i2) const { return values_[grid_.index(i1, i2)]; }
    std::size_t size() const { return values_.size(); }

    ScalarField operator+(const ScalarField& o) const;
    ScalarField operator-(const ScalarField& o) const;
    ScalarField operator*(double c) const;
    ScalarField operator-() const { return *this * -1.0; }
    /// Pointwise product.
    ScalarField times(const ScalarField& o) const;
    ScalarField abs() const;

private:
    Grid2D grid_;
    std::vector<double> values_;
};

void require_same_grid(const ScalarField& a, const ScalarField& b, const char* what);

/// grad[2*(i-1) + (j-1)] holds d_j u_i.
struct VelocityField {
    ScalarField u1;
    ScalarField u2;
    std::array<ScalarField, 4> grad;

    const Grid2D& grid() const { return u1.grid(); }
    const ScalarField& d(int i, int j) const { return grad[2 * (i - 1) + (j - 1)]; }
};

/// Fourier-collocation derivative along axis (1|2) of order (1|2).
ScalarField spectral_derivative(const ScalarField& f, int axis, int order);

/// d_1^p d_2^q f with one forward transform; odd powers drop the Nyquist mode.
ScalarField spectral_partial(const ScalarField& f, int p, int q);

/// Several partials sharing one forward transform.
std::vector<ScalarField> spectral_partials(const ScalarField& f, const std::vector<std::array<int, 2>>& orders);

/// dx^2 * sum of samples.
double integrate(const ScalarField& f);

double max_abs(const ScalarField& f);

/// Bicubic (tensor 4-point Lagrange) interpolation, periodic wrap.
std::vector<double> sample(const ScalarField& f, const std::vector<Point>& points);
double sample_one(const ScalarField& f, Point p);

/// Interpolation stencil reusable across fields on the same grid.
struct CubicStencil {
    std::array<std::size_t, 4> col{};
    std::array<std::size_t, 4> row{};  ///< already multiplied by n
    std::array<double, 4> wx{};
    std::array<double, 4> wy{};

    CubicStencil() = default;
    CubicStencil(const Grid2D& grid, Point p);

    double apply(const double* data) const {
        double acc = 0.0;
        for (int b = 0; b < 4; ++b) {
            const double* r = data + row[b];
            double s = wx[0] * r[col[0]] + wx[1] * r[col[1]] + wx[2] * r[col[2]] + wx[3] * r[col[3]];
            acc += wy[b] * s;
        }
        return acc;
    }
};

/// Lifted coordinate wrapped into [-L, L).
double wrap_coordinate(double x, double L);

// Snapshot files: "CEL1", u32 n, f64 L, n*n f64 row-major, little-endian.
void write_snapshot(const std::string& path, const ScalarField& f);
ScalarField read_snapshot(const std::string& path);
void write_field_csv(const std::string& path, const ScalarField& f);

}  // namespace cel
