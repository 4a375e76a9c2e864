/// @file spectral.hpp
/// @brief Real-to-complex transforms on n x n grids (FFTW, cached plans).
#pragma once

#include <complex>
#include <vector>

#include "cel/fields.hpp"

namespace cel {

using cplx = std::complex<double>;

/// Half spectrum: n rows (x2 wavenumber) by n/2+1 columns (x1 wavenumber).
struct Spectrum {
    int n = 0;
    std::vector<cplx> data;

    int cols() const { return n / 2 + 1; }
    cplx& at(int j2, int j1) { return data[static_cast<std::size_t>(j2) * cols() + j1]; }
    const cplx& at(int j2, int j1) const { return data[static_cast<std::size_t>(j2) * cols() + j1]; }
};

/// Unnormalized forward transform.
Spectrum forward_fft(const Grid2D& grid, const double* values);
inline Spectrum forward_fft(const ScalarField& f) { return forward_fft(f.grid(), f.data()); }

/// Inverse transform including the 1/n^2 factor. Input is not modified.
std::vector<double> inverse_fft(const Spectrum& s);
ScalarField inverse_fft_field(const Grid2D& grid, const Spectrum& s);

/// Unnormalized transform of each row of an n x n array; row r occupies [r (n/2+1), (r+1)(n/2+1)).
std::vector<cplx> row_forward_fft(int n, const double* values);
/// Inverse of row_forward_fft including the 1/n factor.
std::vector<double> row_inverse_fft(int n, const std::vector<cplx>& coeffs);

/// Signed mode index for a storage index along an axis.
inline int signed_mode(int j, int n) { return j <= n / 2 ? j : j - n; }

/// Physical wavenumber pi*m/L.
inline double wavenumber(const Grid2D& grid, int m) { return m * 3.14159265358979323846 / grid.half_width(); }

}  // namespace cel
