#include "cel/fields.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "cel/spectral.hpp"

namespace cel {

Grid2D::Grid2D(int n, double half_width) : n_(n), L_(half_width), dx_(0.0) {
    if (n < 16 || (n & (n - 1)) != 0)
        throw ConfigurationError("grid size n must be a power of two >= 16, got " + std::to_string(n));
    if (!(half_width > 0.0) || !std::isfinite(half_width))
        throw ConfigurationError("grid half-width L must be positive and finite");
    dx_ = 2.0 * L_ / n_;
}

// ============================================================================
// ScalarField
// ============================================================================

ScalarField::ScalarField(const Grid2D& grid) : grid_(grid), values_(grid.size(), 0.0) {}

ScalarField::ScalarField(const Grid2D& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size())
        throw ConfigurationError("field sample count does not match grid");
    for (double v : values_)
        if (!std::isfinite(v)) throw DomainError("field contains a non-finite sample");
}

ScalarField ScalarField::from_function(const Grid2D& grid, const std::function<double(double, double)>& f) {
    std::vector<double> v(grid.size());
    const int n = grid.n();
    for (int i2 = 0; i2 < n; ++i2)
        for (int i1 = 0; i1 < n; ++i1) v[grid.index(i1, i2)] = f(grid.coord(i1), grid.coord(i2));
    return ScalarField(grid, std::move(v));
}

ScalarField ScalarField::constant(const Grid2D& grid, double c) {
    return ScalarField(grid, std::vector<double>(grid.size(), c));
}

void require_same_grid(const ScalarField& a, const ScalarField& b, const char* what) {
    if (a.grid() != b.grid()) throw ConfigurationError(std::string(what) + ": fields live on different grids");
}

ScalarField ScalarField::operator+(const ScalarField& o) const {
    require_same_grid(*this, o, "field sum");
    std::vector<double> v(values_);
    for (std::size_t k = 0; k < v.size(); ++k) v[k] += o.values_[k];
    return ScalarField(grid_, std::move(v));
}

ScalarField ScalarField::operator-(const ScalarField& o) const {
    require_same_grid(*this, o, "field difference");
    std::vector<double> v(values_);
    for (std::size_t k = 0; k < v.size(); ++k) v[k] -= o.values_[k];
    return ScalarField(grid_, std::move(v));
}

ScalarField ScalarField::operator*(double c) const {
    std::vector<double> v(values_);
    for (double& x : v) x *= c;
    return ScalarField(grid_, std::move(v));
}

ScalarField ScalarField::times(const ScalarField& o) const {
    require_same_grid(*this, o, "field product");
    std::vector<double> v(values_);
    for (std::size_t k = 0; k < v.size(); ++k) v[k] *= o.values_[k];
    return ScalarField(grid_, std::move(v));
}

ScalarField ScalarField::abs() const {
    std::vector<double> v(values_);
    for (double& x : v) x = std::fabs(x);
    return ScalarField(grid_, std::move(v));
}

// ============================================================================
// Spectral derivatives
// ============================================================================

namespace {

cplx ipow(int e) {
    switch (((e % 4) + 4) % 4) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
    }
}

Spectrum apply_partial(const Grid2D& grid, const Spectrum& s, int p, int q) {
    const int n = grid.n();
    Spectrum out = s;
    const cplx unit = ipow(p + q);
    for (int j2 = 0; j2 < n; ++j2) {
        const double k2 = wavenumber(grid, signed_mode(j2, n));
        const bool nyq2 = (j2 == n / 2);
        for (int j1 = 0; j1 <= n / 2; ++j1) {
            const double k1 = wavenumber(grid, j1);
            const bool nyq1 = (j1 == n / 2);
            double m = std::pow(k1, p) * std::pow(k2, q);
            if ((nyq1 && (p % 2 == 1)) || (nyq2 && (q % 2 == 1))) m = 0.0;
            out.at(j2, j1) *= unit * m;
        }
    }
    return out;
}

}  // namespace

ScalarField spectral_partial(const ScalarField& f, int p, int q) {
    return spectral_partials(f, {{p, q}}).front();
}

std::vector<ScalarField> spectral_partials(const ScalarField& f, const std::vector<std::array<int, 2>>& orders) {
    const Spectrum s = forward_fft(f);
    std::vector<ScalarField> out;
    out.reserve(orders.size());
    for (const auto& o : orders) {
        if (o[0] < 0 || o[1] < 0) throw DomainError("negative derivative order");
        out.push_back(inverse_fft_field(f.grid(), apply_partial(f.grid(), s, o[0], o[1])));
    }
    return out;
}

ScalarField spectral_derivative(const ScalarField& f, int axis, int order) {
    if (axis != 1 && axis != 2) throw DomainError("axis must be 1 or 2");
    if (order != 1 && order != 2) throw DomainError("derivative order must be 1 or 2");
    return axis == 1 ? spectral_partial(f, order, 0) : spectral_partial(f, 0, order);
}

// ============================================================================
// Quadrature and sampling
// ============================================================================

double integrate(const ScalarField& f) {
    double s = 0.0;
    for (double v : f.values()) s += v;
    return s * f.grid().cell_area();
}

double max_abs(const ScalarField& f) {
    double m = 0.0;
    for (double v : f.values()) m = std::max(m, std::fabs(v));
    return m;
}

double wrap_coordinate(double x, double L) {
    const double period = 2.0 * L;
    double y = std::fmod(x + L, period);
    if (y < 0.0) y += period;
    if (y >= period) y -= period;
    return y - L;
}

CubicStencil::CubicStencil(const Grid2D& grid, Point p) {
    const int n = grid.n();
    const double L = grid.half_width();
    const double dx = grid.dx();
    auto axis = [&](double x, std::array<std::size_t, 4>& idx, std::array<double, 4>& w, std::size_t stride) {
        double s = (wrap_coordinate(x, L) + L) / dx;
        double base = std::floor(s);
        double t = s - base;
        long i0 = static_cast<long>(base);
        // Lagrange weights on nodes -1, 0, 1, 2.
        w[0] = -t * (t - 1.0) * (t - 2.0) / 6.0;
        w[1] = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
        w[2] = -(t + 1.0) * t * (t - 2.0) / 2.0;
        w[3] = (t + 1.0) * t * (t - 1.0) / 6.0;
        for (int a = 0; a < 4; ++a) {
            long i = ((i0 - 1 + a) % n + n) % n;
            idx[a] = static_cast<std::size_t>(i) * stride;
        }
    };
    axis(p.x1, col, wx, 1);
    axis(p.x2, row, wy, static_cast<std::size_t>(n));
}

double sample_one(const ScalarField& f, Point p) {
    return CubicStencil(f.grid(), p).apply(f.data());
}

std::vector<double> sample(const ScalarField& f, const std::vector<Point>& points) {
    std::vector<double> out(points.size());
    for (std::size_t k = 0; k < points.size(); ++k) out[k] = sample_one(f, points[k]);
    return out;
}

// ============================================================================
// Snapshot I/O
// ============================================================================

namespace {

template <class T>
void put_le(std::ofstream& os, T v) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
        for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
    os.write(reinterpret_cast<const char*>(b), sizeof(T));
}

template <class T>
T get_le(std::ifstream& is, const std::string& path) {
    unsigned char b[sizeof(T)];
    if (!is.read(reinterpret_cast<char*>(b), sizeof(T))) throw IoError("truncated snapshot: " + path);
    if constexpr (std::endian::native == std::endian::big)
        for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
    T v;
    std::memcpy(&v, b, sizeof(T));
    return v;
}

}  // namespace

void write_snapshot(const std::string& path, const ScalarField& f) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open snapshot for writing: " + path);
    os.write("CEL1", 4);
    put_le<std::uint32_t>(os, static_cast<std::uint32_t>(f.grid().n()));
    put_le<double>(os, f.grid().half_width());
    for (double v : f.values()) put_le<double>(os, v);
    if (!os) throw IoError("write failed: " + path);
}

ScalarField read_snapshot(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open snapshot: " + path);
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, "CEL1", 4) != 0) throw IoError("bad snapshot magic: " + path);
    auto n = get_le<std::uint32_t>(is, path);
    auto L = get_le<double>(is, path);
    if (n > (1u << 14)) throw IoError("snapshot grid too large: " + path);
    Grid2D grid(static_cast<int>(n), L);
    std::vector<double> v(grid.size());
    for (double& x : v) x = get_le<double>(is, path);
    return ScalarField(grid, std::move(v));
}

void write_field_csv(const std::string& path, const ScalarField& f) {
    std::FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) throw IoError("cannot open csv for writing: " + path);
    std::fputs("x1,x2,value\n", fp);
    const Grid2D& g = f.grid();
    for (int i2 = 0; i2 < g.n(); ++i2)
        for (int i1 = 0; i1 < g.n(); ++i1)
            std::fprintf(fp, "%.17g,%.17g,%.17g\n", g.coord(i1), g.coord(i2), f.at(i1, i2));
    std::fclose(fp);
}

}  // namespace cel
