#include "cel/biot_savart.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "cel/parallel.hpp"
#include "cel/spectral.hpp"

namespace cel {

namespace {

constexpr double kPi = std::numbers::pi;

double bump(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }

double smooth_step(double s) {
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 1.0;
    return bump(s) / (bump(s) + bump(1.0 - s));
}

double smooth_step_slope(double s) {
    if (s <= 0.0 || s >= 1.0) return 0.0;
    const double a = bump(s), b = bump(1.0 - s);
    const double da = a / (s * s), db = b / ((1.0 - s) * (1.0 - s));
    return (da * b + a * db) / ((a + b) * (a + b));
}

void require_oracle_scale(const Grid2D& g, const char* what) {
    if (g.n() > 128)
        throw ConfigurationError(std::string(what) + " is an O(n^4) oracle; refusing n = " + std::to_string(g.n()) +
                                 " > 128");
}

/// Tabulated kernel over lattice offsets; entry (b, c) holds K at offset (a, b)*dx
/// with a = (n-1) - c, so that sources scanned left to right read the table forward.
struct KernelTable {
    int n = 0;
    int w = 0;
    std::vector<double> k1, k2;
};

template <class Weight>
KernelTable make_table(const Grid2D& g, Weight weight) {
    KernelTable t;
    t.n = g.n();
    t.w = 2 * t.n - 1;
    t.k1.assign(static_cast<std::size_t>(t.w) * t.w, 0.0);
    t.k2.assign(t.k1.size(), 0.0);
    const double dx = g.dx();
    for (int b = -(t.n - 1); b <= t.n - 1; ++b)
        for (int a = -(t.n - 1); a <= t.n - 1; ++a) {
            if (a == 0 && b == 0) continue;
            const double z1 = a * dx, z2 = b * dx;
            const double r2 = z1 * z1 + z2 * z2;
            const double wgt = weight(std::sqrt(r2));
            if (wgt == 0.0) continue;
            const std::size_t idx = static_cast<std::size_t>(b + t.n - 1) * t.w + (t.n - 1 - a);
            t.k1[idx] = -z2 / (2.0 * kPi * r2) * wgt;
            t.k2[idx] = z1 / (2.0 * kPi * r2) * wgt;
        }
    return t;
}

/// out[m][target] = dx^2 * sum_src K_{comp(m)}(target - src) * src_field[m](src)
/// for the listed (kernel component, source) pairs.
struct Term {
    int comp;  // 1 or 2
    const ScalarField* src;
};

std::vector<std::vector<double>> convolve(const Grid2D& g, const KernelTable& t, const std::vector<Term>& terms,
                                          int reach) {
    const int n = g.n();
    const std::size_t N = g.size();
    std::vector<std::vector<double>> out(terms.size(), std::vector<double>(N, 0.0));
    const double area = g.cell_area();
    parallel_for(N, [&](std::size_t begin, std::size_t end) {
        std::vector<double> acc(terms.size());
        for (std::size_t tgt = begin; tgt < end; ++tgt) {
            const int i1 = static_cast<int>(tgt % n), i2 = static_cast<int>(tgt / n);
            std::fill(acc.begin(), acc.end(), 0.0);
            const int j2lo = std::max(0, i2 - reach), j2hi = std::min(n - 1, i2 + reach);
            const int j1lo = std::max(0, i1 - reach), j1hi = std::min(n - 1, i1 + reach);
            for (int j2 = j2lo; j2 <= j2hi; ++j2) {
                const int b = i2 - j2;
                const std::size_t row = static_cast<std::size_t>(b + n - 1) * t.w;
                // column for source j1 is (n-1) - (i1 - j1) = j1 + (n-1-i1)
                const double* K1 = t.k1.data() + row + (n - 1 - i1);
                const double* K2 = t.k2.data() + row + (n - 1 - i1);
                for (std::size_t m = 0; m < terms.size(); ++m) {
                    const double* K = terms[m].comp == 1 ? K1 : K2;
                    const double* s = terms[m].src->data() + static_cast<std::size_t>(j2) * n;
                    double sum = 0.0;
                    for (int j1 = j1lo; j1 <= j1hi; ++j1) sum += K[j1] * s[j1];
                    acc[m] += sum;
                }
            }
            for (std::size_t m = 0; m < terms.size(); ++m) out[m][tgt] = acc[m] * area;
        }
    });
    return out;
}

}  // namespace

// ============================================================================
// Cutoff
// ============================================================================

double KernelCutoff::value(double r) const { return smooth_step((1.0 - r) / 0.5); }

double KernelCutoff::slope(double r) const { return -2.0 * smooth_step_slope((1.0 - r) / 0.5); }

// ============================================================================
// Spectral inversion
// ============================================================================

namespace {

ScalarField from_multiplier(const Grid2D& g, const Spectrum& w, const std::function<cplx(double, double, bool, bool)>& m) {
    const int n = g.n();
    Spectrum s = w;
    for (int j2 = 0; j2 < n; ++j2) {
        const double k2 = wavenumber(g, signed_mode(j2, n));
        for (int j1 = 0; j1 <= n / 2; ++j1) {
            const double k1 = wavenumber(g, j1);
            const double kk = k1 * k1 + k2 * k2;
            if (kk == 0.0) {
                s.at(j2, j1) = 0.0;
                continue;
            }
            s.at(j2, j1) *= m(k1, k2, j1 == n / 2, j2 == n / 2) / kk;
        }
    }
    return inverse_fft_field(g, s);
}

}  // namespace

VelocityField velocity_spectral(const ScalarField& omega, bool with_gradient) {
    const Grid2D& g = omega.grid();
    const Spectrum w = forward_fft(omega);
    const cplx I(0.0, 1.0);
    // Multipliers act on psi_hat = omega_hat / |k|^2.
    ScalarField u1 = from_multiplier(g, w, [&](double, double k2, bool, bool n2) { return n2 ? cplx(0.0) : I * k2; });
    ScalarField u2 = from_multiplier(g, w, [&](double k1, double, bool n1, bool) { return n1 ? cplx(0.0) : -I * k1; });
    if (!with_gradient) {
        const ScalarField z(g);
        return VelocityField{std::move(u1), std::move(u2), {z, z, z, z}};
    }
    return VelocityField{std::move(u1), std::move(u2), velocity_gradient(omega)};
}

GradientFields velocity_gradient(const ScalarField& omega) {
    const Grid2D& g = omega.grid();
    const Spectrum w = forward_fft(omega);
    auto mixed = [](double k1, double k2, bool n1, bool n2) { return (n1 || n2) ? cplx(0.0) : cplx(-k1 * k2); };
    ScalarField d1u1 = from_multiplier(g, w, mixed);
    ScalarField d2u1 = from_multiplier(g, w, [](double, double k2, bool, bool) { return cplx(-k2 * k2); });
    ScalarField d1u2 = from_multiplier(g, w, [](double k1, double, bool, bool) { return cplx(k1 * k1); });
    ScalarField d2u2 = d1u1 * -1.0;
    return {std::move(d1u1), std::move(d2u1), std::move(d1u2), std::move(d2u2)};
}

// ============================================================================
// Direct quadrature
// ============================================================================

VelocityField velocity_direct(const ScalarField& omega) {
    const Grid2D& g = omega.grid();
    require_oracle_scale(g, "velocity_direct");
    const int n = g.n();
    const KernelTable t = make_table(g, [](double) { return 1.0; });
    auto d = spectral_partials(omega, {{1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}});
    const ScalarField &w1 = d[0], &w2 = d[1], &w11 = d[2], &w12 = d[3], &w22 = d[4];
    auto sums = convolve(g, t, {{1, &omega}, {2, &omega}, {1, &w1}, {1, &w2}, {2, &w1}, {2, &w2}}, n);
    // The singular cell's first-order contribution, -(dx^2 / 4 pi) grad^perp of the integrand.
    const double c = g.cell_area() / (4.0 * kPi);
    for (std::size_t k = 0; k < g.size(); ++k) {
        sums[0][k] += c * w2[k];
        sums[1][k] -= c * w1[k];
        sums[2][k] += c * w12[k];
        sums[3][k] += c * w22[k];
        sums[4][k] -= c * w11[k];
        sums[5][k] -= c * w12[k];
    }
    auto f = [&](int m) { return ScalarField(g, std::move(sums[m])); };
    return VelocityField{f(0), f(1), {f(2), f(3), f(4), f(5)}};
}

NearFar near_far_split(const ScalarField& omega, const KernelCutoff& cutoff) {
    const Grid2D& g = omega.grid();
    require_oracle_scale(g, "near_far_split");
    const int n = g.n();
    const KernelTable tn = make_table(g, [&](double r) { return cutoff.value(r); });
    const KernelTable tf = make_table(g, [&](double r) { return 1.0 - cutoff.value(r); });
    auto d = spectral_partials(omega, {{1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}});
    const ScalarField &w1 = d[0], &w2 = d[1], &w11 = d[2], &w12 = d[3], &w22 = d[4];
    const std::vector<Term> terms = {{1, &w1}, {1, &w2}, {2, &w1}, {2, &w2}};
    const int reach = std::min(n, static_cast<int>(std::ceil(1.0 / g.dx())) + 1);
    auto near = convolve(g, tn, terms, reach);
    auto far = convolve(g, tf, terms, n);
    const double c = g.cell_area() / (4.0 * kPi);
    for (std::size_t k = 0; k < g.size(); ++k) {
        near[0][k] += c * w12[k];
        near[1][k] += c * w22[k];
        near[2][k] -= c * w11[k];
        near[3][k] -= c * w12[k];
    }
    NearFar out{{ScalarField(g, std::move(near[0])), ScalarField(g, std::move(near[1])),
                 ScalarField(g, std::move(near[2])), ScalarField(g, std::move(near[3]))},
                {ScalarField(g, std::move(far[0])), ScalarField(g, std::move(far[1])),
                 ScalarField(g, std::move(far[2])), ScalarField(g, std::move(far[3]))}};
    return out;
}

// ============================================================================
// Sup norms and oracle comparison
// ============================================================================

double velocity_sup(const VelocityField& u) {
    double m = 0.0;
    for (std::size_t k = 0; k < u.u1.size(); ++k) m = std::max(m, std::hypot(u.u1[k], u.u2[k]));
    return m;
}

double operator_norm(double a, double b, double c, double d) {
    const double half = 0.5 * (a * a + b * b + c * c + d * d);
    const double det = a * d - b * c;
    const double disc = std::max(0.0, half * half - det * det);
    return std::sqrt(half + std::sqrt(disc));
}

double gradient_sup(const GradientFields& g) {
    double m = 0.0;
    for (std::size_t k = 0; k < g[0].size(); ++k) m = std::max(m, operator_norm(g[0][k], g[1][k], g[2][k], g[3][k]));
    return m;
}

OracleComparison compare_spectral_direct(const ScalarField& omega, double radius) {
    const Grid2D& g = omega.grid();
    const VelocityField us = velocity_spectral(omega);
    const VelocityField ud = velocity_direct(omega);
    OracleComparison r;
    r.radius = radius;
    r.mean_u1 = integrate(ud.u1) / (4.0 * g.half_width() * g.half_width());
    r.mean_u2 = integrate(ud.u2) / (4.0 * g.half_width() * g.half_width());
    double num_raw = 0.0, num_al = 0.0, den = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        const Point p = g.node(k);
        if (p.x1 * p.x1 + p.x2 * p.x2 > radius * radius) continue;
        const double e1 = us.u1[k] - ud.u1[k], e2 = us.u2[k] - ud.u2[k];
        num_raw += e1 * e1 + e2 * e2;
        const double a1 = e1 + r.mean_u1, a2 = e2 + r.mean_u2;
        num_al += a1 * a1 + a2 * a2;
        den += ud.u1[k] * ud.u1[k] + ud.u2[k] * ud.u2[k];
    }
    r.raw_rel_l2 = den > 0.0 ? std::sqrt(num_raw / den) : std::sqrt(num_raw);
    r.aligned_rel_l2 = den > 0.0 ? std::sqrt(num_al / den) : std::sqrt(num_al);
    return r;
}

}  // namespace cel
