#include "cel/norms.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "cel/parallel.hpp"
#include "cel/rearrange.hpp"
#include "cel/spectral.hpp"

namespace cel {

namespace {

const std::vector<std::array<int, 2>> kFirst = {{1, 0}, {0, 1}};

double masked_l1(const ScalarField& f, double R) {
    const Grid2D& g = f.grid();
    const double R2 = R * R;
    double s = 0.0;
    for (int i2 = 0; i2 < g.n(); ++i2) {
        const double x2 = g.coord(i2);
        for (int i1 = 0; i1 < g.n(); ++i1) {
            const double x1 = g.coord(i1);
            if (R <= 0.0 || x1 * x1 + x2 * x2 >= R2) s += std::fabs(f.at(i1, i2));
        }
    }
    return s * g.cell_area();
}

// ============================================================================
// Derivative L1 norms by total variation
// ============================================================================

/// Trigonometric interpolant of one grid row, from its half spectrum.
struct RowInterpolant {
    const cplx* c;
    int n;
    double L;

    /// Value, first and second derivative at x.
    void eval(double x, double& p, double& dp, double& ddp) const {
        const double k0 = M_PI / L;
        const cplx z = std::polar(1.0, k0 * (x + L));
        cplx zm(1.0, 0.0);
        p = c[0].real();
        dp = ddp = 0.0;
        for (int m = 1; m <= n / 2; ++m) {
            zm *= z;
            const cplx term = c[m] * zm;
            const double w = (m == n / 2) ? 1.0 : 2.0;
            const double k = m * k0;
            p += w * term.real();
            dp -= w * k * term.imag();
            ddp -= w * k * k * term.real();
        }
        p /= n;
        dp /= n;
        ddp /= n;
    }

    double value(double x) const {
        double p, dp, ddp;
        eval(x, p, dp, ddp);
        return p;
    }
};

struct Extremum {
    double x, v;
};

/// Extremum of the interpolant between nodes x0 and x0 + dx, where the derivative changes sign.
Extremum refine_extremum(const RowInterpolant& ip, double x0, double dx, double v0, double v1, double d0, double d1,
                         bool polish) {
    const double theta = d0 / (d0 - d1);
    double x = x0 + theta * dx;
    if (!polish) return {x, v0 + theta * (v1 - v0)};
    double lo = x0, hi = x0 + dx;
    const bool rising = d0 > 0.0;  // derivative positive at lo
    double p = 0.0;
    for (int it = 0; it < 30; ++it) {
        double dp, ddp;
        ip.eval(x, p, dp, ddp);
        if (dp == 0.0) break;
        if ((dp > 0.0) == rising)
            lo = x;
        else
            hi = x;
        double next = (ddp != 0.0) ? x - dp / ddp : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        const bool done = std::fabs(next - x) <= 1e-15 * ip.L;
        x = next;
        if (done) break;
    }
    return {x, ip.value(x)};
}

/// Sum over rows of dx * (total variation in x1 of the row interpolant over {|x| >= R}).
/// rows are n x n, row r sits at x2 = coord(r).
double rows_variation(const Grid2D& g, const std::vector<double>& rows, double R) {
    const int n = g.n(), c = n / 2 + 1;
    const double L = g.half_width(), dx = g.dx();
    const std::vector<cplx> coef = row_forward_fft(n, rows.data());
    std::vector<cplx> dcoef(coef.size());
    for (int r = 0; r < n; ++r)
        for (int m = 0; m < c; ++m) {
            const std::size_t k = static_cast<std::size_t>(r) * c + m;
            dcoef[k] = (m == n / 2) ? cplx(0.0) : cplx(0.0, wavenumber(g, m)) * coef[k];
        }
    const std::vector<double> deriv = row_inverse_fft(n, dcoef);
    double dscale = 0.0;
    for (double d : deriv) dscale = std::max(dscale, std::fabs(d));
    if (dscale == 0.0) return 0.0;
    const double tiny = 1e-13 * dscale;

    std::vector<double> per_row(n, 0.0);
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t rr = lo; rr < hi; ++rr) {
            const int r = static_cast<int>(rr);
            const double* v = rows.data() + static_cast<std::size_t>(r) * n;
            const double* d = deriv.data() + static_cast<std::size_t>(r) * n;
            const RowInterpolant ip{coef.data() + static_cast<std::size_t>(r) * c, n, L};
            std::vector<Extremum> ext;
            for (int i = 0; i < n; ++i) {
                const int j = (i + 1) % n;
                const double x0 = g.coord(i);
                if (d[i] == 0.0) {
                    ext.push_back({x0, v[i]});
                } else if (d[i] * d[j] < 0.0) {
                    const bool polish = std::fabs(d[i]) > tiny || std::fabs(d[j]) > tiny;
                    ext.push_back(refine_extremum(ip, x0, dx, v[i], v[j], d[i], d[j], polish));
                }
            }
            const double x2 = g.coord(r);
            double tv = 0.0;
            if (R <= 0.0 || std::fabs(x2) >= R) {
                for (std::size_t k = 0; k < ext.size(); ++k) tv += std::fabs(ext[(k + 1) % ext.size()].v - ext[k].v);
            } else {
                // {|x1| >= a} is the periodic interval [a, 2L - a] once x1 < a is shifted by 2L.
                const double a = std::sqrt(R * R - x2 * x2);
                std::vector<Extremum> inside;
                for (const Extremum& e : ext) {
                    const double u = e.x < a ? e.x + 2.0 * L : e.x;
                    if (u > a && u < 2.0 * L - a) inside.push_back({u, e.v});
                }
                std::sort(inside.begin(), inside.end(), [](const Extremum& p, const Extremum& q) { return p.x < q.x; });
                double prev = ip.value(a);
                for (const Extremum& e : inside) {
                    tv += std::fabs(e.v - prev);
                    prev = e.v;
                }
                tv += std::fabs(ip.value(-a) - prev);
            }
            per_row[r] = tv;
        }
    }, 8);
    double s = 0.0;
    for (double t : per_row) s += t;
    return s * dx;
}

std::vector<double> transposed(const ScalarField& f) {
    const int n = f.grid().n();
    std::vector<double> t(f.size());
    for (int i2 = 0; i2 < n; ++i2)
        for (int i1 = 0; i1 < n; ++i1) t[static_cast<std::size_t>(i1) * n + i2] = f.at(i1, i2);
    return t;
}

/// int_{|x| >= R} |D^a f| for a = (1,0), (0,1) and, with order 2, (2,0), (1,1), (0,2).
std::vector<double> derivative_l1(const ScalarField& f, double R, int order) {
    const Grid2D& g = f.grid();
    std::vector<double> out;
    out.push_back(rows_variation(g, f.values(), R));
    out.push_back(rows_variation(g, transposed(f), R));
    if (order < 2) return out;
    const std::vector<ScalarField> d = spectral_partials(f, kFirst);
    out.push_back(rows_variation(g, d[0].values(), R));
    out.push_back(rows_variation(g, d[1].values(), R));
    out.push_back(rows_variation(g, transposed(d[1]), R));
    return out;
}

/// int |d1 d2 f|.
double mixed_l1(const ScalarField& f) {
    return rows_variation(f.grid(), spectral_partial(f, 0, 1).values(), 0.0);
}

struct Offset {
    int a, b;
    double r2;
};

/// Lattice offsets with |o| dx <= rmax, distinct modulo n, sorted by length.
std::vector<Offset> disk_offsets(const Grid2D& g, double rmax) {
    const int n = g.n();
    const double dx = g.dx();
    const double lim = rmax / dx * (1.0 + 1e-12);
    const int R = std::min(static_cast<int>(std::floor(lim)), n);
    std::vector<Offset> all;
    for (int b = -R; b <= R; ++b)
        for (int a = -R; a <= R; ++a) {
            double r2 = static_cast<double>(a) * a + static_cast<double>(b) * b;
            if (r2 <= lim * lim) all.push_back({a, b, r2});
        }
    std::sort(all.begin(), all.end(), [](const Offset& p, const Offset& q) {
        if (p.r2 != q.r2) return p.r2 < q.r2;
        if (p.b != q.b) return p.b < q.b;
        return p.a < q.a;
    });
    std::vector<char> seen(g.size(), 0);
    std::vector<Offset> out;
    for (const Offset& o : all) {
        std::size_t key = g.index(((o.a % n) + n) % n, ((o.b % n) + n) % n);
        if (seen[key]) continue;
        seen[key] = 1;
        out.push_back(o);
    }
    return out;
}

}  // namespace

double lp_norm(const ScalarField& f, double p) {
    if (std::isinf(p)) return max_abs(f);
    if (!(p >= 1.0)) throw DomainError("Lp exponent must be >= 1");
    double s = 0.0;
    if (p == 1.0) {
        for (double v : f.values()) s += std::fabs(v);
        return s * f.grid().cell_area();
    }
    if (p == 2.0) {
        for (double v : f.values()) s += v * v;
        return std::sqrt(s * f.grid().cell_area());
    }
    for (double v : f.values()) s += std::pow(std::fabs(v), p);
    return std::pow(s * f.grid().cell_area(), 1.0 / p);
}

double tail_mass(const ScalarField& f, double R, int max_order) {
    if (max_order < 0 || max_order > 2) throw DomainError("tail mass supports orders 0, 1, 2");
    if (R < 0.0 || R > f.grid().half_width()) throw DomainError("tail radius must lie in [0, L]");
    double s = masked_l1(f, R);
    if (max_order == 0) return s;
    for (double t : derivative_l1(f, R, max_order)) s += t;
    return s;
}

double sobolev_norm(const ScalarField& f, int k) {
    if (k < 0 || k > 2) throw DomainError("unsupported Sobolev order " + std::to_string(k));
    return tail_mass(f, 0.0, k);
}

SupMixed sup_via_mixed_derivative(const ScalarField& f) {
    SupMixed r;
    r.sup = max_abs(f);
    r.mixed_l1 = mixed_l1(f);
    r.ok = r.sup <= r.mixed_l1 + 1e-8;
    const double l1 = lp_norm(f, 1.0);
    if (l1 > 0.0 && masked_l1(f, 0.5 * f.grid().half_width()) > 1e-8 * l1) r.inconclusive = true;
    return r;
}

std::vector<double> modulus_profile(const ScalarField& f, const std::vector<double>& radii) {
    const Grid2D& g = f.grid();
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (radii[i] < g.dx() * (1.0 - 1e-12) || radii[i] > 2.0 * g.half_width() * (1.0 + 1e-12))
            throw DomainError("modulus of continuity needs dx <= r <= 2L");
        if (i > 0 && radii[i] < radii[i - 1]) throw DomainError("modulus radii must be ascending");
    }
    std::vector<double> out(radii.size(), 0.0);
    if (radii.empty()) return out;
    const int n = g.n();
    const std::vector<Offset> offs = disk_offsets(g, radii.back());
    std::vector<double> running(f.values());
    const double* src = f.data();
    std::size_t next = 1;  // offset 0 is the identity
    for (std::size_t i = 0; i < radii.size(); ++i) {
        const double lim = radii[i] / g.dx() * (1.0 + 1e-12);
        std::size_t stop = next;
        while (stop < offs.size() && offs[stop].r2 <= lim * lim) ++stop;
        if (stop > next) {
            parallel_for(static_cast<std::size_t>(n), [&](std::size_t rb, std::size_t re) {
                for (std::size_t k = next; k < stop; ++k) {
                    const int a = offs[k].a, b = offs[k].b;
                    for (std::size_t i2 = rb; i2 < re; ++i2) {
                        const std::size_t srow = static_cast<std::size_t>(((static_cast<int>(i2) + b) % n + n) % n) * n;
                        double* dst = running.data() + i2 * n;
                        for (int i1 = 0; i1 < n; ++i1) {
                            const double v = src[srow + ((i1 + a) % n + n) % n];
                            if (v < dst[i1]) dst[i1] = v;
                        }
                    }
                }
            }, 8);
            next = stop;
        }
        double m = 0.0;
        for (std::size_t k = 0; k < running.size(); ++k) m = std::max(m, src[k] - running[k]);
        out[i] = m;
    }
    return out;
}

double modulus_of_continuity(const ScalarField& f, double r) {
    return modulus_profile(f, {r}).front();
}

std::vector<double> dini_radii(const Grid2D& grid) {
    const double lo = grid.dx();
    const double hi = std::min(1.0, 2.0 * grid.half_width());
    const int nodes = 64;
    std::vector<double> r;
    if (hi <= lo) return {lo};
    for (int i = 0; i < nodes; ++i) r.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (nodes - 1)));
    r.back() = hi;
    r.front() = lo;
    return r;
}

double dini_seminorm(const ScalarField& f) {
    const Grid2D& g = f.grid();
    const std::vector<double> r = dini_radii(g);
    const std::vector<double> m = modulus_profile(f, r);
    // Below dx the modulus is taken linear in r.
    double total = m.front() * std::min(1.0, g.dx()) / g.dx();
    for (std::size_t i = 0; i + 1 < r.size(); ++i) total += 0.5 * (m[i] + m[i + 1]) * std::log(r[i + 1] / r[i]);
    // Between 2L and 1 (tiny boxes only) the modulus is saturated.
    if (2.0 * g.half_width() < 1.0) total += m.back() * std::log(1.0 / (2.0 * g.half_width()));
    return total;
}

double translation_modulus(const ScalarField& f, Point h) {
    const Grid2D& g = f.grid();
    const int n = g.n();
    const double s1 = h.x1 / g.dx(), s2 = h.x2 / g.dx();
    const double r1 = std::round(s1), r2 = std::round(s2);
    double acc = 0.0;
    if (std::fabs(s1 - r1) < 1e-9 && std::fabs(s2 - r2) < 1e-9) {
        const long a = static_cast<long>(r1), b = static_cast<long>(r2);
        for (int i2 = 0; i2 < n; ++i2) {
            const int j2 = static_cast<int>(((i2 + b) % n + n) % n);
            for (int i1 = 0; i1 < n; ++i1) {
                const int j1 = static_cast<int>(((i1 + a) % n + n) % n);
                acc += std::fabs(f.at(j1, j2) - f.at(i1, i2));
            }
        }
    } else {
        for (std::size_t k = 0; k < g.size(); ++k) {
            Point p = g.node(k);
            acc += std::fabs(sample_one(f, {p.x1 + h.x1, p.x2 + h.x2}) - f[k]);
        }
    }
    return acc * g.cell_area();
}

double gradient_lorentz21(const ScalarField& f) {
    auto d = spectral_partials(f, kFirst);
    std::vector<double> mag(f.size());
    for (std::size_t k = 0; k < mag.size(); ++k) mag[k] = std::hypot(d[0][k], d[1][k]);
    return lorentz_norm(ScalarField(f.grid(), std::move(mag)), 2.0, 1.0);
}

NormReport norm_report(const ScalarField& f, double time, const std::vector<double>& tail_radii) {
    NormReport r;
    r.time = time;
    r.l1 = lp_norm(f, 1.0);
    r.l2 = lp_norm(f, 2.0);
    r.linf = lp_norm(f, std::numeric_limits<double>::infinity());
    r.mean = integrate(f) / (4.0 * f.grid().half_width() * f.grid().half_width());
    const std::vector<double> dl1 = derivative_l1(f, 0.0, 2);
    // Same summation order as sobolev_norm.
    r.w11 = r.l1;
    r.w11 += dl1[0];
    r.w11 += dl1[1];
    r.w21 = r.w11;
    for (int i = 2; i < 5; ++i) r.w21 += dl1[i];
    r.sup_mixed = dl1[3];
    r.dini = dini_seminorm(f);
    const auto d = spectral_partials(f, kFirst);
    std::vector<double> mag(f.size());
    for (std::size_t k = 0; k < mag.size(); ++k) mag[k] = std::hypot(d[0][k], d[1][k]);
    r.grad_lorentz21 = lorentz_norm(ScalarField(f.grid(), std::move(mag)), 2.0, 1.0);
    for (double R : tail_radii) r.tail.emplace_back(R, tail_mass(f, R, 2));
    return r;
}

void write_norm_csv_header(std::FILE* fp) {
    std::fputs("t,l1,l2,linf,w11,w21,mixed,dini,grad_lorentz21\n", fp);
}

void write_norm_csv_row(std::FILE* fp, const NormReport& r) {
    std::fprintf(fp, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.time, r.l1, r.l2, r.linf, r.w11,
                 r.w21, r.sup_mixed, r.dini, r.grad_lorentz21);
}

}  // namespace cel
