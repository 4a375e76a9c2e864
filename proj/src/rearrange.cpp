#include "cel/rearrange.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>

namespace cel {

double RearrangementProfile::at(double t) const {
    if (t < 0.0) throw DomainError("rearrangement evaluated at negative t");
    if (weight <= 0.0) return 0.0;
    double k = std::floor(t / weight);
    if (k >= static_cast<double>(values.size())) return 0.0;
    return values[static_cast<std::size_t>(k)];
}

double RearrangementProfile::lp_norm(double p) const {
    if (std::isinf(p)) return values.empty() ? 0.0 : values.front();
    if (p < 1.0) throw DomainError("Lp exponent must be >= 1");
    double s = 0.0;
    for (double v : values) s += std::pow(v, p);
    return std::pow(s * weight, 1.0 / p);
}

double distribution_function(const ScalarField& f, double alpha) {
    if (alpha < 0.0 || std::isnan(alpha)) throw DomainError("distribution function needs alpha >= 0");
    std::size_t count = 0;
    for (double v : f.values())
        if (std::fabs(v) > alpha) ++count;
    return static_cast<double>(count) * f.grid().cell_area();
}

RearrangementProfile decreasing_rearrangement(const ScalarField& f) {
    RearrangementProfile p;
    p.weight = f.grid().cell_area();
    p.values.resize(f.size());
    for (std::size_t k = 0; k < f.size(); ++k) p.values[k] = std::fabs(f[k]);
    std::sort(p.values.begin(), p.values.end(), std::greater<double>());
    return p;
}

double lorentz_norm(const RearrangementProfile& prof, double p, double q) {
    if (!(p >= 1.0) || std::isinf(p)) throw DomainError("Lorentz exponent p must lie in [1, inf)");
    if (!(q >= 1.0)) throw DomainError("Lorentz exponent q must be >= 1 or inf");
    const double w = prof.weight;
    if (std::isinf(q)) {
        double best = 0.0;
        for (std::size_t k = 0; k < prof.values.size(); ++k) {
            if (prof.values[k] == 0.0) break;
            best = std::max(best, std::pow((k + 1) * w, 1.0 / p) * prof.values[k]);
        }
        return best;
    }
    // int_{kw}^{(k+1)w} t^{q/p-1} dt = (p/q)(((k+1)w)^{q/p} - (kw)^{q/p}), written without cancellation.
    const double s = q / p;
    double acc = 0.0;
    for (std::size_t k = 0; k < prof.values.size(); ++k) {
        const double v = prof.values[k];
        if (v == 0.0) break;
        double piece;
        if (k == 0) {
            piece = std::pow(w, s) / s;
        } else {
            const double b = k * w;
            piece = std::pow(b, s) * std::expm1(s * std::log1p(1.0 / static_cast<double>(k))) / s;
        }
        acc += std::pow(v, q) * piece;
    }
    return std::pow(acc, 1.0 / q);
}

double lorentz_norm(const ScalarField& f, double p, double q) {
    return lorentz_norm(decreasing_rearrangement(f), p, q);
}

double small_set_concentration(const RearrangementProfile& prof, double delta) {
    if (delta < 0.0 || std::isnan(delta)) throw DomainError("concentration needs delta >= 0");
    const double w = prof.weight;
    double acc = 0.0;
    double used = 0.0;
    for (double v : prof.values) {
        if (used >= delta) break;
        double take = std::min(w, delta - used);
        acc += v * take;
        used += take;
    }
    return acc;
}

double small_set_concentration(const ScalarField& f, double delta) {
    return small_set_concentration(decreasing_rearrangement(f), delta);
}

void write_profile_csv(const std::string& path, const RearrangementProfile& prof) {
    std::FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) throw IoError("cannot open csv for writing: " + path);
    std::fputs("t,fstar\n", fp);
    for (std::size_t k = 0; k < prof.values.size(); ++k)
        std::fprintf(fp, "%.17g,%.17g\n", k * prof.weight, prof.values[k]);
    std::fprintf(fp, "%.17g,%.17g\n", prof.total_measure(), 0.0);
    std::fclose(fp);
}

}  // namespace cel
