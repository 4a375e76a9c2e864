#include "cel/spectral.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <mutex>

namespace cel {

namespace {

struct PlanPair {
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
};

std::mutex plan_mutex;

const PlanPair& plans_for(int n) {
    static std::map<int, PlanPair> cache;
    std::lock_guard<std::mutex> lock(plan_mutex);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    std::size_t real_size = static_cast<std::size_t>(n) * n;
    std::size_t half_size = static_cast<std::size_t>(n) * (n / 2 + 1);
    double* r = fftw_alloc_real(real_size);
    fftw_complex* c = fftw_alloc_complex(half_size);
    // ESTIMATE keeps the algorithm choice deterministic across runs.
    unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    PlanPair p;
    p.forward = fftw_plan_dft_r2c_2d(n, n, r, c, flags);
    p.backward = fftw_plan_dft_c2r_2d(n, n, c, r, flags);
    fftw_free(r);
    fftw_free(c);
    return cache.emplace(n, p).first->second;
}

struct RowPlans {
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
};

/// n independent length-n transforms over the rows of an n x n array.
const RowPlans& row_plans_for(int n) {
    static std::map<int, RowPlans> cache;
    std::lock_guard<std::mutex> lock(plan_mutex);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    const int c = n / 2 + 1;
    double* r = fftw_alloc_real(static_cast<std::size_t>(n) * n);
    fftw_complex* z = fftw_alloc_complex(static_cast<std::size_t>(n) * c);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    RowPlans p;
    p.forward = fftw_plan_many_dft_r2c(1, &n, n, r, nullptr, 1, n, z, nullptr, 1, c, flags);
    p.backward = fftw_plan_many_dft_c2r(1, &n, n, z, nullptr, 1, c, r, nullptr, 1, n, flags);
    fftw_free(r);
    fftw_free(z);
    return cache.emplace(n, p).first->second;
}

}  // namespace

std::vector<cplx> row_forward_fft(int n, const double* values) {
    const RowPlans& p = row_plans_for(n);
    std::vector<double> in(values, values + static_cast<std::size_t>(n) * n);
    std::vector<cplx> out(static_cast<std::size_t>(n) * (n / 2 + 1));
    fftw_execute_dft_r2c(p.forward, in.data(), reinterpret_cast<fftw_complex*>(out.data()));
    return out;
}

std::vector<double> row_inverse_fft(int n, const std::vector<cplx>& coeffs) {
    const RowPlans& p = row_plans_for(n);
    std::vector<cplx> scratch = coeffs;
    std::vector<double> out(static_cast<std::size_t>(n) * n);
    fftw_execute_dft_c2r(p.backward, reinterpret_cast<fftw_complex*>(scratch.data()), out.data());
    for (double& v : out) v /= n;
    return out;
}

Spectrum forward_fft(const Grid2D& grid, const double* values) {
    const int n = grid.n();
    const PlanPair& p = plans_for(n);
    Spectrum s;
    s.n = n;
    s.data.resize(static_cast<std::size_t>(n) * (n / 2 + 1));
    // r2c leaves its input intact, but the interface wants a non-const pointer.
    std::vector<double> in(values, values + grid.size());
    fftw_execute_dft_r2c(p.forward, in.data(), reinterpret_cast<fftw_complex*>(s.data.data()));
    return s;
}

std::vector<double> inverse_fft(const Spectrum& s) {
    const int n = s.n;
    const PlanPair& p = plans_for(n);
    std::vector<cplx> scratch = s.data;  // c2r overwrites its input
    std::vector<double> out(static_cast<std::size_t>(n) * n);
    fftw_execute_dft_c2r(p.backward, reinterpret_cast<fftw_complex*>(scratch.data()), out.data());
    const double scale = 1.0 / (static_cast<double>(n) * n);
    for (double& v : out) v *= scale;
    return out;
}

ScalarField inverse_fft_field(const Grid2D& grid, const Spectrum& s) {
    return ScalarField(grid, inverse_fft(s));
}

}  // namespace cel
