#include "qe/fourier.hpp"

#include "qe/errors.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>

namespace qe {

namespace {

// FFTW's planner is not reentrant; execution on distinct buffers is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwFree {
    void operator()(void* p) const noexcept { fftw_free(p); }
};

struct PlanDeleter {
    void operator()(fftw_plan_s* p) const noexcept {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(p);
    }
};

}  // namespace

FourierCoefficients fourier_coefficients(std::span<const double> samples, std::size_t kmax) {
    const std::size_t q = samples.size();
    if (q == 0) throw DomainError("fourier_coefficients: no samples");
    if (kmax > q / 2) throw DomainError("fourier_coefficients: kmax exceeds Q/2");

    const std::size_t nout = q / 2 + 1;
    std::unique_ptr<double, FftwFree> in(static_cast<double*>(fftw_malloc(sizeof(double) * q)));
    std::unique_ptr<fftw_complex, FftwFree> out(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * nout)));
    if (!in || !out) throw std::bad_alloc();

    std::unique_ptr<fftw_plan_s, PlanDeleter> plan;
    {
        std::lock_guard lock(planner_mutex());
        plan.reset(fftw_plan_dft_r2c_1d(static_cast<int>(q), in.get(), out.get(), FFTW_ESTIMATE));
    }
    if (!plan) throw NumericalError("FFTW plan creation failed");

    const double ref = samples[0];
    for (std::size_t j = 0; j < q; ++j) in.get()[j] = samples[j] - ref;
    fftw_execute(plan.get());

    FourierCoefficients res;
    res.re.resize(kmax + 1);
    const double inv_q = 1.0 / static_cast<double>(q);
    for (std::size_t k = 0; k <= kmax; ++k) {
        res.re[k] = out.get()[k][0] * inv_q;
        res.max_imag = std::max(res.max_imag, std::abs(out.get()[k][1] * inv_q));
    }
    res.re[0] += ref;
    return res;
}

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

}  // namespace qe
