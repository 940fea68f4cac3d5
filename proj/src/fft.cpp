#include "specamp/fft.hpp"

#include <fftw3.h>

#include <mutex>

namespace specamp {

namespace {
std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

Fft::Fft(const TorusGrid& grid) {
    total_ = grid.total_points();
    inv_total_ = 1.0 / total_;
    scratch_.resize(total_);

    int n[3] = {0, 0, 0};
    for (int a = 0; a < grid.dim(); ++a) n[a] = grid.points(a);

    auto* buf = reinterpret_cast<fftw_complex*>(scratch_.data());
    std::lock_guard<std::mutex> lock(plan_mutex());
    // FFTW_UNALIGNED so the plan may execute on any caller array in place.
    plan_fwd_ = fftw_plan_dft(grid.dim(), n, buf, buf, FFTW_FORWARD,
                              FFTW_ESTIMATE | FFTW_UNALIGNED);
    plan_bwd_ = fftw_plan_dft(grid.dim(), n, buf, buf, FFTW_BACKWARD,
                              FFTW_ESTIMATE | FFTW_UNALIGNED);
}

Fft::~Fft() {
    std::lock_guard<std::mutex> lock(plan_mutex());
    if (plan_fwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
    if (plan_bwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
}

void Fft::forward(std::complex<double>* data) const {
    auto* p = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(static_cast<fftw_plan>(plan_fwd_), p, p);
}

void Fft::backward(std::complex<double>* data) const {
    auto* p = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(static_cast<fftw_plan>(plan_bwd_), p, p);
    for (int i = 0; i < total_; ++i) data[i] *= inv_total_;
}

}  // namespace specamp
