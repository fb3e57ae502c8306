#include "fft.hpp"

#include <algorithm>
#include <mutex>
#include <new>

namespace chirplock::detail {

namespace {
// The FFTW planner is not thread safe.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

AxisFft::AxisFft(int nx, int np, int axis)
    : nx_(nx), np_(np), axis_(axis), n_(axis == 0 ? nx : np), batch_(axis == 0 ? np : nx),
      modes_((axis == 0 ? nx : np) / 2 + 1) {
    const std::size_t real_size = static_cast<std::size_t>(nx) * static_cast<std::size_t>(np);
    const std::size_t spec_size = static_cast<std::size_t>(modes_) * static_cast<std::size_t>(batch_);
    std::lock_guard lock(planner_mutex());
    real_ = fftw_alloc_real(real_size);
    spec_ = fftw_alloc_complex(spec_size);
    if (real_ == nullptr || spec_ == nullptr) {
        throw std::bad_alloc();
    }
    int n[] = {n_};
    if (axis == 0) {
        fwd_ = fftw_plan_many_dft_r2c(1, n, batch_, real_, nullptr, np_, 1, spec_, nullptr, batch_, 1,
                                      FFTW_ESTIMATE);
        bwd_ = fftw_plan_many_dft_c2r(1, n, batch_, spec_, nullptr, batch_, 1, real_, nullptr, np_, 1,
                                      FFTW_ESTIMATE);
    } else {
        fwd_ = fftw_plan_many_dft_r2c(1, n, batch_, real_, nullptr, 1, np_, spec_, nullptr, 1, modes_,
                                      FFTW_ESTIMATE);
        bwd_ = fftw_plan_many_dft_c2r(1, n, batch_, spec_, nullptr, 1, modes_, real_, nullptr, 1, np_,
                                      FFTW_ESTIMATE);
    }
}

AxisFft::~AxisFft() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(real_);
    fftw_free(spec_);
}

void AxisFft::forward(const double* in) {
    const std::size_t size = static_cast<std::size_t>(nx_) * static_cast<std::size_t>(np_);
    std::copy(in, in + size, real_);
    fftw_execute(fwd_);
}

void AxisFft::backward(double* out) {
    fftw_execute(bwd_);
    const std::size_t size = static_cast<std::size_t>(nx_) * static_cast<std::size_t>(np_);
    const double scale = 1.0 / n_;
    for (std::size_t i = 0; i < size; ++i) {
        out[i] = real_[i] * scale;
    }
}

Fft2d::Fft2d(int nx, int np) : nx_(nx), np_(np) {
    const std::size_t real_size = static_cast<std::size_t>(nx) * static_cast<std::size_t>(np);
    const std::size_t spec_size = static_cast<std::size_t>(nx) * static_cast<std::size_t>(np / 2 + 1);
    std::lock_guard lock(planner_mutex());
    real_ = fftw_alloc_real(real_size);
    spec_ = fftw_alloc_complex(spec_size);
    if (real_ == nullptr || spec_ == nullptr) {
        throw std::bad_alloc();
    }
    fwd_ = fftw_plan_dft_r2c_2d(nx, np, real_, spec_, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_c2r_2d(nx, np, spec_, real_, FFTW_ESTIMATE);
}

Fft2d::~Fft2d() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(real_);
    fftw_free(spec_);
}

void Fft2d::forward(const double* in) {
    const std::size_t size = static_cast<std::size_t>(nx_) * static_cast<std::size_t>(np_);
    std::copy(in, in + size, real_);
    fftw_execute(fwd_);
}

void Fft2d::backward(double* out) {
    fftw_execute(bwd_);
    const std::size_t size = static_cast<std::size_t>(nx_) * static_cast<std::size_t>(np_);
    const double scale = 1.0 / static_cast<double>(size);
    for (std::size_t i = 0; i < size; ++i) {
        out[i] = real_[i] * scale;
    }
}

}  // namespace chirplock::detail
