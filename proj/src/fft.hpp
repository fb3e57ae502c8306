#pragma once

// Thin RAII wrappers around FFTW real transforms on row-major 2-D arrays.
// Plans use FFTW_ESTIMATE so results do not depend on planner timing.

#include <complex>
#include <cstddef>
#include <vector>

#include <fftw3.h>

namespace chirplock::detail {

using cplx = std::complex<double>;

// Batched 1-D r2c/c2r transforms along one axis of an (nx, np) array.
// axis 0 transforms along x (stride np), axis 1 along p (contiguous rows).
// The spectrum has shape (nx/2+1, np) for axis 0 and (nx, np/2+1) for axis 1.
class AxisFft {
public:
    AxisFft(int nx, int np, int axis);
    ~AxisFft();
    AxisFft(const AxisFft&) = delete;
    AxisFft& operator=(const AxisFft&) = delete;

    // real -> spectrum()
    void forward(const double* in);
    // spectrum() -> real, including the 1/n normalisation
    void backward(double* out);

    [[nodiscard]] cplx* spectrum() { return reinterpret_cast<cplx*>(spec_); }
    [[nodiscard]] int modes() const noexcept { return modes_; }
    [[nodiscard]] int length() const noexcept { return n_; }
    [[nodiscard]] int batch() const noexcept { return batch_; }
    // Offset of mode m of batch line b inside spectrum().
    [[nodiscard]] std::size_t index(int mode, int line) const noexcept {
        return axis_ == 0 ? static_cast<std::size_t>(mode) * static_cast<std::size_t>(batch_) +
                                static_cast<std::size_t>(line)
                          : static_cast<std::size_t>(line) * static_cast<std::size_t>(modes_) +
                                static_cast<std::size_t>(mode);
    }

private:
    int nx_, np_, axis_, n_, batch_, modes_;
    double* real_ = nullptr;
    fftw_complex* spec_ = nullptr;
    fftw_plan fwd_ = nullptr;
    fftw_plan bwd_ = nullptr;
};

// Full 2-D r2c/c2r transform; spectrum shape (nx, np/2+1).
class Fft2d {
public:
    Fft2d(int nx, int np);
    ~Fft2d();
    Fft2d(const Fft2d&) = delete;
    Fft2d& operator=(const Fft2d&) = delete;

    void forward(const double* in);
    void backward(double* out);
    [[nodiscard]] cplx* spectrum() { return reinterpret_cast<cplx*>(spec_); }
    [[nodiscard]] int modes() const noexcept { return np_ / 2 + 1; }

private:
    int nx_, np_;
    double* real_ = nullptr;
    fftw_complex* spec_ = nullptr;
    fftw_plan fwd_ = nullptr;
    fftw_plan bwd_ = nullptr;
};

// Angular wavenumber of FFT bin m on a periodic axis of n points and period L.
inline double wavenumber(int m, int n, double period) {
    const int signed_m = m <= n / 2 ? m : m - n;
    return 2.0 * 3.14159265358979323846 * signed_m / period;
}

}  // namespace chirplock::detail
