#include "optcompact/fft.hpp"

#include <algorithm>
#include <cstring>
#include <mutex>
#include <stdexcept>

#include <fftw3.h>

namespace optcompact {

namespace {
// fftw's planner is not thread safe, execution is
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

RealFft::RealFft(int n) : n_(n) {
    if (n < 1) throw std::invalid_argument("fft length must be positive");
    std::lock_guard<std::mutex> lock(planner_mutex());
    real_ = fftw_alloc_real(n);
    auto* c = fftw_alloc_complex(n / 2 + 1);
    cplx_ = c;
    fwd_ = fftw_plan_dft_r2c_1d(n, real_, c, FFTW_ESTIMATE);
    inv_ = fftw_plan_dft_c2r_1d(n, c, real_, FFTW_ESTIMATE);
}

RealFft::~RealFft() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
    fftw_destroy_plan(static_cast<fftw_plan>(inv_));
    fftw_free(real_);
    fftw_free(cplx_);
}

void RealFft::forward(const double* in, std::complex<double>* out) {
    std::copy(in, in + n_, real_);
    fftw_execute(static_cast<fftw_plan>(fwd_));
    std::memcpy(static_cast<void*>(out), cplx_, sizeof(fftw_complex) * bins());
}

void RealFft::inverse(const std::complex<double>* in, double* out) {
    // c2r overwrites its input, so always work on the private copy
    std::memcpy(cplx_, static_cast<const void*>(in), sizeof(fftw_complex) * bins());
    fftw_execute(static_cast<fftw_plan>(inv_));
    const double s = 1.0 / n_;
    for (int i = 0; i < n_; ++i) out[i] = real_[i] * s;
}

std::vector<std::complex<double>> RealFft::forward(const Eigen::VectorXd& f) {
    if (f.size() != n_) throw std::invalid_argument("fft input length mismatch");
    std::vector<std::complex<double>> out(bins());
    forward(f.data(), out.data());
    return out;
}

}  // namespace optcompact
