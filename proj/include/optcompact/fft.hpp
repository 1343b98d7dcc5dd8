#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace optcompact {

// Real-to-complex transform of fixed length. Forward is unnormalized,
// inverse carries the 1/n. Half spectrum only: bins 0..n/2.
class RealFft {
public:
    explicit RealFft(int n);
    ~RealFft();
    RealFft(const RealFft&) = delete;
    RealFft& operator=(const RealFft&) = delete;

    int size() const { return n_; }
    int bins() const { return n_ / 2 + 1; }

    void forward(const double* in, std::complex<double>* out);
    void inverse(const std::complex<double>* in, double* out);

    std::vector<std::complex<double>> forward(const Eigen::VectorXd& f);

private:
    int n_;
    double* real_ = nullptr;
    void* cplx_ = nullptr;
    void* fwd_ = nullptr;
    void* inv_ = nullptr;
};

}  // namespace optcompact
