#pragma once

#include <Eigen/Dense>

#include "optcompact/quadrature.hpp"
#include "optcompact/stencil.hpp"
#include "optcompact/weight.hpp"

namespace optcompact {

enum class DerivativeParity { even, odd };

// Relaxed cost x^T Q x with x = [a; b], built as <u u^T + v v^T>.
struct CostMatrix {
    Eigen::MatrixXd Q;
    DerivativeParity parity = DerivativeParity::even;
    int d = 0;
    int halfWidth = 0;

    double objective(const Eigen::VectorXd& x) const { return x.dot(Q * x); }
    double objective(const SchemeCoefficients& c) const;
};

CostMatrix build_cost_even(int d, int M, const WeightFunction& w);
CostMatrix build_cost_odd(int d, int M, const WeightFunction& w);
CostMatrix build_cost(int d, int M, const WeightFunction& w);

// relaxed objective of a scheme under gamma (the QP cost)
double objective(const SchemeCoefficients& c, const WeightFunction& w);

// Squared weighted norm integral of gamma |e(eta)|^2 with the true
// (denominator-included) spectral error. Throws SpecError naming eta if
// the symbol denominator vanishes on the support.
double spectral_norm(const SchemeCoefficients& c, const WeightFunction& w, const QuadratureOptions& opt = {});

}  // namespace optcompact
