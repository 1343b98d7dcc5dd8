#pragma once

// Extended-precision kernels. The interface is double-only so that only
// precise.cpp pulls in the 128-bit float type.

#include <Eigen/Dense>
#include <vector>

#include "optcompact/stencil.hpp"
#include "optcompact/weight.hpp"

namespace optcompact::detail {

Eigen::MatrixXd cost_matrix_precise(int d, int M, const WeightFunction& w);

struct KktPrecise {
    Eigen::VectorXd x, lambda;
    bool leastSquares = false;  // exactly singular system, min-norm solution
    double condition = 0.0;     // 2-norm condition of the (retained) KKT matrix
    int rank = 0;
    int size = 0;
};

// copies > 1 solves the block-diagonal stacked-domain system
KktPrecise solve_kkt_precise(const StencilSpec& spec, const std::vector<ConstraintRow>& extra,
                             const WeightFunction& w, int copies = 1, bool withCondition = true);

struct LinearPrecise {
    Eigen::VectorXd x;
    int rank = 0;
    double residual = 0.0;  // max-abs of G x - h
};

// order + extra rows solved without a cost (rank-revealing least squares)
LinearPrecise solve_constraints_precise(const StencilSpec& spec, const std::vector<ConstraintRow>& extra);

}  // namespace optcompact::detail
