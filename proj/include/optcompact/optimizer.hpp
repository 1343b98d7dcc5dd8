#pragma once

#include <cfloat>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "optcompact/cost.hpp"
#include "optcompact/stencil.hpp"
#include "optcompact/weight.hpp"

namespace optcompact {

struct KktSolution {
    SchemeCoefficients coeffs;
    Eigen::VectorXd multipliers;
    double residual = 0.0;          // max-abs KKT residual, in double
    bool rankDeficient = false;     // exactly redundant rows, min-norm solve used
    double conditionEstimate = 0.0; // 2-norm condition of the KKT matrix
};

struct KktOptions {
    // past this the double-precision answer is not trustworthy
    double conditionLimit = 1.0 / DBL_EPSILON;
};

KktSolution derive_optimized(const StencilSpec& spec, const WeightFunction& w = WeightFunction::standard(),
                             const KktOptions& opt = {});

SchemeCoefficients derive_standard(const StencilSpec& spec);
// largest order with a consistent matching system on this shape, 0 if none
int max_standard_order(int d, int mAL, int mAR, int mBL, int mBR);

// dispatch on spec.kind
SchemeCoefficients derive(const StencilSpec& spec, const WeightFunction& w = WeightFunction::standard());

SchemeCoefficients mirror(const SchemeCoefficients& c);

struct KktReport {
    double stationarity = 0.0;
    double feasibility = 0.0;
    int samples = 0;
    int violations = 0;
    double worstChange = 0.0;  // most negative relative cost change seen
    bool stationaryOk = false, feasibleOk = false, optimalOk = false;
    bool ok() const { return stationaryOk && feasibleOk && optimalOk; }
};

KktReport verify_kkt(const KktSolution& sol, const CostMatrix& Q, const Eigen::MatrixXd& G,
                     const Eigen::VectorXd& h, std::uint64_t seed = 20240607, int samples = 100);

// Domain-stacked problem with one coefficient pair per grid point.
struct StackedSolution {
    std::vector<SchemeCoefficients> perPoint;
    double maxDeviation = 0.0;  // against the single-point solution
};
StackedSolution derive_stacked_domain(const StencilSpec& spec, const WeightFunction& w, int Np);

}  // namespace optcompact
