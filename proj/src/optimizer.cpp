#include "optcompact/optimizer.hpp"

#include <algorithm>
#include <fmt/format.h>
#include <random>

#include "optcompact/errors.hpp"
#include "precise.hpp"

namespace optcompact {

namespace {

// exact structural zeros and the unit normalization
void clean(SchemeCoefficients& c) {
    const int M = c.half_width();
    for (int m = -M; m <= M; ++m) {
        if (m < -c.spec.mAL || m > c.spec.mAR) c.a(m + M) = 0.0;
        if (m < -c.spec.mBL || m > c.spec.mBR) c.b(m + M) = 0.0;
    }
    c.b(M) = 1.0;
}

SchemeCoefficients unpack(const StencilSpec& spec, const Eigen::VectorXd& x) {
    const int n = spec.size();
    SchemeCoefficients c;
    c.spec = spec;
    c.a = x.head(n);
    c.b = x.segment(n, n);
    clean(c);
    c.constraintResidual = constraint_residual(c);
    return c;
}

double max_abs(const SchemeCoefficients& c) {
    return std::max(c.a.cwiseAbs().maxCoeff(), c.b.cwiseAbs().maxCoeff());
}

}  // namespace

KktSolution derive_optimized(const StencilSpec& spec, const WeightFunction& w, const KktOptions& opt) {
    if (spec.kind != SchemeKind::optimized)
        throw SpecError("derive_optimized needs an optimized-kind spec, use derive_standard");
    const ConstraintSystem cs = build_constraints(spec);
    if (w.empty()) throw SpecError("weight function has empty support, the cost is identically zero");

    const detail::KktPrecise kp = detail::solve_kkt_precise(spec, cs.extraRows, w);
    if (kp.condition > opt.conditionLimit) {
        throw RankDeficiencyError(
            fmt::format("KKT system is numerically rank deficient for M^={} with gamma on [{}, {}]: "
                        "condition {:.3e} exceeds {:.3e}",
                        spec.half_width(), w.support_lo(), w.support_hi(), kp.condition, opt.conditionLimit),
            spec.half_width(), w.support_lo(), w.support_hi(), kp.condition);
    }

    KktSolution sol;
    sol.coeffs = unpack(spec, kp.x);
    sol.coeffs.kktRank = kp.rank;
    sol.multipliers = kp.lambda;
    sol.rankDeficient = kp.leastSquares;
    sol.conditionEstimate = kp.condition;

    const CostMatrix cm = build_cost(spec.d, spec.half_width(), w);
    const Eigen::MatrixXd G = cs.G();
    Eigen::VectorXd x(2 * spec.size());
    x << sol.coeffs.a, sol.coeffs.b;
    const double stat = (cm.Q * x + G.transpose() * sol.multipliers).cwiseAbs().maxCoeff();
    const double feas = (G * x - cs.h()).cwiseAbs().maxCoeff();
    sol.residual = std::max(stat, feas);

    const double tol = 1e-9 * (1.0 + max_abs(sol.coeffs));
    if (feas > tol) {
        // the constraints themselves are inconsistent for this shape
        const int best = max_standard_order(spec.d, spec.mAL, spec.mAR, spec.mBL, spec.mBR);
        throw DerivationError(
            fmt::format("order {} is not attainable for {} (constraint residual {:.3e}); largest attainable order is {}",
                        spec.order(), spec.label(), feas, best),
            best);
    }
    // B(0) = sum b; zero means A vanishes too and the scheme approximates nothing
    const double b0 = sol.coeffs.b.sum();
    if (std::abs(b0) <= 1e-12 * (1.0 + sol.coeffs.b.cwiseAbs().maxCoeff()))
        throw DerivationError(fmt::format("{} degenerates for d = {}: the optimum has sum(b) = {:.3e}, so the symbol "
                                          "denominator vanishes at eta = 0",
                                          spec.label(), spec.d, b0),
                              0);
    return sol;
}

int max_standard_order(int d, int mAL, int mAR, int mBL, int mBR) {
    StencilSpec s;
    s.d = d;
    s.mAL = mAL;
    s.mAR = mAR;
    s.mBL = mBL;
    s.mBR = mBR;
    s.kind = SchemeKind::standard;
    int best = 0;
    for (int order = 1; d + order - 1 <= 30 && d + order <= s.a_count() + s.b_count(); ++order) {
        s.p = order - 1;
        const ConstraintSystem cs = build_constraints(s);
        const auto lp = detail::solve_constraints_precise(s, cs.extraRows);
        const double scale = 1.0 + lp.x.cwiseAbs().maxCoeff();
        if (lp.residual <= 1e-12 * scale) best = order;
        else break;
    }
    return best;
}

SchemeCoefficients derive_standard(const StencilSpec& spec) {
    if (spec.kind != SchemeKind::standard)
        throw SpecError("derive_standard needs a standard-kind spec, use derive_optimized");
    const ConstraintSystem cs = build_constraints(spec);
    const auto lp = detail::solve_constraints_precise(spec, cs.extraRows);
    const int unknowns = 2 * spec.size();
    const double scale = 1.0 + lp.x.cwiseAbs().maxCoeff();
    if (lp.residual > 1e-12 * scale) {
        const int best = max_standard_order(spec.d, spec.mAL, spec.mAR, spec.mBL, spec.mBR);
        throw DerivationError(
            fmt::format("order {} is not attainable for {} (inconsistent matching conditions); "
                        "largest achievable order is {}",
                        spec.order(), spec.label(), best),
            best);
    }
    if (lp.rank < unknowns) {
        const int best = max_standard_order(spec.d, spec.mAL, spec.mAR, spec.mBL, spec.mBR);
        throw DerivationError(
            fmt::format("order {} leaves {} free coefficients in {}; the maximum-order scheme is order {}",
                        spec.order(), unknowns - lp.rank, spec.label(), best),
            best);
    }
    SchemeCoefficients c = unpack(spec, lp.x);
    c.kktRank = lp.rank;
    return c;
}

SchemeCoefficients derive(const StencilSpec& spec, const WeightFunction& w) {
    if (spec.kind == SchemeKind::standard) return derive_standard(spec);
    return derive_optimized(spec, w).coeffs;
}

SchemeCoefficients mirror(const SchemeCoefficients& c) {
    SchemeCoefficients m = c;
    std::swap(m.spec.mAL, m.spec.mAR);
    std::swap(m.spec.mBL, m.spec.mBR);
    m.a = c.a.reverse();
    if (c.spec.d % 2 == 1) m.a = -m.a;
    m.b = c.b.reverse();
    m.constraintResidual = constraint_residual(m);
    return m;
}

KktReport verify_kkt(const KktSolution& sol, const CostMatrix& Q, const Eigen::MatrixXd& G, const Eigen::VectorXd& h,
                     std::uint64_t seed, int samples) {
    KktReport rep;
    Eigen::VectorXd x(sol.coeffs.a.size() + sol.coeffs.b.size());
    x << sol.coeffs.a, sol.coeffs.b;
    const double scale = 1.0 + x.cwiseAbs().maxCoeff();
    rep.stationarity = (Q.Q * x + G.transpose() * sol.multipliers).cwiseAbs().maxCoeff();
    rep.feasibility = (G * x - h).cwiseAbs().maxCoeff();
    rep.stationaryOk = rep.stationarity <= 1e-9 * scale;
    rep.feasibleOk = rep.feasibility <= 1e-9 * scale;

    // orthonormal basis of null(G)
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(G, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > 1e-12 * sv(0)) ++rank;
    const Eigen::MatrixXd Z = svd.matrixV().rightCols(G.cols() - rank);

    const double cost = Q.objective(x);
    const Eigen::VectorXd Qx = Q.Q * x;
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> nd;
    if (Z.cols() > 0) {
        for (int s = 0; s < samples; ++s) {
            Eigen::VectorXd y(Z.cols());
            for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = nd(gen);
            Eigen::VectorXd dx = Z * y;
            dx *= 1e-3 * scale / dx.norm();
            // expanded form avoids cancellation in cost(x+dx) - cost(x)
            const double change = 2.0 * dx.dot(Qx) + dx.dot(Q.Q * dx);
            const double rel = change / std::max(1.0, cost);
            ++rep.samples;
            rep.worstChange = std::min(rep.worstChange, rel);
            if (rel < -1e-12) ++rep.violations;
        }
    }
    rep.optimalOk = rep.violations == 0;
    return rep;
}

StackedSolution derive_stacked_domain(const StencilSpec& spec, const WeightFunction& w, int Np) {
    if (Np < 1) throw SpecError("stacked domain needs at least one grid point");
    const ConstraintSystem cs = build_constraints(spec);
    const KktSolution single = derive_optimized(spec, w);
    const detail::KktPrecise kp = detail::solve_kkt_precise(spec, cs.extraRows, w, Np, false);
    const int nx = 2 * spec.size();
    StackedSolution out;
    for (int i = 0; i < Np; ++i) {
        // compare the raw solve, before structural cleanup
        const Eigen::VectorXd xi = kp.x.segment(i * nx, nx);
        Eigen::VectorXd ref(nx);
        ref << single.coeffs.a, single.coeffs.b;
        out.maxDeviation = std::max(out.maxDeviation, (xi - ref).cwiseAbs().maxCoeff());
        out.perPoint.push_back(unpack(spec, xi));
    }
    return out;
}

}  // namespace optcompact
