#include "optcompact/stencil.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "optcompact/detail/order_matrices.hpp"
#include "optcompact/errors.hpp"

namespace optcompact {

StencilSpec StencilSpec::central(int d, int order, int mA, int mB, SchemeKind kind) {
    StencilSpec s;
    s.d = d;
    s.p = order - 1;
    s.mAL = s.mAR = mA;
    s.mBL = s.mBR = mB;
    s.kind = kind;
    return s;
}

StencilSpec StencilSpec::biased(int d, int order, int mL, int mR, SchemeKind kind) {
    StencilSpec s;
    s.d = d;
    s.p = order - 1;
    s.mAL = s.mBL = mL;
    s.mAR = s.mBR = mR;
    s.kind = kind;
    return s;
}

int StencilSpec::half_width() const { return std::max({mAL, mAR, mBL, mBR}); }

void StencilSpec::validate() const {
    if (d < 1) throw SpecError(fmt::format("derivative order must be >= 1, got {}", d));
    if (p < 0) throw SpecError(fmt::format("accuracy order must be >= 1, got {}", p + 1));
    if (mAL < 0 || mAR < 0 || mBL < 0 || mBR < 0)
        throw SpecError("stencil half-widths must be non-negative");
    if (mAL == 0 && mAR == 0) throw SpecError("right-hand stencil needs at least one off-center point");
    // factorials beyond 30! lose integer exactness in double
    if (d + p > 30)
        throw SpecError(fmt::format("d + p = {} exceeds the supported limit of 30", d + p));
    if (kind == SchemeKind::standard && d + p + 1 > a_count() + b_count())
        throw SpecError(fmt::format(
            "order {} for d={} needs {} matching conditions but the stencil has only {} coefficients",
            p + 1, d, d + p + 1, a_count() + b_count()));
}

std::string StencilSpec::label() const {
    return fmt::format("{}({},{},{},{})^{}", kind == SchemeKind::optimized ? "OFD" : "SFD", mAL, mAR,
                       mBL, mBR, p + 1);
}

Eigen::MatrixXd ConstraintSystem::G() const {
    const int n = static_cast<int>(X.rows());
    const int k = static_cast<int>(X.cols());
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(k + static_cast<int>(extraRows.size()), 2 * n);
    g.topLeftCorner(k, n) = X.transpose();
    g.topRightCorner(k, n) = -Y.transpose();
    for (size_t r = 0; r < extraRows.size(); ++r) g.row(k + static_cast<int>(r)) = extraRows[r].coeffs.transpose();
    return g;
}

Eigen::VectorXd ConstraintSystem::h() const {
    const int k = static_cast<int>(X.cols());
    Eigen::VectorXd v = Eigen::VectorXd::Zero(k + static_cast<int>(extraRows.size()));
    for (size_t r = 0; r < extraRows.size(); ++r) v(k + static_cast<int>(r)) = extraRows[r].rhs;
    return v;
}

namespace {

ConstraintRow unit_row(int len, int idx, double rhs, std::string tag) {
    ConstraintRow r;
    r.coeffs = Eigen::VectorXd::Zero(len);
    r.coeffs(idx) = 1.0;
    r.rhs = rhs;
    r.tag = std::move(tag);
    return r;
}

// Keep a row only if it is linearly independent of the rows already kept
// (incremental Gram-Schmidt echelon filter).
std::vector<ConstraintRow> filter_dependent(std::vector<ConstraintRow> rows) {
    std::vector<ConstraintRow> kept;
    std::vector<Eigen::VectorXd> basis;
    for (auto& r : rows) {
        Eigen::VectorXd v = r.coeffs;
        const double scale = v.cwiseAbs().maxCoeff();
        for (const auto& q : basis) v -= q.dot(v) * q;
        if (v.norm() <= 1e-12 * std::max(scale, 1e-300)) continue;
        basis.push_back(v / v.norm());
        kept.push_back(std::move(r));
    }
    return kept;
}

}  // namespace

ConstraintSystem build_constraints(const StencilSpec& spec) {
    spec.validate();
    ConstraintSystem cs;
    const int M = spec.half_width();
    const int n = 2 * M + 1;
    cs.halfWidth = M;
    detail::fill_order_matrices<double>(spec.d, spec.p, M, cs.X, cs.Y);

    std::vector<ConstraintRow> extra;
    extra.push_back(unit_row(2 * n, n + M, 1.0, "b0=1"));
    // padding of an unequal or biased stencil to the augmented size
    for (int m = -M; m <= M; ++m) {
        if (m < -spec.mAL || m > spec.mAR)
            extra.push_back(unit_row(2 * n, m + M, 0.0, fmt::format("a[{}]=0", m)));
    }
    for (int m = -M; m <= M; ++m) {
        if (m < -spec.mBL || m > spec.mBR)
            extra.push_back(unit_row(2 * n, n + m + M, 0.0, fmt::format("b[{}]=0", m)));
    }
    // explicit schemes: b is the unit delta. Overlaps with the padding rows
    // above when the a-side is wider, the filter drops those.
    if (spec.is_explicit()) {
        for (int m = -M; m <= M; ++m) {
            if (m != 0) extra.push_back(unit_row(2 * n, n + m + M, 0.0, fmt::format("b[{}]=0", m)));
        }
    }
    cs.extraRows = filter_dependent(std::move(extra));
    return cs;
}

Symmetry symmetrize_check(std::span<const double> v) {
    if (v.size() % 2 == 0) throw SpecError("symmetry check needs an odd-length vector");
    double mx = 0.0;
    for (double x : v) mx = std::max(mx, std::abs(x));
    const double tol = 1e-12 * mx;
    const size_t n = v.size();
    bool sym = true, skew = true;
    for (size_t i = 0; i < n; ++i) {
        const double r = v[n - 1 - i];
        if (std::abs(v[i] - r) > tol) sym = false;
        if (std::abs(v[i] + r) > tol) skew = false;
    }
    if (sym) return Symmetry::symmetric;
    if (skew) return Symmetry::skew;
    return Symmetry::neither;
}

const char* to_string(Symmetry s) {
    switch (s) {
        case Symmetry::symmetric: return "symmetric";
        case Symmetry::skew: return "skew";
        default: return "neither";
    }
}

Eigen::VectorXd reversed(const Eigen::VectorXd& v) { return v.reverse(); }

Eigen::VectorXd delta_vector(int n, int i) {
    if (n < 1 || i < 1 || i > n) throw SpecError(fmt::format("delta vector index {} outside 1..{}", i, n));
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e(i - 1) = 1.0;
    return e;
}

double constraint_residual(const SchemeCoefficients& c, const StencilSpec& against) {
    const int M = c.half_width();
    Eigen::MatrixXd X, Y;
    detail::fill_order_matrices<double>(against.d, against.p, M, X, Y);
    const Eigen::VectorXd r = X.transpose() * c.a - Y.transpose() * c.b;
    return r.cwiseAbs().maxCoeff();
}

double constraint_residual(const SchemeCoefficients& c) { return constraint_residual(c, c.spec); }

}  // namespace optcompact
