#include "precise.hpp"

#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/float128.hpp>

// Eigen's generic hypot wants NumTraits<T>::infinity(), which boost's
// traits for float128 do not provide.
namespace Eigen::internal {
template <>
struct hypot_impl<boost::multiprecision::float128> {
    static boost::multiprecision::float128 run(const boost::multiprecision::float128& x,
                                               const boost::multiprecision::float128& y) {
        return boost::multiprecision::hypot(x, y);
    }
};
}  // namespace Eigen::internal

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "optcompact/detail/order_matrices.hpp"
#include "optcompact/quadrature.hpp"

namespace optcompact::detail {

namespace {

using quad = boost::multiprecision::float128;
using MatQ = Eigen::Matrix<quad, Eigen::Dynamic, Eigen::Dynamic>;
using VecQ = Eigen::Matrix<quad, Eigen::Dynamic, 1>;

// anything below this relative to the largest eigenvalue is treated as an
// exact zero; genuine problems we accept sit above 1e-16
constexpr double kSingularRel = 1e-24;

MatQ cost_quad(int d, int M, const WeightFunction& w) {
    const int n = 2 * M + 1;
    const int q = d / 2;
    const bool even = d % 2 == 0;
    const quad sq = (q % 2 == 0) ? quad(1) : quad(-1);  // (-1)^q

    VecQ u(2 * n), v(2 * n);
    auto add = [&](const quad& eta, const quad& wt, MatQ& acc) {
        using std::cos;
        using std::sin;
        quad ed = 1;
        for (int k = 0; k < d; ++k) ed *= eta;
        for (int i = 0; i < n; ++i) {
            const quad m = quad(i - M);
            const quad c = cos(m * eta), s = sin(m * eta);
            u(i) = c;
            v(i) = s;
            if (even) {
                u(n + i) = -sq * ed * c;
                v(n + i) = -sq * ed * s;
            } else {
                u(n + i) = sq * ed * s;
                v(n + i) = -sq * ed * c;
            }
        }
        acc.noalias() += wt * (u * u.transpose() + v * v.transpose());
    };
    auto reldiff = [](const MatQ& a, const MatQ& b) {
        const quad scale = a.cwiseAbs().maxCoeff();
        if (scale == 0) return 0.0;
        return static_cast<double>((a - b).cwiseAbs().maxCoeff() / scale);
    };
    QuadratureOptions opt;
    opt.relTol = 1e-27;
    opt.maxLevels = 10;
    MatQ zero = MatQ::Zero(2 * n, 2 * n);
    MatQ Q = integrate_weighted<quad>(w, zero, add, reldiff, opt);
    return (Q + Q.transpose()) / quad(2);
}

MatQ constraint_matrix_quad(const StencilSpec& spec, const std::vector<ConstraintRow>& extra, VecQ& h) {
    const int M = spec.half_width();
    const int n = 2 * M + 1;
    MatQ X, Y;
    fill_order_matrices<quad>(spec.d, spec.p, M, X, Y);
    const int k = static_cast<int>(X.cols());
    MatQ G = MatQ::Zero(k + static_cast<int>(extra.size()), 2 * n);
    G.topLeftCorner(k, n) = X.transpose();
    G.topRightCorner(k, n) = -Y.transpose();
    h = VecQ::Zero(G.rows());
    for (size_t r = 0; r < extra.size(); ++r) {
        for (int j = 0; j < 2 * n; ++j) G(k + static_cast<int>(r), j) = quad(extra[r].coeffs(j));
        h(k + static_cast<int>(r)) = quad(extra[r].rhs);
    }
    return G;
}

Eigen::VectorXd to_double(const VecQ& v) {
    Eigen::VectorXd out(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) out(i) = static_cast<double>(v(i));
    return out;
}

}  // namespace

Eigen::MatrixXd cost_matrix_precise(int d, int M, const WeightFunction& w) {
    const MatQ Q = cost_quad(d, M, w);
    Eigen::MatrixXd out(Q.rows(), Q.cols());
    for (Eigen::Index i = 0; i < Q.rows(); ++i)
        for (Eigen::Index j = 0; j < Q.cols(); ++j) out(i, j) = static_cast<double>(Q(i, j));
    return out;
}

KktPrecise solve_kkt_precise(const StencilSpec& spec, const std::vector<ConstraintRow>& extra,
                             const WeightFunction& w, int copies, bool withCondition) {
    const MatQ Q = cost_quad(spec.d, spec.half_width(), w);
    VecQ h;
    const MatQ G = constraint_matrix_quad(spec, extra, h);
    const int nx = static_cast<int>(Q.rows()), nc = static_cast<int>(G.rows());
    const int blk = nx + nc;
    const int size = copies * blk;

    // unknown ordering [v_1..v_p; lambda_1..lambda_p]
    MatQ K = MatQ::Zero(size, size);
    VecQ rhs = VecQ::Zero(size);
    for (int c = 0; c < copies; ++c) {
        const int xo = c * nx, lo = copies * nx + c * nc;
        K.block(xo, xo, nx, nx) = Q;
        K.block(xo, lo, nx, nc) = G.transpose();
        K.block(lo, xo, nc, nx) = G;
        rhs.segment(lo, nc) = h;
    }

    KktPrecise out;
    out.size = size;
    out.rank = size;
    bool singular = false;
    if (withCondition) {
        Eigen::SelfAdjointEigenSolver<MatQ> es(K, Eigen::EigenvaluesOnly);
        const VecQ ev = es.eigenvalues().cwiseAbs();
        const quad mx = ev.maxCoeff();
        quad mn = mx;
        int rank = 0;
        for (Eigen::Index i = 0; i < ev.size(); ++i) {
            if (ev(i) > quad(kSingularRel) * mx) {
                ++rank;
                mn = std::min(mn, ev(i));
            }
        }
        out.rank = rank;
        out.condition = static_cast<double>(mx / mn);
        singular = rank < size;
    }

    VecQ z;
    if (!singular) {
        Eigen::FullPivLU<MatQ> lu(K);
        lu.setThreshold(quad(kSingularRel));
        if (lu.rank() < size) {
            singular = true;
            out.rank = static_cast<int>(lu.rank());
        } else {
            z = lu.solve(rhs);
        }
    }
    if (singular) {
        Eigen::CompleteOrthogonalDecomposition<MatQ> cod;
        cod.setThreshold(quad(kSingularRel));
        cod.compute(K);
        z = cod.solve(rhs);
        out.leastSquares = true;
        out.rank = static_cast<int>(cod.rank());
    }
    out.x = to_double(z.head(copies * nx));
    out.lambda = to_double(z.tail(copies * nc));
    return out;
}

LinearPrecise solve_constraints_precise(const StencilSpec& spec, const std::vector<ConstraintRow>& extra) {
    VecQ h;
    const MatQ G = constraint_matrix_quad(spec, extra, h);
    Eigen::CompleteOrthogonalDecomposition<MatQ> cod;
    cod.setThreshold(quad(kSingularRel));
    cod.compute(G);
    const VecQ x = cod.solve(h);
    LinearPrecise out;
    out.x = to_double(x);
    out.rank = static_cast<int>(cod.rank());
    out.residual = static_cast<double>((G * x - h).cwiseAbs().maxCoeff());
    return out;
}

}  // namespace optcompact::detail
