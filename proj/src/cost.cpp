#include "optcompact/cost.hpp"

#include <cfloat>
#include <cmath>
#include <fmt/format.h>
#include <vector>

#include <boost/math/tools/minima.hpp>

#include "optcompact/errors.hpp"
#include "optcompact/spectral.hpp"
#include "precise.hpp"

namespace optcompact {

double CostMatrix::objective(const SchemeCoefficients& c) const {
    Eigen::VectorXd x(c.a.size() + c.b.size());
    x << c.a, c.b;
    return objective(x);
}

static CostMatrix make_cost(int d, int M, const WeightFunction& w, DerivativeParity parity) {
    if (M < 0) throw SpecError("half-width must be non-negative");
    CostMatrix cm;
    cm.d = d;
    cm.halfWidth = M;
    cm.parity = parity;
    cm.Q = detail::cost_matrix_precise(d, M, w);
    return cm;
}

CostMatrix build_cost_even(int d, int M, const WeightFunction& w) {
    if (d < 2 || d % 2 != 0) throw SpecError(fmt::format("build_cost_even needs an even d, got {}", d));
    return make_cost(d, M, w, DerivativeParity::even);
}

CostMatrix build_cost_odd(int d, int M, const WeightFunction& w) {
    if (d < 1 || d % 2 != 1) throw SpecError(fmt::format("build_cost_odd needs an odd d, got {}", d));
    return make_cost(d, M, w, DerivativeParity::odd);
}

CostMatrix build_cost(int d, int M, const WeightFunction& w) {
    return d % 2 == 0 ? build_cost_even(d, M, w) : build_cost_odd(d, M, w);
}

double objective(const SchemeCoefficients& c, const WeightFunction& w) {
    return build_cost(c.spec.d, c.half_width(), w).objective(c);
}

namespace {
struct Sum {
    double value = 0.0;
    double noise = 0.0;  // roundoff scale of value
};
double sum_value(const Sum& s) { return s.value; }

double denominator_abs(const SchemeCoefficients& c, double eta) {
    const int M = c.half_width();
    cplx den = 0.0;
    for (int m = -M; m <= M; ++m) den += c.b(m + M) * cplx(std::cos(m * eta), std::sin(m * eta));
    return std::abs(den);
}

// Quadrature nodes never sit on a zero of the denominator, so look for one
// directly: dense scan, then Brent on every local minimum.
void check_denominator(const SchemeCoefficients& c, const WeightFunction& w) {
    const int samples = 64 * (2 * c.half_width() + 1);
    auto f = [&](double eta) { return denominator_abs(c, eta); };
    for (const auto& [lo, hi] : w.smooth_intervals()) {
        std::vector<double> x(samples + 1), y(samples + 1);
        double top = 0.0;
        for (int i = 0; i <= samples; ++i) {
            x[i] = lo + (hi - lo) * i / samples;
            y[i] = f(x[i]);
            top = std::max(top, y[i]);
        }
        const double floor = 1e-10 * std::max(top, 1.0);
        for (int i = 0; i <= samples; ++i) {
            const bool localMin = (i == 0 || y[i] <= y[i - 1]) && (i == samples || y[i] <= y[i + 1]);
            if (!localMin) continue;
            double eta = x[i], val = y[i];
            if (i > 0 && i < samples) {
                const auto [e, v] = boost::math::tools::brent_find_minima(f, x[i - 1], x[i + 1], 52);
                if (v < val) eta = e, val = v;
            }
            if (val < floor)
                throw SpecError(fmt::format("symbol denominator of {} vanishes at eta = {:.6g}", c.label(), eta));
        }
    }
}
}  // namespace

double spectral_norm(const SchemeCoefficients& c, const WeightFunction& w, const QuadratureOptions& opt) {
    check_denominator(c, w);
    const double sa = c.a.cwiseAbs().sum(), sb = c.b.cwiseAbs().sum();
    auto add = [&](double eta, double wt, Sum& acc) {
        const SymbolSample e = spectral_error(c, eta);
        if (e.flagged)
            throw SpecError(fmt::format("symbol denominator of {} vanishes at eta = {:.6g}", c.label(), eta));
        acc.value += wt * std::norm(e.value);
        // rounding in A/B grows like (sum|a| + |A/B| sum|b|) / |B|, then the
        // eta^d subtraction cancels; |e|^2 inherits 2|e| times that
        const double den = denominator_abs(c, eta);
        const double ratio = std::abs(e.value) + std::pow(eta, c.spec.d);
        const double err = 16.0 * DBL_EPSILON * ((sa + ratio * sb) / den + std::pow(eta, c.spec.d));
        acc.noise += wt * 2.0 * std::abs(e.value) * err;
    };
    // integrand is non-negative, so plain relative change is safe until it
    // reaches the roundoff floor
    auto reldiff = [](const Sum& a, const Sum& b) {
        if (a.value == 0.0) return 0.0;
        const double change = std::abs(a.value - b.value);
        if (change <= a.noise) return 0.0;
        return change / a.value;
    };
    return detail::integrate_weighted<double>(w, Sum{}, add, reldiff, opt, &sum_value).value;
}

}  // namespace optcompact
