#include "optcompact/quadrature.hpp"

#include <algorithm>

namespace optcompact {

namespace {
struct Sum {
    double value = 0.0, magnitude = 0.0;
};
double sum_value(const Sum& s) { return s.value; }
}  // namespace

double inner_product(const std::function<double(double)>& f, const std::function<double(double)>& g,
                     const WeightFunction& w, const QuadratureOptions& opt) {
    auto add = [&](double eta, double wt, Sum& acc) {
        const double v = f(eta) * g(eta) * wt;
        acc.value += v;
        acc.magnitude += std::abs(v);
    };
    // relative to the integral of |f g gamma| so orthogonal pairs still converge
    auto reldiff = [](const Sum& a, const Sum& b) {
        const double scale = std::max(a.magnitude, b.magnitude);
        if (scale == 0.0) return 0.0;
        return std::abs(a.value - b.value) / scale;
    };
    return detail::integrate_weighted<double>(w, Sum{}, add, reldiff, opt, &sum_value).value;
}

}  // namespace optcompact
