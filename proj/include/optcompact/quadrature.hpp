#pragma once

#include <cmath>
#include <fmt/format.h>
#include <functional>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

#include "optcompact/errors.hpp"
#include "optcompact/weight.hpp"

namespace optcompact {

struct QuadratureOptions {
    int nodesPerPanel = 32;
    double relTol = 1e-12;
    int maxLevels = 14;  // up to 2^14 panels per smooth interval
};

template <class T>
struct GaussRule {
    std::vector<T> nodes, weights;  // on [-1, 1]
};

// Newton iteration on the Legendre recurrence, works for any float type.
template <class T>
GaussRule<T> gauss_legendre(int n) {
    using std::abs;
    using std::cos;
    GaussRule<T> rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const T pi = T(std::numbers::pi_v<long double>);
    const T eps = std::numeric_limits<T>::epsilon();
    for (int i = 0; i < (n + 1) / 2; ++i) {
        T x = cos(pi * (T(i) + T(0.75)) / (T(n) + T(0.5)));
        T dp = T(0);
        for (int it = 0; it < 100; ++it) {
            T p0 = T(1), p1 = x;
            for (int k = 2; k <= n; ++k) {
                const T p2 = ((T(2 * k - 1)) * x * p1 - T(k - 1) * p0) / T(k);
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = T(1);
            dp = T(n) * (x * p1 - p0) / (x * x - T(1));
            const T dx = p1 / dp;
            x -= dx;
            if (abs(dx) <= T(4) * eps) break;
        }
        // final derivative at the converged node
        T p0 = T(1), p1 = x;
        for (int k = 2; k <= n; ++k) {
            const T p2 = ((T(2 * k - 1)) * x * p1 - T(k - 1) * p0) / T(k);
            p0 = p1;
            p1 = p2;
        }
        dp = T(n) * (x * p1 - p0) / (x * x - T(1));
        const T wgt = T(2) / ((T(1) - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = rule.weights[n - 1 - i] = wgt;
    }
    return rule;
}

namespace detail {

// Composite Gauss-Legendre over the weight's smooth intervals with uniform
// panel bisection. add(eta, weight, acc) accumulates one node where weight
// already includes gamma(eta) and the panel jacobian; reldiff(new, old)
// measures convergence between levels.
template <class T, class Acc, class AddFn, class DiffFn>
Acc integrate_weighted(const WeightFunction& w, const Acc& zero, AddFn add, DiffFn reldiff,
                       const QuadratureOptions& opt, double (*scalar_of)(const Acc&) = nullptr) {
    const auto intervals = w.smooth_intervals();
    if (intervals.empty()) return zero;
    const GaussRule<T> rule = gauss_legendre<T>(opt.nodesPerPanel);

    auto level_sum = [&](int panels) {
        Acc acc = zero;
        for (const auto& [lo, hi] : intervals) {
            const T a = T(lo), h = (T(hi) - T(lo)) / T(panels);
            for (int pnl = 0; pnl < panels; ++pnl) {
                const T left = a + h * T(pnl);
                const T half = h / T(2);
                for (int q = 0; q < opt.nodesPerPanel; ++q) {
                    const T eta = left + half * (rule.nodes[q] + T(1));
                    add(eta, half * rule.weights[q] * w.evaluate(eta), acc);
                }
            }
        }
        return acc;
    };

    Acc prev = level_sum(1);
    for (int lev = 1;; ++lev) {
        Acc cur = level_sum(1 << lev);
        const double diff = reldiff(cur, prev);
        if (diff < opt.relTol) return cur;
        if (lev >= opt.maxLevels) {
            const double last = scalar_of ? scalar_of(cur) : diff;
            const double before = scalar_of ? scalar_of(prev) : 0.0;
            throw QuadratureError(
                fmt::format("weighted quadrature did not converge after {} levels: last {:.17g}, "
                            "previous {:.17g} (relative change {:.3e})",
                            opt.maxLevels, last, before, diff),
                last, before);
        }
        prev = std::move(cur);
    }
}

}  // namespace detail

// <f g> = integral of gamma f g over the support of gamma
double inner_product(const std::function<double(double)>& f, const std::function<double(double)>& g,
                     const WeightFunction& w, const QuadratureOptions& opt = {});

}  // namespace optcompact
