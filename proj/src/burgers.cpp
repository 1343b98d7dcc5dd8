#include <algorithm>
#include <cmath>
#include <complex>
#include <fmt/format.h>
#include <limits>

#include "optcompact/errors.hpp"
#include "optcompact/pde.hpp"

namespace optcompact {

double burgers_t0(const PdeCase& c) {
    double K0 = c.offset * c.offset, eps0 = 0.0;
    for (int k = 1; k <= c.kmax; ++k) {
        const double A = c.amplitude(k);
        K0 += 0.5 * A * A;
        eps0 += 0.5 * k * k * A * A;
    }
    if (eps0 == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return K0 / eps0;
}

namespace {

struct Mode {
    int k;
    double coef;  // A / k
    double cphi;
    std::complex<double> ephi;
};

// F(y) = int_0^y f0, kept analytic so no periodic bookkeeping is needed
struct Antiderivative {
    std::vector<Mode> modes;
    double offset;
    int kmax;

    double operator()(double y) const {
        double s = offset * y;
        const std::complex<double> p = std::polar(1.0, y);
        std::complex<double> pk = 1.0;
        int k = 0;
        for (const auto& m : modes) {
            while (k < m.k) {
                pk *= p;
                ++k;
            }
            s += m.coef * (m.cphi - (m.ephi * pk).real());
        }
        return s;
    }
};

struct WindowEval {
    double value;
    double range;  // max - min of F over the nodes
};

// f(x,t) = int (x-y)/t G dy / int G dy with G = exp(-F/(2nu) - (x-y)^2/(4 nu t))
WindowEval colehopf_window(const Antiderivative& F, double x, double t, double nu, double H, int n) {
    const double h = 2.0 * H / n;
    std::vector<double> E(n + 1), Fv(n + 1);
    double emax = -std::numeric_limits<double>::infinity();
    double fmin = std::numeric_limits<double>::infinity(), fmax = -fmin;
    for (int i = 0; i <= n; ++i) {
        const double y = x - H + i * h;
        Fv[i] = F(y);
        fmin = std::min(fmin, Fv[i]);
        fmax = std::max(fmax, Fv[i]);
        E[i] = -Fv[i] / (2.0 * nu) - (x - y) * (x - y) / (4.0 * nu * t);
        emax = std::max(emax, E[i]);
    }
    double num = 0.0, den = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double y = x - H + i * h;
        const double sw = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        const double g = sw * std::exp(E[i] - emax);
        num += g * (x - y) / t;
        den += g;
    }
    return {num / den, fmax - fmin};
}

}  // namespace

std::vector<double> analytic_burgers_colehopf(const PdeCase& c, double t, const std::vector<double>& x,
                                              const ColeHopfOptions& opt) {
    if (!(t > 0.0)) throw SpecError(fmt::format("Cole-Hopf evaluation needs t > 0, got {}", t));
    const double nu = c.betas.size() >= 2 ? c.betas[1] : 0.0;
    if (!(nu > 0.0)) throw SpecError("Cole-Hopf evaluation needs beta_2 > 0");
    Antiderivative F;
    F.offset = c.offset;
    F.kmax = c.kmax;
    for (int k = 1; k <= c.kmax; ++k) {
        const double A = c.amplitude(k);
        if (A == 0.0) continue;
        const double ph = phase(c, k);
        F.modes.push_back({k, A / k, std::cos(ph), std::polar(1.0, ph)});
    }
    const double s2 = 4.0 * nu * t;
    const double W2 = opt.windowSigmas * opt.windowSigmas;
    std::vector<double> out(x.size());
    for (size_t i = 0; i < x.size(); ++i) {
        // widen the window until the Gaussian tail beats any growth of exp(-F/(2nu))
        double H = opt.windowSigmas * std::sqrt(s2);
        int n = opt.minNodes;
        WindowEval cur = colehopf_window(F, x[i], t, nu, H, n);
        for (int it = 0; it < 30; ++it) {
            const double need = std::sqrt(s2 * (W2 + cur.range / (2.0 * nu)));
            if (H >= need) break;
            H = need * 1.01;
            cur = colehopf_window(F, x[i], t, nu, H, n);
        }
        for (int dbl = 0; dbl < opt.maxDoublings; ++dbl) {
            n *= 2;
            const WindowEval next = colehopf_window(F, x[i], t, nu, H, n);
            const bool done = std::abs(next.value - cur.value) <= opt.agreement * std::max(1.0, std::abs(next.value));
            cur = next;
            if (done) break;
        }
        out[i] = cur.value;
    }
    return out;
}

}  // namespace optcompact
