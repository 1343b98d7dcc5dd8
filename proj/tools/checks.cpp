#include "checks.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <numbers>
#include <random>

#include "optcompact/errors.hpp"
#include "optcompact/optimizer.hpp"
#include "optcompact/spectral.hpp"
#include "optcompact/stability.hpp"

namespace optcompact::checks {

int attainable_order(int d, int M, int requested) {
    for (int order = std::min(requested, max_standard_order(d, M, M, M, M)); order >= 1; --order) {
        try {
            derive_optimized(StencilSpec::equal(d, order, M));
            return order;
        } catch (const DerivationError&) {
        }
    }
    return 0;
}

namespace {

// max |v_m - sign v_-m|
double mirror_gap(const Eigen::VectorXd& v, double sign) {
    double g = 0.0;
    const Eigen::Index n = v.size();
    for (Eigen::Index i = 0; i < n; ++i) g = std::max(g, std::abs(v(i) - sign * v(n - 1 - i)));
    return g;
}

}  // namespace

std::vector<CheckResult> lemma_suite(const LemmaOptions& opt) {
    std::vector<CheckResult> out;
    const auto etas = uniform_etas(opt.samples, 0.0, std::numbers::pi);
    for (int d = 1; d <= opt.dMax; ++d) {
        for (int M = 1; M <= opt.mMax; ++M) {
            CheckResult r;
            const int order = attainable_order(d, M, opt.order);
            // e.g. a third derivative on three points: no consistent scheme to check
            if (order == 0) continue;
            const StencilSpec spec = StencilSpec::equal(d, order, M);
            r.name = fmt::format("lemma {} d={}", spec.label(), d);
            try {
                const SchemeCoefficients c = derive_optimized(spec).coeffs;
                const bool even = d % 2 == 0;
                const double ga = mirror_gap(c.a, even ? 1.0 : -1.0);
                const double gb = mirror_gap(c.b, 1.0);
                double ge = 0.0;
                for (double eta : etas) {
                    const SymbolSample e = spectral_error(c, eta);
                    if (e.flagged) {
                        ge = INFINITY;
                        break;
                    }
                    ge = std::max(ge, even ? std::abs(e.value.imag()) : std::abs(e.value.real()));
                }
                r.pass = ga <= opt.symTol && gb <= opt.symTol && ge <= opt.errTol;
                r.detail = fmt::format("a {} gap {:.2e}, b symmetric gap {:.2e}, max|{} e| {:.2e}",
                                       even ? "symmetric" : "skew", ga, gb, even ? "Im" : "Re", ge);
            } catch (const std::exception& e) {
                r.pass = false;
                r.detail = e.what();
            }
            out.push_back(r);
        }
    }
    return out;
}

std::vector<CheckResult> parity_spectrum(int Np, int mMax, int order) {
    std::vector<CheckResult> out;
    const double dx = 2.0 * std::numbers::pi / Np;
    for (int M = 1; M <= mMax; ++M) {
        const SchemeSet fam = derive_family(StencilSpec::equal(1, order, M), 2);
        for (int which = 1; which <= 2; ++which) {
            std::vector<double> betas = which == 1 ? std::vector<double>{1.0, 0.0} : std::vector<double>{0.0, 1.0};
            std::vector<DomainOperators> ops;
            for (const auto& s : fam.schemes) ops.push_back(assemble_operators(s, Np));
            const SpectrumReport rep = spectrum(assemble_lambda(ops, betas, dx));
            double maxRe = 0.0, maxIm = 0.0;
            for (const auto& l : rep.eigenvalues) {
                maxRe = std::max(maxRe, std::abs(l.real()));
                maxIm = std::max(maxIm, std::abs(l.imag()));
            }
            CheckResult r;
            if (which == 1) {
                r.name = fmt::format("parity odd-only {} Np={}", fam.name, Np);
                r.pass = maxRe <= 1e-9 * rep.spectralRadius;
                r.detail = fmt::format("max|Re| / rho = {:.2e}", maxRe / rep.spectralRadius);
            } else {
                r.name = fmt::format("parity even-only {} Np={}", fam.name, Np);
                r.pass = maxIm <= 1e-9 * rep.spectralRadius;
                r.detail = fmt::format("max|Im| / rho = {:.2e}", maxIm / rep.spectralRadius);
            }
            out.push_back(r);
        }
    }
    return out;
}

double circulant_vs_dense(const SchemeSet& fam, const std::vector<double>& betas, int Np) {
    const double dx = 2.0 * std::numbers::pi / Np;
    std::vector<DomainOperators> ops;
    std::vector<SchemeCoefficients> used;
    for (size_t d = 0; d < betas.size() && d < fam.schemes.size(); ++d) {
        ops.push_back(assemble_operators(fam.schemes[d], Np));
        used.push_back(fam.schemes[d]);
    }
    const SpectrumReport dense = spectrum(assemble_lambda(ops, betas, dx));
    const auto circ = circulant_eigenvalues(used, betas, dx, Np);
    // match each circulant eigenvalue to its nearest dense one
    double worst = 0.0, rho = 0.0;
    for (const auto& l : circ) rho = std::max(rho, std::abs(l));
    for (const auto& l : circ) {
        double best = INFINITY;
        for (const auto& m : dense.eigenvalues) best = std::min(best, std::abs(l - m));
        worst = std::max(worst, best);
    }
    return rho > 0 ? worst / rho : worst;
}

RefinementResult refinement_study(const StencilSpec& shape, const std::vector<int>& Nps, const std::string& tableau) {
    RefinementResult res;
    const SchemeSet fam = derive_family(shape, 2);
    for (int Np : Nps) {
        PdeCase c;
        c.betas = {-0.1, 0.2};
        c.Np = Np;
        c.kmax = 2;
        c.amplitude.kind = AmplitudeKind::single_mode;
        c.amplitude.mode = 2;
        c.tableau = tableau;
        c.cfl = 0.01;
        c.cflDerivative = 2;
        c.horizon.kind = HorizonKind::physical;
        c.horizon.value = 1.0;
        res.Np.push_back(Np);
        res.error.push_back(advdiff_error(c, fam));
    }
    // slope of log(error) against log(dx)
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(Nps.size());
    for (size_t i = 0; i < Nps.size(); ++i) {
        const double x = std::log(2.0 * std::numbers::pi / Nps[i]), y = std::log(res.error[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    res.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return res;
}

double erk4_polynomial_gap(int samples, std::uint64_t seed) {
    const ButcherTableau tab = ButcherTableau::erk4();
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> rad(0.0, 10.0), ang(0.0, 2.0 * std::numbers::pi);
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
        const cplx z = std::polar(rad(gen), ang(gen));
        const cplx p = 1.0 + z + z * z / 2.0 + z * z * z / 6.0 + z * z * z * z / 24.0;
        worst = std::max(worst, std::abs(stability_function(tab, z) - p));
    }
    return worst;
}

std::vector<CheckResult> default_suite() {
    std::vector<CheckResult> out = lemma_suite();
    for (auto& r : parity_spectrum()) out.push_back(r);
    {
        const RefinementResult rr = refinement_study(StencilSpec::equal(1, 4, 3));
        CheckResult r;
        r.name = "convergence OFD(3,3,3,3)^4 advection-diffusion";
        r.pass = std::abs(rr.slope - 4.0) <= 0.3;
        r.detail = fmt::format("fitted slope {:.4f}", rr.slope);
        out.push_back(r);
    }
    {
        const double g = erk4_polynomial_gap();
        CheckResult r;
        r.name = "ERK4 stability polynomial";
        r.pass = g <= 1e-12;
        r.detail = fmt::format("max gap {:.2e}", g);
        out.push_back(r);
    }
    {
        const SchemeSet fam = derive_family(StencilSpec::equal(1, 4, 4), 2);
        const double g = circulant_vs_dense(fam, {-0.1, 0.2}, 31);
        CheckResult r;
        r.name = "circulant vs dense spectrum Np=31";
        r.pass = g <= 1e-10;
        r.detail = fmt::format("max relative gap {:.2e}", g);
        out.push_back(r);
    }
    return out;
}

}  // namespace optcompact::checks
