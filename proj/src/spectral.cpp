#include "optcompact/spectral.hpp"

#include <cmath>
#include <fmt/format.h>
#include <numbers>

#include "optcompact/cost.hpp"
#include "optcompact/errors.hpp"
#include "optcompact/io.hpp"
#include "optcompact/optimizer.hpp"

namespace optcompact {

namespace {

cplx j_pow(int d) {
    switch (d % 4) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
    }
}

std::string fmt_num(double v) { return fmt::format("{:.17g}", v); }

}  // namespace

TrigVectors trig_vectors(double eta, int M) {
    TrigVectors t;
    t.C.resize(2 * M + 1);
    t.S.resize(2 * M + 1);
    for (int m = -M; m <= M; ++m) {
        t.C(m + M) = std::cos(m * eta);
        t.S(m + M) = std::sin(m * eta);
    }
    return t;
}

SymbolSample modified_wavenumber_pow(const SchemeCoefficients& c, double eta) {
    const int M = c.half_width();
    // pair +m with -m so symmetric or skew coefficients give exact zeros
    cplx num = c.a(M), den = c.b(M);
    for (int m = 1; m <= M; ++m) {
        const double cs = std::cos(m * eta), sn = std::sin(m * eta);
        num += cplx((c.a(M + m) + c.a(M - m)) * cs, (c.a(M + m) - c.a(M - m)) * sn);
        den += cplx((c.b(M + m) + c.b(M - m)) * cs, (c.b(M + m) - c.b(M - m)) * sn);
    }
    SymbolSample s;
    if (std::abs(den) < kDenominatorFloor) {
        s.flagged = true;
        s.value = {std::nan(""), std::nan("")};
        return s;
    }
    s.value = num / den;
    return s;
}

SymbolSample spectral_error(const SchemeCoefficients& c, double eta) {
    SymbolSample s = modified_wavenumber_pow(c, eta);
    if (!s.flagged) s.value -= j_pow(c.spec.d) * std::pow(eta, c.spec.d);
    return s;
}

cplx scaled_wavenumber_pow(const SchemeCoefficients& c, double eta) {
    return modified_wavenumber_pow(c, eta).value / j_pow(c.spec.d);
}

const char* to_string(CurveKind k) {
    switch (k) {
        case CurveKind::mkdx_pow_d: return "mkdx_pow_d";
        case CurveKind::real_err: return "real_err";
        case CurveKind::imag_err: return "imag_err";
        case CurveKind::abs_rel_err: return "abs_rel_err";
        case CurveKind::norm_sq: return "norm_sq";
    }
    return "?";
}

std::vector<double> uniform_etas(int n, double lo, double hi) {
    if (n < 2) throw SpecError("need at least two eta samples");
    std::vector<double> e(n);
    for (int i = 0; i < n; ++i) e[i] = lo + (hi - lo) * i / (n - 1);
    return e;
}

SpectralCurve sample_curve(const SchemeCoefficients& c, std::span<const double> etas, CurveKind kind) {
    SpectralCurve cv;
    cv.kind = kind;
    cv.scheme = c.label();
    cv.etas.assign(etas.begin(), etas.end());
    for (size_t i = 1; i < cv.etas.size(); ++i)
        if (!(cv.etas[i] > cv.etas[i - 1])) throw SpecError("eta samples must be strictly increasing");
    const int d = c.spec.d;
    for (double eta : etas) {
        const SymbolSample s = modified_wavenumber_pow(c, eta);
        double v = std::nan("");
        if (!s.flagged) {
            const cplx scaled = s.value / j_pow(d);
            const cplx err = s.value - j_pow(d) * std::pow(eta, d);
            switch (kind) {
                case CurveKind::mkdx_pow_d: v = scaled.real(); break;
                case CurveKind::real_err: v = err.real(); break;
                case CurveKind::imag_err: v = err.imag(); break;
                case CurveKind::abs_rel_err:
                    // 0/0 at eta = 0, limit is zero for any consistent scheme
                    v = eta == 0.0 ? 0.0 : std::abs(scaled / std::pow(eta, d) - 1.0);
                    break;
                case CurveKind::norm_sq: v = std::norm(err); break;
            }
        }
        cv.values.push_back(v);
        cv.flagged.push_back(s.flagged);
    }
    return cv;
}

std::pair<SpectralCurve, SpectralCurve> error_components(const SchemeCoefficients& c, std::span<const double> etas) {
    return {sample_curve(c, etas, CurveKind::real_err), sample_curve(c, etas, CurveKind::imag_err)};
}

std::string curves_to_csv(const std::vector<SpectralCurve>& curves) {
    if (curves.empty()) return "eta\n";
    std::string out = "eta";
    for (const auto& cv : curves) out += fmt::format(",{}:{}", to_string(cv.kind), slug(cv.scheme));
    out += "\n";
    const size_t n = curves.front().etas.size();
    for (const auto& cv : curves)
        if (cv.etas.size() != n) throw SpecError("curves in one CSV must share the eta grid");
    for (size_t i = 0; i < n; ++i) {
        out += fmt_num(curves.front().etas[i]);
        for (const auto& cv : curves) out += "," + fmt_num(cv.values[i]);
        out += "\n";
    }
    return out;
}

namespace {

std::vector<double> figure_etas(int samples) { return uniform_etas(samples, 0.0, 3.0); }

CsvBundle spectral_error_figure(int d, int samples) {
    const auto etas = figure_etas(samples);
    std::vector<SchemeCoefficients> schemes;
    for (int M = 1; M <= 5; ++M) schemes.push_back(derive_optimized(StencilSpec::equal(d, 4, M)).coeffs);
    schemes.push_back(derive_standard(StencilSpec::equal(d, 4, 1, SchemeKind::standard)));
    CsvBundle b;
    for (CurveKind k : {CurveKind::mkdx_pow_d, CurveKind::real_err, CurveKind::imag_err}) {
        std::vector<SpectralCurve> cs;
        for (const auto& s : schemes) cs.push_back(sample_curve(s, etas, k));
        b[fmt::format("{}.csv", to_string(k))] = curves_to_csv(cs);
    }
    return b;
}

CsvBundle l2_figure(int d) {
    std::string out = fmt::format("M,norm_sq_d{}\n", d);
    const auto w = WeightFunction::standard();
    for (int M = 1; M <= 5; ++M) {
        const auto c = derive_optimized(StencilSpec::equal(d, 4, M), w).coeffs;
        out += fmt::format("{},{}\n", M, fmt_num(spectral_norm(c, w)));
    }
    return {{"l2_error.csv", out}};
}

CsvBundle coefficient_figure(int d) {
    std::string out = "M,m,a,b\n";
    for (int M = 1; M <= 5; ++M) {
        const auto c = derive_optimized(StencilSpec::equal(d, 4, M)).coeffs;
        for (int m = 0; m <= M; ++m) out += fmt::format("{},{},{},{}\n", M, m, fmt_num(c.a_at(m)), fmt_num(c.b_at(m)));
    }
    return {{"coefficients.csv", out}};
}

CsvBundle gamma_figure(int samples) {
    const auto etas = figure_etas(samples);
    std::vector<SpectralCurve> cs;
    for (double alpha : {-6.0, 0.0, 6.0}) {
        const auto w = WeightFunction::exponential(0.0, 3.0, alpha);
        auto cv = sample_curve(derive_optimized(StencilSpec::equal(2, 4, 3), w).coeffs, etas, CurveKind::abs_rel_err);
        cv.scheme += fmt::format("[exp({}eta)]", alpha);
        cs.push_back(std::move(cv));
    }
    return {{"abs_rel_err.csv", curves_to_csv(cs)}};
}

CsvBundle m3_figure(int samples) {
    const auto etas = figure_etas(samples);
    std::vector<SpectralCurve> cs;
    cs.push_back(sample_curve(derive_standard(StencilSpec::central(2, 10, 3, 2, SchemeKind::standard)), etas,
                              CurveKind::abs_rel_err));
    for (auto [mA, mB] : {std::pair{3, 3}, {3, 2}, {2, 3}, {3, 1}, {1, 3}, {3, 0}})
        cs.push_back(sample_curve(derive_optimized(StencilSpec::central(2, 4, mA, mB)).coeffs, etas,
                                  CurveKind::abs_rel_err));
    return {{"abs_rel_err.csv", curves_to_csv(cs)}};
}

CsvBundle biased_figure(int d, int samples) {
    const auto etas = figure_etas(samples);
    CsvBundle b;
    for (CurveKind k : {CurveKind::mkdx_pow_d, CurveKind::real_err, CurveKind::imag_err}) {
        std::vector<SpectralCurve> cs;
        for (int ML = 4; ML <= 6; ++ML)
            cs.push_back(sample_curve(derive_optimized(StencilSpec::biased(d, 4, ML, 6 - ML)).coeffs, etas, k));
        b[fmt::format("{}.csv", to_string(k))] = curves_to_csv(cs);
    }
    return b;
}

}  // namespace

std::vector<std::string> known_figures() {
    return {"fig:stencilCoeffD2",
            "fig:stencilCoeffD1",
            "fig:implicitspectralError2",
            "fig:implicitspectralError1",
            "fig:implicitSecondDerivativeL2error",
            "fig:implicitFirstDerivativeL2error",
            "fig:gammaEffect",
            "fig:M3Compare",
            "fig:implicitspectralErrorNonPeriodD2",
            "fig:implicitspectralErrorNonPeriodD1"};
}

CsvBundle figure_data(const FigureRequest& req) {
    const int n = req.samples;
    if (req.id == "custom") {
        if (req.schemes.empty()) throw SpecError("custom sweep needs at least one scheme");
        const std::vector<double> etas = req.etas.empty() ? uniform_etas(n) : req.etas;
        std::vector<SpectralCurve> cs;
        for (const auto& s : req.schemes) cs.push_back(sample_curve(s, etas, req.kind));
        return {{fmt::format("{}.csv", to_string(req.kind)), curves_to_csv(cs)}};
    }
    if (req.id == "fig:stencilCoeffD2") return coefficient_figure(2);
    if (req.id == "fig:stencilCoeffD1") return coefficient_figure(1);
    if (req.id == "fig:implicitspectralError2") return spectral_error_figure(2, n);
    if (req.id == "fig:implicitspectralError1") return spectral_error_figure(1, n);
    if (req.id == "fig:implicitSecondDerivativeL2error") return l2_figure(2);
    if (req.id == "fig:implicitFirstDerivativeL2error") return l2_figure(1);
    if (req.id == "fig:gammaEffect") return gamma_figure(n);
    if (req.id == "fig:M3Compare") return m3_figure(n);
    if (req.id == "fig:implicitspectralErrorNonPeriodD2") return biased_figure(2, n);
    if (req.id == "fig:implicitspectralErrorNonPeriodD1") return biased_figure(1, n);
    throw SpecError(fmt::format("unknown figure id '{}'", req.id));
}

}  // namespace optcompact
