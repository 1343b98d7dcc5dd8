#include "optcompact/stability.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "optcompact/errors.hpp"
#include "optcompact/optimizer.hpp"
#include "optcompact/spectral.hpp"

namespace optcompact {

Eigen::MatrixXd shift_operator(int Np, int k) {
    if (Np < 1) throw SpecError("shift operator needs Np >= 1");
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(Np, Np);
    for (int i = 0; i < Np; ++i) {
        const int j = ((i - k) % Np + Np) % Np;
        P(i, j) = 1.0;
    }
    return P;
}

namespace {

void check_b_invertible(const DomainOperators& op) {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(op.B);
    const double rc = lu.rcond();
    if (!(rc > 1e-12))
        throw SingularOperatorError(
            fmt::format("LHS operator for d={} is singular or nearly so (condition estimate {:.3e})", op.d,
                        rc > 0 ? 1.0 / rc : std::numeric_limits<double>::infinity()));
}

void place_row(DomainOperators& op, const SchemeCoefficients& c, int row, int Np, bool periodic) {
    const int M = c.half_width();
    for (int m = -M; m <= M; ++m) {
        const double a = c.a(m + M), b = c.b(m + M);
        if (a == 0.0 && b == 0.0) continue;
        int col = row + m;
        if (periodic) {
            col = ((col % Np) + Np) % Np;
        } else if (col < 0 || col >= Np) {
            throw SpecError(fmt::format("{} placed on row {} reaches column {} outside the domain", c.label(), row, col));
        }
        op.A(row, col) += a;
        op.B(row, col) += b;
    }
    op.rowSchemes.push_back(c.label());
}

}  // namespace

DomainOperators assemble_operators(const SchemeCoefficients& c, int Np) {
    if (Np <= 2 * c.half_width())
        throw SpecError(fmt::format("Np = {} too small for a stencil of half-width {}", Np, c.half_width()));
    DomainOperators op;
    op.periodic = true;
    op.d = c.spec.d;
    op.A = Eigen::MatrixXd::Zero(Np, Np);
    op.B = Eigen::MatrixXd::Zero(Np, Np);
    for (int i = 0; i < Np; ++i) place_row(op, c, i, Np, true);
    check_b_invertible(op);
    return op;
}

DomainOperators assemble_operators(const BoundarySet& set, int Np) {
    const int nl = static_cast<int>(set.left.size()), nr = static_cast<int>(set.right.size());
    if (Np < nl + nr + 1) throw SpecError(fmt::format("Np = {} too small for {} + {} closure rows", Np, nl, nr));
    DomainOperators op;
    op.periodic = false;
    op.d = set.interior.spec.d;
    op.A = Eigen::MatrixXd::Zero(Np, Np);
    op.B = Eigen::MatrixXd::Zero(Np, Np);
    for (int i = 0; i < Np; ++i) {
        const SchemeCoefficients* s = &set.interior;
        if (i < nl) s = &set.left[i];
        else if (i >= Np - nr) s = &set.right[i - (Np - nr)];
        if (s->spec.d != op.d) throw SpecError("closure schemes must share the derivative order");
        place_row(op, *s, i, Np, false);
    }
    check_b_invertible(op);
    return op;
}

BoundarySet optimized_boundary_set(int d, int order, int M, const WeightFunction& w) {
    BoundarySet set;
    set.interior = derive_optimized(StencilSpec::equal(d, order, M), w).coeffs;
    for (int i = 0; i < M; ++i) {
        // row i sees i points to its left
        set.left.push_back(mirror(derive_optimized(StencilSpec::biased(d, order, 2 * M - i, i), w).coeffs));
    }
    for (int j = 0; j < M; ++j) {
        const int mR = M - 1 - j;
        set.right.push_back(derive_optimized(StencilSpec::biased(d, order, 2 * M - mR, mR), w).coeffs);
    }
    return set;
}

Eigen::MatrixXd assemble_lambda(std::span<const DomainOperators> ops, std::span<const double> betas, double dx) {
    if (ops.empty()) throw SpecError("assemble_lambda needs at least one operator");
    const Eigen::Index n = ops.front().A.rows();
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
    for (const auto& op : ops) {
        if (op.A.rows() != n) throw SpecError("operators must share the grid size");
        const double beta = op.d <= static_cast<int>(betas.size()) ? betas[op.d - 1] : 0.0;
        if (beta == 0.0) continue;
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(op.B);
        if (!(lu.rcond() > 1e-12)) throw SingularOperatorError(fmt::format("LHS operator for d={} is singular", op.d));
        L += (beta / std::pow(dx, op.d)) * lu.solve(op.A);
    }
    return L;
}

SemiDiscreteReport semi_discrete_check(std::span<const SchemeCoefficients> schemes, std::span<const double> betas,
                                       int samples) {
    SemiDiscreteReport rep;
    rep.worstMargin = -std::numeric_limits<double>::infinity();
    const auto etas = uniform_etas(samples);
    double scale = 0.0;
    for (double eta : etas) {
        cplx sum = 0.0;
        for (const auto& s : schemes) {
            const int d = s.spec.d;
            const double beta = d <= static_cast<int>(betas.size()) ? betas[d - 1] : 0.0;
            if (beta == 0.0) continue;
            const SymbolSample sym = modified_wavenumber_pow(s, eta);
            if (sym.flagged) throw SpecError(fmt::format("{} has a vanishing symbol denominator at eta = {}", s.label(), eta));
            sum += beta * sym.value;
            scale = std::max(scale, std::abs(beta * sym.value));
        }
        if (sum.real() > rep.worstMargin) {
            rep.worstMargin = sum.real();
            rep.worstEta = eta;
        }
    }
    rep.stable = rep.worstMargin <= 1e-12 * std::max(scale, 1.0);
    return rep;
}

const char* to_string(SpectrumClass c) {
    switch (c) {
        case SpectrumClass::real_only: return "real-only";
        case SpectrumClass::imaginary_only: return "imaginary-only";
        default: return "mixed";
    }
}

SpectrumReport classify_spectrum(std::vector<cplx> eigenvalues) {
    SpectrumReport rep;
    rep.eigenvalues = std::move(eigenvalues);
    double maxRe = -std::numeric_limits<double>::infinity(), maxAbsRe = 0.0, maxAbsIm = 0.0, rho = 0.0;
    for (const auto& l : rep.eigenvalues) {
        maxRe = std::max(maxRe, l.real());
        maxAbsRe = std::max(maxAbsRe, std::abs(l.real()));
        maxAbsIm = std::max(maxAbsIm, std::abs(l.imag()));
        rho = std::max(rho, std::abs(l));
    }
    rep.maxRealPart = rep.eigenvalues.empty() ? 0.0 : maxRe;
    rep.spectralRadius = rho;
    if (maxAbsIm <= 1e-9 * rho) rep.classification = SpectrumClass::real_only;
    else if (maxAbsRe <= 1e-9 * rho) rep.classification = SpectrumClass::imaginary_only;
    else rep.classification = SpectrumClass::mixed;
    return rep;
}

SpectrumReport spectrum(const Eigen::MatrixXd& Lambda) {
    if (Lambda.rows() != Lambda.cols()) throw SpecError("spectrum needs a square matrix");
    if (Lambda.rows() > 4096) throw SpecError("dense eigen path is capped at Np = 4096");
    Eigen::EigenSolver<Eigen::MatrixXd> es(Lambda, false);
    if (es.info() != Eigen::Success) throw SingularOperatorError("dense eigenvalue iteration did not converge");
    std::vector<cplx> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    return classify_spectrum(std::move(ev));
}

std::vector<cplx> circulant_eigenvalues(std::span<const SchemeCoefficients> schemes, std::span<const double> betas,
                                        double dx, int Np) {
    std::vector<cplx> ev(Np, 0.0);
    for (int k = 0; k < Np; ++k) {
        const double theta = 2.0 * std::numbers::pi * k / Np;
        for (const auto& s : schemes) {
            const int d = s.spec.d;
            const double beta = d <= static_cast<int>(betas.size()) ? betas[d - 1] : 0.0;
            if (beta == 0.0) continue;
            const SymbolSample sym = modified_wavenumber_pow(s, theta);
            if (sym.flagged) throw SingularOperatorError(fmt::format("{} symbol vanishes at theta = {}", s.label(), theta));
            ev[k] += beta / std::pow(dx, d) * sym.value;
        }
    }
    return ev;
}

// ---- Butcher tableaux ----

bool ButcherTableau::is_explicit() const {
    for (int i = 0; i < stages(); ++i)
        for (int j = i; j < stages(); ++j)
            if (A(i, j) != 0.0) return false;
    return true;
}

void ButcherTableau::validate() const {
    const int s = stages();
    if (s < 1 || A.rows() != s || A.cols() != s || c.size() != s)
        throw SpecError(fmt::format("tableau '{}' has inconsistent dimensions", name));
    for (int i = 0; i < s; ++i) {
        if (std::abs(A.row(i).sum() - c(i)) > 1e-12)
            throw SpecError(fmt::format("tableau '{}': row {} of A sums to {} but c = {}", name, i, A.row(i).sum(), c(i)));
    }
}

namespace {
ButcherTableau make_tab(std::string name, std::initializer_list<std::initializer_list<double>> A,
                        std::initializer_list<double> b, std::initializer_list<double> c) {
    ButcherTableau t;
    t.name = std::move(name);
    const int s = static_cast<int>(b.size());
    t.A = Eigen::MatrixXd::Zero(s, s);
    int i = 0;
    for (const auto& row : A) {
        int j = 0;
        for (double v : row) t.A(i, j++) = v;
        ++i;
    }
    t.b = Eigen::Map<const Eigen::VectorXd>(std::data(b), s);
    t.c = Eigen::Map<const Eigen::VectorXd>(std::data(c), s);
    return t;
}
}  // namespace

ButcherTableau ButcherTableau::forward_euler() { return make_tab("FE", {{0.0}}, {1.0}, {0.0}); }

ButcherTableau ButcherTableau::erk2() { return make_tab("ERK2", {{0, 0}, {1, 0}}, {0.5, 0.5}, {0, 1}); }

ButcherTableau ButcherTableau::erk4() {
    return make_tab("ERK4", {{0, 0, 0, 0}, {0.5, 0, 0, 0}, {0, 0.5, 0, 0}, {0, 0, 1, 0}},
                    {1.0 / 6, 1.0 / 3, 1.0 / 3, 1.0 / 6}, {0, 0.5, 0.5, 1});
}

ButcherTableau ButcherTableau::erk5() {
    return make_tab("ERK5",
                    {{0, 0, 0, 0, 0, 0},
                     {0.25, 0, 0, 0, 0, 0},
                     {0.125, 0.125, 0, 0, 0, 0},
                     {0, -0.5, 1, 0, 0, 0},
                     {3.0 / 16, 0, 0, 9.0 / 16, 0, 0},
                     {-3.0 / 7, 2.0 / 7, 12.0 / 7, -12.0 / 7, 8.0 / 7, 0}},
                    {7.0 / 90, 0, 32.0 / 90, 12.0 / 90, 32.0 / 90, 7.0 / 90}, {0, 0.25, 0.25, 0.5, 0.75, 1});
}

ButcherTableau ButcherTableau::irk2() {
    return make_tab("IRK2", {{0, 0}, {1.0 / 3, 1.0 / 3}}, {0.25, 0.75}, {0, 2.0 / 3});
}

// printed to six digits; the last row of A and b differ in the sixth
// digit and both are kept as printed
ButcherTableau ButcherTableau::irk3() {
    return make_tab("IRK3",
                    {{0.158984, 0, 0}, {0.420508, 0.158984, 0}, {0.348023, 0.492993, 0.158984}},
                    {0.348022, 0.492994, 0.158984}, {0.158984, 0.579492, 1.0});
}

ButcherTableau ButcherTableau::by_name(const std::string& name) {
    if (name == "FE") return forward_euler();
    if (name == "ERK2") return erk2();
    if (name == "ERK4") return erk4();
    if (name == "ERK5") return erk5();
    if (name == "IRK2") return irk2();
    if (name == "IRK3") return irk3();
    throw SpecError(fmt::format("unknown tableau '{}'", name));
}

std::vector<std::string> ButcherTableau::shipped() { return {"FE", "ERK2", "ERK4", "ERK5", "IRK2", "IRK3"}; }

cplx stability_function(const ButcherTableau& tab, cplx z) {
    const int s = tab.stages();
    // (I - zA) k = 1 by Gaussian elimination with partial pivoting
    std::vector<cplx> M(static_cast<size_t>(s) * s), k(s, 1.0);
    for (int i = 0; i < s; ++i)
        for (int j = 0; j < s; ++j) M[i * s + j] = (i == j ? 1.0 : 0.0) - z * tab.A(i, j);
    for (int col = 0; col < s; ++col) {
        int piv = col;
        for (int r = col + 1; r < s; ++r)
            if (std::abs(M[r * s + col]) > std::abs(M[piv * s + col])) piv = r;
        if (std::abs(M[piv * s + col]) < 1e-300) return {std::numeric_limits<double>::infinity(), 0.0};
        if (piv != col) {
            for (int j = 0; j < s; ++j) std::swap(M[col * s + j], M[piv * s + j]);
            std::swap(k[col], k[piv]);
        }
        for (int r = col + 1; r < s; ++r) {
            const cplx f = M[r * s + col] / M[col * s + col];
            if (f == 0.0) continue;
            for (int j = col; j < s; ++j) M[r * s + j] -= f * M[col * s + j];
            k[r] -= f * k[col];
        }
    }
    for (int i = s - 1; i >= 0; --i) {
        cplx acc = k[i];
        for (int j = i + 1; j < s; ++j) acc -= M[i * s + j] * k[j];
        k[i] = acc / M[i * s + i];
    }
    cplx bk = 0.0;
    for (int i = 0; i < s; ++i) bk += tab.b(i) * k[i];
    const cplx r = 1.0 + z * bk;
    if (!std::isfinite(r.real()) || !std::isfinite(r.imag())) return {std::numeric_limits<double>::infinity(), 0.0};
    return r;
}

DtResult max_stable_dt(std::span<const cplx> eigenvalues, const ButcherTableau& tab, const DtSearchOptions& opt) {
    DtResult res;
    res.options = opt;
    double rho = 0.0;
    for (const auto& l : eigenvalues) rho = std::max(rho, std::abs(l));
    std::vector<cplx> ev;
    double minAbs = std::numeric_limits<double>::infinity();
    for (const auto& l : eigenvalues) {
        if (std::abs(l) <= opt.zeroClamp * rho) continue;  // r(0) = 1 exactly
        ev.push_back(l);
        minAbs = std::min(minAbs, std::abs(l));
    }
    if (ev.empty()) {
        res.unbounded = true;
        res.dtMax = std::numeric_limits<double>::infinity();
        return res;
    }
    // eigenvalues with |lambda dt| past the ray ceiling are no longer probed
    auto feasible = [&](double dt) {
        for (const auto& l : ev) {
            if (std::abs(l) * dt > opt.rayCeiling) continue;
            if (std::abs(stability_function(tab, l * dt)) > 1.0 + opt.tolerance) return false;
        }
        return true;
    };
    const double dtEnd = std::max(opt.dtHi, opt.rayCeiling / minAbs);
    const double lo10 = std::log10(opt.dtLo), hi10 = std::log10(dtEnd);
    const int n = static_cast<int>(std::ceil((hi10 - lo10) * opt.pointsPerDecade));
    if (!feasible(opt.dtLo)) {
        res.dtMax = 0.0;
        return res;
    }
    double prev = opt.dtLo;
    for (int i = 1; i <= n; ++i) {
        const double dt = std::pow(10.0, lo10 + (hi10 - lo10) * i / n);
        if (!feasible(dt)) {
            double a = prev, b = dt;
            while ((b - a) > opt.relWidth * a) {
                const double mid = 0.5 * (a + b);
                (feasible(mid) ? a : b) = mid;
            }
            res.dtMax = a;
            return res;
        }
        prev = dt;
    }
    res.unbounded = true;
    res.dtMax = std::numeric_limits<double>::infinity();
    return res;
}

double norm2_power(const Eigen::MatrixXd& M, double relTol) {
    if (M.size() == 0) return 0.0;
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> u(0.5, 1.5);
    Eigen::VectorXd x(M.cols());
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = u(gen);
    x.normalize();
    double lam = 0.0;
    for (int it = 0; it < 20000; ++it) {
        Eigen::VectorXd y = M.transpose() * (M * x);
        const double nl = x.dot(y);
        const double ny = y.norm();
        if (ny == 0.0) return 0.0;
        x = y / ny;
        if (it > 0 && std::abs(nl - lam) <= 1e-2 * relTol * std::abs(nl)) {
            lam = nl;
            break;
        }
        lam = nl;
    }
    return std::sqrt(std::max(lam, 0.0));
}

double max_dt_forward_euler_2norm(const Eigen::MatrixXd& Lambda) {
    const double L = norm2_power(Lambda);
    if (L == 0.0) return std::numeric_limits<double>::infinity();
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(Lambda.rows(), Lambda.cols());
    auto feasible = [&](double dt) { return norm2_power(I + dt * Lambda) <= 1.0 + 1e-10; };
    // ||I + dt L|| >= dt ||L|| - 1, so nothing past 2/||L|| can be feasible
    double lo = 0.0, hi = 2.0 / L * (1.0 + 1e-9);
    if (feasible(hi)) return hi;
    while (hi - lo > 1e-10 * hi) {
        const double mid = 0.5 * (lo + hi);
        (feasible(mid) ? lo : hi) = mid;
    }
    return lo;
}

std::vector<CflRow> cfl_sweep(std::span<const SchemeCoefficients> schemes, const ButcherTableau& tab,
                              std::span<const double> betas, std::span<const double> dxList, int Np,
                              const DtSearchOptions& opt) {
    std::vector<CflRow> rows;
    for (double dx : dxList) {
        const auto ev = circulant_eigenvalues(schemes, betas, dx, Np);
        const DtResult r = max_stable_dt(ev, tab, opt);
        CflRow row;
        row.dx = dx;
        row.unbounded = r.unbounded;
        row.dtMax = r.dtMax;
        for (size_t d = 1; d <= betas.size(); ++d)
            row.r.push_back(std::abs(betas[d - 1]) * r.dtMax / std::pow(dx, static_cast<double>(d)));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<RegionSample> stability_region_grid(const ButcherTableau& tab, double reLo, double reHi, double imLo,
                                                double imHi, int n) {
    if (n < 2) throw SpecError("region grid needs n >= 2");
    std::vector<RegionSample> out;
    out.reserve(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
        const double im = imLo + (imHi - imLo) * i / (n - 1);
        for (int j = 0; j < n; ++j) {
            const double re = reLo + (reHi - reLo) * j / (n - 1);
            out.push_back({re, im, std::abs(stability_function(tab, {re, im}))});
        }
    }
    return out;
}

}  // namespace optcompact
