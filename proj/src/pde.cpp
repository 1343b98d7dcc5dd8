#include "optcompact/pde.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <numbers>

#include "optcompact/errors.hpp"
#include "optcompact/optimizer.hpp"
#include "optcompact/spectral.hpp"

namespace optcompact {

double counter_uniform(std::uint64_t seed, std::uint64_t counter) {
    std::uint64_t z = seed + (counter + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return static_cast<double>(z >> 11) * 0x1.0p-53;
}

double AmplitudeLaw::operator()(int k) const {
    switch (kind) {
        case AmplitudeKind::constant: return scale;
        case AmplitudeKind::power: return scale * std::pow(static_cast<double>(k), exponent);
        case AmplitudeKind::single_mode: return k == mode ? scale : 0.0;
    }
    return 0.0;
}

double PdeCase::dx() const { return 2.0 * std::numbers::pi / Np; }

std::vector<double> PdeCase::grid() const {
    std::vector<double> x(Np);
    for (int i = 0; i < Np; ++i) x[i] = i * dx();
    return x;
}

int PdeCase::max_derivative() const {
    int d = 1;
    for (size_t i = 0; i < betas.size(); ++i)
        if (betas[i] != 0.0) d = static_cast<int>(i) + 1;
    return d;
}

void PdeCase::validate() const {
    if (kmax < 1) throw SpecError("kmax must be >= 1");
    if (Np < 2 * kmax + 1) throw SpecError(fmt::format("Np = {} cannot resolve kmax = {} (need Np >= {})", Np, kmax, 2 * kmax + 1));
    if (betas.empty()) throw SpecError("betas must list at least beta_1");
    if (amplitude.kind == AmplitudeKind::single_mode && (amplitude.mode < 1 || amplitude.mode > kmax))
        throw SpecError(fmt::format("single mode k = {} outside 1..kmax", amplitude.mode));
    const ButcherTableau tab = ButcherTableau::by_name(tableau);
    if (nonlinear && !tab.is_explicit())
        throw UnsupportedCombinationError(fmt::format("implicit tableau {} is only supported for linear cases", tableau));
    if (dt <= 0.0) {
        if (cfl <= 0.0) throw SpecError("need dt > 0 or cfl > 0");
        if (cflDerivative < 1 || cflDerivative > static_cast<int>(betas.size()) || betas[cflDerivative - 1] == 0.0)
            throw SpecError(fmt::format("cfl refers to derivative {} whose beta is zero or missing", cflDerivative));
    }
    if (!(horizon.value >= 0.0)) throw SpecError("horizon must be non-negative");
    if (horizon.kind == HorizonKind::normalized &&
        (horizon.derivative < 1 || horizon.derivative > static_cast<int>(betas.size()) ||
         betas[horizon.derivative - 1] == 0.0))
        throw SpecError("normalized horizon refers to a zero or missing beta");
    if (horizon.kind == HorizonKind::burgers && !nonlinear)
        throw SpecError("t/t0 horizon is only defined for the nonlinear case");
    if (snapshots < 1) throw SpecError("snapshots must be >= 1");
}

double phase(const PdeCase& c, int k) { return 2.0 * std::numbers::pi * counter_uniform(c.seed, static_cast<std::uint64_t>(k)); }

Eigen::VectorXd init_field(const PdeCase& c) {
    const auto x = c.grid();
    Eigen::VectorXd f = Eigen::VectorXd::Constant(c.Np, c.offset);
    for (int k = 1; k <= c.kmax; ++k) {
        const double A = c.amplitude(k);
        if (A == 0.0) continue;
        const double ph = phase(c, k);
        for (int i = 0; i < c.Np; ++i) f(i) += A * std::sin(k * x[i] + ph);
    }
    return f;
}

Eigen::VectorXd analytic_advdiff(const PdeCase& c, double t) {
    if (c.nonlinear) throw SpecError("advection-diffusion solution requested for a nonlinear case");
    const auto x = c.grid();
    Eigen::VectorXd f = Eigen::VectorXd::Constant(c.Np, c.offset);
    for (int k = 1; k <= c.kmax; ++k) {
        const double A = c.amplitude(k);
        if (A == 0.0) continue;
        // mode e^{jkx} evolves with exp(sum beta_d (jk)^d t)
        cplx lam = 0.0, jk(0.0, k), p = 1.0;
        for (size_t d = 0; d < c.betas.size(); ++d) {
            p *= jk;
            lam += c.betas[d] * p;
        }
        const cplx g = std::exp(lam * t) * std::polar(A, phase(c, k));
        for (int i = 0; i < c.Np; ++i) f(i) += (g * std::polar(1.0, k * x[i])).imag();
    }
    return f;
}

// ---- spatial operators ----

DerivativeOperator::DerivativeOperator(const SchemeCoefficients& c, int Np, double dx, Path path)
    : d_(c.spec.d), Np_(Np), path_(path), scale_(1.0 / std::pow(dx, c.spec.d)) {
    if (path == Path::fft) {
        if (Np <= 2 * c.half_width())
            throw SpecError(fmt::format("Np = {} too small for a stencil of half-width {}", Np, c.half_width()));
        fft_ = std::make_unique<RealFft>(Np);
        symbol_.resize(fft_->bins());
        work_.resize(fft_->bins());
        for (int k = 0; k < fft_->bins(); ++k) {
            const SymbolSample s = modified_wavenumber_pow(c, 2.0 * std::numbers::pi * k / Np);
            if (s.flagged) throw SingularOperatorError(fmt::format("{} symbol vanishes at bin {}", c.label(), k));
            symbol_[k] = s.value * scale_;
        }
    } else {
        const DomainOperators op = assemble_operators(c, Np);
        A_ = op.A * scale_;
        lu_.compute(op.B);
    }
}

void DerivativeOperator::apply(const Eigen::VectorXd& f, Eigen::VectorXd& out) {
    out.resize(Np_);
    if (path_ == Path::fft) {
        fft_->forward(f.data(), work_.data());
        for (size_t k = 0; k < work_.size(); ++k) work_[k] *= symbol_[k];
        fft_->inverse(work_.data(), out.data());
    } else {
        out = lu_.solve(A_ * f);
    }
}

SchemeSet derive_family(const StencilSpec& shape, int maxD, const WeightFunction& w) {
    SchemeSet set;
    for (int d = 1; d <= maxD; ++d) {
        StencilSpec s = shape;
        s.d = d;
        set.schemes.push_back(derive(s, w));
    }
    StencilSpec s = shape;
    s.d = 1;
    set.name = s.label();
    return set;
}

std::string paired_tableau(int spatialOrder) {
    if (spatialOrder <= 4) return "ERK2";
    if (spatialOrder <= 8) return "ERK4";
    return "ERK5";
}

SemiDiscrete::SemiDiscrete(const PdeCase& c, const SchemeSet& set, DerivativeOperator::Path path)
    : betas_(c.betas), nonlinear_(c.nonlinear), Np_(c.Np), dx_(c.dx()), schemes_(set.schemes) {
    const int maxD = c.max_derivative();
    if (static_cast<int>(schemes_.size()) < maxD)
        throw SpecError(fmt::format("scheme set '{}' covers d <= {} but the case needs d = {}", set.name, schemes_.size(), maxD));
    ops_.resize(maxD);
    for (int d = 1; d <= maxD; ++d) {
        if (schemes_[d - 1].spec.d != d) throw SpecError("scheme set must be ordered by derivative");
        const bool needed = d == 1 || betas_[d - 1] != 0.0;
        if (needed) ops_[d - 1] = std::make_unique<DerivativeOperator>(schemes_[d - 1], Np_, dx_, path);
    }
    tmp_.resize(Np_);
}

void SemiDiscrete::rhs(const Eigen::VectorXd& f, Eigen::VectorXd& out) {
    out.setZero(Np_);
    for (size_t d = 0; d < ops_.size(); ++d) {
        if (!ops_[d] || betas_[d] == 0.0) continue;
        ops_[d]->apply(f, tmp_);
        out += betas_[d] * tmp_;
    }
    if (nonlinear_) {
        ops_[0]->apply(f, tmp_);
        out -= f.cwiseProduct(tmp_);
    }
}

void SemiDiscrete::first_derivative(const Eigen::VectorXd& f, Eigen::VectorXd& out) { ops_[0]->apply(f, out); }

Eigen::MatrixXd SemiDiscrete::lambda() const {
    std::vector<DomainOperators> ops;
    for (size_t d = 0; d < ops_.size(); ++d)
        if (betas_[d] != 0.0) ops.push_back(assemble_operators(schemes_[d], Np_));
    if (ops.empty()) return Eigen::MatrixXd::Zero(Np_, Np_);
    return assemble_lambda(ops, betas_, dx_);
}

std::vector<cplx> SemiDiscrete::linear_eigenvalues() const {
    std::vector<SchemeCoefficients> used;
    for (size_t d = 0; d < ops_.size(); ++d)
        if (betas_[d] != 0.0) used.push_back(schemes_[d]);
    return circulant_eigenvalues(used, betas_, dx_, Np_);
}

Stepper::Stepper(SemiDiscrete& sd, ButcherTableau tab) : sd_(sd), tab_(std::move(tab)) {
    tab_.validate();
    k_.resize(tab_.stages());
    if (!tab_.is_explicit()) {
        if (sd_.nonlinear())
            throw UnsupportedCombinationError(fmt::format("implicit tableau {} needs a linear semi-discretization", tab_.name));
        lambda_ = sd_.lambda();
    }
}

void Stepper::step(Eigen::VectorXd& f, double dt) {
    const int s = tab_.stages();
    if (tab_.is_explicit()) {
        for (int i = 0; i < s; ++i) {
            stage_ = f;
            for (int j = 0; j < i; ++j)
                if (tab_.A(i, j) != 0.0) stage_ += dt * tab_.A(i, j) * k_[j];
            sd_.rhs(stage_, k_[i]);
        }
    } else {
        // stacked stage system (I - dt A (x) Lambda) K = 1 (x) Lambda f
        const Eigen::Index n = f.size();
        if (dt != luDt_) {
            Eigen::MatrixXd big = Eigen::MatrixXd::Identity(s * n, s * n);
            for (int i = 0; i < s; ++i)
                for (int j = 0; j < s; ++j)
                    if (tab_.A(i, j) != 0.0) big.block(i * n, j * n, n, n) -= dt * tab_.A(i, j) * lambda_;
            lu_.compute(big);
            luDt_ = dt;
        }
        const Eigen::VectorXd lf = lambda_ * f;
        Eigen::VectorXd rhs(s * n);
        for (int i = 0; i < s; ++i) rhs.segment(i * n, n) = lf;
        const Eigen::VectorXd K = lu_.solve(rhs);
        for (int i = 0; i < s; ++i) k_[i] = K.segment(i * n, n);
    }
    for (int i = 0; i < s; ++i)
        if (tab_.b(i) != 0.0) f += dt * tab_.b(i) * k_[i];
}

// ---- runs ----

TimePlan plan_time(const PdeCase& c) {
    TimePlan p;
    const double dx = c.dx();
    switch (c.horizon.kind) {
        case HorizonKind::physical: p.tEnd = c.horizon.value; break;
        case HorizonKind::normalized: {
            const int d = c.horizon.derivative;
            p.tEnd = c.horizon.value / (std::abs(c.betas[d - 1]) * std::pow(static_cast<double>(c.kmax), d));
            break;
        }
        case HorizonKind::burgers: {
            const double t0 = burgers_t0(c);
            if (!(t0 > 0.0) || !std::isfinite(t0)) throw SpecError("t/t0 horizon needs a field with nonzero gradient");
            p.tEnd = c.horizon.value * t0;
            break;
        }
    }
    double dt = c.dt;
    if (dt <= 0.0) dt = c.cfl * std::pow(dx, c.cflDerivative) / std::abs(c.betas[c.cflDerivative - 1]);
    if (p.tEnd <= 0.0) {
        p.dt = dt;
        p.steps = 0;
        return p;
    }
    // land exactly on the horizon
    p.steps = std::max(1, static_cast<int>(std::ceil(p.tEnd / dt - 1e-9)));
    p.dt = p.tEnd / p.steps;
    return p;
}

namespace {

// bins whose analytic content is below this fraction of the largest are
// treated as empty and get zero diagnostics
constexpr double kEmptyBin = 1e-12;

double safe_div(double num, double den) {
    if (den == 0.0) return 0.0;
    return num / den;
}

struct FrameBuilder {
    const PdeCase& c;
    SemiDiscrete& sd;
    RealFft fft;
    double t0;
    std::vector<cplx> fhat0;

    FrameBuilder(const PdeCase& cc, SemiDiscrete& s, double tt0) : c(cc), sd(s), fft(cc.Np), t0(tt0) {}

    std::vector<cplx> half(const Eigen::VectorXd& f) {
        auto all = fft.forward(f);
        return {all.begin() + 1, all.begin() + 1 + c.kmax};
    }

    DiagnosticsFrame build(double t, const Eigen::VectorXd& f) {
        DiagnosticsFrame fr;
        fr.t = t;
        for (size_t d = 0; d < c.betas.size(); ++d)
            fr.tstar.push_back(std::abs(c.betas[d]) * t * std::pow(static_cast<double>(c.kmax), static_cast<double>(d + 1)));
        fr.tBurgers = t0 > 0.0 ? t / t0 : 0.0;
        fr.field = f;
        fr.K = f.squaredNorm() / c.Np;
        Eigen::VectorXd fx;
        sd.first_derivative(f, fx);
        fr.eps = fx.squaredNorm() / c.Np;

        Eigen::VectorXd fa;
        if (t == 0.0) {
            fa = init_field(c);
        } else if (c.nonlinear) {
            const auto v = analytic_burgers_colehopf(c, t, c.grid());
            fa = Eigen::Map<const Eigen::VectorXd>(v.data(), c.Np);
        } else {
            fa = analytic_advdiff(c, t);
        }
        fr.fhat = half(f);
        fr.fhatAnalytic = half(fa);
        if (fhat0.empty()) fhat0 = half(init_field(c));

        double amax = 0.0;
        for (const auto& v : fr.fhatAnalytic) amax = std::max(amax, std::abs(v));
        const double beta1 = c.betas[0];
        const int K = c.kmax;
        fr.energyError.assign(K, 0.0);
        fr.speed.assign(K, 0.0);
        fr.phaseRatio.assign(K, 0.0);
        fr.ampError.assign(K, 0.0);
        for (int i = 0; i < K; ++i) {
            const int k = i + 1;
            const cplx num = fr.fhat[i], ana = fr.fhatAnalytic[i];
            if (std::abs(ana) <= kEmptyBin * amax || amax == 0.0) continue;
            fr.energyError[i] = std::abs(std::norm(num) / std::norm(ana) - 1.0);
            fr.ampError[i] = std::norm(num / ana - 1.0);
            if (!c.nonlinear && beta1 != 0.0 && t > 0.0)
                fr.speed[i] = 1.0 + std::arg(num / ana) / (k * beta1 * t);
            if (std::abs(fhat0[i]) > kEmptyBin * amax) {
                const double th = std::arg(num / fhat0[i]);
                const double tha = std::arg(ana / fhat0[i]);
                fr.phaseRatio[i] = std::abs(tha) < 1e-14 ? 0.0 : safe_div(th, tha);
            }
        }
        return fr;
    }
};

}  // namespace

RunResult run_case(const PdeCase& c, const SchemeSet& set, DerivativeOperator::Path path) {
    c.validate();
    RunResult res;
    res.scheme = set.name;
    res.tableau = c.tableau;
    const TimePlan plan = plan_time(c);
    res.dt = plan.dt;
    res.steps = plan.steps;
    res.tEnd = plan.tEnd;
    for (size_t d = 0; d < c.betas.size(); ++d)
        res.cfl.push_back(std::abs(c.betas[d]) * plan.dt / std::pow(c.dx(), static_cast<double>(d + 1)));
    if (c.nonlinear) res.t0 = burgers_t0(c);

    SemiDiscrete sd(c, set, path);
    const ButcherTableau tab = ButcherTableau::by_name(c.tableau);

    // linear part only; for Burgers this ignores the advective term
    const DtResult dtr = max_stable_dt(sd.linear_eigenvalues(), tab);
    res.stability = dtr;
    if (!c.skipStabilityCheck && !dtr.unbounded && plan.dt > dtr.dtMax) {
        res.aborted = true;
        res.abortStep = 0;
        res.message = fmt::format("dt = {:.6e} exceeds the stable limit {:.6e} for {} with {}", plan.dt, dtr.dtMax,
                                  set.name, c.tableau);
        return res;
    }

    Stepper stepper(sd, tab);
    FrameBuilder fb(c, sd, res.t0);
    Eigen::VectorXd f = init_field(c);
    res.frames.push_back(fb.build(0.0, f));

    std::vector<int> marks;
    for (int j = 1; j <= c.snapshots; ++j) marks.push_back(static_cast<int>(std::llround(static_cast<double>(j) * plan.steps / c.snapshots)));
    size_t next = 0;
    while (next < marks.size() && marks[next] <= 0) ++next;

    for (int n = 1; n <= plan.steps; ++n) {
        stepper.step(f, plan.dt);
        const double mx = f.cwiseAbs().maxCoeff();
        if (!std::isfinite(mx) || mx > 1e12) {
            res.aborted = true;
            res.abortStep = n;
            res.message = fmt::format("blow-up at step {} (t = {:.6e}, max|f| = {:.3e})", n, n * plan.dt, mx);
            return res;
        }
        bool snap = false;
        while (next < marks.size() && marks[next] == n) {
            snap = true;
            ++next;
        }
        if (snap) res.frames.push_back(fb.build(n == plan.steps ? plan.tEnd : n * plan.dt, f));
    }
    return res;
}

double advdiff_error(const PdeCase& c, const SchemeSet& set) {
    PdeCase cc = c;
    cc.snapshots = 1;
    const RunResult r = run_case(cc, set);
    if (r.aborted) return std::numeric_limits<double>::infinity();
    const auto& last = r.frames.back();
    return (last.field - analytic_advdiff(cc, last.t)).cwiseAbs().maxCoeff();
}

}  // namespace optcompact
