#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "checks.hpp"
#include "optcompact/errors.hpp"
#include "optcompact/fft.hpp"
#include "optcompact/optimizer.hpp"
#include "optcompact/pde.hpp"

using namespace optcompact;

namespace {

PdeCase linear_case(int Np = 32, int kmax = 8) {
    PdeCase c;
    c.betas = {-0.1, 0.2};
    c.Np = Np;
    c.kmax = kmax;
    c.amplitude.kind = AmplitudeKind::constant;
    c.horizon.kind = HorizonKind::physical;
    c.horizon.value = 0.05;
    return c;
}

Eigen::VectorXd random_field(int n, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::VectorXd f(n);
    for (int i = 0; i < n; ++i) f(i) = u(gen);
    return f;
}

SchemeSet ofd(int M) { return derive_family(StencilSpec::equal(1, 4, M), 2); }

}  // namespace

TEST_CASE("counter-based phases") {
    CHECK(counter_uniform(1, 5) == counter_uniform(1, 5));
    CHECK(counter_uniform(1, 5) != counter_uniform(1, 6));
    CHECK(counter_uniform(1, 5) != counter_uniform(2, 5));
    for (std::uint64_t k = 0; k < 1000; ++k) {
        const double u = counter_uniform(42, k);
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
    PdeCase a = linear_case(), b = linear_case();
    b.kmax = 12;
    b.Np = 64;
    // phase of mode k does not depend on how many modes exist
    CHECK(phase(a, 3) == phase(b, 3));
}

TEST_CASE("initial fields") {
    PdeCase c = linear_case();
    c.amplitude.scale = 0.0;
    CHECK(init_field(c).cwiseAbs().maxCoeff() == 0.0);

    c = linear_case();
    c.amplitude.kind = AmplitudeKind::single_mode;
    c.amplitude.mode = 1;
    const Eigen::VectorXd f = init_field(c);
    const auto x = c.grid();
    const double ph = phase(c, 1);
    for (int i = 0; i < c.Np; ++i) CHECK(std::abs(f(i) - std::sin(x[i] + ph)) <= 1e-15);
}

TEST_CASE("initial spectrum follows the amplitude law") {
    PdeCase c;
    c.betas = {0.0, 0.04};
    c.nonlinear = true;
    c.Np = 256;
    c.kmax = 121;
    c.amplitude.kind = AmplitudeKind::power;
    c.amplitude.exponent = -0.5;
    c.seed = 9;
    const Eigen::VectorXd f = init_field(c);
    RealFft fft(c.Np);
    const auto F = fft.forward(f);
    const double scale = c.Np / 2.0;
    CHECK(std::abs(F[0]) <= 1e-12 * scale);
    for (int k = 1; k <= c.kmax; ++k) {
        // A sin(kx + phi) = A / (2j) e^{j phi} e^{jkx} + c.c.
        const cplx want = scale * std::pow(k, -0.5) * std::polar(1.0, phase(c, k)) / cplx(0.0, 1.0);
        CHECK(std::abs(F[k] - want) <= 1e-12 * scale);
    }
    for (int k = c.kmax + 1; k <= c.Np / 2; ++k) CHECK(std::abs(F[k]) <= 1e-12 * scale);
}

TEST_CASE("FFT round trip") {
    for (int n : {31, 64, 127}) {
        RealFft fft(n);
        const Eigen::VectorXd f = random_field(n, n);
        std::vector<cplx> F(fft.bins());
        Eigen::VectorXd g(n);
        fft.forward(f.data(), F.data());
        fft.inverse(F.data(), g.data());
        CHECK((f - g).cwiseAbs().maxCoeff() <= 1e-14);
    }
}

TEST_CASE("zero operator leaves the state unchanged") {
    PdeCase c = linear_case();
    c.betas = {0.0, 0.0};
    c.dt = 0.01;
    SemiDiscrete sd(c, ofd(3));
    Stepper st(sd, ButcherTableau::erk4());
    Eigen::VectorXd f = random_field(c.Np, 1);
    const Eigen::VectorXd f0 = f;
    st.step(f, 0.01);
    CHECK(f == f0);
}

TEST_CASE("one forward Euler step matches the dense product") {
    const PdeCase c = linear_case();
    SemiDiscrete sd(c, ofd(3));
    Stepper st(sd, ButcherTableau::forward_euler());
    Eigen::VectorXd f = random_field(c.Np, 2);
    const double dt = 1e-3;
    const Eigen::VectorXd want = f + dt * (sd.lambda() * f);
    st.step(f, dt);
    CHECK((f - want).cwiseAbs().maxCoeff() <= 1e-12 * want.cwiseAbs().maxCoeff());
}

TEST_CASE("single-mode amplification equals r(lambda dt)") {
    const PdeCase c = linear_case(32, 8);
    const SchemeSet fam = ofd(3);
    const double dt = 2e-3;
    const auto lam = circulant_eigenvalues(fam.schemes, c.betas, c.dx(), c.Np);
    for (const char* name : {"ERK2", "ERK4", "ERK5", "IRK2", "IRK3"}) {
        const auto tab = ButcherTableau::by_name(name);
        for (int k : {1, 5, 12}) {
            SemiDiscrete sd(c, fam);
            Stepper st(sd, tab);
            Eigen::VectorXd f(c.Np);
            const auto x = c.grid();
            for (int i = 0; i < c.Np; ++i) f(i) = std::sin(k * x[i] + 0.3);
            RealFft fft(c.Np);
            const cplx before = fft.forward(f)[k];
            st.step(f, dt);
            const cplx after = fft.forward(f)[k];
            CAPTURE(name);
            CAPTURE(k);
            CHECK(std::abs(after / before - stability_function(tab, lam[k] * dt)) <= 1e-10);
        }
    }
}

TEST_CASE("FFT and dense operator paths agree") {
    const int Np = 64;
    const double dx = 2.0 * std::numbers::pi / Np;
    const Eigen::VectorXd f = random_field(Np, 3);
    std::vector<SchemeCoefficients> schemes;
    for (int d = 1; d <= 2; ++d) {
        schemes.push_back(derive_optimized(StencilSpec::equal(d, 4, 3)).coeffs);
        schemes.push_back(derive_standard(StencilSpec::central(d, 10, 3, 2, SchemeKind::standard)));
        schemes.push_back(derive_standard(StencilSpec::equal(d, 4, 1, SchemeKind::standard)));
    }
    for (const auto& s : schemes) {
        DerivativeOperator a(s, Np, dx, DerivativeOperator::Path::fft);
        DerivativeOperator b(s, Np, dx, DerivativeOperator::Path::dense);
        Eigen::VectorXd ya, yb;
        a.apply(f, ya);
        b.apply(f, yb);
        CAPTURE(s.label());
        CHECK((ya - yb).cwiseAbs().maxCoeff() <= 1e-11 * yb.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("the derivative of a resolved mode is accurate") {
    const int Np = 64;
    const double dx = 2.0 * std::numbers::pi / Np;
    const auto s = derive_optimized(StencilSpec::equal(1, 4, 3)).coeffs;
    DerivativeOperator op(s, Np, dx);
    Eigen::VectorXd f(Np), y;
    for (int i = 0; i < Np; ++i) f(i) = std::sin(2.0 * i * dx);
    op.apply(f, y);
    for (int i = 0; i < Np; ++i) CHECK(std::abs(y(i) - 2.0 * std::cos(2.0 * i * dx)) <= 1e-5);
}

TEST_CASE("implicit tableaux are rejected for nonlinear cases") {
    PdeCase c = linear_case();
    c.nonlinear = true;
    c.tableau = "IRK2";
    CHECK_THROWS_AS(c.validate(), UnsupportedCombinationError);
    c.tableau = "ERK4";
    SemiDiscrete sd(c, ofd(2));
    CHECK_THROWS_AS(Stepper(sd, ButcherTableau::irk3()), UnsupportedCombinationError);
}

TEST_CASE("case validation") {
    PdeCase c = linear_case();
    c.kmax = 16;
    CHECK_THROWS_AS(c.validate(), SpecError);
    c = linear_case();
    c.betas = {-0.1, 0.0};
    CHECK_THROWS_AS(c.validate(), SpecError);
    c.dt = 1e-3;
    CHECK_NOTHROW(c.validate());
    c = linear_case();
    c.horizon.kind = HorizonKind::burgers;
    CHECK_THROWS_AS(c.validate(), SpecError);
    c = linear_case();
    c.tableau = "nope";
    CHECK_THROWS_AS(c.validate(), SpecError);
}

TEST_CASE("advection-diffusion oracle") {
    PdeCase c = linear_case(64, 10);
    CHECK((analytic_advdiff(c, 0.0) - init_field(c)).cwiseAbs().maxCoeff() <= 1e-13);

    c.amplitude.kind = AmplitudeKind::single_mode;
    c.amplitude.mode = 3;
    RealFft fft(c.Np);
    const double t = 0.7;

    c.betas = {0.0, 0.2};
    const cplx a0 = fft.forward(analytic_advdiff(c, 0.0))[3];
    const cplx a1 = fft.forward(analytic_advdiff(c, t))[3];
    CHECK(std::abs(std::abs(a1 / a0) - std::exp(-0.2 * 9 * t)) <= 1e-13);
    CHECK(std::abs(std::arg(a1 / a0)) <= 1e-13);

    c.betas = {-0.4, 0.0};
    const cplx b1 = fft.forward(analytic_advdiff(c, t))[3];
    CHECK(std::abs(std::abs(b1 / a0) - 1.0) <= 1e-13);
    CHECK(std::abs(std::arg(b1 / a0) - (3 * -0.4 * t)) <= 1e-12);
}

TEST_CASE("time plan lands on the horizon") {
    PdeCase c = linear_case();
    c.horizon.kind = HorizonKind::normalized;
    c.horizon.value = 25;
    const TimePlan p = plan_time(c);
    const double cflDt = c.cfl * c.dx() * c.dx() / 0.2;
    CHECK(p.dt <= cflDt);
    CHECK(p.dt > 0.99 * cflDt);
    CHECK(std::abs(p.steps * p.dt - p.tEnd) <= 1e-12 * p.tEnd);
    CHECK(std::abs(p.tEnd - 25.0 / (0.2 * 64)) <= 1e-14);
}

TEST_CASE("zero initial field gives zero diagnostics") {
    PdeCase c = linear_case();
    c.amplitude.scale = 0.0;
    c.snapshots = 3;
    const RunResult r = run_case(c, ofd(3));
    REQUIRE_FALSE(r.aborted);
    CHECK(r.frames.size() == 4);
    for (const auto& fr : r.frames) {
        CHECK(fr.K == 0.0);
        CHECK(fr.eps == 0.0);
        for (size_t i = 0; i < fr.energyError.size(); ++i) {
            CHECK(fr.energyError[i] == 0.0);
            CHECK(fr.speed[i] == 0.0);
            CHECK(fr.phaseRatio[i] == 0.0);
            CHECK(fr.ampError[i] == 0.0);
        }
        CHECK(fr.field.allFinite());
    }
}

TEST_CASE("diagnostics of a linear run") {
    PdeCase c = linear_case(64, 10);
    c.horizon.value = 0.2;
    const RunResult r = run_case(c, ofd(3));
    REQUIRE_FALSE(r.aborted);
    const auto& fr = r.frames.back();
    CHECK(fr.t == doctest::Approx(0.2));
    CHECK(fr.K == doctest::Approx(fr.field.squaredNorm() / c.Np));
    // well resolved low modes travel at the right speed with the right amplitude
    CHECK(std::abs(fr.speed[0] - 1.0) <= 1e-6);
    CHECK(fr.ampError[0] <= 1e-12);
    CHECK(std::abs(fr.phaseRatio[0] - 1.0) <= 1e-6);
    // dt is shortened so a whole number of steps lands on the horizon
    CHECK(r.cfl[1] <= c.cfl * (1.0 + 1e-12));
    CHECK(r.cfl[1] >= c.cfl * (1.0 - 1.0 / r.steps));
    CHECK(r.stability.has_value());
}

TEST_CASE("blow-up and stability aborts") {
    PdeCase c = linear_case();
    c.tableau = "FE";
    c.cfl = 5.0;
    c.horizon.value = 50.0;
    const RunResult pre = run_case(c, ofd(3));
    CHECK(pre.aborted);
    CHECK(pre.abortStep == 0);
    CHECK(pre.message.find("stable limit") != std::string::npos);

    c.skipStabilityCheck = true;
    const RunResult boom = run_case(c, ofd(3));
    CHECK(boom.aborted);
    CHECK(boom.abortStep > 0);
    CHECK(boom.abortStep < boom.steps);
    CHECK(boom.message.find("blow-up") != std::string::npos);
}

TEST_CASE("runs are deterministic") {
    PdeCase c = linear_case(64, 20);
    c.seed = 77;
    c.snapshots = 2;
    const RunResult a = run_case(c, ofd(3));
    const RunResult b = run_case(c, ofd(3));
    REQUIRE(a.frames.size() == b.frames.size());
    for (size_t i = 0; i < a.frames.size(); ++i) {
        CHECK(a.frames[i].field == b.frames[i].field);
        CHECK(a.frames[i].energyError == b.frames[i].energyError);
    }
}

TEST_CASE("grid refinement shows fourth order") {
    for (const StencilSpec& s : {StencilSpec::equal(1, 4, 3), StencilSpec::central(1, 4, 3, 2),
                                 StencilSpec::equal(1, 4, 1, SchemeKind::standard)}) {
        const auto rr = checks::refinement_study(s);
        CAPTURE(s.label());
        CHECK(std::abs(rr.slope - 4.0) <= 0.3);
    }
}

TEST_CASE("tableau pairing") {
    CHECK(paired_tableau(4) == "ERK2");
    CHECK(paired_tableau(6) == "ERK4");
    CHECK(paired_tableau(10) == "ERK5");
}
