#include "doctest.h"

#include <cmath>
#include <numbers>

#include "optcompact/errors.hpp"
#include "optcompact/pde.hpp"

using namespace optcompact;

namespace {

PdeCase burgers_case(int Np = 256, int kmax = 121) {
    PdeCase c;
    c.betas = {0.0, 0.04};
    c.nonlinear = true;
    c.Np = Np;
    c.kmax = kmax;
    c.amplitude.kind = AmplitudeKind::power;
    c.amplitude.exponent = -0.5;
    c.seed = 1;
    c.cfl = 0.01;
    c.cflDerivative = 2;
    c.horizon.kind = HorizonKind::burgers;
    c.horizon.value = 104;
    return c;
}

SchemeSet ofd3333() { return derive_family(StencilSpec::equal(1, 4, 3), 2); }

}  // namespace

TEST_CASE("t0 from the initial spectrum") {
    PdeCase c = burgers_case(16, 4);
    c.amplitude.kind = AmplitudeKind::single_mode;
    c.amplitude.mode = 1;
    // K0 = 1/2, eps0 = 1/2
    CHECK(burgers_t0(c) == doctest::Approx(1.0).epsilon(1e-15));
    c.amplitude.mode = 2;
    CHECK(burgers_t0(c) == doctest::Approx(0.25).epsilon(1e-15));
    c.amplitude.scale = 0.0;
    CHECK(std::isnan(burgers_t0(c)));
}

TEST_CASE("Cole-Hopf needs positive time and viscosity") {
    PdeCase c = burgers_case(16, 4);
    CHECK_THROWS_AS(analytic_burgers_colehopf(c, 0.0, c.grid()), SpecError);
    c.betas = {0.0, 0.0};
    CHECK_THROWS_AS(analytic_burgers_colehopf(c, 0.1, c.grid()), SpecError);
}

TEST_CASE("a constant field stays constant") {
    PdeCase c = burgers_case(32, 8);
    c.amplitude.scale = 0.0;
    c.offset = 0.7;
    for (double t : {0.01, 0.5, 3.0}) {
        const auto v = analytic_burgers_colehopf(c, t, c.grid());
        for (double f : v) CHECK(std::abs(f - 0.7) <= 1e-10);
    }
}

TEST_CASE("small-time limit returns the initial field") {
    const PdeCase c = burgers_case();
    const auto v = analytic_burgers_colehopf(c, 1e-6, c.grid());
    const Eigen::VectorXd f0 = init_field(c);
    double worst = 0.0;
    for (int i = 0; i < c.Np; ++i) worst = std::max(worst, std::abs(v[i] - f0(i)));
    CHECK(worst <= 1e-3);
}

TEST_CASE("mean is conserved") {
    PdeCase c = burgers_case(256, 10);
    c.offset = 0.0;
    for (double t : {0.05, 0.4}) {
        const auto v = analytic_burgers_colehopf(c, t, c.grid());
        double mean = 0.0;
        for (double f : v) mean += f;
        mean /= c.Np;
        CAPTURE(t);
        CHECK(std::abs(mean) <= 1e-8);
    }
}

TEST_CASE("numerical Burgers agrees with Cole-Hopf") {
    // f_t + f f_x = nu f_xx; a sign error in the kernel or the advection
    // term would show up at once
    PdeCase c = burgers_case(128, 3);
    c.amplitude.scale = 0.1;
    c.horizon.kind = HorizonKind::physical;
    c.horizon.value = 0.5;
    c.tableau = "ERK4";
    const RunResult r = run_case(c, ofd3333());
    REQUIRE_FALSE(r.aborted);
    const auto& fr = r.frames.back();
    const auto v = analytic_burgers_colehopf(c, fr.t, c.grid());
    double worst = 0.0;
    for (int i = 0; i < c.Np; ++i) worst = std::max(worst, std::abs(fr.field(i) - v[i]));
    CHECK(worst <= 1e-6);
}

TEST_CASE("energy decays") {
    PdeCase c = burgers_case(128, 20);
    c.horizon.value = 2.0;
    c.snapshots = 4;
    const RunResult r = run_case(c, ofd3333());
    REQUIRE_FALSE(r.aborted);
    for (size_t i = 1; i < r.frames.size(); ++i) CHECK(r.frames[i].K < r.frames[i - 1].K);
    CHECK(r.frames.back().tBurgers == doctest::Approx(2.0));
}

TEST_CASE("energy is grid independent between 256 and 512 points") {
    PdeCase c = burgers_case();
    const RunResult coarse = run_case(c, ofd3333());
    c.Np = 512;
    const RunResult fine = run_case(c, ofd3333());
    REQUIRE_FALSE(coarse.aborted);
    REQUIRE_FALSE(fine.aborted);
    const double a = coarse.frames.back().K, b = fine.frames.back().K;
    CHECK(coarse.frames.back().tBurgers == doctest::Approx(104.0));
    CHECK(std::abs(a - b) <= 0.005 * b);
}
