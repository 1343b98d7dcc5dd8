#include "doctest.h"

#include <cmath>

#include "checks.hpp"
#include "optcompact/cost.hpp"
#include "optcompact/errors.hpp"
#include "optcompact/optimizer.hpp"

using namespace optcompact;

namespace {

double cost_of(const StencilSpec& s) {
    const auto w = WeightFunction::standard();
    return objective(derive_optimized(s, w).coeffs, w);
}

}  // namespace

TEST_CASE("second derivative, M=3") {
    const auto c = derive_optimized(StencilSpec::equal(2, 4, 3)).coeffs;
    CHECK(std::abs(c.a_at(0) - -0.979288292571078) <= 1e-8);
    CHECK(std::abs(c.a_at(1) - -0.033306701818875) <= 1e-8);
    CHECK(std::abs(c.a_at(2) - 0.440495791275238) <= 1e-8);
    CHECK(std::abs(c.a_at(3) - 0.0824550568291757) <= 1e-8);
    CHECK(std::abs(c.b_at(1) - 0.607804000534683) <= 1e-8);
    CHECK(std::abs(c.b_at(2) - 0.122983617052232) <= 1e-8);
    CHECK(std::abs(c.b_at(3) - 0.00459836978541528) <= 1e-8);
    CHECK(c.b_at(0) == 1.0);
}

TEST_CASE("M=1 recovers the classical scheme") {
    const auto sol = derive_optimized(StencilSpec::equal(2, 4, 1));
    const auto& c = sol.coeffs;
    CHECK(std::abs(c.a_at(-1) - 1.2) <= 1e-12);
    CHECK(std::abs(c.a_at(0) + 2.4) <= 1e-12);
    CHECK(std::abs(c.a_at(1) - 1.2) <= 1e-12);
    CHECK(std::abs(c.b_at(-1) - 0.1) <= 1e-12);
    CHECK(std::abs(c.b_at(1) - 0.1) <= 1e-12);
    // seven rows bind six unknowns
    CHECK(sol.rankDeficient);
    CHECK(sol.residual <= 1e-9 * 3.4);

    const auto d1 = derive_optimized(StencilSpec::equal(1, 4, 1)).coeffs;
    CHECK(std::abs(d1.a_at(1) - 0.75) <= 1e-12);
    CHECK(std::abs(d1.a_at(-1) + 0.75) <= 1e-12);
    CHECK(std::abs(d1.a_at(0)) <= 1e-12);
    CHECK(std::abs(d1.b_at(1) - 0.25) <= 1e-12);
}

TEST_CASE("first derivative, M=2") {
    const auto c = derive_optimized(StencilSpec::equal(1, 4, 2)).coeffs;
    CHECK(std::abs(c.a_at(1) - 0.682194069313335) <= 1e-8);
    CHECK(std::abs(c.a_at(2) - 0.214144479273011) <= 1e-8);
    CHECK(std::abs(c.b_at(1) - 0.547827381201651) <= 1e-8);
    CHECK(std::abs(c.b_at(2) - 0.0626556466577058) <= 1e-8);
    CHECK(std::abs(c.a_at(0)) <= 1e-12);
}

TEST_CASE("left-biased second derivative, M_L=4") {
    const auto c = derive_optimized(StencilSpec::biased(2, 4, 4, 2)).coeffs;
    CHECK(std::abs(c.a_at(0) - -0.0583231083517459) <= 1e-8);
    CHECK(std::abs(c.b_at(-1) - 1.64238167997833) <= 1e-8);
    CHECK(c.half_width() == 4);
    // padding past the right edge is exactly zero
    CHECK(c.a_at(3) == 0.0);
    CHECK(c.a_at(4) == 0.0);
    CHECK(c.b_at(3) == 0.0);
    CHECK(c.b_at(4) == 0.0);
}

TEST_CASE("standard schemes") {
    const auto c = derive_standard(StencilSpec::equal(2, 4, 1, SchemeKind::standard));
    CHECK(std::abs(c.a_at(0) + 2.4) <= 1e-13);
    CHECK(std::abs(c.a_at(1) - 1.2) <= 1e-13);
    CHECK(std::abs(c.b_at(1) - 0.1) <= 1e-13);

    const auto s10 = derive_standard(StencilSpec::central(1, 10, 3, 2, SchemeKind::standard));
    CHECK(s10.constraintResidual <= 1e-10);
    CHECK(max_standard_order(1, 3, 3, 2, 2) == 10);

    const auto s10d2 = derive_standard(StencilSpec::central(2, 10, 3, 2, SchemeKind::standard));
    CHECK(s10d2.constraintResidual <= 1e-10);
}

TEST_CASE("standard derivation suggests the attainable order") {
    // order 4 on a pentadiagonal stencil leaves free coefficients
    try {
        derive_standard(StencilSpec::equal(2, 4, 2, SchemeKind::standard));
        FAIL("expected a DerivationError");
    } catch (const DerivationError& e) {
        CHECK(e.suggested_order() == max_standard_order(2, 2, 2, 2, 2));
        CHECK(e.suggested_order() > 4);
    }
}

TEST_CASE("unattainable optimized order is reported with a suggestion") {
    // a third derivative cannot reach order 4 on a tridiagonal stencil
    try {
        derive_optimized(StencilSpec::equal(3, 4, 1));
        FAIL("expected a DerivationError");
    } catch (const DerivationError& e) {
        CHECK(e.suggested_order() < 4);
        CHECK(e.suggested_order() >= 1);
    }
}

TEST_CASE("three points cannot carry a third or fourth derivative") {
    for (int d : {3, 4}) {
        CAPTURE(d);
        CHECK(checks::attainable_order(d, 1, 4) == 0);
        try {
            derive_optimized(StencilSpec::equal(d, 2, 1));
            FAIL("expected a DerivationError");
        } catch (const DerivationError& e) {
            CHECK(std::string(e.what()).find("eta = 0") != std::string::npos);
            CHECK(e.suggested_order() == 0);
        }
        CHECK(checks::attainable_order(d, 2, 4) >= 2);
    }
}

TEST_CASE("M=6 is rank deficient on [0,3]") {
    try {
        derive_optimized(StencilSpec::equal(2, 4, 6));
        FAIL("expected a RankDeficiencyError");
    } catch (const RankDeficiencyError& e) {
        CHECK(e.half_width() == 6);
        CHECK(e.support_lo() == 0.0);
        CHECK(e.support_hi() == 3.0);
        CHECK(e.condition() > 1.0 / DBL_EPSILON);
    }
}

TEST_CASE("mirror") {
    const auto left = derive_optimized(StencilSpec::biased(2, 4, 4, 2)).coeffs;
    const auto right = mirror(left);
    CHECK(right.spec.mAL == 2);
    CHECK(right.spec.mAR == 4);
    for (int m = -4; m <= 4; ++m) {
        CHECK(right.a_at(m) == left.a_at(-m));
        CHECK(right.b_at(m) == left.b_at(-m));
    }
    CHECK(right.constraintResidual <= 1e-10);

    const auto c2 = derive_optimized(StencilSpec::equal(2, 4, 3)).coeffs;
    CHECK((mirror(c2).a - c2.a).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((mirror(c2).b - c2.b).cwiseAbs().maxCoeff() <= 1e-10);

    const auto c1 = derive_optimized(StencilSpec::equal(1, 4, 3)).coeffs;
    CHECK((mirror(c1).a - c1.a).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((mirror(c1).b - c1.b).cwiseAbs().maxCoeff() <= 1e-10);

    const auto l1 = derive_optimized(StencilSpec::biased(1, 4, 4, 2)).coeffs;
    const auto r1 = mirror(l1);
    for (int m = -4; m <= 4; ++m) CHECK(r1.a_at(m) == -l1.a_at(-m));
    CHECK(r1.constraintResidual <= 1e-10);
}

TEST_CASE("KKT verification") {
    const auto w = WeightFunction::standard();
    for (int M = 1; M <= 5; ++M) {
        for (int d = 1; d <= 2; ++d) {
            const StencilSpec s = StencilSpec::equal(d, 4, M);
            const auto sol = derive_optimized(s, w);
            const auto cs = build_constraints(s);
            const KktReport rep = verify_kkt(sol, build_cost(d, M, w), cs.G(), cs.h());
            CAPTURE(M);
            CAPTURE(d);
            CHECK(rep.stationarity <= 1e-9 * (1.0 + sol.coeffs.a.cwiseAbs().maxCoeff()));
            CHECK(rep.feasibleOk);
            if (M == 3 && d == 2) {
                CHECK(rep.samples == 100);
                CHECK(rep.violations == 0);
            }
            CHECK(rep.ok());
        }
    }
}

TEST_CASE("optimized cost never exceeds the standard scheme of the same shape") {
    const auto w = WeightFunction::standard();
    struct Case {
        int d, M;
    };
    for (Case k : {Case{1, 2}, Case{2, 3}, Case{1, 3}, Case{2, 2}}) {
        const int order = max_standard_order(k.d, k.M, k.M, k.M, k.M);
        const auto sfd = derive_standard(StencilSpec::equal(k.d, order, k.M, SchemeKind::standard));
        const auto ofd = derive_optimized(StencilSpec::equal(k.d, 4, k.M), w).coeffs;
        CAPTURE(k.d);
        CAPTURE(k.M);
        CHECK(objective(ofd, w) <= objective(sfd, w));
        // the standard scheme is feasible for the order-4 problem
        CHECK(constraint_residual(sfd, StencilSpec::equal(k.d, 4, k.M)) <= 1e-10);
    }
}

TEST_CASE("objective falls strictly with M") {
    double prev = INFINITY;
    for (int M = 1; M <= 4; ++M) {
        const double c = cost_of(StencilSpec::equal(2, 4, M));
        CAPTURE(M);
        CHECK(c < prev);
        prev = c;
    }
}

TEST_CASE("orderings at seven points") {
    const double c3333 = cost_of(StencilSpec::central(2, 4, 3, 3));
    const double c3322 = cost_of(StencilSpec::central(2, 4, 3, 2));
    const double c2233 = cost_of(StencilSpec::central(2, 4, 2, 3));
    const double c3311 = cost_of(StencilSpec::central(2, 4, 3, 1));
    const double c1133 = cost_of(StencilSpec::central(2, 4, 1, 3));
    const double c3300 = cost_of(StencilSpec::central(2, 4, 3, 0));
    CHECK(c3333 < c3322);
    CHECK(c3322 < c2233);
    CHECK(c3311 < c1133);
    for (double c : {c3333, c3322, c2233, c3311, c1133}) CHECK(c < c3300);
}

TEST_CASE("explicit stencils have b equal to the unit delta") {
    const auto c = derive_optimized(StencilSpec::central(2, 4, 3, 0)).coeffs;
    CHECK(c.b == delta_vector(7, 4));
    const auto s = derive_standard(StencilSpec::central(2, 6, 3, 0, SchemeKind::standard));
    CHECK(s.b == delta_vector(7, 4));
    CHECK(std::abs(s.a_at(1) - 1.5) <= 1e-13);
}

TEST_CASE("central optimized schemes are symmetric or skew") {
    for (int d = 1; d <= 4; ++d)
        for (int M = 1; M <= 5; ++M) {
            const int order = checks::attainable_order(d, M, 4);
            if (order == 0) continue;
            const auto c = derive_optimized(StencilSpec::equal(d, order, M)).coeffs;
            const double sa = d % 2 == 0 ? 1.0 : -1.0;
            CAPTURE(d);
            CAPTURE(M);
            CHECK((c.a - sa * reversed(c.a)).cwiseAbs().maxCoeff() <= 1e-10);
            CHECK((c.b - reversed(c.b)).cwiseAbs().maxCoeff() <= 1e-10);
        }
}

TEST_CASE("doubling the weight leaves the solution unchanged") {
    const auto w = WeightFunction::exponential(0.0, 3.0, 2.0);
    for (int d = 1; d <= 2; ++d) {
        const auto a = derive_optimized(StencilSpec::equal(d, 4, 3), w).coeffs;
        const auto b = derive_optimized(StencilSpec::equal(d, 4, 3), w.scaled(2.0)).coeffs;
        CHECK((a.a - b.a).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK((a.b - b.b).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("stacked domain reproduces the single-point solution") {
    for (const StencilSpec& s : {StencilSpec::equal(2, 4, 3), StencilSpec::equal(1, 4, 2)}) {
        const auto st = derive_stacked_domain(s, WeightFunction::standard(), 5);
        CHECK(st.perPoint.size() == 5);
        CHECK(st.maxDeviation <= 1e-10);
    }
}

TEST_CASE("dispatch and wrong-kind guards") {
    CHECK_THROWS_AS(derive_optimized(StencilSpec::equal(2, 4, 1, SchemeKind::standard)), SpecError);
    CHECK_THROWS_AS(derive_standard(StencilSpec::equal(2, 4, 1)), SpecError);
    CHECK_THROWS_AS(derive_optimized(StencilSpec::equal(2, 4, 1), WeightFunction{}), SpecError);
    const auto c = derive(StencilSpec::equal(2, 4, 1, SchemeKind::standard));
    CHECK(c.spec.kind == SchemeKind::standard);
}

TEST_CASE("derivation is deterministic") {
    const auto a = derive_optimized(StencilSpec::equal(2, 4, 4)).coeffs;
    const auto b = derive_optimized(StencilSpec::equal(2, 4, 4)).coeffs;
    CHECK(a.a == b.a);
    CHECK(a.b == b.b);
}
