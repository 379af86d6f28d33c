#include <cmath>

#include "doctest.h"
#include "polybubble/moments.hpp"
#include "polybubble/potential.hpp"
#include "polybubble/rng.hpp"

using namespace polybubble;

TEST_CASE("built-in potential: normalization and flatness") {
    const auto s6 = make_space_spec(6, 1);
    const auto pot = builtin_potential(s6, 0.5, -0.3, -0.2, 2.0);
    CHECK(pot.Q.value_cyl(1.0, 0.0, 0.0) == 1.0);
    CHECK(pot.V.value_cyl(1.0, 0.0, 0.0) == doctest::Approx(0.5));
    CHECK(pot.flatness_order == 2);

    // gradient vanishes at the critical point, and only there nearby
    const Vec at_crit = pot.Q.grad_ry(1.0, Vec(3, 0.0));
    for (double g : at_crit) CHECK(std::abs(g) < 1e-14);
    const Vec off = pot.Q.grad_ry(1.1, Vec(3, 0.0));
    CHECK(std::abs(off[0]) > 1e-6);

    // a linear term in Q breaks (A2)-flatness
    CylFunc bad(1.0, {{0.1, 1, 0, 0}}, 1.0, Vec(3, 0.0), 2.0);
    CHECK_THROWS_AS(make_potential_model(s6, pot.V, bad), FlatnessViolationError);

    // m = 2 requires flatness to order 3: a quadratic deviation is rejected
    const auto s10 = make_space_spec(10, 2);
    CylFunc bad2(1.0, {{0.1, 2, 0, 0}}, 1.0, Vec(7, 0.0), 2.0);
    CylFunc v10(0.0, {{0.5, 0, 0, 0}}, 1.0, Vec(7, 0.0), 2.0);
    CHECK_THROWS_AS(make_potential_model(s10, v10, bad2), FlatnessViolationError);
    CHECK_NOTHROW(builtin_potential(s10, 0.5, -0.3, -0.2, 2.0));
    CHECK_THROWS(builtin_potential(s10, 0.5, -0.3, -0.2, 2.0, /*cubic_tilt=*/0.1));
}

TEST_CASE("cylinder function partials match finite differences") {
    const auto s6 = make_space_spec(6, 1);
    const auto pot = builtin_potential(s6, 0.4, -0.25, -0.15, 1.5, 0.3);
    Rng rng(77);
    const double step = 1e-6;
    for (int t = 0; t < 30; ++t) {
        Vec y(6);
        const Vec dir = rng.unit_vector(3);
        const double r = rng.uniform(0.8, 1.2);
        for (int i = 0; i < 3; ++i) y[i] = r * dir[i];
        for (int i = 3; i < 6; ++i) y[i] = rng.uniform(-0.3, 0.3);
        for (int i = 3; i < 6; ++i) {
            Vec yp = y, ym = y;
            yp[i] += step;
            ym[i] -= step;
            const double fd = (pot.Q.value_point(yp) - pot.Q.value_point(ym)) / (2 * step);
            CHECK(pot.Q.partial_ypp(y, i) == doctest::Approx(fd).epsilon(1e-6));
        }
        // radial partial through a radial move of y'
        Vec yp = y, ym = y;
        for (int i = 0; i < 3; ++i) {
            yp[i] = (r + step) * dir[i];
            ym[i] = (r - step) * dir[i];
        }
        const double fd_r = (pot.Q.value_point(yp) - pot.Q.value_point(ym)) / (2 * step);
        CHECK(pot.Q.partial_r(y) == doctest::Approx(fd_r).epsilon(1e-6));
    }
}

TEST_CASE("jets of the potential agree with the closed-form value and gradient") {
    const auto s6 = make_space_spec(6, 1);
    const auto pot = builtin_potential(s6, 0.4, -0.25, -0.15, 1.5, 0.3);
    auto sp = JetSpace::make(6, 2);
    Rng rng(78);
    for (int t = 0; t < 10; ++t) {
        Vec y(6);
        const Vec dir = rng.unit_vector(3);
        const double r = rng.uniform(0.8, 1.2);
        for (int i = 0; i < 3; ++i) y[i] = r * dir[i];
        for (int i = 3; i < 6; ++i) y[i] = rng.uniform(-0.3, 0.3);
        const Jet qj = pot.Q.jet(sp, y);
        CHECK(qj.value() == doctest::Approx(pot.Q.value_point(y)).epsilon(1e-13));
        for (int i = 3; i < 6; ++i) {
            std::vector<int> e(6, 0);
            e[i] = 1;
            CHECK(qj.deriv(e) == doctest::Approx(pot.Q.partial_ypp(y, i)).epsilon(1e-11));
        }
    }
}

TEST_CASE("flat-derivative contraction against the hand-expanded laplacian form") {
    // m = 1: sum_{|a|=2} D^a Q moment(a) = (d^2_rad + (N-3) d^2_tang... ) reduces
    // to Delta Q(y0) * M2 with equal second moments; the jet contraction must
    // reproduce -2(qr + (N-3) qt) M2 for Q = 1 + qr dr^2 + qt t
    const auto s6 = make_space_spec(6, 1);
    const double qr = -0.3, qt = -0.2;
    const auto pot = builtin_potential(s6, 0.0, qr, qt, 2.0);
    std::vector<int> a2(6, 0);
    a2[0] = 2;
    const double M2 = bubble_moment_crit(s6, a2);
    const double got = contract_flat_derivatives(
        pot, [&](std::span<const int> alpha) { return bubble_moment_crit(s6, alpha); });
    // dr^2 contributes 2 along the radial direction only; t contributes 2 per
    // y'' coordinate
    const double expect = (2.0 * qr + 2.0 * 3.0 * qt) * M2;
    CHECK(got == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("even multi-index enumeration") {
    const auto idx2 = even_multi_indices(3, 2);
    CHECK(idx2.size() == 3);
    const auto idx4 = even_multi_indices(3, 4);
    CHECK(idx4.size() == 6);  // (4,0,0) x3 and (2,2,0) x3
    CHECK(even_multi_indices(3, 3).empty());
}
