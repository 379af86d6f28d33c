#include <cmath>

#include "doctest.h"
#include "polybubble/pohozaev.hpp"
#include "polybubble/rng.hpp"

using namespace polybubble;

TEST_CASE("bump fields: exact gradients and iterated laplacians") {
    const auto space = make_space_spec(6, 1);
    Vec c(6, 0.0);
    c[0] = 0.4;
    const BumpField bump(space, c, 1.2, 5);
    Rng rng(55);
    const double step = 1e-5;
    for (int t = 0; t < 15; ++t) {
        Vec y(6);
        for (int i = 0; i < 6; ++i) y[i] = c[i] + rng.uniform(-1.0, 1.0);
        const Vec g = bump.grad(y);
        double lap_fd = 0.0;
        for (int i = 0; i < 6; ++i) {
            Vec yp = y, ym = y;
            yp[i] += step;
            ym[i] -= step;
            CHECK(g[i] == doctest::Approx((bump.value(yp) - bump.value(ym)) / (2 * step)).epsilon(2e-6));
            lap_fd += (bump.value(yp) - 2.0 * bump.value(y) + bump.value(ym)) / (step * step);
        }
        CHECK(bump.polyharm(1, y) == doctest::Approx(-lap_fd).epsilon(2e-4));
    }
    // support boundary
    Vec far = c;
    far[1] = 1.3;
    CHECK(bump.value(far) == 0.0);
    CHECK(bump.polyharm(1, far) == 0.0);
}

TEST_CASE("fd fields approximate analytic laplacians") {
    const auto space = make_space_spec(6, 1);
    Vec c(6, 0.0);
    const BumpField bump(space, c, 1.0, 6);
    const auto fd = make_fd_field([&](std::span<const double> y) { return bump.value(y); }, 6, 1, 1.0);
    Rng rng(56);
    for (int t = 0; t < 10; ++t) {
        Vec y(6);
        for (int i = 0; i < 6; ++i) y[i] = rng.uniform(-0.6, 0.6);
        CHECK(fd.polyharm_m(y) == doctest::Approx(bump.polyharm(1, y)).epsilon(1e-6));
        const Vec g = fd.grad(y);
        const Vec ga = bump.grad(y);
        for (int i = 0; i < 6; ++i) CHECK(g[i] == doctest::Approx(ga[i]).epsilon(1e-7));
    }
}

TEST_CASE("compact-support identities via the exact two-center reduction") {
    for (const auto& [N, m] : {std::pair{6, 1}, {10, 2}}) {
        const auto space = make_space_spec(N, m);
        Vec c1(N, 0.0), c2(N, 0.0);
        c1[0] = 0.3;
        c2[0] = 0.9;  // overlapping supports, collinear with the origin
        const BumpField u(space, c1, 1.0, 2 * m + 3);
        const BumpField v(space, c2, 0.8, 2 * m + 2);
        QuadratureSpec quad;
        quad.rel_tol = 1e-10;
        quad.max_evals = 4'000'000;
        const auto pair = bilinear_pair_collinear(u, v, m, quad);

        // L2 along the axis is a pure boundary functional: zero here
        CHECK(std::abs(pair.L2_axis) <= 1e-6 * pair.gross);
        // L1 identity: L1 = -(N-2m)/2 * mass for compactly supported fields
        const double lhs = pair.L1;
        const double rhs = -0.5 * (N - 2 * m) * pair.mass;
        CHECK(std::abs(lhs - rhs) <= 1e-4 * std::max(std::abs(lhs), 1e-3 * pair.gross));
    }
}

TEST_CASE("u = 0 gives vanishing functionals") {
    const auto space = make_space_spec(6, 1);
    const BumpField v(space, Vec(6, 0.0), 0.8, 4);
    SmoothField zero;
    zero.value = [](std::span<const double>) { return 0.0; };
    zero.grad = [](std::span<const double> y) { return Vec(y.size(), 0.0); };
    zero.polyharm_m = [](std::span<const double>) { return 0.0; };
    const Vec lo(6, -1.0), hi(6, 1.0);
    QuadratureSpec quad;
    quad.rel_tol = 1e-6;
    quad.max_evals = 600'000;
    CHECK(std::abs(bilinear_L1(zero, v.as_field(1), lo, hi, quad).value) < 1e-12);
}

TEST_CASE("critical-scaling invariance of L1 on dilated bumps (m=1)") {
    // L1(u_lam, u_lam) over the dilated domain equals L1(u, u):
    // u_lam(y) = lam^{(N-2m)/2} u(lam y), domain and bump radius scale together
    const auto space = make_space_spec(6, 1);
    QuadratureSpec quad;
    quad.rel_tol = 1e-9;
    quad.max_evals = 2'000'000;
    const double lam = 2.0;
    Vec c(6, 0.0);
    c[0] = 0.2;
    const BumpField u(space, c, 0.7, 5);
    // u_lam(y) = lam^{(N-2m)/2} u(lam y) is lam^{(N-2m)/2} times the bump with
    // center and radius shrunk by lam; L1 is bilinear, so the invariance
    // L1(u_lam, u_lam) = L1(u, u) reads lam^{N-2m} L1(us, us) = L1(u, u)
    Vec cs(6, 0.0);
    cs[0] = 0.2 / lam;
    const BumpField us(space, cs, 0.7 / lam, 5);
    const auto p1 = bilinear_pair_collinear(u, u, 1, quad);
    const auto p2 = bilinear_pair_collinear(us, us, 1, quad);
    CHECK(std::pow(lam, 4.0) * p2.L1 == doctest::Approx(p1.L1).epsilon(1e-6));
}

TEST_CASE("generic cubature route agrees at moderate tolerance (m=1, N=6)") {
    const auto space = make_space_spec(6, 1);
    Vec c1(6, 0.0), c2(6, 0.0);
    c1[0] = 0.25;
    c2[0] = 0.65;
    const BumpField u(space, c1, 0.7, 5);
    const BumpField v(space, c2, 0.6, 4);
    QuadratureSpec quad2;
    quad2.rel_tol = 1e-10;
    const auto exact = bilinear_pair_collinear(u, v, 1, quad2);

    const Vec lo(6, -1.5), hi(6, 1.5);
    QuadratureSpec quad;
    quad.rel_tol = 1e-5;
    quad.abs_tol = 1e-7 * exact.gross;
    quad.max_evals = 6'000'000;
    const auto l1 = bilinear_L1(u.as_field(1), v.as_field(1), lo, hi, quad);
    CHECK(l1.value == doctest::Approx(exact.L1).epsilon(5e-3));
    const auto l2 = bilinear_L2(u.as_field(1), v.as_field(1), 0, lo, hi, quad);
    CHECK(std::abs(l2.value) <= 5e-3 * exact.gross);
}

TEST_CASE("y3-antisymmetry forces L2 in the third direction to vanish") {
    const auto space = make_space_spec(6, 1);
    Vec c(6, 0.0);
    const BumpField u(space, c, 0.8, 5);
    const Vec lo(6, -1.0), hi(6, 1.0);
    QuadratureSpec quad;
    quad.rel_tol = 1e-7;
    quad.max_evals = 2'000'000;
    const auto l2 = bilinear_L2(u.as_field(1), u.as_field(1), 2, lo, hi, quad);
    CHECK(std::abs(l2.value) < 1e-8);
}

TEST_CASE("gaussian L1 against an independent radial reduction (m=1)") {
    const auto space = make_space_spec(6, 1);
    const FnN gauss = [](std::span<const double> y) {
        double s = 0.0;
        for (double v : y) s += v * v;
        return std::exp(-4.0 * s);  // effectively supported in the box
    };
    const auto fd = make_fd_field(gauss, 6, 1, 0.3);
    const Vec lo(6, -1.6), hi(6, 1.6);
    QuadratureSpec quad;
    quad.rel_tol = 1e-4;
    quad.max_evals = 2'000'000;
    const auto l1 = bilinear_L1(fd, fd, lo, hi, quad);

    // radial: L1(u,u) = 2 int (-Delta u)(rho u') over R^N, u = exp(-a rho^2)
    const double a = 4.0;
    const auto radial = integrate_radial(
        [&](double rho) {
            const double u = std::exp(-a * rho * rho);
            const double up = -2.0 * a * rho * u;
            const double lap = (4.0 * a * a * rho * rho - 2.0 * a * 6.0) * u;
            return 2.0 * (-lap) * (rho * up) * std::pow(rho, 5);
        },
        QuadratureSpec{});
    const double expect = sphere_area(6) * radial.value;
    CHECK(l1.value == doctest::Approx(expect).epsilon(1e-2));
}

TEST_CASE("pohozaev residuals: symmetry zero, prediction match, rho domain") {
    const auto space = make_space_spec(6, 1);
    const auto regime = make_regime_case23(space, 0.5, 1.0, 0.05, 20.0);
    const double lam = 60.0;
    const auto cfg = make_config(space, 1.0, regime.h_of_lambda(lam), Vec(3, 0.0), 1, lam);
    const auto cut = make_cutoff(1.0, Vec(3, 0.0), 0.1, 3);
    const auto spec = make_ansatz(cfg, cut, true);
    PairingQuadOptions quad;
    quad.rel_tol = 1e-7;

    // V and Q radial in y'' around y0'': the translational volume side
    // vanishes by parity
    const auto pot = builtin_potential(space, 0.4, -0.3, -0.2, 2.0);
    const auto rep = pohozaev_residual(spec, pot, 0.3, PohozaevIdentity::translational, 3, quad);
    CHECK(std::abs(rep.volume_lhs) < 1e-8);
    CHECK(std::abs(rep.predicted_rhs) < 1e-14);

    CHECK_THROWS_AS(pohozaev_residual(spec, pot, 0.15, PohozaevIdentity::translational, 3, quad),
                    RhoOutOfRangeError);
    CHECK_THROWS_AS(pohozaev_residual(spec, pot, 0.55, PohozaevIdentity::translational, 3, quad),
                    RhoOutOfRangeError);

    // radial identity against the leading-order mass prediction
    const auto rad = pohozaev_residual(spec, pot, 0.3, PohozaevIdentity::radial, 3, quad);
    CHECK(rad.volume_lhs == doctest::Approx(rad.predicted_rhs).epsilon(0.10));
}

TEST_CASE("translational residual decreases along a lambda sweep with a tilted Q") {
    const auto space = make_space_spec(6, 1);
    const auto regime = make_regime_case23(space, 0.5, 1.0, 0.05, 20.0);
    const auto cut = make_cutoff(1.0, Vec(3, 0.0), 0.1, 3);
    // grad Q = 0 at the configured center, but the cubic tilt breaks the
    // parity that would otherwise null the volume side identically
    const auto pot = builtin_potential(space, 0.0, -0.3, -0.2, 2.0, /*cubic_tilt=*/0.15);
    PairingQuadOptions quad;
    quad.rel_tol = 1e-7;
    double prev = 1e300;
    for (double lam : {30.0, 60.0, 120.0, 240.0}) {
        const auto cfg = make_config(space, 1.0, regime.h_of_lambda(lam), Vec(3, 0.0), 1, lam);
        const auto spec = make_ansatz(cfg, cut, true);
        const auto rep = pohozaev_residual(spec, pot, 0.3, PohozaevIdentity::translational, 3, quad);
        CHECK(std::abs(rep.volume_lhs) < prev);
        prev = std::abs(rep.volume_lhs);
    }
}
