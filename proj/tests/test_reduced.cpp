#include <cmath>

#include "doctest.h"
#include "polybubble/moments.hpp"
#include "polybubble/reduced.hpp"

using namespace polybubble;

TEST_CASE("moment constants: V-only, Q-only, and the sign condition") {
    const auto space = make_space_spec(6, 1);

    // V = v0 near the point, Q == 1: B1_tilde = B1 v0
    const auto pot_v = builtin_potential(space, 0.7, 0.0, 0.0, 2.0);
    const auto mc_v = moment_constants(space, pot_v);
    CHECK(mc_v.B1 == doctest::Approx(1.0 * bubble_mass_l2(space)).epsilon(1e-13));
    CHECK(mc_v.B2 == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(mc_v.B1_tilde == doctest::Approx(mc_v.B1 * 0.7).epsilon(1e-12));

    // concave Q deviation with V = 0 keeps the sign condition
    const auto pot_q = builtin_potential(space, 0.0, -0.5, -0.25, 2.0);
    const auto mc_q = moment_constants(space, pot_q);
    std::vector<int> a2(6, 0);
    a2[0] = 2;
    const double M2 = bubble_moment_crit(space, a2);
    const double expect = -(1.0 / 3.0) * (2.0 * (-0.5) + 6.0 * (-0.25)) * M2;
    CHECK(mc_q.B1_tilde == doctest::Approx(expect).epsilon(1e-11));
    CHECK(mc_q.B1_tilde > 0.0);

    // convex deviation flips the sign and is refused
    const auto pot_bad = builtin_potential(space, 0.0, +0.5, +0.25, 2.0);
    CHECK_THROWS_AS(moment_constants(space, pot_bad), SignConditionError);
    CHECK(moment_constants(space, pot_bad, true).B1_tilde < 0.0);
}

TEST_CASE("moment constants for the fourth-order case") {
    const auto space = make_space_spec(10, 2);
    const auto pot = builtin_potential(space, 0.3, -0.2, -0.1, 2.0);
    const auto mc = moment_constants(space, pot);
    CHECK(mc.B1 == doctest::Approx(2.0 * bubble_mass_l2(space)).epsilon(1e-13));
    CHECK(mc.B2 == doctest::Approx(1.0 / (6.0 * 10.0 / 3.0)).epsilon(1e-13));
    CHECK(mc.B1_tilde > 0.0);
}

TEST_CASE("potential pairing integral approaches -2k B1_tilde / lambda^{2m+1}") {
    const auto space = make_space_spec(6, 1);
    const auto pot = builtin_potential(space, 0.5, -0.3, -0.2, 2.0);
    const auto mc = moment_constants(space, pot);
    const auto regime = make_regime_case23(space, 0.5, 1.0, 0.05, 20.0);
    PairingQuadOptions quad;
    quad.rel_tol = 1e-8;
    for (double lam : {60.0, 120.0}) {
        const auto cfg = make_config(space, 1.0, regime.h_of_lambda(lam), Vec(3, 0.0), 1, lam);
        const double part = pairing_potential_integral(pot, cfg, quad);
        const double predicted = -2.0 * mc.B1_tilde / std::pow(lam, 3.0);
        CHECK(part / 2.0 == doctest::Approx(predicted / 2.0).epsilon(5.0 / lam));
    }
}

TEST_CASE("pairing sweep recovers the exponent and the analytic constant") {
    const auto space = make_space_spec(6, 1);
    const auto pot = builtin_potential(space, 0.5, -0.3, -0.2, 2.0);
    const auto regime = make_regime_case23(space, 0.5, 1.0, 0.05, 20.0);
    PairingSweepOptions opt;
    opt.lambda0 = 60.0;
    opt.n_lambda = 4;
    opt.include_interaction = false;
    opt.quad.rel_tol = 1e-8;
    const auto exp_fit = pairing_sweep(space, pot, regime, {}, opt);
    CHECK(exp_fit.potential_fit.exponent == doctest::Approx(-3.0).epsilon(0.05));
    CHECK(exp_fit.B1_tilde_fit == doctest::Approx(exp_fit.B1_tilde_analytic).epsilon(0.10));
}

TEST_CASE("interaction pairing has the predicted sign and k-scaling shape") {
    const auto space = make_space_spec(6, 1);
    const auto regime = make_regime_case23(space, 0.5, 1.0, 0.05, 20.0);
    PairingQuadOptions quad;
    quad.rel_tol = 1e-7;
    const double t = 0.3;
    double prev_scaled = 0.0;
    for (int k : {4, 8}) {
        const double lam = regime.lambda_of_k(t, k);
        const auto cfg = make_config(space, 1.0, regime.h_of_lambda(lam), Vec(3, 0.0), k, lam);
        const double inter = pairing_interaction_integral(cfg, quad);
        CHECK(inter > 0.0);  // enters the expansion with a positive coefficient
        const double R = cfg.circle_radius();
        const double model = std::pow(static_cast<double>(k), 4.0) / (std::pow(lam, 5.0) * std::pow(R, 4.0));
        const double scaled = inter / (2.0 * k) / model;
        if (prev_scaled != 0.0) CHECK(scaled == doctest::Approx(prev_scaled).epsilon(0.35));
        prev_scaled = scaled;
    }
}

TEST_CASE("pairing sweep rejects sweeps that cannot separate the interaction basis") {
    const auto space = make_space_spec(6, 1);
    const auto pot = builtin_potential(space, 0.5, -0.3, -0.2, 2.0);
    const auto regime = make_regime_case23(space, 0.5, 1.0, 0.05, 20.0);
    PairingSweepOptions opt;
    opt.lambda0 = 50.0;
    opt.n_lambda = 2;
    opt.quad.rel_tol = 1e-6;
    const std::vector<int> one_k{4, 4};  // duplicated row: rank-1 design
    CHECK_THROWS_AS(pairing_sweep(space, pot, regime, one_k, opt), IllConditionedFitError);
}

TEST_CASE("mass formulas: h = 0, h = 1, and an r-linear weight") {
    const auto space = make_space_spec(6, 1);
    const auto regime = make_regime_case23(space, 0.5, 1.0, 0.05, 20.0);
    const double lam = 60.0;
    const auto cfg = make_config(space, 1.0, regime.h_of_lambda(lam), Vec(3, 0.0), 1, lam);
    const auto cut = make_cutoff(1.0, Vec(3, 0.0), 0.1, 3);
    const auto spec = make_ansatz(cfg, cut, true);
    PairingQuadOptions quad;
    quad.rel_tol = 1e-7;

    const CylFunc zero(0.0, {}, 1.0, Vec(3, 0.0));
    const auto z = mass_leading_order(spec, zero, 0.3, quad);
    CHECK(z.lhs_sq == 0.0);
    CHECK(z.pred_sq == 0.0);

    const CylFunc one(1.0, {}, 1.0, Vec(3, 0.0));
    const auto o = mass_leading_order(spec, one, 0.3, quad);
    CHECK(o.lhs_sq == doctest::Approx(o.pred_sq).epsilon(0.02));
    CHECK(o.lhs_crit == doctest::Approx(o.pred_crit).epsilon(0.02));
    CHECK(o.lhs_sq < o.pred_sq);  // domain truncation only removes mass

    // h linear in r: base + (r - r0)
    const CylFunc lin(1.0, {{1.0, 1, 0, 0}}, 1.0, Vec(3, 0.0));
    const auto l = mass_leading_order(spec, lin, 0.3, quad);
    CHECK(l.lhs_crit == doctest::Approx(l.pred_crit).epsilon(0.05));
}

TEST_CASE("mass formula deviation halves with each lambda doubling") {
    const auto space = make_space_spec(6, 1);
    const auto regime = make_regime_case23(space, 0.5, 1.0, 0.05, 20.0);
    const auto cut = make_cutoff(1.0, Vec(3, 0.0), 0.1, 3);
    const CylFunc one(1.0, {}, 1.0, Vec(3, 0.0));
    PairingQuadOptions quad;
    quad.rel_tol = 1e-8;
    double prev_dev = 1e300;
    for (double lam : {30.0, 60.0, 120.0}) {
        const auto cfg = make_config(space, 1.0, regime.h_of_lambda(lam), Vec(3, 0.0), 1, lam);
        const auto spec = make_ansatz(cfg, cut, true);
        const auto c = mass_leading_order(spec, one, 0.3, quad);
        const double dev = std::abs(c.lhs_sq / c.pred_sq - 1.0);
        CHECK(dev < prev_dev / 2.0);
        prev_dev = dev;
    }
}

TEST_CASE("critical point search and the index certificate") {
    const auto space = make_space_spec(6, 1);
    const auto pot = builtin_potential(space, 0.4, -0.3, -0.2, 2.0);
    // converges back to (r0, y0'') from perturbed starts
    for (int trial = 0; trial < 10; ++trial) {
        Vec start{1.0 + 0.02 * std::cos(trial * 1.7), 0.01 * std::sin(trial * 2.3),
                  0.015 * std::cos(trial * 0.9), -0.01 * std::sin(trial * 1.1)};
        const Vec z = find_critical_point(pot, start);
        CHECK(std::abs(z[0] - 1.0) < 1e-9);
        for (int i = 1; i < 4; ++i) CHECK(std::abs(z[i]) < 1e-9);
    }
    CHECK(critical_point_index_sign(pot, 1e-3, 64, 5) == -1);  // local max of Q

    // a saddle-type Q fails the certificate
    const CylFunc vconst(0.0, {{0.4, 0, 0, 0}}, 1.0, Vec(3, 0.0), 2.0);
    const CylFunc qsaddle(1.0, {{-0.3, 2, 0, 0}, {0.2, 0, 1, 0}}, 1.0, Vec(3, 0.0), 2.0);
    const auto pot_saddle = make_potential_model(space, vconst, qsaddle);
    CHECK_THROWS_AS(critical_point_index_sign(pot_saddle, 1e-3, 64, 5), IndexZeroError);
}

TEST_CASE("balance closed form in the bounded-height case") {
    const auto space = make_space_spec(6, 1);
    const double A = 0.5;
    // -1/t^3 + c/t^5 = 0 with c = (1-A^2)^{-2}: t = (1-A^2)^{-1/... }
    const double expect = std::pow(1.0 - A * A, -(6.0 - 2.0) / (2.0 * (6.0 - 4.0)));
    CHECK(balance_case2_closed_form(space, 1.0, 1.0, A) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("solve_balance: root consistency and brackets") {
    const auto space = make_space_spec(6, 1);
    const auto pot = builtin_potential(space, 0.4, -0.3, -0.2, 2.0);
    const auto regime = make_regime_case23(space, 0.5, 1.0, 0.01, 50.0);
    BalanceOptions opt;
    opt.B3_tilde = 1.0;
    opt.B4_tilde = 1.0;
    const auto sol = solve_balance(space, pot, regime, 64, opt);
    CHECK(sol.t >= 0.01);
    CHECK(sol.t <= 50.0);
    CHECK(sol.residuals[0] < 1e-10);
    CHECK(sol.residuals[1] < 1e-10);
    CHECK(sol.residuals[2] < 1e-8);

    // a bracket fully beyond the root has no sign change
    const auto tight = make_regime_case23(space, 0.5, 1.0, 1e3, 2e3);
    CHECK_THROWS_AS(solve_balance(space, pot, tight, 64, opt), NoRootInBracketError);
}

TEST_CASE("scaling law of the solved lambda against k") {
    const auto space = make_space_spec(6, 1);
    const auto pot = builtin_potential(space, 0.4, -0.3, -0.2, 2.0);
    BalanceOptions opt;
    opt.B3_tilde = 2.0;
    opt.B4_tilde = 1.0;

    for (const bool case1 : {false, true}) {
        const RegimeParams regime = case1 ? make_regime_case1(space, Rational(1, 2), 1.0, 1e-4, 1e4)
                                          : make_regime_case23(space, 0.5, 1.0, 1e-4, 1e4);
        std::vector<double> ks, lams;
        for (int k : {64, 128, 256, 512, 1024}) {
            const auto sol = solve_balance(space, pot, regime, k, opt);
            ks.push_back(k);
            lams.push_back(sol.lambda);
        }
        const auto fit = fit_power_law(ks, lams);
        const double expect = regime.lambda_exponent().to_double();
        CHECK(fit.exponent == doctest::Approx(expect).epsilon(0.03));
    }
}

TEST_CASE("case 3 dominance ordering holds symbolically") {
    for (const auto& [N, m] : {std::pair{6, 1}, {7, 1}, {10, 2}, {11, 2}, {14, 3}}) {
        const auto space = make_space_spec(N, m);
        const Rational lead(2 * m + 1);
        const Rational inter(N - 2 * m + 1);
        const Rational cross = Rational(2 * m + 1) + Rational(N - 4 * m, N - 2 * m);
        CHECK(inter > lead);
        CHECK(cross > lead);
        (void)space;
    }
}

TEST_CASE("model-layer rescaling: potentials scaled by s move t by s^{-1/(N-4m)}") {
    const auto space = make_space_spec(6, 1);
    const double s = 3.0;
    const double t1 = balance_case2_closed_form(space, 1.0, 1.0, 0.3);
    const double t2 = balance_case2_closed_form(space, s * 1.0, 1.0, 0.3);
    CHECK(t2 == doctest::Approx(t1 * std::pow(s, -1.0 / (6 - 4))).epsilon(1e-12));
}
