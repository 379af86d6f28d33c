#include <cmath>

#include "doctest.h"
#include "polybubble/fit.hpp"
#include "polybubble/lattice.hpp"

using namespace polybubble;

namespace {

// zeta-sum oracle for the same-circle prefactor: chords ~ arcs at large k
// gives A1 = 2 zeta(gamma) / (2 pi)^gamma
double zeta_partial(double s, int terms) {
    double z = 0.0;
    for (int n = terms; n >= 1; --n) z += std::pow(n, -s);
    return z;
}

}  // namespace

TEST_CASE("power-law fitting recovers synthetic exponents") {
    std::vector<double> x, y;
    for (int i = 0; i < 6; ++i) {
        x.push_back(std::pow(2.0, i));
        y.push_back(3.5 * std::pow(x.back(), -1.75));
    }
    const auto fit = fit_power_law(x, y);
    CHECK(fit.exponent == doctest::Approx(-1.75).epsilon(1e-12));
    CHECK(fit.coefficient == doctest::Approx(3.5).epsilon(1e-12));
    CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));

    const std::vector<double> p{1.0, 0.6, 0.45, 0.4};
    const auto rich = richardson_first_order(p);
    CHECK(rich.size() == 3);
    CHECK(rich[0] == doctest::Approx(0.2));
    CHECK(is_cauchy_with_ratio(p, 2.0));
    const std::vector<double> slow{1.0, 0.5, 0.2, 0.05};  // middle gap shrinks by < 2x
    CHECK(!is_cauchy_with_ratio(slow, 2.0));
}

TEST_CASE("same-circle sum at frozen values") {
    const auto space = make_space_spec(6, 1);
    // unit effective circle radius: r sqrt(1-h^2) = 1
    const double h = 0.6;
    const auto cfg = make_config(space, 1.0 / std::sqrt(1.0 - h * h), h, Vec(3, 0.0), 4, 1.0);
    CHECK(cfg.circle_radius() == doctest::Approx(1.0).epsilon(1e-14));
    const auto s = same_circle_sum(cfg, 1.0);
    CHECK(s.value == doctest::Approx(2.0 / std::sqrt(2.0) + 0.5).epsilon(1e-13));
    CHECK(s.regime_tag == SumRegime::crit1);

    const auto cfg2 = make_config(space, 1.3, 0.4, Vec(3, 0.0), 2, 1.0);
    for (double gamma : {0.5, 1.0, 2.5})
        CHECK(same_circle_sum(cfg2, gamma).value ==
              doctest::Approx(std::pow(2.0 * cfg2.circle_radius(), -gamma)).epsilon(1e-13));
}

TEST_CASE("cross-circle sum at frozen values") {
    const auto space = make_space_spec(6, 1);
    const auto cfg1 = make_config(space, 1.5, 0.3, Vec(3, 0.0), 1, 1.0);
    for (double gamma : {1.0, 4.0})
        CHECK(cross_circle_sum(cfg1, gamma).value ==
              doctest::Approx(std::pow(2.0 * 1.5 * 0.3, -gamma)).epsilon(1e-13));

    // independent reimplementation via explicit centers
    const auto cfg3 = make_config(space, 1.0, 0.5, Vec(3, 0.0), 3, 1.0);
    const auto centers = generate_centers(cfg3);
    double expect = 0.0;
    for (int j = 0; j < 3; ++j) expect += std::pow(dist(centers[3 + j], centers[0]), -2.0);
    CHECK(cross_circle_sum(cfg3, 2.0).value == doctest::Approx(expect).epsilon(1e-13));
    CHECK(expect == doctest::Approx(1.0 + 2.0 / 3.25).epsilon(1e-13));
}

TEST_CASE("cross sum dominated by same-circle sum plus the vertical pair") {
    const auto space = make_space_spec(6, 1);
    for (double h : {0.2, 0.5, 0.8}) {
        const auto cfg = make_config(space, 1.0, h, Vec(3, 0.0), 64, 1.0);
        const double gamma = 4.0;
        const double cross = cross_circle_sum(cfg, gamma).value;
        const double same = same_circle_sum(cfg, gamma).value;
        const double vertical = std::pow(2.0 * cfg.r * h, -gamma);
        CHECK(cross <= same + 1.001 * vertical);
    }
}

TEST_CASE("sums do not depend on the y'' shift") {
    const auto space = make_space_spec(7, 1);
    const auto a = make_config(space, 1.0, 0.5, Vec(4, 0.0), 12, 1.0);
    const auto b = make_config(space, 1.0, 0.5, Vec{1.0, -2.0, 0.5, 3.0}, 12, 1.0);
    CHECK(same_circle_sum(a, 2.3).value == doctest::Approx(same_circle_sum(b, 2.3).value).epsilon(1e-15));
    CHECK(cross_circle_sum(a, 2.3).value == doctest::Approx(cross_circle_sum(b, 2.3).value).epsilon(1e-15));
}

TEST_CASE("three growth branches of the same-circle sum") {
    const auto space = make_space_spec(6, 1);
    const double h = 0.5;
    const std::vector<int> ks{64, 128, 256, 512, 1024, 2048, 4096};
    const double R = std::sqrt(1.0 - h * h);

    // gamma > 1: sum * R^gamma / k^gamma converges
    {
        std::vector<double> pref;
        for (int k : ks) {
            const auto cfg = make_config(space, 1.0, h, Vec(3, 0.0), k, 1.0);
            pref.push_back(same_circle_sum(cfg, 4.0).value * std::pow(R, 4.0) / std::pow(k, 4.0));
        }
        const auto d = successive_diffs(pref);
        CHECK(d.back() < 0.02 * pref.back());
        CHECK(is_cauchy_with_ratio(pref, 1.9));
    }
    // gamma = 1: sum / (k log k) stabilizes
    {
        std::vector<double> pref;
        for (int k : ks) {
            const auto cfg = make_config(space, 1.0, h, Vec(3, 0.0), k, 1.0);
            pref.push_back(same_circle_sum(cfg, 1.0).value * R / (k * std::log(static_cast<double>(k))));
        }
        CHECK(std::abs(pref.back() - pref[pref.size() - 2]) < 0.05 * pref.back());
    }
    // gamma < 1: sum * R^gamma / k converges
    {
        std::vector<double> pref;
        for (int k : ks) {
            const auto cfg = make_config(space, 1.0, h, Vec(3, 0.0), k, 1.0);
            pref.push_back(same_circle_sum(cfg, 0.5).value * std::pow(R, 0.5) / k);
        }
        const auto d = successive_diffs(pref);
        CHECK(d.back() < 0.02 * pref.back());
    }
}

TEST_CASE("A-constant fits: growth exponent, Richardson convergence, zeta oracle") {
    const auto space = make_space_spec(6, 1);
    const std::vector<int> ks{64, 128, 256, 512, 1024, 2048, 4096};
    const auto rep = fit_A_constants(space, ks, [](int) { return 0.5; });

    CHECK(rep.a1_growth_fit.exponent == doctest::Approx(4.0).epsilon(0.02));
    CHECK(is_cauchy_with_ratio(rep.a1_prefactor, 2.0));

    const double zeta_oracle = 2.0 * zeta_partial(4.0, 200000) / std::pow(2.0 * M_PI, 4.0);
    CHECK(rep.a1_estimate == doctest::Approx(zeta_oracle).epsilon(1e-4));

    // A2 branch with h k -> infinity: prefactors settle
    const auto rep2 = fit_A_constants(space, ks, [](int k) { return 4.0 / std::sqrt(static_cast<double>(k)); });
    const auto d2 = successive_diffs(rep2.a2_prefactor);
    CHECK(d2.back() < 0.05 * std::abs(rep2.a2_prefactor.back()));

    // schedule violation: 1/(h k) must decrease
    CHECK_THROWS_AS(fit_A_constants(space, ks, [](int k) { return 0.5 / static_cast<double>(k); }),
                    ScheduleMismatchError);
}

TEST_CASE("h k = const branch stays inside a positive bracket") {
    const auto space = make_space_spec(6, 1);
    const std::vector<int> ks{64, 128, 256, 512, 1024};
    const auto br = cross_sum_bracket(space, ks, 8.0);
    CHECK(br.lo > 0.0);
    CHECK(br.hi >= br.lo);
    CHECK(br.hi < 10.0 * br.lo);
}

TEST_CASE("pairwise interaction inequality") {
    const int N = 6;
    Vec xi(N, 0.0), xj(N, 0.0);
    xj[0] = 1.0;

    // midpoint closed form for kappa1 = kappa2 = sigma = kappa
    const double kappa = 2.0;
    Vec mid(N, 0.0);
    mid[0] = 0.5;
    const double d = 1.0;
    const double lhs = std::pow(1.0 + 0.5, -kappa) * std::pow(1.0 + 0.5, -kappa) * std::pow(d, kappa);
    const double rhs = 2.0 * std::pow(1.0 + 0.5, -kappa);
    CHECK(lhs / rhs == doctest::Approx(std::pow(2.0 * d / (2.0 + d), kappa) / 2.0).epsilon(1e-12));

    // scale sweep: the max ratio stays finite and saturates as the
    // separation doubles (the inequality's constant is scale-uniform)
    std::vector<double> ratios;
    for (int dbl = 0; dbl < 6; ++dbl) {
        Vec far = xj;
        far[0] = std::pow(2.0, dbl);
        ratios.push_back(interaction_inequality_check(xi, far, 3.0, 2.0, 1.5, 4000, 31));
        CHECK(ratios.back() < 10.0);
    }
    const double last_growth = ratios.back() / ratios[ratios.size() - 2];
    CHECK(last_growth < 1.2);
}
