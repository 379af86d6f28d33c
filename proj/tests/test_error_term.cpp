#include <cmath>

#include "doctest.h"
#include "polybubble/error_term.hpp"
#include "polybubble/rng.hpp"

using namespace polybubble;

namespace {

struct Setup {
    SpaceSpec space;
    RegimeParams regime;
    DoubleCircleConfig cfg;
    CutoffSpec cut;
    AnsatzSpec spec;
    PotentialModel pot;
};

Setup make_setup(int N, int m, double lambda, int k, double v0 = 0.4, double qr = -0.3, double qt = -0.2) {
    Setup s{make_space_spec(N, m), {}, {}, {}, {}, {}};
    s.regime = make_regime_case23(s.space, 0.5, 1.0, 0.05, 20.0);
    s.cfg = make_config(s.space, 1.0, s.regime.h_of_lambda(lambda), Vec(N - 3, 0.0), k, lambda);
    s.cut = make_cutoff(1.0, Vec(N - 3, 0.0), 0.1, 2 * m + 1);
    s.spec = make_ansatz(s.cfg, s.cut, true);
    s.pot = builtin_potential(s.space, v0, qr, qt, 2.0);
    return s;
}

Vec annulus_point(Rng& rng, int N, double r0, double lo, double hi) {
    const double srad = rng.uniform(lo, hi);
    Vec dirp = rng.unit_vector(N - 2);
    const Vec u = rng.unit_vector(3);
    const double r = r0 + srad * dirp[0];
    Vec y(N);
    for (int j = 0; j < 3; ++j) y[j] = r * u[j];
    for (int j = 3; j < N; ++j) y[j] = srad * dirp[j - 2];
    return y;
}

}  // namespace

TEST_CASE("error term reconstructs the defect through the independent jet path (m=1)") {
    auto s = make_setup(6, 1, 25.0, 2);
    const ErrorTerm term(s.spec, s.pot);
    Rng rng(101);
    int checked = 0;
    for (int t = 0; t < 20; ++t) {
        // half the points on the cutoff annulus, half scattered near centers
        Vec y = (t % 2 == 0) ? annulus_point(rng, 6, 1.0, 0.101, 0.199)
                             : annulus_point(rng, 6, 1.0, 0.001, 0.09);
        const double total = term.components(y).total();
        const double recon = term.residual_via_jets(y);
        const double scale = std::max(std::abs(recon), 1e-12);
        CHECK(std::abs(total - recon) <= 1e-6 * scale);
        ++checked;
    }
    CHECK(checked == 20);
}

TEST_CASE("error term reconstructs the defect through the independent jet path (m=2)") {
    auto s = make_setup(10, 2, 25.0, 1);
    const ErrorTerm term(s.spec, s.pot);
    Rng rng(102);
    for (int t = 0; t < 6; ++t) {
        Vec y = (t % 2 == 0) ? annulus_point(rng, 10, 1.0, 0.101, 0.199)
                             : annulus_point(rng, 10, 1.0, 0.001, 0.09);
        const double total = term.components(y).total();
        const double recon = term.residual_via_jets(y);
        const double scale = std::max(std::abs(recon), 1e-12);
        CHECK(std::abs(total - recon) <= 1e-6 * scale);
    }
}

TEST_CASE("cutoff commutator terms vanish where xi is flat") {
    auto s = make_setup(6, 1, 30.0, 2);
    const ErrorTerm term(s.spec, s.pot);
    Rng rng(103);
    for (int t = 0; t < 10; ++t) {
        const Vec y = annulus_point(rng, 6, 1.0, 0.0, 0.09);  // inside the xi == 1 ball
        const auto c = term.components(y);
        CHECK(c.I3 == 0.0);
        CHECK(c.I4 == 0.0);
        CHECK(c.I5 == 0.0);
    }
    const auto breakdown = assemble_error_term(s.spec, s.pot, {annulus_point(rng, 6, 1.0, 0.12, 0.18)});
    CHECK(breakdown.annulus_sampled);
    const auto interior = assemble_error_term(s.spec, s.pot, {annulus_point(rng, 6, 1.0, 0.0, 0.05)});
    CHECK(!interior.annulus_sampled);
}

TEST_CASE("I12 vanishes for Q == 1; interaction part bounded by the two-bubble envelope") {
    const auto space = make_space_spec(6, 1);
    const auto regime = make_regime_case23(space, 0.5, 1.0, 0.05, 20.0);
    const double lam = 40.0;
    const auto cfg = make_config(space, 1.0, regime.h_of_lambda(lam), Vec(3, 0.0), 1, lam);
    const auto cut = make_cutoff(1.0, Vec(3, 0.0), 0.1, 3);
    const auto spec = make_ansatz(cfg, cut, true);
    CylFunc vzero(0.0, {}, 1.0, Vec(3, 0.0));
    CylFunc qone(1.0, {}, 1.0, Vec(3, 0.0));
    const auto pot = make_potential_model(space, vzero, qone);
    const ErrorTerm term(spec, pot);
    const AnsatzField Z(spec);
    const auto& bubbles = Z.bubbles();
    Rng rng(104);
    for (int t = 0; t < 25; ++t) {
        // where xi == 1 and m* - 1 == 2, the nonlinear part is exactly the
        // cross term 2 U+ U-
        const Vec y = annulus_point(rng, 6, 1.0, 0.0, 0.099);
        const auto c = term.components(y);
        CHECK(c.I12 == 0.0);
        CHECK(c.I2 == 0.0);
        const double u1 = bubbles[0].value(y), u2 = bubbles[1].value(y);
        CHECK(c.I11 == doctest::Approx(2.0 * u1 * u2).epsilon(1e-11));
    }
}

TEST_CASE("I12 carries the potential deviation directly") {
    auto s = make_setup(6, 1, 30.0, 1, 0.0, -0.3, -0.2);
    const ErrorTerm term(s.spec, s.pot);
    const AnsatzField Z(s.spec);
    Rng rng(105);
    const double pexp = s.space.crit_exp.to_double() - 1.0;
    for (int t = 0; t < 15; ++t) {
        const Vec y = annulus_point(rng, 6, 1.0, 0.0, 0.18);
        const auto c = term.components(y);
        double expect = 0.0;
        const double xv = Z.cutoff().value(y);
        if (xv > 0.0) {
            double psum = 0.0;
            for (const auto& b : Z.bubbles()) psum += std::pow(b.value(y), pexp);
            expect = (s.pot.Q.value_point(y) - 1.0) * xv * psum;
        }
        CHECK(c.I12 == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("I12 vanishing order near the concentration point") {
    auto s = make_setup(6, 1, 50.0, 1, 0.0, -0.3, -0.2);
    const ErrorTerm term(s.spec, s.pot);
    const AnsatzField Z(s.spec);
    // |I12| / (dist^{2m} * cutoff power sum) stays bounded as dist -> 0
    double bound = 0.0;
    for (double srad : {0.08, 0.04, 0.02, 0.01, 0.005}) {
        Vec y(6, 0.0);
        y[0] = 1.0 + srad;
        const auto c = term.components(y);
        const double psum = Z.cutoff_power_sum(y);
        if (psum == 0.0) continue;
        const double ratio = std::abs(c.I12) / (srad * srad * psum);
        bound = std::max(bound, ratio);
        CHECK(ratio < 2.0);  // |Q-1| ~ (qr + o(1)) dist^2 here
    }
    CHECK(bound > 0.05);
}

TEST_CASE("defect inherits the configuration symmetries") {
    auto s = make_setup(6, 1, 30.0, 3);
    const ErrorTerm term(s.spec, s.pot);
    Rng rng(106);
    const double th = 2.0 * M_PI / 3.0;
    for (int t = 0; t < 10; ++t) {
        const Vec y = annulus_point(rng, 6, 1.0, 0.0, 0.18);
        Vec rot(6);
        rot[0] = std::cos(th) * y[0] - std::sin(th) * y[1];
        rot[1] = std::sin(th) * y[0] + std::cos(th) * y[1];
        for (int i = 2; i < 6; ++i) rot[i] = y[i];
        Vec refl = y;
        refl[1] = -refl[1];
        refl[2] = -refl[2];
        const double e0 = term.value(y);
        CHECK(term.value(rot) == doctest::Approx(e0).epsilon(1e-10));
        CHECK(term.value(refl) == doctest::Approx(e0).epsilon(1e-10));
    }
}

TEST_CASE("weighted norm: zero field, the weight itself, and a single bubble") {
    const auto space = make_space_spec(6, 1);
    const auto regime = make_regime_case1(space, Rational(1, 2), 1.0, 0.1, 10.0);

    std::vector<double> starts;
    for (double lam : {50.0, 100.0, 200.0, 400.0}) {
        const auto cfg = make_config(space, 1.0, regime.h_of_lambda(lam), Vec(3, 0.0), 2, lam);
        const auto cut = make_cutoff(1.0, Vec(3, 0.0), 0.1, 3);
        WeightedNorm norm;
        norm.kind = NormKind::star;
        norm.cfg = cfg;
        norm.regime = regime;
        const auto pts = norm_sample_points(cfg, cut, regime, 2000, 9 + static_cast<std::uint64_t>(lam));

        const auto zero = weighted_norm([](std::span<const double>) { return 0.0; }, norm, pts);
        CHECK(zero.value == 0.0);

        // f = lambda^{(N+2m)/2} * K(y) has double-star norm exactly 1
        WeightedNorm dnorm = norm;
        dnorm.kind = NormKind::double_star;
        const auto centers = generate_centers(cfg);
        const auto unit = weighted_norm(
            [&](std::span<const double> y) {
                return std::pow(lam, 4.0) * norm_weight(dnorm, y, centers);
            },
            dnorm, pts);
        CHECK(unit.value == doctest::Approx(1.0).epsilon(1e-12));

        const BubbleField b(space, centers[0], lam);
        const auto single = weighted_norm([&](std::span<const double> y) { return b.value(y); }, norm, pts);
        starts.push_back(single.value);
    }
    // star norm of one bubble is lambda-independent within sampling noise
    double lo = 1e300, hi = 0.0;
    for (double v : starts) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    CHECK(hi / lo < 1.6);
    CHECK(lo > 0.1);
}

TEST_CASE("quick error-norm scaling sweep decays") {
    const auto space = make_space_spec(6, 1);
    const auto pot = builtin_potential(space, 0.4, -0.3, -0.2, 2.0);
    const auto regime = make_regime_case1(space, Rational(1, 2), 1.0, 0.05, 20.0);
    const std::vector<int> ks{2, 3, 4};
    const auto res = error_scaling_fit(space, pot, regime, ks, 1.0, 1500, 77);
    CHECK(res.norms.size() == 3);
    for (double n : res.norms) CHECK(n > 0.0);
    CHECK(res.fit.exponent < -1.0);
}
