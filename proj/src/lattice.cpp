#include "polybubble/lattice.hpp"

#include <cmath>
#include <stdexcept>

#include "polybubble/reduce.hpp"
#include "polybubble/rng.hpp"

namespace polybubble {

namespace {

SumRegime tag_of(double gamma) {
    if (gamma > 1.0) return SumRegime::super1;
    if (gamma == 1.0) return SumRegime::crit1;
    return SumRegime::sub1;
}

}  // namespace

SumResult same_circle_sum(const DoubleCircleConfig& cfg, double gamma) {
    if (cfg.k < 2) throw std::invalid_argument("same_circle_sum: k must be >= 2");
    if (!(gamma > 0.0)) throw std::invalid_argument("same_circle_sum: gamma must be > 0");
    std::vector<double> terms(cfg.k - 1);
    for (int j = 2; j <= cfg.k; ++j) terms[j - 2] = std::pow(same_circle_distance(cfg, j), -gamma);
    return SumResult{pairwise_sum(terms), cfg.k, gamma, tag_of(gamma)};
}

SumResult cross_circle_sum(const DoubleCircleConfig& cfg, double gamma) {
    if (cfg.k < 1) throw std::invalid_argument("cross_circle_sum: k must be >= 1");
    if (!(gamma > 0.0)) throw std::invalid_argument("cross_circle_sum: gamma must be > 0");
    std::vector<double> terms(cfg.k);
    for (int j = 1; j <= cfg.k; ++j) terms[j - 1] = std::pow(cross_circle_distance(cfg, j), -gamma);
    return SumResult{pairwise_sum(terms), cfg.k, gamma, tag_of(gamma)};
}

AConstantsReport fit_A_constants(const SpaceSpec& space, std::span<const int> ks,
                                 const std::function<double(int)>& h_of_k, double r) {
    if (ks.size() < 3) throw std::invalid_argument("fit_A_constants: need >= 3 grid points");
    const int gamma = space.dim - 2 * space.order;
    AConstantsReport rep;
    rep.ks.assign(ks.begin(), ks.end());

    double prev_hk_inv = -1.0;
    std::vector<double> kvals, same_raw;
    for (int k : ks) {
        const double h = h_of_k(k);
        if (!(h > 0.0 && h < 1.0)) throw std::invalid_argument("fit_A_constants: h schedule out of (0,1)");
        const double hk_inv = 1.0 / (h * static_cast<double>(k));
        if (prev_hk_inv >= 0.0 && hk_inv >= prev_hk_inv)
            throw ScheduleMismatchError("fit_A_constants: 1/(h k) must decrease along the grid");
        prev_hk_inv = hk_inv;

        const auto cfg = make_config(space, r, h, Vec(space.dim - 3, 0.0), k, 1.0);
        const double same = same_circle_sum(cfg, gamma).value;
        const double cross = cross_circle_sum(cfg, gamma).value;
        const double root = std::sqrt(1.0 - h * h);
        rep.a1_prefactor.push_back(same * std::pow(r * root, gamma) / std::pow(static_cast<double>(k), gamma));
        rep.a2_prefactor.push_back(cross * std::pow(h, gamma - 1) * root / static_cast<double>(k));
        kvals.push_back(static_cast<double>(k));
        same_raw.push_back(same);
    }
    rep.a1_growth_fit = fit_power_law(kvals, same_raw);
    rep.a1_richardson = richardson_first_order(rep.a1_prefactor);
    rep.a2_richardson = richardson_first_order(rep.a2_prefactor);
    rep.a1_estimate = rep.a1_richardson.back();
    rep.a2_estimate = rep.a2_richardson.back();
    return rep;
}

CrossBracket cross_sum_bracket(const SpaceSpec& space, std::span<const int> ks, double hk_product, double r) {
    const int gamma = space.dim - 2 * space.order;
    CrossBracket b;
    bool first = true;
    for (int k : ks) {
        const double h = hk_product / static_cast<double>(k);
        if (!(h > 0.0 && h < 1.0)) throw std::invalid_argument("cross_sum_bracket: h = c/k out of (0,1)");
        const auto cfg = make_config(space, r, h, Vec(space.dim - 3, 0.0), k, 1.0);
        const double v = cross_circle_sum(cfg, gamma).value * std::pow(h, gamma - 1) / static_cast<double>(k);
        if (first) {
            b.lo = b.hi = v;
            first = false;
        } else {
            b.lo = std::min(b.lo, v);
            b.hi = std::max(b.hi, v);
        }
    }
    return b;
}

double interaction_inequality_check(const Vec& xi, const Vec& xj, double kappa1, double kappa2, double sigma,
                                    int samples, std::uint64_t seed) {
    if (!(kappa1 >= 1.0 && kappa2 >= 1.0)) throw std::invalid_argument("interaction check: kappa must be >= 1");
    if (!(sigma > 0.0 && sigma <= std::min(kappa1, kappa2)))
        throw std::invalid_argument("interaction check: need 0 < sigma <= min(kappa1, kappa2)");
    const int N = static_cast<int>(xi.size());
    const double d = dist(xi, xj);
    if (!(d > 0.0)) throw std::invalid_argument("interaction check: coincident centers");
    Rng rng(seed);
    double max_ratio = 0.0;
    Vec y(N);
    for (int s = 0; s < samples; ++s) {
        // mix of scales: near either center, along the segment, and far out
        const int mode = s % 4;
        const double scale = d * std::pow(2.0, rng.uniform(-4.0, 4.0));
        const Vec dir = rng.unit_vector(N);
        for (int i = 0; i < N; ++i) {
            switch (mode) {
                case 0: y[i] = xi[i] + scale * dir[i]; break;
                case 1: y[i] = xj[i] + scale * dir[i]; break;
                case 2: y[i] = 0.5 * (xi[i] + xj[i]) + 0.3 * d * dir[i]; break;
                default: y[i] = xi[i] + (xj[i] - xi[i]) * rng.uniform() + 0.05 * d * dir[i];
            }
        }
        const double di = dist(y, xi), dj = dist(y, xj);
        const double lhs = std::pow(1.0 + di, -kappa1) * std::pow(1.0 + dj, -kappa2) * std::pow(d, sigma);
        const double rhs = std::pow(1.0 + di, -(kappa1 + kappa2 - sigma)) + std::pow(1.0 + dj, -(kappa1 + kappa2 - sigma));
        max_ratio = std::max(max_ratio, lhs / rhs);
    }
    return max_ratio;
}

}  // namespace polybubble
