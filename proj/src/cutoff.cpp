#include "polybubble/cutoff.hpp"

#include <cmath>
#include <stdexcept>

namespace polybubble {

namespace {

double binom(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// generalized smoothstep S_n: [0,1] -> [0,1] with n vanishing derivatives
// at both endpoints; degree 2n+1 polynomial in t
std::vector<double> smoothstep_coeffs(int n) {
    std::vector<double> c(2 * n + 2, 0.0);
    for (int k = 0; k <= n; ++k) {
        const double v = binom(n + k, k) * binom(2 * n + 1, n - k) * ((k % 2 == 0) ? 1.0 : -1.0);
        c[n + 1 + k] = v;
    }
    return c;
}

}  // namespace

CutoffSpec make_cutoff(double r0, const Vec& y0pp, double delta, int smooth_order, CutoffKind kind) {
    if (!(r0 > 0.0)) throw std::invalid_argument("make_cutoff: r0 must be > 0");
    if (!(delta > 0.0)) throw std::invalid_argument("make_cutoff: delta must be > 0");
    if (smooth_order < 1) throw std::invalid_argument("make_cutoff: smooth_order must be >= 1");
    CutoffSpec s;
    s.r0 = r0;
    s.y0pp = y0pp;
    s.delta = delta;
    s.smooth_order = smooth_order;
    s.kind = kind;
    return s;
}

CutoffField::CutoffField(const SpaceSpec& space, CutoffSpec spec) : space_(space), spec_(std::move(spec)) {
    if (static_cast<int>(spec_.y0pp.size()) != space_.dim - 3)
        throw std::invalid_argument("CutoffField: y0pp must have dimension N-3");
    if (spec_.smooth_order < 2 * space_.order + 1)
        throw std::invalid_argument("CutoffField: smooth_order must be >= 2m+1");
    step_coeffs_ = smoothstep_coeffs(spec_.smooth_order);
}

double CutoffField::profile_arg(std::span<const double> y) const {
    const double r = std::sqrt(y[0] * y[0] + y[1] * y[1] + y[2] * y[2]);
    double s2 = (r - spec_.r0) * (r - spec_.r0);
    for (std::size_t i = 3; i < y.size(); ++i) {
        const double d = y[i] - spec_.y0pp[i - 3];
        s2 += d * d;
    }
    return std::sqrt(s2);
}

double CutoffField::profile(double s) const {
    if (s <= spec_.delta) return 1.0;
    if (s >= 2.0 * spec_.delta) return 0.0;
    const double t = (s - spec_.delta) / spec_.delta;
    if (spec_.kind == CutoffKind::SmoothBump) {
        // exp-based partition of unity on (0,1)
        const double a = std::exp(-1.0 / t);
        const double b = std::exp(-1.0 / (1.0 - t));
        return b / (a + b);
    }
    double step = 0.0;
    for (int p = static_cast<int>(step_coeffs_.size()) - 1; p >= 0; --p) step = step * t + step_coeffs_[p];
    return 1.0 - step;
}

std::vector<double> CutoffField::profile_derivs(double s, int K) const {
    std::vector<double> out(K + 1, 0.0);
    if (s <= spec_.delta || s >= 2.0 * spec_.delta) {
        out[0] = (s <= spec_.delta) ? 1.0 : 0.0;
        return out;
    }
    const double t = (s - spec_.delta) / spec_.delta;
    if (spec_.kind == CutoffKind::SmoothBump) {
        // derivatives via a 1-d jet of the bump composition
        auto sp = JetSpace::make(1, K);
        Jet tj = Jet::variable(sp, 0, t);
        Jet a = ((tj.rpow(-1.0)) * -1.0).exp();
        Jet one_minus = (-tj) + 1.0;
        Jet b = ((one_minus.rpow(-1.0)) * -1.0).exp();
        Jet val = b * (a + b).rpow(-1.0);
        double dsdt = 1.0;
        for (int j = 0; j <= K; ++j) {
            std::vector<int> beta{j};
            out[j] = val.deriv(beta) / dsdt;
            dsdt *= spec_.delta;
        }
        return out;
    }
    // polynomial: evaluate derivative polynomials directly
    std::vector<double> poly = step_coeffs_;
    double scale = 1.0;
    for (int j = 0; j <= K; ++j) {
        double v = 0.0;
        for (int p = static_cast<int>(poly.size()) - 1; p >= 0; --p) v = v * t + poly[p];
        out[j] = (j == 0 ? 1.0 - v : -v / scale);
        // differentiate poly in t
        for (std::size_t p = 0; p + 1 < poly.size(); ++p) poly[p] = poly[p + 1] * static_cast<double>(p + 1);
        if (!poly.empty()) poly.back() = 0.0;
        scale *= spec_.delta;
    }
    return out;
}

double CutoffField::value(std::span<const double> y) const { return profile(profile_arg(y)); }

Vec CutoffField::grad(std::span<const double> y) const {
    const int N = space_.dim;
    Vec g(N, 0.0);
    const double s = profile_arg(y);
    if (s <= spec_.delta || s >= 2.0 * spec_.delta) return g;
    const auto d = profile_derivs(s, 1);
    const double r = std::sqrt(y[0] * y[0] + y[1] * y[1] + y[2] * y[2]);
    const double dr = (r - spec_.r0) / s;
    for (int i = 0; i < 3; ++i) g[i] = d[1] * dr * y[i] / r;
    for (int i = 3; i < N; ++i) g[i] = d[1] * (y[i] - spec_.y0pp[i - 3]) / s;
    return g;
}

double CutoffField::laplacian(std::span<const double> y) const {
    const int N = space_.dim;
    const double s = profile_arg(y);
    if (s <= spec_.delta || s >= 2.0 * spec_.delta) return 0.0;
    const auto d = profile_derivs(s, 2);
    const double r = std::sqrt(y[0] * y[0] + y[1] * y[1] + y[2] * y[2]);
    // Delta_y g(s(r,y'')) = g'' + g' [ (N-3)/s + 2 (r-r0)/(r s) ]
    return d[2] + d[1] * ((N - 3) / s + 2.0 * (r - spec_.r0) / (r * s));
}

Jet CutoffField::jet(const std::shared_ptr<const JetSpace>& sp, std::span<const double> y) const {
    const int N = space_.dim;
    if (sp->nvars() != N) throw std::invalid_argument("CutoffField::jet: dimension mismatch");
    const double s0 = profile_arg(y);
    const int K = sp->order();
    // constant regions: all derivatives vanish
    if (s0 < spec_.delta || s0 > 2.0 * spec_.delta) {
        return Jet::constant(sp, s0 < spec_.delta ? 1.0 : 0.0);
    }
    Jet q = Jet::constant(sp, 0.0);
    for (int i = 0; i < 3; ++i) {
        Jet v = Jet::variable(sp, i, y[i]);
        q += v * v;
    }
    Jet r = q.sqrt();
    Jet dr = r + (-spec_.r0);
    Jet s2 = dr * dr;
    for (int i = 3; i < N; ++i) {
        Jet v = Jet::variable(sp, i, y[i]) + (-spec_.y0pp[i - 3]);
        s2 += v * v;
    }
    Jet s = s2.sqrt();
    const auto derivs = profile_derivs(s0, K);
    return s.compose(derivs);
}

}  // namespace polybubble
