#include "polybubble/core.hpp"

#include <cmath>

namespace polybubble {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double dist(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

double RegimeParams::lambda_of_k(double t, int k) const {
    return t * std::pow(static_cast<double>(k), lambda_exponent().to_double());
}

double RegimeParams::h_of_lambda(double lambda) const {
    if (case_id == RegimeCase::Case1) {
        const double s = M1 * std::pow(lambda, -beta1.to_double());
        if (s >= 1.0) throw std::domain_error("RegimeParams: lambda too small for Case1 scaling");
        return std::sqrt(1.0 - s * s);
    }
    return a + M2 * std::pow(lambda, -beta2.to_double());
}

double RegimeParams::dh_dlambda(double lambda) const {
    if (case_id == RegimeCase::Case1) {
        const double b1 = beta1.to_double();
        const double s = M1 * std::pow(lambda, -b1);
        const double h = std::sqrt(1.0 - s * s);
        // h' = beta1 * s^2 / (lambda * h)
        return b1 * s * s / (lambda * h);
    }
    const double b2 = beta2.to_double();
    return -b2 * M2 * std::pow(lambda, -b2 - 1.0);
}

RegimeParams make_regime_case1(const SpaceSpec& space, const Rational& iota, double M1, double L0, double L1,
                               double vartheta) {
    if (!(iota > Rational(0))) throw std::invalid_argument("make_regime_case1: iota must be > 0");
    if (!(0 < L0 && L0 < L1)) throw std::invalid_argument("make_regime: require 0 < L0 < L1");
    const int N = space.dim, m = space.order;
    RegimeParams r;
    r.case_id = RegimeCase::Case1;
    r.space = space;
    r.iota = iota;
    r.nu = Rational(N - 4 * m) - iota;
    r.tau = iota / (Rational(2 * m) + iota);  // (N-4m-nu)/(N-2m-nu)
    r.beta1 = r.nu / Rational(N - 2 * m);
    r.beta2 = Rational(N - 4 * m, N - 2 * m);
    r.M1 = M1;
    r.L0 = L0;
    r.L1 = L1;
    r.vartheta = vartheta;
    if (!(r.beta1 > Rational(0) && r.beta1 < Rational(1)))
        throw std::invalid_argument("make_regime_case1: beta1 out of (0,1); iota too large");
    return r;
}

RegimeParams make_regime_case23(const SpaceSpec& space, double a, double M2, double L0, double L1, double vartheta) {
    if (!(a >= 0.0 && a < 1.0)) throw std::invalid_argument("make_regime_case23: a must lie in [0,1)");
    if (!(0 < L0 && L0 < L1)) throw std::invalid_argument("make_regime: require 0 < L0 < L1");
    const int N = space.dim, m = space.order;
    RegimeParams r;
    r.case_id = a > 0.0 ? RegimeCase::Case2 : RegimeCase::Case3;
    r.space = space;
    r.tau = Rational(N - 4 * m, N - 2 * m);
    r.beta1 = Rational(N - 4 * m, N - 2 * m);
    r.beta2 = r.beta1;
    r.a = a;
    r.M2 = M2;
    r.L0 = L0;
    r.L1 = L1;
    r.vartheta = vartheta;
    return r;
}

namespace {

DoubleCircleConfig make_config_impl(const SpaceSpec& space, double r, double h, const Vec& ypp, int k, double lambda,
                                    bool allow_endpoints) {
    if (space.dim < 6) throw std::invalid_argument("DoubleCircleConfig: space dimension too small");
    if (!(r > 0.0)) throw std::invalid_argument("DoubleCircleConfig: r must be > 0");
    if (allow_endpoints) {
        if (!(h >= 0.0 && h <= 1.0)) throw std::invalid_argument("DoubleCircleConfig: h must lie in [0,1]");
    } else {
        if (!(h > 0.0 && h < 1.0)) throw std::invalid_argument("DoubleCircleConfig: h must lie strictly in (0,1)");
    }
    if (k < 1) throw std::invalid_argument("DoubleCircleConfig: k must be >= 1");
    if (!(lambda > 0.0)) throw std::invalid_argument("DoubleCircleConfig: lambda must be > 0");
    if (static_cast<int>(ypp.size()) != space.dim - 3)
        throw std::invalid_argument("DoubleCircleConfig: ypp must have dimension N-3");
    DoubleCircleConfig cfg;
    cfg.space = space;
    cfg.r = r;
    cfg.h = h;
    cfg.ypp = ypp;
    cfg.k = k;
    cfg.lambda = lambda;
    return cfg;
}

}  // namespace

DoubleCircleConfig make_config(const SpaceSpec& space, double r, double h, const Vec& ypp, int k, double lambda) {
    return make_config_impl(space, r, h, ypp, k, lambda, false);
}

DoubleCircleConfig make_config_for_testing(const SpaceSpec& space, double r, double h, const Vec& ypp, int k,
                                           double lambda) {
    return make_config_impl(space, r, h, ypp, k, lambda, true);
}

std::vector<Vec> generate_centers(const DoubleCircleConfig& cfg) {
    const int N = cfg.space.dim;
    const double rho = cfg.circle_radius();
    const double z = cfg.height();
    std::vector<Vec> centers;
    centers.reserve(2 * cfg.k);
    for (int sign = 0; sign < 2; ++sign) {
        for (int j = 1; j <= cfg.k; ++j) {
            const double theta = 2.0 * M_PI * static_cast<double>(j - 1) / static_cast<double>(cfg.k);
            Vec x(N, 0.0);
            x[0] = rho * std::cos(theta);
            x[1] = rho * std::sin(theta);
            x[2] = (sign == 0 ? z : -z);
            for (int i = 3; i < N; ++i) x[i] = cfg.ypp[i - 3];
            centers.push_back(std::move(x));
        }
    }
    return centers;
}

double same_circle_distance(const DoubleCircleConfig& cfg, int j) {
    if (j < 2 || j > cfg.k) throw std::invalid_argument("same_circle_distance: j out of range");
    const double rho = cfg.circle_radius();
    return 2.0 * rho * std::abs(std::sin(M_PI * static_cast<double>(j - 1) / static_cast<double>(cfg.k)));
}

double cross_circle_distance(const DoubleCircleConfig& cfg, int j) {
    if (j < 1 || j > cfg.k) throw std::invalid_argument("cross_circle_distance: j out of range");
    const double rho = cfg.circle_radius();
    const double chord = 2.0 * rho * std::sin(M_PI * static_cast<double>(j - 1) / static_cast<double>(cfg.k));
    const double dz = 2.0 * cfg.height();
    return std::sqrt(chord * chord + dz * dz);
}

SectorIndex sector_of(std::span<const double> point, const DoubleCircleConfig& cfg) {
    if (point.size() < 3) throw std::invalid_argument("sector_of: point dimension too small");
    const double y1 = point[0], y2 = point[1];
    const double plane = std::sqrt(y1 * y1 + y2 * y2);
    if (plane == 0.0) throw DegenerateProjectionError("sector_of: zero (y1,y2) projection");
    SectorIndex best;
    double best_dot = -2.0;
    for (int j = 1; j <= cfg.k; ++j) {
        const double theta = 2.0 * M_PI * static_cast<double>(j - 1) / static_cast<double>(cfg.k);
        const double d = (y1 * std::cos(theta) + y2 * std::sin(theta)) / plane;
        // strict improvement only, so azimuth ties resolve to the smaller j
        if (d > best_dot + 1e-12) {
            best_dot = d;
            best.j = j;
        }
    }
    best.sign = (point[2] >= 0.0) ? +1 : -1;
    return best;
}

}  // namespace polybubble
