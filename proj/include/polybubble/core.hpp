#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "polybubble/rational.hpp"

namespace polybubble {

using Vec = std::vector<double>;

// ---------------------------------------------------------------------------
// Dimension bookkeeping for the order-2m critical problem in R^N.
// ---------------------------------------------------------------------------
struct SpaceSpec {
    int dim = 0;             // N
    int order = 0;           // m
    Rational crit_exp;       // m* = 2N/(N-2m), exact
    double bubble_const = 0; // P = prod_{h=-m}^{m-1} (N+2h)

    // (N-2m)/2, (N+2m)/2 as exact rationals
    Rational half_low() const { return Rational(dim - 2 * order, 2); }
    Rational half_high() const { return Rational(dim + 2 * order, 2); }
};

class DimensionTooSmallError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline SpaceSpec make_space_spec(int N, int m) {
    if (m < 1) throw std::invalid_argument("make_space_spec: order m must be >= 1");
    if (N <= 4 * m + 1)
        throw DimensionTooSmallError("make_space_spec: require N > 4m+1, got N=" + std::to_string(N) +
                                     ", m=" + std::to_string(m));
    SpaceSpec s;
    s.dim = N;
    s.order = m;
    s.crit_exp = Rational(2 * N, N - 2 * m);
    double p = 1.0;
    for (int h = -m; h <= m - 1; ++h) p *= static_cast<double>(N + 2 * h);
    s.bubble_const = p;
    return s;
}

// ---------------------------------------------------------------------------
// Scaling regimes of the circle-height parameter h.
//   Case1: h -> 1 with sqrt(1-h^2) = M1 * lambda^{-beta1}
//   Case2: h -> a in (0,1), h = a + M2 * lambda^{-beta2}
//   Case3: h -> 0,          h =     M2 * lambda^{-beta2}
// ---------------------------------------------------------------------------
enum class RegimeCase { Case1, Case2, Case3 };

struct RegimeParams {
    RegimeCase case_id = RegimeCase::Case2;
    SpaceSpec space;
    Rational nu;     // Case1: N - 4m - iota (0 otherwise)
    Rational iota;   // Case1 only
    Rational tau;    // weighted-norm exponent
    Rational beta1;  // nu/(N-2m)
    Rational beta2;  // (N-4m)/(N-2m)
    double a = 0.0;  // Case2/3 limit of h (a=0 in Case3)
    double M1 = 1.0;
    double M2 = 1.0;
    double vartheta = 0.1;
    double L0 = 0.1;
    double L1 = 10.0;

    // lambda = t * k^{kappa}; kappa = (N-2m)/(N-4m-nu) in Case1, (N-2m)/(N-4m) else
    Rational lambda_exponent() const {
        const int N = space.dim, m = space.order;
        if (case_id == RegimeCase::Case1) return Rational(N - 2 * m) / (Rational(N - 4 * m) - nu);
        return Rational(N - 2 * m, N - 4 * m);
    }

    double lambda_of_k(double t, int k) const;
    // h(lambda) along the regime's scaling relation (o-terms dropped)
    double h_of_lambda(double lambda) const;
    // d h / d lambda along the regime
    double dh_dlambda(double lambda) const;
};

RegimeParams make_regime_case1(const SpaceSpec& space, const Rational& iota, double M1, double L0, double L1,
                               double vartheta = 0.1);
RegimeParams make_regime_case23(const SpaceSpec& space, double a, double M2, double L0, double L1,
                                double vartheta = 0.1);

// ---------------------------------------------------------------------------
// Double-circle configuration: 2k centers on the top/bottom circles of a
// cylinder of radius r*sqrt(1-h^2), height coordinate +- r*h, shifted by ypp
// in the last N-3 coordinates.
// ---------------------------------------------------------------------------
struct DoubleCircleConfig {
    SpaceSpec space;
    double r = 1.0;       // sphere radius of the centers
    double h = 0.5;       // height fraction in (0,1)
    Vec ypp;              // shift in R^{N-3}
    int k = 1;            // centers per circle
    double lambda = 1.0;  // concentration scale

    double circle_radius() const { return r * std::sqrt(1.0 - h * h); }
    double height() const { return r * h; }
};

// Production constructor: h strictly inside (0,1). Test-only constructor
// admits the endpoints h=0, h=1 for limit checks.
DoubleCircleConfig make_config(const SpaceSpec& space, double r, double h, const Vec& ypp, int k, double lambda);
DoubleCircleConfig make_config_for_testing(const SpaceSpec& space, double r, double h, const Vec& ypp, int k,
                                           double lambda);

// Centers ordered x_1^+ ... x_k^+, x_1^- ... x_k^-.
std::vector<Vec> generate_centers(const DoubleCircleConfig& cfg);

// Chord / cross distances between configured centers.
double same_circle_distance(const DoubleCircleConfig& cfg, int j);  // |x_j^+ - x_1^+|, j in [2,k]
double cross_circle_distance(const DoubleCircleConfig& cfg, int j); // |x_j^- - x_1^+|, j in [1,k]

// Sector decomposition of R^N by azimuth in the (y1,y2)-plane and the sign
// of y3. Ties on azimuth boundaries go to the smaller j; y3 = 0 counts as +.
struct SectorIndex {
    int j = 1;
    int sign = +1;
};

class DegenerateProjectionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

SectorIndex sector_of(std::span<const double> point, const DoubleCircleConfig& cfg);

// Small vector helpers shared across modules.
double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double dist(std::span<const double> a, std::span<const double> b);

}  // namespace polybubble
