#pragma once

#include <functional>
#include <span>
#include <vector>

#include "polybubble/core.hpp"

namespace polybubble {

struct QuadratureSpec {
    double rel_tol = 1e-8;
    double abs_tol = 1e-12;
    long max_evals = 2'000'000;
    bool symmetry_reduction = true;
};

enum class QuadStatus { ok, budget_exhausted, non_convergent };

struct IntegralResult {
    double value = 0.0;
    double err_est = 0.0;
    long evals = 0;
    QuadStatus status = QuadStatus::ok;
};

using Fn1 = std::function<double(double)>;
using FnN = std::function<double(std::span<const double>)>;

// ---------------------------------------------------------------------------
// 1-d adaptive Gauss-Kronrod (G7,K15) on [a,b].
// ---------------------------------------------------------------------------
IntegralResult integrate_1d(const Fn1& f, double a, double b, const QuadratureSpec& spec);

// Semi-infinite [0, inf) via the compactifying substitution rho = t/(1-t).
IntegralResult integrate_radial(const Fn1& f, const QuadratureSpec& spec);

// ---------------------------------------------------------------------------
// Adaptive Genz-Malik degree-7 cubature over a box (d >= 2; d == 1 delegates
// to Gauss-Kronrod). Region subdivision is embarrassingly parallel in
// principle; the accumulator uses a fixed deterministic ordering so results
// are run-to-run reproducible.
// ---------------------------------------------------------------------------
IntegralResult integrate_box(const FnN& f, std::span<const double> lo, std::span<const double> hi,
                             const QuadratureSpec& spec);

// Integral over all of R^d via the coordinate-wise map y = t/(1-t^2).
// f must decay fast enough for the compactified integrand to vanish at the
// boundary (bubble-type integrands do).
IntegralResult integrate_rd(const FnN& f, int d, const QuadratureSpec& spec);

// ---------------------------------------------------------------------------
// Surface moments of monomials over S^{N-1}.
// ---------------------------------------------------------------------------
// closed form: 2 prod Gamma((a_i+1)/2) / Gamma((N+|a|)/2) for even alpha, 0 otherwise
double surface_moment_closed(std::span<const int> alpha);
// independent numeric path: recursive 1-d polar-angle quadrature
double surface_moment_quad(std::span<const int> alpha, const QuadratureSpec& spec);

// Full-space integral of y^alpha * g(|y|) with a numeric angular factor and
// adaptive radial quadrature; the cross-check side of the moment oracle.
IntegralResult integrate_monomial_radial(std::span<const int> alpha, const Fn1& radial, int dim,
                                         const QuadratureSpec& spec);

// ---------------------------------------------------------------------------
// Annulus D_out \ D_in around (r0, y0'') in the (r,y'') geometry,
//   D_rho = { y : |(|y'|, y'') - (r0, y0'')| <= rho }.
// The integrand is taken as a cylinder function F(r, q) with q = |y''-y0''|;
// the reduction to polar coordinates (s, theta) is exact for such F.
// ---------------------------------------------------------------------------
using CylFn = std::function<double(double r, double q)>;
IntegralResult integrate_annulus_cyl(const CylFn& F, double rho_inner, double rho_outer, double r0, int dim,
                                     const QuadratureSpec& spec);

// Generic-field version: f is evaluated at full points; the angular means
// over the y'-sphere and the y''-sphere are taken numerically. Probe points
// check the assumed invariance and set `symmetry_warning` when they disagree.
struct AnnulusResult {
    IntegralResult integral;
    bool symmetry_warning = false;
    double symmetry_spread = 0.0;
};
AnnulusResult integrate_annulus(const FnN& f, double rho_inner, double rho_outer, double r0, const Vec& y0pp,
                                const SpaceSpec& space, const QuadratureSpec& spec, int n_sphere = 16,
                                int n_phi = 16);

// Monte Carlo oracle over the annulus (test support): seeded, deterministic.
double annulus_monte_carlo(const FnN& f, double rho_inner, double rho_outer, double r0, const Vec& y0pp,
                           const SpaceSpec& space, long samples, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Center-local spherical integration: integral over R^N (or the ball
// rho <= rho_max) of f around `center`, with the angular mean reduced through
// the cylindrical structure. Suitable for integrands of the form
// (radial-around-center) x (smooth function of (r, y'')).
//
//   n_beta = 0 declares invariance under rotations of y' about the center
//   axis; n_phi = 0 declares y''-dependence through |y'' - y2_ref| only
//   (or none). Nonzero values add the corresponding angular quadrature.
// ---------------------------------------------------------------------------
struct CenterLocalSpec {
    int n_chi = 16;
    int n_psi = 16;
    int n_beta = 0;
    int n_phi = 0;
    Vec y2_ref;  // reference point in R^{N-3} for the y''-polar axis
};

IntegralResult integrate_center_local(const FnN& f, const Vec& center, double rho_max, const SpaceSpec& space,
                                      const CenterLocalSpec& ang, const QuadratureSpec& spec);

// ---------------------------------------------------------------------------
// Two-center (bipolar) reduction: integral over R^N of F(xi, eta) where xi is
// the coordinate along the axis joining the centers and eta >= 0 the
// transverse radius:  |S^{N-2}| * int F(xi,eta) eta^{N-2} dxi deta.
// ---------------------------------------------------------------------------
using BipolarFn = std::function<double(double xi, double eta)>;
IntegralResult integrate_bipolar(const BipolarFn& F, int dim, const QuadratureSpec& spec,
                                 double xi_lo = 0.0, double xi_hi = 0.0 /* 0,0 -> whole line */);

// surface area of S^{n-1}
double sphere_area(int n);

// Gauss-Legendre nodes/weights on [-1,1]
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace polybubble
