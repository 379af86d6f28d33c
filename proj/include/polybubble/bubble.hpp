#pragma once

#include <span>
#include <vector>

#include "polybubble/core.hpp"

namespace polybubble {

// ---------------------------------------------------------------------------
// Radial rational profiles.
//
// Everything the bubble calculus needs stays inside the family
//     f(rho) = sum_i  c_i * u^{p_i} * (1+u)^{-(s0 + j_i)},   u = (lambda*rho)^2,
// which is closed under the radial Laplacian
//     Delta f = lambda^2 * (4u f_uu + 2N f_u).
// Profiles are differentiated exactly at construction time; evaluation is a
// small rational expression.
// ---------------------------------------------------------------------------
struct RadialProfile {
    double s0 = 0.0;     // base decay exponent
    int lap_count = 0;   // value carries a factor lambda^{2*lap_count}
    struct Term {
        double coef;
        int upow;  // power of u
        int qoff;  // (1+u)^{-(s0+qoff)}
    };
    std::vector<Term> terms;

    static RadialProfile seed(double s0) { return RadialProfile{s0, 0, {{1.0, 0, 0}}}; }

    double eval_u(double u) const;
    RadialProfile laplacian(int N) const;  // one application of 4u f_uu + 2N f_u
    RadialProfile deriv_u() const;         // d/du, keeps lap_count

private:
    void merge();
    friend RadialProfile merge_terms(RadialProfile p);
};

// ---------------------------------------------------------------------------
// The bubble U_{x,lambda}(y) = P^{(N-2m)/(4m)} (lambda/(1+lambda^2|y-x|^2))^{(N-2m)/2}.
// ---------------------------------------------------------------------------
struct BubbleParams {
    SpaceSpec space;
    Vec center;
    double lambda = 1.0;
};

BubbleParams make_bubble(const SpaceSpec& space, const Vec& center, double lambda);

double eval_bubble(const BubbleParams& b, std::span<const double> y);

// (-Delta)^m U, closed-form path: U^{m*-1}.
double polyharm_bubble(const BubbleParams& b, std::span<const double> y);

// Independent path: the radial recurrence applied m times to the exact
// rational profile. The two must agree to ~1e-8 relative.
double polyharm_bubble_recurrence(const BubbleParams& b, std::span<const double> y);

// Analytic partials: d/dlambda and gradient in the center.
struct BubbleDerivatives {
    double d_lambda = 0.0;
    Vec d_center;
};
BubbleDerivatives bubble_derivatives(const BubbleParams& b, std::span<const double> y);

// ---------------------------------------------------------------------------
// Empirical check of |dU/dlambda| <= C U / lambda^beta along a lambda sweep,
// with the total derivative carrying the center motion through h(lambda) of
// the regime (beta = beta1 or beta2); freeze_centers drops the motion and
// the pure scaling bound beta = 1 applies.
// ---------------------------------------------------------------------------
struct DerivativeBoundReport {
    std::vector<double> lambdas;
    std::vector<double> sup_ratios;  // sup over samples of |dU/dlambda| / U
    std::vector<double> fitted_C;    // sup_ratio * lambda^beta per lambda
    struct ExponentFit {
        double slope = 0.0;
        double beta_expected = 0.0;
    } exponent;
};

class RegimeMismatchError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

DerivativeBoundReport derivative_bound_check(const DoubleCircleConfig& cfg, const RegimeParams& regime, int samples,
                                             int n_lambda, std::uint64_t seed, bool freeze_centers = false);

// ---------------------------------------------------------------------------
// Evaluator with precomputed iterated-Laplacian profiles, used by the error
// term and Pohozaev machinery. All evaluation is pure and thread-safe.
// ---------------------------------------------------------------------------
class BubbleField {
public:
    BubbleField(const SpaceSpec& space, Vec center, double lambda);

    const SpaceSpec& space() const { return space_; }
    const Vec& center() const { return center_; }
    double lambda() const { return lambda_; }

    double value(std::span<const double> y) const;
    // (-Delta)^l U for 0 <= l <= order
    double polyharm(int l, std::span<const double> y) const;
    // gradient of (-Delta)^l U
    Vec polyharm_grad(int l, std::span<const double> y) const;
    // Hessian of U (dense N x N, row-major)
    std::vector<double> hessian(std::span<const double> y) const;
    double dlambda(std::span<const double> y) const;

    // radial pieces g(u), exposing the profile for reduced quadrature:
    // value = prefactor() * profile(l).eval_u(u(rho)) * lambda^{2l} * (-1)^l is
    // folded in already by the callers below.
    double radial_value(double rho) const;
    double radial_polyharm(int l, double rho) const;
    double radial_dlambda(double rho) const;  // d/dlambda at fixed center

private:
    SpaceSpec space_;
    Vec center_;
    double lambda_;
    double prefac_;  // P^{(N-2m)/(4m)} * lambda^{(N-2m)/2}
    double s_;       // (N-2m)/2
    std::vector<RadialProfile> profiles_;  // profiles_[l] = Laplacian^l seed
    std::vector<RadialProfile> dprofiles_; // d/du of profiles_[l]
    std::vector<RadialProfile> ddprof_;    // d2/du2 of profiles_[0]
};

}  // namespace polybubble
