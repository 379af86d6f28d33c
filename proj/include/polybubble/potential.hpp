#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "polybubble/core.hpp"
#include "polybubble/jet.hpp"

namespace polybubble {

// ---------------------------------------------------------------------------
// Cylinder functions f(r, y'') built from the invariants
//     dr = r - r0,   t = |y'' - y0''|^2,   w = (y'' - y0'')_1,
// optionally damped by a Gaussian envelope exp(-(dr^2 + t)/width^2) so the
// function stays bounded on all of R^N. Partial derivatives are analytic
// and full-space Taylor jets are available to any order.
// ---------------------------------------------------------------------------
struct CylTerm {
    double coef = 0.0;
    int pow_dr = 0;  // (r - r0)^a
    int pow_t = 0;   // t^b
    int pow_w = 0;   // w^c
};

class CylFunc {
public:
    CylFunc() = default;
    CylFunc(double base, std::vector<CylTerm> terms, double r0, Vec y0pp, double env_width = 0.0);

    double r0() const { return r0_; }
    const Vec& y0pp() const { return y0pp_; }

    double value_point(std::span<const double> y) const;
    double value_cyl(double r, double t, double w = 0.0) const;

    // partials with respect to (r, t, w)
    void partials_cyl(double r, double t, double w, double& fr, double& ft, double& fw) const;

    // gradient in the reduced coordinates z = (r, y'') in R^{N-2}
    Vec grad_ry(double r, std::span<const double> ypp) const;

    // partial with respect to y_i (full-space index i >= 3) at a point
    double partial_ypp(std::span<const double> y, int i) const;
    double partial_r(std::span<const double> y) const;

    Jet jet(const std::shared_ptr<const JetSpace>& sp, std::span<const double> y) const;

    bool has_axial_terms() const;
    bool empty() const { return terms_.empty() && base_ == 0.0; }

private:
    double envelope(double dr2_plus_t) const;

    double base_ = 0.0;
    std::vector<CylTerm> terms_;
    double r0_ = 1.0;
    Vec y0pp_;
    double env_width_ = 0.0;  // <= 0: no envelope
};

// ---------------------------------------------------------------------------
// Potential pair (V, Q) around a critical point of Q, per the standing
// structure: Q(r0, y0'') = 1, D^alpha Q = 0 for |alpha| <= 2m-1, V bounded
// and nonnegative near the concentration region.
// ---------------------------------------------------------------------------
struct PotentialModel {
    SpaceSpec space;
    CylFunc V;
    CylFunc Q;
    double r0 = 1.0;
    Vec y0pp;
    int flatness_order = 2;  // 2m
};

class FlatnessViolationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// validates normalization and (A2)-type flatness via exact jets
PotentialModel make_potential_model(const SpaceSpec& space, CylFunc V, CylFunc Q);

// sum over |alpha| = 2m of D^alpha Q(y0) * moment(alpha), with y0 the mapped
// critical point (r0, 0, 0, y0''); moments supplied by the caller
double contract_flat_derivatives(const PotentialModel& pot,
                                 const std::function<double(std::span<const int>)>& moment_of);

// enumerate componentwise-even multi-indices of total degree `total` over n slots
std::vector<std::vector<int>> even_multi_indices(int n, int total);

// ---------------------------------------------------------------------------
// Built-in models
// ---------------------------------------------------------------------------
// V = v0 * envelope;  Q = 1 + qr*(r-r0)^{2m} + qt*t^m (damped), optional
// cubic tilt c3*w^3 on top for m=1 (keeps (A2): only |alpha| <= 2m-1 must vanish).
PotentialModel builtin_potential(const SpaceSpec& space, double v0, double qr, double qt, double env_width,
                                 double cubic_tilt = 0.0);

}  // namespace polybubble
