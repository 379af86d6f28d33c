#pragma once

#include <memory>
#include <span>
#include <vector>

#include "polybubble/core.hpp"
#include "polybubble/jet.hpp"

namespace polybubble {

enum class CutoffKind { PolySpline, SmoothBump };

// Cutoff xi(y) = profile(|(r,y'') - (r0,y0'')|), identically 1 inside the
// delta-ball and 0 outside 2*delta. The polynomial-spline profile matches
// value 1/0 with smooth_order vanishing derivatives at both ends, so
// (-Delta)^m xi stays in closed form.
struct CutoffSpec {
    double r0 = 1.0;
    Vec y0pp;            // R^{N-3}
    double delta = 0.1;
    int smooth_order = 3;  // >= 2m+1
    CutoffKind kind = CutoffKind::PolySpline;
};

CutoffSpec make_cutoff(double r0, const Vec& y0pp, double delta, int smooth_order,
                       CutoffKind kind = CutoffKind::PolySpline);

class CutoffField {
public:
    CutoffField(const SpaceSpec& space, CutoffSpec spec);

    const CutoffSpec& spec() const { return spec_; }
    const SpaceSpec& space() const { return space_; }

    // distance in the (r, y'') geometry
    double profile_arg(std::span<const double> y) const;

    double value(std::span<const double> y) const;
    Vec grad(std::span<const double> y) const;
    // closed-form Laplacian (used on the m=1 fast path)
    double laplacian(std::span<const double> y) const;

    // univariate profile and its derivatives [g, g', ..., g^{(K)}](s)
    double profile(double s) const;
    std::vector<double> profile_derivs(double s, int K) const;

    // Taylor jet of xi at y (any order up to the profile smoothness)
    Jet jet(const std::shared_ptr<const JetSpace>& sp, std::span<const double> y) const;

    double support_inner() const { return spec_.delta; }
    double support_outer() const { return 2.0 * spec_.delta; }

private:
    SpaceSpec space_;
    CutoffSpec spec_;
    std::vector<double> step_coeffs_;  // smoothstep coefficients in t = (s-delta)/delta
};

}  // namespace polybubble
