#pragma once

#include <functional>
#include <span>
#include <vector>

#include "polybubble/ansatz.hpp"
#include "polybubble/core.hpp"
#include "polybubble/potential.hpp"
#include "polybubble/quadrature.hpp"
#include "polybubble/reduced.hpp"

namespace polybubble {

// ---------------------------------------------------------------------------
// Smooth fields for the bilinear functionals. Fields supply their own value,
// gradient and (-Delta)^m; when the analytic forms are missing, the factory
// fills them with order-(2m+2) centered differences, Richardson-extrapolated
// once.
// ---------------------------------------------------------------------------
struct SmoothField {
    FnN value;
    std::function<Vec(std::span<const double>)> grad;
    FnN polyharm_m;
};

SmoothField make_fd_field(const FnN& value, int dim, int m, double length_scale);

// Compactly supported radial polynomial bump (1 - rho^2/R^2)^p around a
// center, with exact gradient and iterated Laplacians (needs p >= 2m+1).
class BumpField {
public:
    BumpField(const SpaceSpec& space, Vec center, double radius, int p);

    double value(std::span<const double> y) const;
    Vec grad(std::span<const double> y) const;
    double polyharm(int l, std::span<const double> y) const;

    // radial accessors (rho = |y - center|)
    double radial_value(double rho) const;
    double radial_dvalue(double rho) const;
    double radial_polyharm(int l, double rho) const;

    SmoothField as_field(int m) const;
    const Vec& center() const { return center_; }
    double radius() const { return radius_; }

private:
    SpaceSpec space_;
    Vec center_;
    double radius_;
    int p_;
    std::vector<std::vector<double>> coeffs_;  // polynomial in u = (rho/R)^2 per Laplacian level
};

// ---------------------------------------------------------------------------
// Bilinear Pohozaev functionals over a box domain (generic cubature path).
//   L1(u,v)    = int [ (-D)^m u <y, grad v> + (-D)^m v <y, grad u> ]
//   L2_i(u,v)  = int [ (-D)^m u d_i v + (-D)^m v d_i u ]
// ---------------------------------------------------------------------------
IntegralResult bilinear_L1(const SmoothField& u, const SmoothField& v, std::span<const double> lo,
                           std::span<const double> hi, const QuadratureSpec& spec);
IntegralResult bilinear_L2(const SmoothField& u, const SmoothField& v, int i, std::span<const double> lo,
                           std::span<const double> hi, const QuadratureSpec& spec);

// int u (-Delta)^m v + v (-Delta)^m u over the box (the companion volume term
// of the L1 identity)
IntegralResult bilinear_mass(const SmoothField& u, const SmoothField& v, std::span<const double> lo,
                             std::span<const double> hi, const QuadratureSpec& spec);

// Exact two-center reductions for radial bumps with centers a*e, b*e on a
// common axis through the origin (covers the compact-support nullity checks
// in any dimension). L2 is taken along the axis direction.
struct BilinearPair {
    double L1 = 0.0;
    double L2_axis = 0.0;
    double mass = 0.0;  // int (v (-D)^m u + u (-D)^m v)
    double gross = 0.0; // int (|(-D)^m u <y,grad v>| + |...|), the cancellation scale
};
BilinearPair bilinear_pair_collinear(const BumpField& u, const BumpField& v, int m, const QuadratureSpec& spec);

// ---------------------------------------------------------------------------
// Local Pohozaev residuals of the ansatz on D_rho (phi = 0 throughout; the
// report's gap column carries everything the truncation leaves behind).
// ---------------------------------------------------------------------------
enum class PohozaevIdentity { radial, translational, lambda };

struct PohozaevReport {
    double volume_lhs = 0.0;
    double predicted_rhs = 0.0;
    double gap = 0.0;
    double rho = 0.0;
    int coordinate = 0;  // i for the translational identity
    PohozaevIdentity identity_id = PohozaevIdentity::radial;
};

class RhoOutOfRangeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

PohozaevReport pohozaev_residual(const AnsatzSpec& spec, const PotentialModel& pot, double rho,
                                 PohozaevIdentity identity, int coordinate = 3,
                                 const PairingQuadOptions& opt = {});

}  // namespace polybubble
