#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "polybubble/ansatz.hpp"
#include "polybubble/core.hpp"
#include "polybubble/fit.hpp"
#include "polybubble/potential.hpp"

namespace polybubble {

// ---------------------------------------------------------------------------
// Weighted sup norms: sup over y of lambda^{-(N -+ 2m)/2} |f(y)| / K(y) with
// the kernel K(y) summing center-localized decay factors of exponent
// (N -+ 2m)/2 + tau. Any sampled estimate is a lower bound of the true sup;
// reports carry the maximizing sample point for diagnosis.
// ---------------------------------------------------------------------------
enum class NormKind { star, double_star };

struct WeightedNorm {
    NormKind kind = NormKind::double_star;
    DoubleCircleConfig cfg;
    RegimeParams regime;
    int sample_budget = 4000;
};

struct NormEstimate {
    double value = 0.0;
    Vec argmax_point;
};

double norm_weight(const WeightedNorm& norm, std::span<const double> y, const std::vector<Vec>& centers);

NormEstimate weighted_norm(const std::function<double(std::span<const double>)>& f, const WeightedNorm& norm,
                           const std::vector<Vec>& points);

// Structured sample set: dense shells around each center (within C/lambda),
// midpoints between centers, the cutoff annulus, and the crossover shell
// |(r,y'')-(r0,y0'')| ~ lambda^{-(2m+1-beta1)/(4m)}.
std::vector<Vec> norm_sample_points(const DoubleCircleConfig& cfg, const CutoffSpec& cutoff,
                                    const RegimeParams& regime, int budget, std::uint64_t seed);

// ---------------------------------------------------------------------------
// The defect E_k of the ansatz, decomposed as I1 - I2 - I3 + I4 + I5 with
// I1 split into the nonlinear-interaction part I11 and the potential
// deviation I12 = (Q-1) * sum xi U^{m*-1}.
// ---------------------------------------------------------------------------
struct ErrorComponents {
    double I11 = 0, I12 = 0, I2 = 0, I3 = 0, I4 = 0, I5 = 0;
    double total() const { return I11 + I12 - I2 - I3 + I4 + I5; }
};

class ErrorTerm {
public:
    ErrorTerm(const AnsatzSpec& spec, const PotentialModel& pot);

    const AnsatzField& ansatz() const { return ansatz_; }

    ErrorComponents components(std::span<const double> y) const;
    double value(std::span<const double> y) const { return components(y).total(); }

    // independent reconstruction Q Z^{m*-1} - V Z - (-Delta)^m (xi Z*) with
    // the product derivative taken by exact jets
    double residual_via_jets(std::span<const double> y) const;

    // I5 coefficients of the iterated-Laplacian expansion (empty for m = 1)
    const std::vector<double>& hessian_coeffs() const { return a_coeffs_; }

private:
    AnsatzField ansatz_;
    PotentialModel pot_;
    std::vector<double> a_coeffs_;
};

struct ErrorTermBreakdown {
    std::vector<Vec> points;
    std::vector<ErrorComponents> parts;
    bool annulus_sampled = false;  // false -> I3..I5 are zero at every sample
};

ErrorTermBreakdown assemble_error_term(const AnsatzSpec& spec, const PotentialModel& pot,
                                       const std::vector<Vec>& points);

// ---------------------------------------------------------------------------
// Scaling of ||E_k||_** along the regime's lambda(k) rule.
// ---------------------------------------------------------------------------
struct ErrorScalingResult {
    std::vector<double> lambdas;
    std::vector<double> norms;
    ExpansionFit fit;
    double slope_bound = 0.0;  // -(2m+1-beta1)/2
    bool within_bound = false; // fit.exponent <= slope_bound + margin
};

ErrorScalingResult error_scaling_fit(const SpaceSpec& space, const PotentialModel& pot, const RegimeParams& regime,
                                     std::span<const int> ks, double t_param, int sample_budget, std::uint64_t seed,
                                     double margin = 0.1);

// Coefficients a_l of the mixed Hessian-contraction block, derived once per
// order from the exact product-rule commutator (m <= 3).
std::vector<double> derive_hessian_coeffs(int m);

}  // namespace polybubble
