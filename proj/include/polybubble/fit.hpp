#pragma once

#include <span>
#include <vector>

namespace polybubble {

// Fitted coefficients from log-log regression of a computed quantity
// against a power-law model  y = coefficient * x^exponent.
struct ExpansionFit {
    double exponent = 0.0;
    double coefficient = 0.0;
    double r_squared = 0.0;
    std::vector<double> residuals;  // log-space residuals, one per sample
};

// Least squares on (log x, log |y|). Requires >= 2 samples with y != 0;
// callers wanting a trustworthy exponent should pass >= 5 geometrically
// spaced abscissae.
ExpansionFit fit_power_law(std::span<const double> x, std::span<const double> y);

// One step of Richardson extrapolation for a sequence p_k sampled on a
// geometric grid k, 2k, 4k, ... whose error is ~ c/k: returns the
// accelerated sequence 2*p_{j+1} - p_j (one element shorter).
std::vector<double> richardson_first_order(std::span<const double> p);

// Successive absolute differences |p_{j+1} - p_j|.
std::vector<double> successive_diffs(std::span<const double> p);

// True when every successive difference shrinks by at least `ratio`.
bool is_cauchy_with_ratio(std::span<const double> p, double ratio);

}  // namespace polybubble
