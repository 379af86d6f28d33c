#pragma once

#include <functional>
#include <span>
#include <vector>

#include "polybubble/core.hpp"
#include "polybubble/fit.hpp"

namespace polybubble {

enum class SumRegime { super1, crit1, sub1 };  // gamma > 1, == 1, < 1

struct SumResult {
    double value = 0.0;
    int k = 0;
    double gamma = 0.0;
    SumRegime regime_tag = SumRegime::super1;
};

// sum_{j=2}^k |x_j^+ - x_1^+|^{-gamma}, exact direct summation over chords
SumResult same_circle_sum(const DoubleCircleConfig& cfg, double gamma);

// sum_{j=1}^k |x_j^- - x_1^+|^{-gamma}
SumResult cross_circle_sum(const DoubleCircleConfig& cfg, double gamma);

// Asymptotic prefactors of the two interaction sums at gamma = N-2m:
//   same-circle: value * (r sqrt(1-h^2))^{N-2m} / k^{N-2m}  -> A1
//   cross:       value * h^{N-2m-1} * sqrt(1-h^2) / k       -> A2
// fitted over a geometric k-grid with one step of Richardson extrapolation.
struct AConstantsReport {
    std::vector<int> ks;
    std::vector<double> a1_prefactor;
    std::vector<double> a1_richardson;
    std::vector<double> a2_prefactor;
    std::vector<double> a2_richardson;
    ExpansionFit a1_growth_fit;  // growth exponent of the raw same-circle sum in k
    double a1_estimate = 0.0;
    double a2_estimate = 0.0;
};

class ScheduleMismatchError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

AConstantsReport fit_A_constants(const SpaceSpec& space, std::span<const int> ks,
                                 const std::function<double(int)>& h_of_k, double r = 1.0);

// h*k = const branch: bracket of cross_sum * h^{N-2m-1} / k over the grid
struct CrossBracket {
    double lo = 0.0;
    double hi = 0.0;
};
CrossBracket cross_sum_bracket(const SpaceSpec& space, std::span<const int> ks, double hk_product, double r = 1.0);

// Pairwise interaction inequality: max over sampled y of
//   g_ij(y) * |x_i-x_j|^sigma / [ (1+|y-x_i|)^{-(k1+k2-sigma)} + (1+|y-x_j|)^{-(k1+k2-sigma)} ]
// with g_ij(y) = (1+|y-x_i|)^{-k1} (1+|y-x_j|)^{-k2}.
double interaction_inequality_check(const Vec& xi, const Vec& xj, double kappa1, double kappa2, double sigma,
                                    int samples, std::uint64_t seed);

}  // namespace polybubble
