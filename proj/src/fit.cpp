#include "polybubble/fit.hpp"

#include <cmath>
#include <stdexcept>

namespace polybubble {

ExpansionFit fit_power_law(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("fit_power_law: need >= 2 matching samples");
    const std::size_t n = x.size();
    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(x[i] > 0.0)) throw std::invalid_argument("fit_power_law: abscissae must be > 0");
        if (y[i] == 0.0) throw std::invalid_argument("fit_power_law: zero ordinate has no log");
        lx[i] = std::log(x[i]);
        ly[i] = std::log(std::abs(y[i]));
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    const double dn = static_cast<double>(n);
    const double denom = dn * sxx - sx * sx;
    if (denom == 0.0) throw std::invalid_argument("fit_power_law: degenerate abscissae");
    ExpansionFit fit;
    fit.exponent = (dn * sxy - sx * sy) / denom;
    const double intercept = (sy - fit.exponent * sx) / dn;
    fit.coefficient = std::exp(intercept);

    double ss_res = 0, ss_tot = 0;
    const double mean_y = sy / dn;
    fit.residuals.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double pred = intercept + fit.exponent * lx[i];
        fit.residuals[i] = ly[i] - pred;
        ss_res += fit.residuals[i] * fit.residuals[i];
        ss_tot += (ly[i] - mean_y) * (ly[i] - mean_y);
    }
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

std::vector<double> richardson_first_order(std::span<const double> p) {
    if (p.size() < 2) throw std::invalid_argument("richardson_first_order: need >= 2 terms");
    std::vector<double> out(p.size() - 1);
    for (std::size_t i = 0; i + 1 < p.size(); ++i) out[i] = 2.0 * p[i + 1] - p[i];
    return out;
}

std::vector<double> successive_diffs(std::span<const double> p) {
    std::vector<double> out;
    for (std::size_t i = 0; i + 1 < p.size(); ++i) out.push_back(std::abs(p[i + 1] - p[i]));
    return out;
}

bool is_cauchy_with_ratio(std::span<const double> p, double ratio) {
    const auto d = successive_diffs(p);
    for (std::size_t i = 0; i + 1 < d.size(); ++i) {
        if (d[i + 1] * ratio > d[i]) return false;
    }
    return true;
}

}  // namespace polybubble
