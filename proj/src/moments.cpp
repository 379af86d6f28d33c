#include "polybubble/moments.hpp"

#include <cmath>

namespace polybubble {

namespace {

// int_{R^N} y^alpha (1+|y|^2)^{-s} dy = prod Gamma((a_i+1)/2) * Gamma(s-(N+|a|)/2) / Gamma(s)
double base_moment(int N, std::span<const int> alpha, double s) {
    int total = 0;
    for (int a : alpha) {
        if (a % 2 != 0) return 0.0;
        total += a;
    }
    if (!(2.0 * s > N + total))
        throw DivergentMomentError("moment: decay exponent too small for convergence");
    double logv = 0.0;
    for (int a : alpha) logv += std::lgamma(0.5 * (a + 1));
    logv += std::lgamma(s - 0.5 * (N + total)) - std::lgamma(s);
    return std::exp(logv);
}

struct PowerInfo {
    double p;        // the power of U
    double decay_s;  // (1+u)^{-decay_s} profile exponent
    double prefac;   // P^{p(N-2m)/(4m)}
};

PowerInfo power_info(const SpaceSpec& space, MomentPower power) {
    const int N = space.dim, m = space.order;
    const double s_half = 0.5 * (N - 2 * m);
    double p = 0.0;
    switch (power) {
        case MomentPower::square: p = 2.0; break;
        case MomentPower::crit: p = space.crit_exp.to_double(); break;
        case MomentPower::crit_minus_one_dlambda: p = space.crit_exp.to_double(); break;
    }
    PowerInfo info;
    info.p = p;
    info.decay_s = p * s_half;
    info.prefac = std::pow(space.bubble_const, p * (N - 2 * m) / (4.0 * m));
    return info;
}

}  // namespace

double moment_closed_form(const MomentSpec& spec) {
    const int N = spec.space.dim;
    std::vector<int> alpha = spec.alpha;
    if (alpha.empty()) alpha.assign(N, 0);
    if (static_cast<int>(alpha.size()) != N) throw std::invalid_argument("moment: alpha dimension mismatch");
    int total = 0;
    for (int a : alpha) total += a;
    const PowerInfo info = power_info(spec.space, spec.power);
    const double lam = spec.lambda;
    // int y^alpha U^p = P^{...} lambda^{p(N-2m)/2 - N - |alpha|} * base(alpha, p(N-2m)/2)
    const double scale_pow = info.p * 0.5 * (N - 2 * spec.space.order) - N - total;
    if (spec.power == MomentPower::crit_minus_one_dlambda) {
        // (1/m*) d/dlambda of the U^{m*} moment: the lambda power there is -|alpha|
        const double mstar = spec.space.crit_exp.to_double();
        const double base = info.prefac * base_moment(N, alpha, info.decay_s);
        return -(static_cast<double>(total) / mstar) * std::pow(lam, -total - 1) * base;
    }
    return info.prefac * std::pow(lam, scale_pow) * base_moment(N, alpha, info.decay_s);
}

IntegralResult moment_quadrature(const MomentSpec& spec, const QuadratureSpec& quad) {
    const int N = spec.space.dim;
    std::vector<int> alpha = spec.alpha;
    if (alpha.empty()) alpha.assign(N, 0);
    const PowerInfo info = power_info(spec.space, spec.power);
    const double lam = spec.lambda;
    const double s_half = 0.5 * (N - 2 * spec.space.order);
    const double mstar = spec.space.crit_exp.to_double();

    Fn1 radial;
    if (spec.power == MomentPower::crit_minus_one_dlambda) {
        // U^{m*-1} dU/dlambda with dU/dlambda = U * s(1-u)/(lambda(1+u)), u = (lambda rho)^2
        radial = [=](double rho) {
            const double u = lam * lam * rho * rho;
            const double c0 = std::pow(info.prefac, 1.0 / info.p);
            const double Uv = c0 * std::pow(lam, s_half) * std::pow(1.0 + u, -s_half);
            const double dU = Uv * s_half * (1.0 - u) / (lam * (1.0 + u));
            return std::pow(Uv, mstar - 1.0) * dU;
        };
    } else {
        radial = [=](double rho) {
            const double u = lam * lam * rho * rho;
            const double c0 = std::pow(info.prefac, 1.0 / info.p);
            const double Uv = c0 * std::pow(lam, s_half) * std::pow(1.0 + u, -s_half);
            return std::pow(Uv, info.p);
        };
    }
    return integrate_monomial_radial(alpha, radial, N, quad);
}

double bubble_mass_l2(const SpaceSpec& space) {
    MomentSpec s;
    s.space = space;
    s.power = MomentPower::square;
    return moment_closed_form(s);
}

double bubble_mass_crit(const SpaceSpec& space) {
    MomentSpec s;
    s.space = space;
    s.power = MomentPower::crit;
    return moment_closed_form(s);
}

double bubble_moment_crit(const SpaceSpec& space, std::span<const int> alpha) {
    MomentSpec s;
    s.space = space;
    s.power = MomentPower::crit;
    s.alpha.assign(alpha.begin(), alpha.end());
    return moment_closed_form(s);
}

}  // namespace polybubble
