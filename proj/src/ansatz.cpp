#include "polybubble/ansatz.hpp"

#include <cmath>
#include <stdexcept>

namespace polybubble {

AnsatzSpec make_ansatz(const DoubleCircleConfig& cfg, const CutoffSpec& cutoff, bool with_cutoff) {
    // centers have (r, y'') = (r_bar, ypp); they must sit inside the xi == 1 ball
    double s2 = (cfg.r - cutoff.r0) * (cfg.r - cutoff.r0);
    for (std::size_t i = 0; i < cfg.ypp.size(); ++i) {
        const double d = cfg.ypp[i] - cutoff.y0pp[i];
        s2 += d * d;
    }
    if (std::sqrt(s2) > cutoff.delta)
        throw std::invalid_argument("make_ansatz: configured centers fall outside the xi == 1 region");
    return AnsatzSpec{cfg, cutoff, with_cutoff};
}

double eval_ansatz(const AnsatzSpec& spec, std::span<const double> y) { return AnsatzField(spec).value(y); }

AnsatzField::AnsatzField(const AnsatzSpec& spec) : spec_(spec), cutoff_(spec.cfg.space, spec.cutoff) {
    const auto centers = generate_centers(spec_.cfg);
    bubbles_.reserve(centers.size());
    for (const auto& c : centers) bubbles_.emplace_back(spec_.cfg.space, c, spec_.cfg.lambda);
}

double AnsatzField::raw(std::span<const double> y) const {
    double s = 0.0;
    for (const auto& b : bubbles_) s += b.value(y);
    return s;
}

double AnsatzField::value(std::span<const double> y) const {
    const double zs = raw(y);
    return spec_.with_cutoff ? cutoff_.value(y) * zs : zs;
}

Vec AnsatzField::raw_grad(std::span<const double> y) const {
    Vec g(space().dim, 0.0);
    for (const auto& b : bubbles_) {
        const Vec gb = b.polyharm_grad(0, y);
        for (int i = 0; i < space().dim; ++i) g[i] += gb[i];
    }
    return g;
}

double AnsatzField::raw_polyharm(int l, std::span<const double> y) const {
    double s = 0.0;
    for (const auto& b : bubbles_) s += b.polyharm(l, y);
    return s;
}

Vec AnsatzField::raw_polyharm_grad(int l, std::span<const double> y) const {
    Vec g(space().dim, 0.0);
    for (const auto& b : bubbles_) {
        const Vec gb = b.polyharm_grad(l, y);
        for (int i = 0; i < space().dim; ++i) g[i] += gb[i];
    }
    return g;
}

std::vector<double> AnsatzField::raw_hessian(std::span<const double> y) const {
    const int N = space().dim;
    std::vector<double> H(static_cast<std::size_t>(N) * N, 0.0);
    for (const auto& b : bubbles_) {
        const auto Hb = b.hessian(y);
        for (std::size_t i = 0; i < H.size(); ++i) H[i] += Hb[i];
    }
    return H;
}

double AnsatzField::raw_dlambda(std::span<const double> y) const {
    double s = 0.0;
    for (const auto& b : bubbles_) s += b.dlambda(y);
    return s;
}

double AnsatzField::cutoff_power_sum(std::span<const double> y) const {
    const double xi = cutoff_.value(y);
    if (xi == 0.0) return 0.0;
    const double p = space().crit_exp.to_double() - 1.0;
    double s = 0.0;
    for (const auto& b : bubbles_) s += std::pow(b.value(y), p);
    return xi * s;
}

Jet AnsatzField::raw_jet(const std::shared_ptr<const JetSpace>& sp, std::span<const double> y) const {
    const int N = space().dim;
    Jet total = Jet::constant(sp, 0.0);
    for (const auto& b : bubbles_) {
        Jet w = Jet::constant(sp, 1.0);
        const double lam2 = b.lambda() * b.lambda();
        for (int i = 0; i < N; ++i) {
            Jet v = Jet::variable(sp, i, y[i]) + (-b.center()[i]);
            w += v * v * lam2;
        }
        const double s = 0.5 * static_cast<double>(N - 2 * space().order);
        const double c0 = std::pow(space().bubble_const, static_cast<double>(N - 2 * space().order) /
                                                             (4.0 * space().order)) *
                          std::pow(b.lambda(), s);
        total += w.rpow(-s) * c0;
    }
    return total;
}

}  // namespace polybubble
