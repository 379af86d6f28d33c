#include "polybubble/bubble.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "polybubble/rng.hpp"

namespace polybubble {

double RadialProfile::eval_u(double u) const {
    // (1+u)^{-(s0+qoff)} = (1+u)^{-s0} * (1+u)^{-qoff}
    const double base = std::pow(1.0 + u, -s0);
    double sum = 0.0;
    for (const Term& t : terms) {
        sum += t.coef * std::pow(u, t.upow) * base * std::pow(1.0 + u, -t.qoff);
    }
    return sum;
}

void RadialProfile::merge() {
    std::map<std::pair<int, int>, double> acc;
    for (const Term& t : terms) acc[{t.upow, t.qoff}] += t.coef;
    terms.clear();
    for (const auto& [key, c] : acc) {
        if (c != 0.0) terms.push_back({c, key.first, key.second});
    }
}

RadialProfile RadialProfile::laplacian(int N) const {
    RadialProfile out;
    out.s0 = s0;
    out.lap_count = lap_count + 1;
    for (const Term& t : terms) {
        const double p = t.upow;
        const double q = s0 + t.qoff;
        // 4u g'' + 2N g' for g = u^p (1+u)^{-q}
        if (t.upow >= 1) out.terms.push_back({t.coef * (4.0 * p * (p - 1.0) + 2.0 * N * p), t.upow - 1, t.qoff});
        out.terms.push_back({-t.coef * (8.0 * p + 2.0 * N) * q, t.upow, t.qoff + 1});
        out.terms.push_back({t.coef * 4.0 * q * (q + 1.0), t.upow + 1, t.qoff + 2});
    }
    out.merge();
    return out;
}

RadialProfile RadialProfile::deriv_u() const {
    RadialProfile out;
    out.s0 = s0;
    out.lap_count = lap_count;
    for (const Term& t : terms) {
        const double p = t.upow;
        const double q = s0 + t.qoff;
        if (t.upow >= 1) out.terms.push_back({t.coef * p, t.upow - 1, t.qoff});
        out.terms.push_back({-t.coef * q, t.upow, t.qoff + 1});
    }
    out.merge();
    return out;
}

BubbleParams make_bubble(const SpaceSpec& space, const Vec& center, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("make_bubble: lambda must be > 0");
    if (static_cast<int>(center.size()) != space.dim)
        throw std::invalid_argument("make_bubble: center dimension mismatch");
    return BubbleParams{space, center, lambda};
}

double eval_bubble(const BubbleParams& b, std::span<const double> y) {
    const double s = 0.5 * static_cast<double>(b.space.dim - 2 * b.space.order);
    const double c0 = std::pow(b.space.bubble_const,
                               static_cast<double>(b.space.dim - 2 * b.space.order) / (4.0 * b.space.order));
    double rho2 = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double d = y[i] - b.center[i];
        rho2 += d * d;
    }
    return c0 * std::pow(b.lambda / (1.0 + b.lambda * b.lambda * rho2), s);
}

double polyharm_bubble(const BubbleParams& b, std::span<const double> y) {
    const double mexp = b.space.crit_exp.to_double() - 1.0;
    return std::pow(eval_bubble(b, y), mexp);
}

double polyharm_bubble_recurrence(const BubbleParams& b, std::span<const double> y) {
    BubbleField f(b.space, b.center, b.lambda);
    return f.polyharm(b.space.order, y);
}

BubbleDerivatives bubble_derivatives(const BubbleParams& b, std::span<const double> y) {
    const int N = b.space.dim, m = b.space.order;
    const double s = 0.5 * static_cast<double>(N - 2 * m);
    const double U = eval_bubble(b, y);
    double rho2 = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double d = y[i] - b.center[i];
        rho2 += d * d;
    }
    const double lam = b.lambda;
    const double w = 1.0 + lam * lam * rho2;
    BubbleDerivatives out;
    out.d_lambda = U * s * (1.0 - lam * lam * rho2) / (lam * w);
    out.d_center.assign(N, 0.0);
    // grad_x U = +2 s lambda^2 (y - x) / w * U
    for (int i = 0; i < N; ++i) out.d_center[i] = U * 2.0 * s * lam * lam * (y[i] - b.center[i]) / w;
    return out;
}

// ---------------------------------------------------------------------------

BubbleField::BubbleField(const SpaceSpec& space, Vec center, double lambda)
    : space_(space), center_(std::move(center)), lambda_(lambda) {
    if (!(lambda_ > 0.0)) throw std::invalid_argument("BubbleField: lambda must be > 0");
    const int N = space_.dim, m = space_.order;
    s_ = 0.5 * static_cast<double>(N - 2 * m);
    prefac_ = std::pow(space_.bubble_const, static_cast<double>(N - 2 * m) / (4.0 * m)) * std::pow(lambda_, s_);
    profiles_.push_back(RadialProfile::seed(s_));
    for (int l = 1; l <= m; ++l) profiles_.push_back(profiles_.back().laplacian(N));
    for (int l = 0; l <= m; ++l) dprofiles_.push_back(profiles_[l].deriv_u());
    ddprof_.push_back(dprofiles_[0].deriv_u());
}

double BubbleField::radial_value(double rho) const {
    const double u = lambda_ * lambda_ * rho * rho;
    return prefac_ * profiles_[0].eval_u(u);
}

double BubbleField::radial_polyharm(int l, double rho) const {
    if (l < 0 || l > space_.order) throw std::invalid_argument("BubbleField: laplacian order out of range");
    const double u = lambda_ * lambda_ * rho * rho;
    const double sign = (l % 2 == 0) ? 1.0 : -1.0;
    return sign * prefac_ * std::pow(lambda_, 2.0 * l) * profiles_[l].eval_u(u);
}

double BubbleField::radial_dlambda(double rho) const {
    const double u = lambda_ * lambda_ * rho * rho;
    const double U = prefac_ * profiles_[0].eval_u(u);
    return U * s_ * (1.0 - u) / (lambda_ * (1.0 + u));
}

double BubbleField::value(std::span<const double> y) const { return radial_value(dist(y, center_)); }

double BubbleField::polyharm(int l, std::span<const double> y) const {
    return radial_polyharm(l, dist(y, center_));
}

Vec BubbleField::polyharm_grad(int l, std::span<const double> y) const {
    const int N = space_.dim;
    const double u = lambda_ * lambda_ * dist(y, center_) * dist(y, center_);
    const double sign = (l % 2 == 0) ? 1.0 : -1.0;
    const double gu = sign * prefac_ * std::pow(lambda_, 2.0 * l) * dprofiles_[l].eval_u(u);
    Vec g(N, 0.0);
    for (int i = 0; i < N; ++i) g[i] = gu * 2.0 * lambda_ * lambda_ * (y[i] - center_[i]);
    return g;
}

std::vector<double> BubbleField::hessian(std::span<const double> y) const {
    const int N = space_.dim;
    const double lam2 = lambda_ * lambda_;
    double rho2 = 0.0;
    for (int i = 0; i < N; ++i) {
        const double d = y[i] - center_[i];
        rho2 += d * d;
    }
    const double u = lam2 * rho2;
    const double gu = prefac_ * dprofiles_[0].eval_u(u);
    const double guu = prefac_ * ddprof_[0].eval_u(u);
    std::vector<double> H(static_cast<std::size_t>(N) * N, 0.0);
    for (int i = 0; i < N; ++i) {
        for (int j = 0; j < N; ++j) {
            const double di = y[i] - center_[i];
            const double dj = y[j] - center_[j];
            double v = guu * 4.0 * lam2 * lam2 * di * dj;
            if (i == j) v += gu * 2.0 * lam2;
            H[static_cast<std::size_t>(i) * N + j] = v;
        }
    }
    return H;
}

double BubbleField::dlambda(std::span<const double> y) const { return radial_dlambda(dist(y, center_)); }

DerivativeBoundReport derivative_bound_check(const DoubleCircleConfig& cfg, const RegimeParams& regime, int samples,
                                             int n_lambda, std::uint64_t seed, bool freeze_centers) {
    const double h_expected = regime.h_of_lambda(cfg.lambda);
    if (std::abs(cfg.h - h_expected) > 1e-9 * (1.0 + h_expected))
        throw RegimeMismatchError("derivative_bound_check: cfg height is off the regime's scaling relation");

    const int N = cfg.space.dim;
    const double beta = (regime.case_id == RegimeCase::Case1) ? regime.beta1.to_double() : regime.beta2.to_double();
    const double beta_used = freeze_centers ? 1.0 : beta;

    DerivativeBoundReport rep;
    rep.exponent.beta_expected = beta_used;
    Rng rng(seed);
    for (int il = 0; il < n_lambda; ++il) {
        const double lam = cfg.lambda * std::pow(2.0, il);
        const double h = regime.h_of_lambda(lam);
        DoubleCircleConfig c = cfg;
        c.h = h;
        c.lambda = lam;
        const auto centers = generate_centers(c);
        const double hp = regime.dh_dlambda(lam);
        const double root = std::sqrt(1.0 - h * h);
        const double dcircle = -cfg.r * h * hp / root;  // d(r sqrt(1-h^2))/dlambda
        double sup = 0.0;
        for (int s = 0; s < samples; ++s) {
            const std::size_t j = rng.next_u64() % centers.size();
            const bool top = j < static_cast<std::size_t>(c.k);
            const double theta = 2.0 * M_PI * static_cast<double>(j % c.k) / c.k;
            const BubbleParams b{cfg.space, centers[j], lam};
            const double scaled = std::pow(2.0, rng.uniform(-3.0, 5.0));
            Vec dir = rng.unit_vector(N);
            if (!freeze_centers && s % 4 == 3) {
                // probe along the center-motion direction, where the bound peaks
                Vec motion(N, 0.0);
                motion[0] = dcircle * std::cos(theta);
                motion[1] = dcircle * std::sin(theta);
                motion[2] = (top ? 1.0 : -1.0) * cfg.r * hp;
                const double nm = norm2(motion);
                if (nm > 0.0)
                    for (int i = 0; i < N; ++i) dir[i] = motion[i] / nm;
            }
            Vec y(N);
            for (int i = 0; i < N; ++i) y[i] = centers[j][i] + (scaled / lam) * dir[i];
            const auto der = bubble_derivatives(b, y);
            double total = der.d_lambda;
            if (!freeze_centers) {
                Vec dx(N, 0.0);
                dx[0] = dcircle * std::cos(theta);
                dx[1] = dcircle * std::sin(theta);
                dx[2] = (top ? 1.0 : -1.0) * cfg.r * hp;
                for (int i = 0; i < N; ++i) total += der.d_center[i] * dx[i];
            }
            const double U = eval_bubble(b, y);
            sup = std::max(sup, std::abs(total) / U);
        }
        rep.lambdas.push_back(lam);
        rep.sup_ratios.push_back(sup);
        rep.fitted_C.push_back(sup * std::pow(lam, beta_used));
    }
    // slope of log sup-ratio against log lambda
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < rep.lambdas.size(); ++i) {
        const double lx = std::log(rep.lambdas[i]);
        const double ly = std::log(rep.sup_ratios[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double n = static_cast<double>(rep.lambdas.size());
    rep.exponent.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return rep;
}

}  // namespace polybubble
