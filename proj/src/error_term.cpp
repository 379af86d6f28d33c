#include "polybubble/error_term.hpp"

#include <cmath>
#include <stdexcept>

#include "polybubble/cutoff.hpp"
#include "polybubble/rng.hpp"

namespace polybubble {

namespace {

double binom(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// I3, I4 and the Hessian-contraction basis blocks of the cutoff commutator,
// all read off exact jets of f (cutoff role) and g (bubble-sum role).
struct CommutatorParts {
    double I3 = 0.0;
    double I4 = 0.0;
    std::vector<double> basis;  // B_l, l = 1..m-1
};

CommutatorParts commutator_parts(const Jet& f, const Jet& g, int m) {
    const int n = f.space()->nvars();
    CommutatorParts out;
    for (int l = 0; l <= m - 1; ++l) {
        out.I3 += binom(m, l) * f.polyharm(m - l) * g.polyharm(l);
    }
    std::vector<int> gamma(n, 0);
    for (int l = 0; l <= m - 1; ++l) {
        double dotsum = 0.0;
        for (int i = 0; i < n; ++i) {
            gamma.assign(n, 0);
            gamma[i] = 1;
            dotsum += f.polyharm_deriv(m - l - 1, gamma) * g.polyharm_deriv(l, gamma);
        }
        out.I4 += 2.0 * m * binom(m - 1, l) * dotsum;
    }
    out.basis.assign(std::max(0, m - 1), 0.0);
    for (int l = 1; l <= m - 1; ++l) {
        double bl = 0.0;
        for (const auto& beta : multi_indices_of_degree(n, m - l)) {
            double mult = 1.0;
            for (int i = 2; i <= m - l; ++i) mult *= i;
            for (int e : beta)
                for (int i = 2; i <= e; ++i) mult /= i;
            for (int s = 0; s <= l - 1; ++s) {
                const double bs = binom(l - 1, s);
                for (int i = 0; i < n; ++i) {
                    gamma = beta;
                    gamma[i] += 1;
                    bl += mult * bs * g.polyharm_deriv(s, gamma) * f.polyharm_deriv(l - 1 - s, gamma);
                }
            }
        }
        out.basis[l - 1] = bl;
    }
    return out;
}

}  // namespace

std::vector<double> derive_hessian_coeffs(int m) {
    if (m <= 1) return {};
    if (m > 3) throw std::invalid_argument("derive_hessian_coeffs: orders above 3 not supported");
    const int nb = m - 1;
    const int trials = nb + 4;
    auto sp = JetSpace::make(3, 2 * m);
    Rng rng(0x5eedULL);
    std::vector<std::vector<double>> A(trials, std::vector<double>(nb, 0.0));
    std::vector<double> rhs(trials, 0.0);
    for (int t = 0; t < trials; ++t) {
        Jet f(sp), g(sp);
        for (int i = 0; i < sp->size(); ++i) {
            f.coeff(i) = rng.uniform(-1.0, 1.0);
            g.coeff(i) = rng.uniform(-1.0, 1.0);
        }
        const auto parts = commutator_parts(f, g, m);
        const double lhs = (f * g).polyharm(m);
        // identity: lhs = f(0) (-Delta)^m g + I3 - I4 - sum a_l B_l
        rhs[t] = f.value() * g.polyharm(m) + parts.I3 - parts.I4 - lhs;
        for (int b = 0; b < nb; ++b) A[t][b] = parts.basis[b];
    }
    // normal equations (tiny system)
    std::vector<std::vector<double>> M(nb, std::vector<double>(nb, 0.0));
    std::vector<double> v(nb, 0.0);
    for (int t = 0; t < trials; ++t) {
        for (int i = 0; i < nb; ++i) {
            v[i] += A[t][i] * rhs[t];
            for (int j = 0; j < nb; ++j) M[i][j] += A[t][i] * A[t][j];
        }
    }
    // Gaussian elimination
    std::vector<double> a(nb, 0.0);
    for (int col = 0; col < nb; ++col) {
        int piv = col;
        for (int r = col + 1; r < nb; ++r)
            if (std::abs(M[r][col]) > std::abs(M[piv][col])) piv = r;
        std::swap(M[piv], M[col]);
        std::swap(v[piv], v[col]);
        for (int r = col + 1; r < nb; ++r) {
            const double fct = M[r][col] / M[col][col];
            for (int c = col; c < nb; ++c) M[r][c] -= fct * M[col][c];
            v[r] -= fct * v[col];
        }
    }
    for (int r = nb - 1; r >= 0; --r) {
        double s = v[r];
        for (int c = r + 1; c < nb; ++c) s -= M[r][c] * a[c];
        a[r] = s / M[r][r];
    }
    // verify the expansion closes on fresh samples
    for (int t = 0; t < 3; ++t) {
        Jet f(sp), g(sp);
        for (int i = 0; i < sp->size(); ++i) {
            f.coeff(i) = rng.uniform(-1.0, 1.0);
            g.coeff(i) = rng.uniform(-1.0, 1.0);
        }
        const auto parts = commutator_parts(f, g, m);
        double i5 = 0.0;
        for (int b = 0; b < nb; ++b) i5 += a[b] * parts.basis[b];
        const double lhs = (f * g).polyharm(m);
        const double recon = f.value() * g.polyharm(m) + parts.I3 - parts.I4 - i5;
        if (std::abs(lhs - recon) > 1e-8 * (1.0 + std::abs(lhs)))
            throw std::runtime_error("derive_hessian_coeffs: commutator expansion failed to close");
    }
    return a;
}

ErrorTerm::ErrorTerm(const AnsatzSpec& spec, const PotentialModel& pot)
    : ansatz_(spec), pot_(pot), a_coeffs_(derive_hessian_coeffs(spec.cfg.space.order)) {
    if (!spec.with_cutoff) throw std::invalid_argument("ErrorTerm: defect is defined for the cutoff ansatz");
}

ErrorComponents ErrorTerm::components(std::span<const double> y) const {
    const SpaceSpec& space = ansatz_.space();
    const int m = space.order;
    const double pexp = space.crit_exp.to_double() - 1.0;
    const CutoffField& xi = ansatz_.cutoff();

    ErrorComponents out;
    const double xiv = xi.value(y);
    const double Zs = ansatz_.raw(y);
    const double Qv = pot_.Q.value_point(y);
    const double Vv = pot_.V.value_point(y);
    const double xips = ansatz_.cutoff_power_sum(y);

    out.I11 = Qv * (std::pow(xiv * Zs, pexp) - xips);
    out.I12 = (Qv - 1.0) * xips;
    out.I2 = Vv * xiv * Zs;

    const double s = xi.profile_arg(y);
    const bool in_annulus = s > xi.support_inner() && s < xi.support_outer();
    if (!in_annulus) return out;  // all cutoff derivatives vanish

    if (m == 1) {
        out.I3 = -xi.laplacian(y) * Zs;
        const Vec gx = xi.grad(y);
        const Vec gz = ansatz_.raw_grad(y);
        out.I4 = 2.0 * dot(gx, gz);
        return out;
    }

    auto sp = JetSpace::make(space.dim, 2 * m);
    const Jet fj = xi.jet(sp, y);
    const Jet gj = ansatz_.raw_jet(sp, y);
    const auto parts = commutator_parts(fj, gj, m);
    out.I3 = parts.I3;
    out.I4 = parts.I4;
    for (std::size_t b = 0; b < a_coeffs_.size(); ++b) out.I5 += a_coeffs_[b] * parts.basis[b];
    return out;
}

double ErrorTerm::residual_via_jets(std::span<const double> y) const {
    const SpaceSpec& space = ansatz_.space();
    const int m = space.order;
    const double pexp = space.crit_exp.to_double() - 1.0;
    auto sp = JetSpace::make(space.dim, 2 * m);
    const Jet fj = ansatz_.cutoff().jet(sp, y);
    const Jet gj = ansatz_.raw_jet(sp, y);
    const double xiv = ansatz_.cutoff().value(y);
    const double Zs = ansatz_.raw(y);
    const double Qv = pot_.Q.value_point(y);
    const double Vv = pot_.V.value_point(y);
    return Qv * std::pow(xiv * Zs, pexp) - Vv * xiv * Zs - (fj * gj).polyharm(m);
}

ErrorTermBreakdown assemble_error_term(const AnsatzSpec& spec, const PotentialModel& pot,
                                       const std::vector<Vec>& points) {
    ErrorTerm term(spec, pot);
    ErrorTermBreakdown out;
    out.points = points;
    out.parts.reserve(points.size());
    const CutoffField& xi = term.ansatz().cutoff();
    for (const auto& p : points) {
        const double s = xi.profile_arg(p);
        if (s > xi.support_inner() && s < xi.support_outer()) out.annulus_sampled = true;
        out.parts.push_back(term.components(p));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Weighted norms
// ---------------------------------------------------------------------------
double norm_weight(const WeightedNorm& norm, std::span<const double> y, const std::vector<Vec>& centers) {
    const SpaceSpec& space = norm.cfg.space;
    const double half = (norm.kind == NormKind::star) ? 0.5 * (space.dim - 2 * space.order)
                                                      : 0.5 * (space.dim + 2 * space.order);
    const double e = half + norm.regime.tau.to_double();
    const double lam = norm.cfg.lambda;
    double K = 0.0;
    for (const auto& c : centers) K += std::pow(1.0 + lam * dist(y, c), -e);
    return K;
}

NormEstimate weighted_norm(const std::function<double(std::span<const double>)>& f, const WeightedNorm& norm,
                           const std::vector<Vec>& points) {
    const SpaceSpec& space = norm.cfg.space;
    const double half = (norm.kind == NormKind::star) ? 0.5 * (space.dim - 2 * space.order)
                                                      : 0.5 * (space.dim + 2 * space.order);
    const double pref = std::pow(norm.cfg.lambda, -half);
    const auto centers = generate_centers(norm.cfg);
    NormEstimate best;
    for (const auto& y : points) {
        const double K = norm_weight(norm, y, centers);
        const double v = pref * std::abs(f(y)) / K;
        if (v > best.value) {
            best.value = v;
            best.argmax_point = y;
        }
    }
    return best;
}

std::vector<Vec> norm_sample_points(const DoubleCircleConfig& cfg, const CutoffSpec& cutoff,
                                    const RegimeParams& regime, int budget, std::uint64_t seed) {
    const int N = cfg.space.dim;
    const int m = cfg.space.order;
    const double lam = cfg.lambda;
    Rng rng(seed);
    std::vector<Vec> pts;
    pts.reserve(budget + 64);
    const auto centers = generate_centers(cfg);
    for (const auto& c : centers) pts.push_back(c);

    const int n_center = budget / 2;
    const int n_mid = budget / 8;
    const int n_ann = budget / 4;
    const int n_far = budget - n_center - n_mid - n_ann;

    // shells around centers, dense within a few 1/lambda
    {
        const std::vector<double> scaled = {0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 64.0, 256.0};
        int produced = 0;
        int ci = 0;
        while (produced < n_center) {
            const Vec& c = centers[ci % centers.size()];
            const double lr = scaled[(produced / centers.size()) % scaled.size()];
            const Vec dir = rng.unit_vector(N);
            Vec y(N);
            for (int i = 0; i < N; ++i) y[i] = c[i] + (lr / lam) * dir[i];
            pts.push_back(std::move(y));
            ++produced;
            ++ci;
        }
    }
    // points between centers
    for (int i = 0; i < n_mid; ++i) {
        const std::size_t a = rng.next_u64() % centers.size();
        std::size_t b = rng.next_u64() % centers.size();
        if (b == a) b = (b + 1) % centers.size();
        const double w = rng.uniform(0.25, 0.75);
        Vec y(N);
        for (int j = 0; j < N; ++j) y[j] = w * centers[a][j] + (1.0 - w) * centers[b][j];
        const Vec dir = rng.unit_vector(N);
        const double jitter = 0.05 * dist(centers[a], centers[b]);
        for (int j = 0; j < N; ++j) y[j] += jitter * dir[j];
        pts.push_back(std::move(y));
    }
    // cutoff annulus and the crossover shell of the two-region estimate
    {
        const double beta1 = regime.beta1.to_double();
        const double crossover = std::pow(lam, -(2.0 * m + 1.0 - beta1) / (4.0 * m));
        for (int i = 0; i < n_ann; ++i) {
            double srad;
            if (i % 3 == 0) {
                srad = crossover * std::pow(2.0, rng.uniform(-1.0, 1.0));
            } else {
                srad = rng.uniform(cutoff.delta, 2.0 * cutoff.delta);
            }
            // direction in the (r, y'') geometry, then a random y'-sphere point
            Vec dirp = rng.unit_vector(N - 2);
            const double r = cutoff.r0 + srad * dirp[0];
            if (r <= 0.0) continue;
            const Vec u = rng.unit_vector(3);
            Vec y(N);
            for (int j = 0; j < 3; ++j) y[j] = r * u[j];
            for (int j = 3; j < N; ++j) y[j] = cutoff.y0pp[j - 3] + srad * dirp[j - 2];
            pts.push_back(std::move(y));
        }
    }
    for (int i = 0; i < n_far; ++i) {
        Vec y(N);
        for (int j = 0; j < N; ++j) y[j] = rng.uniform(-3.0 * cutoff.r0, 3.0 * cutoff.r0);
        pts.push_back(std::move(y));
    }
    return pts;
}

ErrorScalingResult error_scaling_fit(const SpaceSpec& space, const PotentialModel& pot, const RegimeParams& regime,
                                     std::span<const int> ks, double t_param, int sample_budget, std::uint64_t seed,
                                     double margin) {
    ErrorScalingResult out;
    const int m = space.order;
    const CutoffSpec cut = make_cutoff(pot.r0, pot.y0pp, 0.1 * pot.r0, 2 * m + 1);
    Rng rng(seed);
    for (int k : ks) {
        const double lam = regime.lambda_of_k(t_param, k);
        const double h = regime.h_of_lambda(lam);
        const auto cfg = make_config(space, pot.r0, h, pot.y0pp, k, lam);
        const AnsatzSpec spec = make_ansatz(cfg, cut, true);
        ErrorTerm term(spec, pot);
        WeightedNorm norm;
        norm.kind = NormKind::double_star;
        norm.cfg = cfg;
        norm.regime = regime;
        norm.sample_budget = sample_budget;
        const auto points = norm_sample_points(cfg, cut, regime, sample_budget, rng.next_u64());
        const auto est = weighted_norm([&term](std::span<const double> y) { return term.value(y); }, norm, points);
        out.lambdas.push_back(lam);
        out.norms.push_back(est.value);
    }
    out.fit = fit_power_law(out.lambdas, out.norms);
    out.slope_bound = -0.5 * (2.0 * m + 1.0 - regime.beta1.to_double());
    out.within_bound = out.fit.exponent <= out.slope_bound + margin;
    return out;
}

}  // namespace polybubble
