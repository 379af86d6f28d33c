#include "polybubble/reduced.hpp"

#include <array>
#include <cmath>

#include "polybubble/bubble.hpp"
#include "polybubble/moments.hpp"
#include "polybubble/rng.hpp"

namespace polybubble {

MomentConstants moment_constants(const SpaceSpec& space, const PotentialModel& pot, bool allow_nonpositive) {
    MomentConstants out;
    const int m = space.order;
    double fact = 1.0;
    for (int i = 2; i <= 2 * m - 1; ++i) fact *= i;
    out.B1 = m * bubble_mass_l2(space);
    out.B2 = 1.0 / (fact * space.crit_exp.to_double());
    out.q_contraction = contract_flat_derivatives(
        pot, [&space](std::span<const int> alpha) { return bubble_moment_crit(space, alpha); });
    const double v0 = pot.V.value_cyl(pot.r0, 0.0, 0.0);
    out.B1_tilde = out.B1 * v0 - out.B2 * out.q_contraction;
    if (out.B1_tilde <= 0.0 && !allow_nonpositive)
        throw SignConditionError("moment_constants: B1*V - B2*sum D^alpha Q moments is not positive");
    return out;
}

// ---------------------------------------------------------------------------
// Pairing integrals
// ---------------------------------------------------------------------------
double pairing_potential_integral(const PotentialModel& pot, const DoubleCircleConfig& cfg,
                                  const PairingQuadOptions& opt) {
    const SpaceSpec& space = cfg.space;
    const auto centers = generate_centers(cfg);
    const Vec& x1 = centers[0];
    const BubbleField b1(space, x1, cfg.lambda);
    const double pexp = space.crit_exp.to_double() - 1.0;

    double y2_off = 0.0;
    for (std::size_t i = 0; i < cfg.ypp.size(); ++i) {
        const double d = cfg.ypp[i] - pot.y0pp[i];
        y2_off += d * d;
    }
    const bool need_phi = pot.V.has_axial_terms() || pot.Q.has_axial_terms() || y2_off > 1e-28;

    CenterLocalSpec ang;
    ang.n_chi = opt.n_chi;
    ang.n_psi = opt.n_psi;
    ang.n_beta = 0;
    ang.n_phi = need_phi ? opt.n_phi : 0;
    ang.y2_ref = pot.y0pp;

    QuadratureSpec quad;
    quad.rel_tol = opt.rel_tol;
    quad.abs_tol = 0.0;
    quad.max_evals = opt.max_evals;

    const FnN g = [&](std::span<const double> y) {
        const double rho = dist(y, x1);
        const double U = b1.radial_value(rho);
        const double dU = b1.radial_dlambda(rho);
        const double Vv = pot.V.value_point(y);
        const double Qv = pot.Q.value_point(y);
        return (Vv * U + (1.0 - Qv) * std::pow(U, pexp)) * dU;
    };
    const IntegralResult r = integrate_center_local(g, x1, -1.0, space, ang, quad);
    return 2.0 * cfg.k * r.value;
}

double pairing_interaction_integral(const DoubleCircleConfig& cfg, const PairingQuadOptions& opt) {
    const SpaceSpec& space = cfg.space;
    const double mstar = space.crit_exp.to_double();
    const auto centers = generate_centers(cfg);
    const BubbleField b1(space, centers[0], cfg.lambda);

    QuadratureSpec quad;
    quad.rel_tol = opt.rel_tol;
    quad.abs_tol = 0.0;
    quad.max_evals = opt.max_evals;

    // two-center integral as a function of the separation; separations repeat
    // around the circles, so cache on the distance
    std::vector<std::pair<double, double>> cache;
    const auto pair_term = [&](double d) {
        for (const auto& [dc, val] : cache)
            if (std::abs(dc - d) <= 1e-12 * d) return val;
        const BipolarFn F = [&](double xi, double eta) {
            const double rho1 = std::sqrt(xi * xi + eta * eta);
            const double rho2 = std::sqrt((xi - d) * (xi - d) + eta * eta);
            const double U1 = b1.radial_value(rho1);
            return std::pow(U1, mstar - 2.0) * b1.radial_dlambda(rho1) * b1.radial_value(rho2);
        };
        const double v = integrate_bipolar(F, space.dim, quad).value;
        cache.emplace_back(d, v);
        return v;
    };

    double sum = 0.0;
    for (int j = 2; j <= cfg.k; ++j) sum += pair_term(same_circle_distance(cfg, j));
    for (int j = 1; j <= cfg.k; ++j) sum += pair_term(cross_circle_distance(cfg, j));
    return -(mstar - 1.0) * 2.0 * cfg.k * sum;
}

EnergyExpansion pairing_sweep(const SpaceSpec& space, const PotentialModel& pot, const RegimeParams& regime,
                              std::span<const int> ks, const PairingSweepOptions& opt) {
    EnergyExpansion out;
    const int m = space.order;
    const auto mc = moment_constants(space, pot, true);
    out.B1 = mc.B1;
    out.B2 = mc.B2;
    out.B1_tilde_analytic = mc.B1_tilde;

    // stage 1: lambda sweep at fixed k, interactions off -> B1_tilde and its exponent
    std::vector<double> lams, vals;
    for (int j = 0; j < opt.n_lambda; ++j) {
        const double lam = opt.lambda0 * std::pow(2.0, j);
        const double h = regime.h_of_lambda(lam);
        const auto cfg = make_config(space, pot.r0, h, pot.y0pp, opt.k_fixed, lam);
        const double part = pairing_potential_integral(pot, cfg, opt.quad);
        out.rows.push_back({opt.k_fixed, lam, h, part, 0.0});
        lams.push_back(lam);
        vals.push_back(part / (2.0 * opt.k_fixed));
    }
    out.potential_fit = fit_power_law(lams, vals);
    out.B1_tilde_fit = -vals.back() * std::pow(lams.back(), 2.0 * m + 1.0);

    // stage 2: k sweep along the regime, interaction part -> B3_tilde, B4_tilde
    if (opt.include_interaction && !ks.empty()) {
        std::vector<std::array<double, 2>> X;
        std::vector<double> rhs;
        for (int k : ks) {
            const double lam = regime.lambda_of_k(opt.t_param, k);
            const double h = regime.h_of_lambda(lam);
            const auto cfg = make_config(space, pot.r0, h, pot.y0pp, k, lam);
            const double inter = pairing_interaction_integral(cfg, opt.quad);
            out.rows.push_back({k, lam, h, 0.0, inter});
            const double R = std::sqrt(1.0 - h * h);
            const double denom = std::pow(lam, space.dim - 2 * m + 1.0);
            X.push_back({std::pow(static_cast<double>(k), space.dim - 2 * m) /
                             (denom * std::pow(R, space.dim - 2 * m)),
                         static_cast<double>(k) / (denom * std::pow(h, space.dim - 2 * m - 1) * R)});
            rhs.push_back(inter / (2.0 * k));
        }
        // 2x2 normal equations with column scaling
        double s0 = 0.0, s1 = 0.0;
        for (const auto& x : X) {
            s0 += x[0] * x[0];
            s1 += x[1] * x[1];
        }
        s0 = std::sqrt(s0);
        s1 = std::sqrt(s1);
        if (s0 == 0.0 || s1 == 0.0) throw IllConditionedFitError("pairing_sweep: degenerate interaction basis");
        double a00 = 0, a01 = 0, a11 = 0, b0 = 0, b1 = 0;
        for (std::size_t i = 0; i < X.size(); ++i) {
            const double u = X[i][0] / s0, v = X[i][1] / s1;
            a00 += u * u;
            a01 += u * v;
            a11 += v * v;
            b0 += u * rhs[i];
            b1 += v * rhs[i];
        }
        const double det = a00 * a11 - a01 * a01;
        if (std::abs(det) < 1e-10 * a00 * a11)
            throw IllConditionedFitError("pairing_sweep: interaction terms not separated by the sweep");
        out.B3_tilde_fit = (b0 * a11 - b1 * a01) / det / s0;
        out.B4_tilde_fit = (a00 * b1 - a01 * b0) / det / s1;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Mass formulas
// ---------------------------------------------------------------------------
double ansatz_weighted_mass(const AnsatzSpec& spec, const FnN& weight, bool crit_power, double rho,
                            const PairingQuadOptions& opt, bool weight_axial) {
    const DoubleCircleConfig& cfg = spec.cfg;
    const SpaceSpec& space = cfg.space;
    const AnsatzField Z(spec);
    const auto& centers = Z.bubbles();
    const Vec& x1 = centers[0].center();
    const double mstar = space.crit_exp.to_double();
    const CutoffField& xi = Z.cutoff();
    const double r0 = spec.cutoff.r0;
    const Vec& y0 = spec.cutoff.y0pp;

    const auto in_domain = [&](std::span<const double> y) {
        const double r = std::sqrt(y[0] * y[0] + y[1] * y[1] + y[2] * y[2]);
        double s2 = (r - r0) * (r - r0);
        for (std::size_t i = 3; i < y.size(); ++i) {
            const double d = y[i] - y0[i - 3];
            s2 += d * d;
        }
        return s2 <= rho * rho;
    };
    const auto in_first_sector = [&](std::span<const double> y) {
        if (y[2] < 0.0) return false;
        const double plane = std::hypot(y[0], y[1]);
        if (plane == 0.0) return true;
        return y[0] / plane >= std::cos(M_PI / cfg.k) - 1e-15;
    };

    double y2_off = 0.0;
    for (std::size_t i = 0; i < cfg.ypp.size(); ++i) {
        const double d = cfg.ypp[i] - y0[i];
        y2_off += d * d;
    }
    const bool need_phi = weight_axial || y2_off > 1e-28;

    CenterLocalSpec diag_ang;
    diag_ang.n_chi = opt.n_chi;
    diag_ang.n_psi = opt.n_psi;
    diag_ang.n_beta = 0;
    diag_ang.n_phi = need_phi ? opt.n_phi : 0;
    diag_ang.y2_ref = y0;

    CenterLocalSpec corr_ang = diag_ang;
    corr_ang.n_beta = 32;  // the other-bubble sum depends on the y' azimuth

    QuadratureSpec quad;
    quad.rel_tol = opt.rel_tol;
    quad.abs_tol = 0.0;
    quad.max_evals = opt.max_evals;

    const double rho_max = 2.0 * cfg.r + 2.0 * rho;
    const auto& b1 = centers[0];
    const double power = crit_power ? mstar : 2.0;

    const FnN diag = [&](std::span<const double> y) {
        if (!in_domain(y)) return 0.0;
        const double xv = xi.value(y);
        if (xv == 0.0) return 0.0;
        return weight(y) * std::pow(xv * b1.value(y), power);
    };
    const FnN corr = [&](std::span<const double> y) {
        if (!in_domain(y) || !in_first_sector(y)) return 0.0;
        const double xv = xi.value(y);
        if (xv == 0.0) return 0.0;
        double sum = 0.0, sumpow = 0.0;
        for (const auto& b : centers) {
            const double u = xv * b.value(y);
            sum += u;
            sumpow += std::pow(u, power);
        }
        return weight(y) * (std::pow(sum, power) - sumpow);
    };

    const double n2k = 2.0 * cfg.k;
    const double d = integrate_center_local(diag, x1, rho_max, space, diag_ang, quad).value;
    const double c = integrate_center_local(corr, x1, rho_max, space, corr_ang, quad).value;
    return n2k * (d + c);
}

MassComparison mass_leading_order(const AnsatzSpec& spec, const CylFunc& h, double rho,
                                  const PairingQuadOptions& opt) {
    const DoubleCircleConfig& cfg = spec.cfg;
    const SpaceSpec& space = cfg.space;
    const FnN w = [&h](std::span<const double> y) { return h.value_point(y); };
    MassComparison out;
    out.lhs_sq = ansatz_weighted_mass(spec, w, false, rho, opt, h.has_axial_terms());
    out.lhs_crit = ansatz_weighted_mass(spec, w, true, rho, opt, h.has_axial_terms());
    double y2_off = 0.0;
    for (std::size_t i = 0; i < cfg.ypp.size(); ++i) {
        const double d = cfg.ypp[i] - spec.cutoff.y0pp[i];
        y2_off += d * d;
    }
    const double n2k = 2.0 * cfg.k;
    const double hc = h.value_cyl(cfg.r, y2_off, cfg.ypp[0] - spec.cutoff.y0pp[0]);
    out.pred_sq = n2k * std::pow(cfg.lambda, -2.0 * space.order) * hc * bubble_mass_l2(space);
    out.pred_crit = n2k * hc * bubble_mass_crit(space);
    return out;
}

// ---------------------------------------------------------------------------
// Balance system
// ---------------------------------------------------------------------------
namespace {

void solve_linear(std::vector<std::vector<double>>& M, Vec& b) {
    const int n = static_cast<int>(b.size());
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(M[r][col]) > std::abs(M[piv][col])) piv = r;
        std::swap(M[piv], M[col]);
        std::swap(b[piv], b[col]);
        if (M[col][col] == 0.0) throw std::runtime_error("solve_linear: singular Jacobian");
        for (int r = col + 1; r < n; ++r) {
            const double f = M[r][col] / M[col][col];
            for (int c = col; c < n; ++c) M[r][c] -= f * M[col][c];
            b[r] -= f * b[col];
        }
    }
    for (int r = n - 1; r >= 0; --r) {
        for (int c = r + 1; c < n; ++c) b[r] -= M[r][c] * b[c];
        b[r] /= M[r][r];
    }
}

double grad_norm(const Vec& g) {
    double s = 0.0;
    for (double v : g) s += v * v;
    return std::sqrt(s);
}

}  // namespace

Vec find_critical_point(const PotentialModel& pot, const Vec& start_ry, int max_iter, double tol) {
    const int n = static_cast<int>(start_ry.size());
    Vec z = start_ry;
    const auto grad_at = [&](const Vec& p) {
        return pot.Q.grad_ry(p[0], std::span<const double>(p.data() + 1, n - 1));
    };
    Vec g = grad_at(z);
    for (int it = 0; it < max_iter; ++it) {
        if (grad_norm(g) < tol) return z;
        // finite-difference Jacobian of the analytic gradient
        std::vector<std::vector<double>> J(n, std::vector<double>(n, 0.0));
        for (int j = 0; j < n; ++j) {
            const double step = 1e-6 * std::max(1.0, std::abs(z[j]));
            Vec zp = z, zm = z;
            zp[j] += step;
            zm[j] -= step;
            const Vec gp = grad_at(zp);
            const Vec gm = grad_at(zm);
            for (int i = 0; i < n; ++i) J[i][j] = (gp[i] - gm[i]) / (2.0 * step);
        }
        Vec dz = g;
        solve_linear(J, dz);
        double damp = 1.0;
        const double g0 = grad_norm(g);
        for (int half = 0; half < 40; ++half) {
            Vec zn = z;
            for (int i = 0; i < n; ++i) zn[i] -= damp * dz[i];
            const Vec gn = grad_at(zn);
            if (grad_norm(gn) < g0) {
                z = zn;
                g = gn;
                break;
            }
            damp *= 0.5;
            if (half == 39) throw std::runtime_error("find_critical_point: damped Newton stalled");
        }
    }
    if (grad_norm(g) < tol) return z;
    throw std::runtime_error("find_critical_point: no convergence");
}

int critical_point_index_sign(const PotentialModel& pot, double radius, int samples, std::uint64_t seed) {
    const int n = 1 + static_cast<int>(pot.y0pp.size());
    Rng rng(seed);
    int sign = 0;
    for (int s = 0; s < samples; ++s) {
        const Vec dir = rng.unit_vector(n);
        Vec z(n);
        z[0] = pot.r0 + radius * dir[0];
        for (int i = 1; i < n; ++i) z[i] = pot.y0pp[i - 1] + radius * dir[i];
        const Vec g = pot.Q.grad_ry(z[0], std::span<const double>(z.data() + 1, n - 1));
        double radial = 0.0;
        for (int i = 0; i < n; ++i) radial += g[i] * dir[i];
        if (radial == 0.0) throw IndexZeroError("critical_point_index_sign: vanishing radial component");
        const int s_here = radial > 0.0 ? +1 : -1;
        if (sign == 0) sign = s_here;
        if (s_here != sign)
            throw IndexZeroError("critical_point_index_sign: mixed signs, certificate inconclusive");
    }
    return sign;
}

double balance_function(double lambda, int k, const RegimeParams& regime, const BalanceOptions& opt) {
    const int N = regime.space.dim, m = regime.space.order;
    const double h = regime.h_of_lambda(lambda);
    const double R = std::sqrt(1.0 - h * h);
    const double gam = static_cast<double>(N - 2 * m);
    const double denom = std::pow(lambda, gam + 1.0);
    double F = -opt.B1_tilde / std::pow(lambda, 2.0 * m + 1.0);
    F += opt.B3_tilde * std::pow(static_cast<double>(k), gam) / (denom * std::pow(R, gam));
    F += opt.B4_tilde * static_cast<double>(k) / (denom * std::pow(h, gam - 1.0) * R);
    return F;
}

BalanceSolution solve_balance(const SpaceSpec& space, const PotentialModel& pot, const RegimeParams& regime, int k,
                              const BalanceOptions& opt_in) {
    BalanceOptions opt = opt_in;
    if (opt.B1_tilde <= 0.0) opt.B1_tilde = moment_constants(space, pot).B1_tilde;

    // stable critical point of Q: Newton from (r0, y0'') plus index certificate
    Vec start(1 + pot.y0pp.size(), 0.0);
    start[0] = pot.r0;
    for (std::size_t i = 0; i < pot.y0pp.size(); ++i) start[1 + i] = pot.y0pp[i];
    const Vec crit = find_critical_point(pot, start, opt.newton_max_iter, opt.newton_tol);
    critical_point_index_sign(pot, 1e-3 * pot.r0, opt.index_samples, opt.seed);

    const double kappa = regime.lambda_exponent().to_double();
    const double lo = regime.L0 * std::pow(static_cast<double>(k), kappa);
    const double hi = regime.L1 * std::pow(static_cast<double>(k), kappa);
    double flo = balance_function(lo, k, regime, opt);
    double fhi = balance_function(hi, k, regime, opt);
    if (flo == 0.0) flo = 1e-300;
    if (fhi == 0.0) fhi = -1e-300;
    if ((flo > 0.0) == (fhi > 0.0))
        throw NoRootInBracketError("solve_balance: balance function has no sign change in [L0,L1] bracket");
    double a = lo, b = hi, fa = flo;
    for (int it = 0; it < 200 && (b - a) > 1e-15 * b; ++it) {
        const double mid = 0.5 * (a + b);
        const double fm = balance_function(mid, k, regime, opt);
        if ((fm > 0.0) == (fa > 0.0)) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    BalanceSolution sol;
    sol.lambda = 0.5 * (a + b);
    sol.t = sol.lambda / std::pow(static_cast<double>(k), kappa);
    sol.case_id = regime.case_id;
    sol.k = k;
    sol.r_bar = crit[0];
    sol.y2_bar.assign(crit.begin() + 1, crit.end());
    const Vec g = pot.Q.grad_ry(crit[0], std::span<const double>(crit.data() + 1, crit.size() - 1));
    double gy = 0.0;
    for (std::size_t i = 1; i < g.size(); ++i) gy += g[i] * g[i];
    sol.residuals = {std::abs(g[0]), std::sqrt(gy),
                     std::abs(balance_function(sol.lambda, k, regime, opt)) * std::pow(sol.lambda, 2.0 * space.order + 1.0)};
    return sol;
}

double balance_case2_closed_form(const SpaceSpec& space, double B1t, double B3t, double a_limit) {
    const int N = space.dim, m = space.order;
    const double c = std::pow(1.0 - a_limit * a_limit, -0.5 * (N - 2 * m));
    return std::pow(B3t * c / B1t, 1.0 / (N - 4.0 * m));
}

}  // namespace polybubble
