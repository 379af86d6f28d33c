#include "polybubble/pohozaev.hpp"

#include <cmath>
#include <stdexcept>

#include "polybubble/moments.hpp"

namespace polybubble {

namespace {

double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

}  // namespace

SmoothField make_fd_field(const FnN& value, int dim, int m, double length_scale) {
    SmoothField f;
    f.value = value;
    const double h0 = 1e-2 * length_scale;
    f.grad = [value, dim, h0](std::span<const double> y) {
        Vec g(dim, 0.0);
        Vec p(y.begin(), y.end());
        for (int i = 0; i < dim; ++i) {
            const double yi = p[i];
            p[i] = yi + 2 * h0;
            const double f2p = value(p);
            p[i] = yi + h0;
            const double f1p = value(p);
            p[i] = yi - h0;
            const double f1m = value(p);
            p[i] = yi - 2 * h0;
            const double f2m = value(p);
            p[i] = yi;
            g[i] = (-f2p + 8.0 * f1p - 8.0 * f1m + f2m) / (12.0 * h0);
        }
        return g;
    };
    // iterated fourth-order Laplacian stencil, Richardson-extrapolated once
    struct Lap {
        static double apply(const FnN& fn, std::span<const double> y, int dim, double h) {
            Vec p(y.begin(), y.end());
            const double f0 = fn(p);
            double acc = 0.0;
            for (int i = 0; i < dim; ++i) {
                const double yi = p[i];
                p[i] = yi + 2 * h;
                const double f2p = fn(p);
                p[i] = yi + h;
                const double f1p = fn(p);
                p[i] = yi - h;
                const double f1m = fn(p);
                p[i] = yi - 2 * h;
                const double f2m = fn(p);
                p[i] = yi;
                acc += (-f2p + 16.0 * f1p - 30.0 * f0 + 16.0 * f1m - f2m) / (12.0 * h * h);
            }
            return acc;
        }
    };
    f.polyharm_m = [value, dim, m, h0](std::span<const double> y) {
        const auto iter = [&](double h) {
            FnN cur = value;
            for (int l = 0; l < m; ++l) {
                FnN prev = cur;
                cur = [prev, dim, h](std::span<const double> p) { return Lap::apply(prev, p, dim, h); };
            }
            const double sign = (m % 2 == 0) ? 1.0 : -1.0;
            return sign * cur(y);
        };
        const double d1 = iter(h0);
        const double d2 = iter(0.5 * h0);
        return (16.0 * d2 - d1) / 15.0;
    };
    return f;
}

BumpField::BumpField(const SpaceSpec& space, Vec center, double radius, int p)
    : space_(space), center_(std::move(center)), radius_(radius), p_(p) {
    if (p < 2 * space.order + 1) throw std::invalid_argument("BumpField: exponent must be >= 2m+1");
    if (!(radius > 0.0)) throw std::invalid_argument("BumpField: radius must be > 0");
    // (1-u)^p in u = (rho/R)^2
    std::vector<double> base(p + 1, 0.0);
    for (int j = 0; j <= p; ++j) base[j] = binom(p, j) * ((j % 2 == 0) ? 1.0 : -1.0);
    coeffs_.push_back(base);
    const double iR2 = 1.0 / (radius_ * radius_);
    const int N = space_.dim;
    for (int l = 1; l <= space_.order; ++l) {
        const auto& prev = coeffs_.back();
        std::vector<double> next(std::max<std::size_t>(1, prev.size() - 1), 0.0);
        for (std::size_t j = 1; j < prev.size(); ++j) {
            const double jj = static_cast<double>(j);
            next[j - 1] += -iR2 * (4.0 * jj * (jj - 1.0) + 2.0 * N * jj) * prev[j];
        }
        coeffs_.push_back(std::move(next));
    }
}

double BumpField::radial_value(double rho) const { return radial_polyharm(0, rho); }

double BumpField::radial_polyharm(int l, double rho) const {
    const double u = (rho / radius_) * (rho / radius_);
    if (u >= 1.0) return 0.0;
    const auto& c = coeffs_[l];
    double v = 0.0;
    for (int j = static_cast<int>(c.size()) - 1; j >= 0; --j) v = v * u + c[j];
    return v;
}

double BumpField::radial_dvalue(double rho) const {
    const double u = (rho / radius_) * (rho / radius_);
    if (u >= 1.0) return 0.0;
    const auto& c = coeffs_[0];
    double dv = 0.0;
    for (int j = static_cast<int>(c.size()) - 1; j >= 1; --j) dv = dv * u + j * c[j];
    return dv * 2.0 * rho / (radius_ * radius_);
}

double BumpField::value(std::span<const double> y) const { return radial_value(dist(y, center_)); }

Vec BumpField::grad(std::span<const double> y) const {
    const int N = space_.dim;
    const double rho = dist(y, center_);
    Vec g(N, 0.0);
    const double u = (rho / radius_) * (rho / radius_);
    if (u >= 1.0) return g;
    const auto& c = coeffs_[0];
    double dv = 0.0;
    for (int j = static_cast<int>(c.size()) - 1; j >= 1; --j) dv = dv * u + j * c[j];
    const double slope = dv * 2.0 / (radius_ * radius_);  // (d/drho)/rho
    for (int i = 0; i < N; ++i) g[i] = slope * (y[i] - center_[i]);
    return g;
}

double BumpField::polyharm(int l, std::span<const double> y) const {
    return radial_polyharm(l, dist(y, center_));
}

SmoothField BumpField::as_field(int m) const {
    SmoothField f;
    f.value = [this](std::span<const double> y) { return value(y); };
    f.grad = [this](std::span<const double> y) { return grad(y); };
    f.polyharm_m = [this, m](std::span<const double> y) { return polyharm(m, y); };
    return f;
}

IntegralResult bilinear_L1(const SmoothField& u, const SmoothField& v, std::span<const double> lo,
                           std::span<const double> hi, const QuadratureSpec& spec) {
    const FnN g = [&](std::span<const double> y) {
        const Vec gu = u.grad(y);
        const Vec gv = v.grad(y);
        double ydotgu = 0.0, ydotgv = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            ydotgu += y[i] * gu[i];
            ydotgv += y[i] * gv[i];
        }
        return u.polyharm_m(y) * ydotgv + v.polyharm_m(y) * ydotgu;
    };
    return integrate_box(g, lo, hi, spec);
}

IntegralResult bilinear_L2(const SmoothField& u, const SmoothField& v, int i, std::span<const double> lo,
                           std::span<const double> hi, const QuadratureSpec& spec) {
    const FnN g = [&](std::span<const double> y) {
        return u.polyharm_m(y) * v.grad(y)[i] + v.polyharm_m(y) * u.grad(y)[i];
    };
    return integrate_box(g, lo, hi, spec);
}

IntegralResult bilinear_mass(const SmoothField& u, const SmoothField& v, std::span<const double> lo,
                             std::span<const double> hi, const QuadratureSpec& spec) {
    const FnN g = [&](std::span<const double> y) { return u.value(y) * v.polyharm_m(y) + v.value(y) * u.polyharm_m(y); };
    return integrate_box(g, lo, hi, spec);
}

BilinearPair bilinear_pair_collinear(const BumpField& u, const BumpField& v, int m, const QuadratureSpec& spec) {
    const int N = static_cast<int>(u.center().size());
    // both centers must sit on one axis through the origin
    Vec axis(N, 0.0);
    double na = 0.0;
    for (int i = 0; i < N; ++i) {
        axis[i] = v.center()[i] - u.center()[i];
        na += axis[i] * axis[i];
    }
    na = std::sqrt(na);
    if (na == 0.0) {
        axis.assign(N, 0.0);
        axis[0] = 1.0;
        na = 1.0;
    }
    for (int i = 0; i < N; ++i) axis[i] /= na;
    const double a = dot(u.center(), axis);
    const double b = dot(v.center(), axis);
    for (int i = 0; i < N; ++i) {
        const double off = u.center()[i] - a * axis[i];
        if (std::abs(off) > 1e-12)
            throw std::invalid_argument("bilinear_pair_collinear: centers must be collinear with the origin");
    }

    const auto slope_u = [&](double rho) { return rho == 0.0 ? 0.0 : u.radial_dvalue(rho) / rho; };
    const auto slope_v = [&](double rho) { return rho == 0.0 ? 0.0 : v.radial_dvalue(rho) / rho; };

    const double xi_lo = std::min(a - u.radius(), b - v.radius());
    const double xi_hi = std::max(a + u.radius(), b + v.radius());

    BilinearPair out;
    const BipolarFn f_l1 = [&](double xi, double eta) {
        const double r1 = std::sqrt((xi - a) * (xi - a) + eta * eta);
        const double r2 = std::sqrt((xi - b) * (xi - b) + eta * eta);
        const double phu = u.radial_polyharm(m, r1);
        const double phv = v.radial_polyharm(m, r2);
        const double ydotgv = slope_v(r2) * (xi * (xi - b) + eta * eta);
        const double ydotgu = slope_u(r1) * (xi * (xi - a) + eta * eta);
        return phu * ydotgv + phv * ydotgu;
    };
    const BipolarFn f_l2 = [&](double xi, double eta) {
        const double r1 = std::sqrt((xi - a) * (xi - a) + eta * eta);
        const double r2 = std::sqrt((xi - b) * (xi - b) + eta * eta);
        return u.radial_polyharm(m, r1) * slope_v(r2) * (xi - b) +
               v.radial_polyharm(m, r2) * slope_u(r1) * (xi - a);
    };
    const BipolarFn f_mass = [&](double xi, double eta) {
        const double r1 = std::sqrt((xi - a) * (xi - a) + eta * eta);
        const double r2 = std::sqrt((xi - b) * (xi - b) + eta * eta);
        return u.radial_polyharm(m, r1) * v.radial_value(r2) + v.radial_polyharm(m, r2) * u.radial_value(r1);
    };
    const BipolarFn f_gross = [&](double xi, double eta) {
        const double r1 = std::sqrt((xi - a) * (xi - a) + eta * eta);
        const double r2 = std::sqrt((xi - b) * (xi - b) + eta * eta);
        const double t1 = u.radial_polyharm(m, r1) * slope_v(r2) * (xi * (xi - b) + eta * eta);
        const double t2 = v.radial_polyharm(m, r2) * slope_u(r1) * (xi * (xi - a) + eta * eta);
        return std::abs(t1) + std::abs(t2);
    };
    out.L1 = integrate_bipolar(f_l1, N, spec, xi_lo, xi_hi).value;
    out.L2_axis = integrate_bipolar(f_l2, N, spec, xi_lo, xi_hi).value;
    out.mass = integrate_bipolar(f_mass, N, spec, xi_lo, xi_hi).value;
    out.gross = integrate_bipolar(f_gross, N, spec, xi_lo, xi_hi).value;
    return out;
}

PohozaevReport pohozaev_residual(const AnsatzSpec& spec, const PotentialModel& pot, double rho,
                                 PohozaevIdentity identity, int coordinate, const PairingQuadOptions& opt) {
    const double delta = spec.cutoff.delta;
    if (!(rho > 2.0 * delta && rho < 5.0 * delta))
        throw RhoOutOfRangeError("pohozaev_residual: rho must lie in (2 delta, 5 delta)");
    const SpaceSpec& space = spec.cfg.space;
    const int m = space.order;
    const double mstar = space.crit_exp.to_double();
    const double lam = spec.cfg.lambda;
    const double n2k = 2.0 * spec.cfg.k;

    PohozaevReport rep;
    rep.rho = rho;
    rep.identity_id = identity;
    rep.coordinate = coordinate;

    // values of the weight functions at the configured center (r_bar, ybar'')
    const int N = space.dim;
    Vec yc(N, 0.0);
    yc[0] = spec.cfg.r;
    for (int i = 3; i < N; ++i) yc[i] = spec.cfg.ypp[i - 3];

    if (identity == PohozaevIdentity::translational) {
        if (coordinate != 3)
            throw std::invalid_argument(
                "pohozaev_residual: the y'' directions are equivalent; coordinate 3 carries the axial structure");
        const FnN wV = [&](std::span<const double> y) { return pot.V.partial_ypp(y, coordinate); };
        const FnN wQ = [&](std::span<const double> y) { return pot.Q.partial_ypp(y, coordinate); };
        const double mass_v = pot.V.empty() ? 0.0 : ansatz_weighted_mass(spec, wV, false, rho, opt, true);
        const double mass_q = ansatz_weighted_mass(spec, wQ, true, rho, opt, true);
        rep.volume_lhs = mass_v - (2.0 / mstar) * mass_q;
        const double dV = pot.V.partial_ypp(yc, coordinate);
        const double dQ = pot.Q.partial_ypp(yc, coordinate);
        rep.predicted_rhs = n2k * (std::pow(lam, -2.0 * m) * dV * bubble_mass_l2(space) -
                                   (2.0 / mstar) * dQ * bubble_mass_crit(space));
    } else if (identity == PohozaevIdentity::radial) {
        const FnN wV = [&](std::span<const double> y) {
            const double r = std::sqrt(y[0] * y[0] + y[1] * y[1] + y[2] * y[2]);
            return m * pot.V.value_point(y) + 0.5 * r * pot.V.partial_r(y);
        };
        const FnN wQ = [&](std::span<const double> y) {
            const double r = std::sqrt(y[0] * y[0] + y[1] * y[1] + y[2] * y[2]);
            return r * pot.Q.partial_r(y);
        };
        const bool ax = pot.V.has_axial_terms() || pot.Q.has_axial_terms();
        const double mass_v = ansatz_weighted_mass(spec, wV, false, rho, opt, ax);
        const double mass_q = ansatz_weighted_mass(spec, wQ, true, rho, opt, ax);
        rep.volume_lhs = mass_v - (1.0 / mstar) * mass_q;
        const double gV = m * pot.V.value_point(yc) + 0.5 * spec.cfg.r * pot.V.partial_r(yc);
        const double gQ = spec.cfg.r * pot.Q.partial_r(yc);
        rep.predicted_rhs = n2k * (std::pow(lam, -2.0 * m) * gV * bubble_mass_l2(space) -
                                   (1.0 / mstar) * gQ * bubble_mass_crit(space));
    } else {
        rep.volume_lhs = pairing_potential_integral(pot, spec.cfg, opt) + pairing_interaction_integral(spec.cfg, opt);
        const auto mc = moment_constants(space, pot, true);
        rep.predicted_rhs = -n2k * mc.B1_tilde / std::pow(lam, 2.0 * m + 1.0);
    }
    rep.gap = rep.volume_lhs - rep.predicted_rhs;
    return rep;
}

}  // namespace polybubble
