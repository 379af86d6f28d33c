#include "polybubble/potential.hpp"

#include <cmath>
#include <stdexcept>

namespace polybubble {

CylFunc::CylFunc(double base, std::vector<CylTerm> terms, double r0, Vec y0pp, double env_width)
    : base_(base), terms_(std::move(terms)), r0_(r0), y0pp_(std::move(y0pp)), env_width_(env_width) {
    if (!(r0_ > 0.0)) throw std::invalid_argument("CylFunc: r0 must be > 0");
}

double CylFunc::envelope(double x) const {
    if (env_width_ <= 0.0) return 1.0;
    return std::exp(-x / (env_width_ * env_width_));
}

double CylFunc::value_cyl(double r, double t, double w) const {
    const double dr = r - r0_;
    double s = 0.0;
    for (const auto& tm : terms_)
        s += tm.coef * std::pow(dr, tm.pow_dr) * std::pow(t, tm.pow_t) * std::pow(w, tm.pow_w);
    return base_ + envelope(dr * dr + t) * s;
}

double CylFunc::value_point(std::span<const double> y) const {
    const double r = std::sqrt(y[0] * y[0] + y[1] * y[1] + y[2] * y[2]);
    double t = 0.0;
    for (std::size_t i = 3; i < y.size(); ++i) {
        const double d = y[i] - y0pp_[i - 3];
        t += d * d;
    }
    const double w = y[3] - y0pp_[0];
    return value_cyl(r, t, w);
}

void CylFunc::partials_cyl(double r, double t, double w, double& fr, double& ft, double& fw) const {
    const double dr = r - r0_;
    double s = 0.0, s_dr = 0.0, s_t = 0.0, s_w = 0.0;
    for (const auto& tm : terms_) {
        const double pr = std::pow(dr, tm.pow_dr);
        const double pt = std::pow(t, tm.pow_t);
        const double pw = std::pow(w, tm.pow_w);
        s += tm.coef * pr * pt * pw;
        if (tm.pow_dr > 0) s_dr += tm.coef * tm.pow_dr * std::pow(dr, tm.pow_dr - 1) * pt * pw;
        if (tm.pow_t > 0) s_t += tm.coef * pr * tm.pow_t * std::pow(t, tm.pow_t - 1) * pw;
        if (tm.pow_w > 0) s_w += tm.coef * pr * pt * tm.pow_w * std::pow(w, tm.pow_w - 1);
    }
    const double E = envelope(dr * dr + t);
    double Edr = 0.0, Et = 0.0;
    if (env_width_ > 0.0) {
        const double iw2 = 1.0 / (env_width_ * env_width_);
        Edr = -2.0 * dr * iw2 * E;
        Et = -iw2 * E;
    }
    fr = Edr * s + E * s_dr;
    ft = Et * s + E * s_t;
    fw = E * s_w;
}

Vec CylFunc::grad_ry(double r, std::span<const double> ypp) const {
    double t = 0.0;
    for (std::size_t i = 0; i < ypp.size(); ++i) {
        const double d = ypp[i] - y0pp_[i];
        t += d * d;
    }
    const double w = ypp[0] - y0pp_[0];
    double fr, ft, fw;
    partials_cyl(r, t, w, fr, ft, fw);
    Vec g(1 + ypp.size(), 0.0);
    g[0] = fr;
    for (std::size_t i = 0; i < ypp.size(); ++i) g[1 + i] = ft * 2.0 * (ypp[i] - y0pp_[i]);
    g[1] += fw;
    return g;
}

double CylFunc::partial_ypp(std::span<const double> y, int i) const {
    const double r = std::sqrt(y[0] * y[0] + y[1] * y[1] + y[2] * y[2]);
    double t = 0.0;
    for (std::size_t j = 3; j < y.size(); ++j) {
        const double d = y[j] - y0pp_[j - 3];
        t += d * d;
    }
    const double w = y[3] - y0pp_[0];
    double fr, ft, fw;
    partials_cyl(r, t, w, fr, ft, fw);
    double g = ft * 2.0 * (y[i] - y0pp_[i - 3]);
    if (i == 3) g += fw;
    return g;
}

double CylFunc::partial_r(std::span<const double> y) const {
    const double r = std::sqrt(y[0] * y[0] + y[1] * y[1] + y[2] * y[2]);
    double t = 0.0;
    for (std::size_t j = 3; j < y.size(); ++j) {
        const double d = y[j] - y0pp_[j - 3];
        t += d * d;
    }
    const double w = y[3] - y0pp_[0];
    double fr, ft, fw;
    partials_cyl(r, t, w, fr, ft, fw);
    return fr;
}

Jet CylFunc::jet(const std::shared_ptr<const JetSpace>& sp, std::span<const double> y) const {
    const int N = sp->nvars();
    Jet q = Jet::constant(sp, 0.0);
    for (int i = 0; i < 3; ++i) {
        Jet v = Jet::variable(sp, i, y[i]);
        q += v * v;
    }
    const Jet dr = q.sqrt() + (-r0_);
    Jet t = Jet::constant(sp, 0.0);
    for (int i = 3; i < N; ++i) {
        Jet v = Jet::variable(sp, i, y[i]) + (-y0pp_[i - 3]);
        t += v * v;
    }
    const Jet w = Jet::variable(sp, 3, y[3]) + (-y0pp_[0]);
    Jet s = Jet::constant(sp, 0.0);
    for (const auto& tm : terms_) s += dr.powi(tm.pow_dr) * t.powi(tm.pow_t) * w.powi(tm.pow_w) * tm.coef;
    if (env_width_ > 0.0) {
        const double iw2 = 1.0 / (env_width_ * env_width_);
        const Jet E = ((dr * dr + t) * (-iw2)).exp();
        s = E * s;
    }
    return s + base_;
}

bool CylFunc::has_axial_terms() const {
    for (const auto& tm : terms_)
        if (tm.pow_w > 0) return true;
    return false;
}

std::vector<std::vector<int>> even_multi_indices(int n, int total) {
    std::vector<std::vector<int>> out;
    if (total % 2 != 0) return out;
    for (auto half : multi_indices_of_degree(n, total / 2)) {
        for (int& e : half) e *= 2;
        out.push_back(std::move(half));
    }
    return out;
}

PotentialModel make_potential_model(const SpaceSpec& space, CylFunc V, CylFunc Q) {
    PotentialModel pot;
    pot.space = space;
    pot.r0 = Q.r0();
    pot.y0pp = Q.y0pp();
    pot.flatness_order = 2 * space.order;
    pot.V = std::move(V);
    pot.Q = std::move(Q);

    const double q0 = pot.Q.value_cyl(pot.r0, 0.0, 0.0);
    if (std::abs(q0 - 1.0) > 1e-12)
        throw std::invalid_argument("make_potential_model: Q must equal 1 at the critical point");

    // flatness D^alpha Q = 0 for 1 <= |alpha| <= 2m-1, checked with exact jets
    const int N = space.dim;
    Vec y0(N, 0.0);
    y0[0] = pot.r0;
    for (int i = 3; i < N; ++i) y0[i] = pot.y0pp[i - 3];
    auto sp = JetSpace::make(N, pot.flatness_order - 1);
    const Jet qj = pot.Q.jet(sp, y0);
    for (int d = 1; d <= pot.flatness_order - 1; ++d) {
        for (const auto& alpha : multi_indices_of_degree(N, d)) {
            const double da = qj.deriv(alpha);
            if (std::abs(da) > 1e-9)
                throw FlatnessViolationError("make_potential_model: Q has a nonzero derivative of order " +
                                             std::to_string(d) + " at the critical point");
        }
    }
    return pot;
}

double contract_flat_derivatives(const PotentialModel& pot,
                                 const std::function<double(std::span<const int>)>& moment_of) {
    const int N = pot.space.dim;
    Vec y0(N, 0.0);
    y0[0] = pot.r0;
    for (int i = 3; i < N; ++i) y0[i] = pot.y0pp[i - 3];
    auto sp = JetSpace::make(N, pot.flatness_order);
    const Jet qj = pot.Q.jet(sp, y0);
    double sum = 0.0;
    for (const auto& alpha : even_multi_indices(N, pot.flatness_order)) {
        sum += qj.deriv(alpha) * moment_of(alpha);
    }
    return sum;
}

PotentialModel builtin_potential(const SpaceSpec& space, double v0, double qr, double qt, double env_width,
                                 double cubic_tilt) {
    const int m = space.order;
    if (cubic_tilt != 0.0 && m != 1)
        throw std::invalid_argument("builtin_potential: cubic tilt breaks flatness unless m == 1");
    const double r0 = 1.0;
    const Vec y0pp(space.dim - 3, 0.0);
    std::vector<CylTerm> vterms;
    if (v0 != 0.0) vterms.push_back({v0, 0, 0, 0});
    CylFunc V(0.0, vterms, r0, y0pp, env_width);
    std::vector<CylTerm> qterms;
    if (qr != 0.0) qterms.push_back({qr, 2 * m, 0, 0});
    if (qt != 0.0) qterms.push_back({qt, 0, m, 0});
    if (cubic_tilt != 0.0) qterms.push_back({cubic_tilt, 0, 0, 3});
    CylFunc Q(1.0, qterms, r0, y0pp, env_width);
    return make_potential_model(space, std::move(V), std::move(Q));
}

}  // namespace polybubble
