#include "polybubble/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <stdexcept>

#include "polybubble/reduce.hpp"
#include "polybubble/rng.hpp"

namespace polybubble {

double sphere_area(int n) {
    return 2.0 * std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n);
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.resize(n);
    weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
        weights[n - 1 - i] = weights[i];
    }
}

// ---------------------------------------------------------------------------
// Gauss-Kronrod (G7,K15)
// ---------------------------------------------------------------------------
namespace {

const double kKronrodX[8] = {0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
                             0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
const double kKronrodW[8] = {0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
                             0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
const double kGaussW[4] = {0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

struct Segment {
    double a, b, value, err;
    long id;
};

struct SegmentWorse {
    bool operator()(const Segment& x, const Segment& y) const {
        if (x.err != y.err) return x.err < y.err;
        return x.id > y.id;  // deterministic tie-break
    }
};

Segment eval_gk15(const Fn1& f, double a, double b, long id) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double fv[15];
    double resk = 0.0, resg = 0.0;
    for (int i = 0; i < 8; ++i) {
        const double x = kKronrodX[i] * h;
        if (i == 7) {
            fv[7] = f(c);
            resk += kKronrodW[7] * fv[7];
            resg += kGaussW[3] * fv[7];
        } else {
            const double f1 = f(c - x), f2 = f(c + x);
            fv[i] = f1;
            fv[14 - i] = f2;
            resk += kKronrodW[i] * (f1 + f2);
            if (i % 2 == 1) resg += kGaussW[i / 2] * (f1 + f2);
        }
    }
    const double reskh = resk * 0.5;
    double resasc = kKronrodW[7] * std::abs(fv[7] - reskh);
    for (int i = 0; i < 7; ++i) resasc += kKronrodW[i] * (std::abs(fv[i] - reskh) + std::abs(fv[14 - i] - reskh));
    resasc *= std::abs(h);
    double err = std::abs((resk - resg) * h);
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    return Segment{a, b, resk * h, err, id};
}

}  // namespace

IntegralResult integrate_1d(const Fn1& f, double a, double b, const QuadratureSpec& spec) {
    IntegralResult res;
    if (a == b) return res;
    long id = 0;
    std::priority_queue<Segment, std::vector<Segment>, SegmentWorse> heap;
    heap.push(eval_gk15(f, a, b, id++));
    res.evals = 15;
    double total_val = heap.top().value, total_err = heap.top().err;
    while (total_err > std::max(spec.abs_tol, spec.rel_tol * std::abs(total_val))) {
        if (res.evals + 30 > spec.max_evals) {
            res.status = QuadStatus::budget_exhausted;
            break;
        }
        const Segment worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid == worst.a || mid == worst.b) {
            // interval at machine resolution; accept as is
            heap.push(worst);
            res.status = QuadStatus::non_convergent;
            break;
        }
        const Segment s1 = eval_gk15(f, worst.a, mid, id++);
        const Segment s2 = eval_gk15(f, mid, worst.b, id++);
        res.evals += 30;
        total_val += s1.value + s2.value - worst.value;
        total_err += s1.err + s2.err - worst.err;
        heap.push(s1);
        heap.push(s2);
    }
    res.value = total_val;
    res.err_est = total_err;
    return res;
}

IntegralResult integrate_radial(const Fn1& f, const QuadratureSpec& spec) {
    const auto g = [&f](double t) {
        const double om = 1.0 - t;
        const double rho = t / om;
        return f(rho) / (om * om);
    };
    return integrate_1d(g, 0.0, 1.0, spec);
}

// ---------------------------------------------------------------------------
// Genz-Malik degree-7 cubature with embedded degree-5 error estimate
// ---------------------------------------------------------------------------
namespace {

struct GmRule {
    int dim;
    double w[5], we[4];
    double lam2, lam4, lam5;
    long points;

    explicit GmRule(int d) : dim(d) {
        lam2 = std::sqrt(9.0 / 70.0);
        lam4 = std::sqrt(9.0 / 10.0);
        lam5 = std::sqrt(9.0 / 19.0);
        const double dd = d;
        w[0] = (12824.0 - 9120.0 * dd + 400.0 * dd * dd) / 19683.0;
        w[1] = 980.0 / 6561.0;
        w[2] = (1820.0 - 400.0 * dd) / 19683.0;
        w[3] = 200.0 / 19683.0;
        w[4] = (6859.0 / 19683.0) / std::pow(2.0, d);
        we[0] = (729.0 - 950.0 * dd + 50.0 * dd * dd) / 729.0;
        we[1] = 245.0 / 486.0;
        we[2] = (265.0 - 100.0 * dd) / 1458.0;
        we[3] = 25.0 / 729.0;
        points = 1 + 4L * d + 2L * d * (d - 1) + (1L << d);
    }
};

struct GmRegion {
    std::vector<double> center, half;
    double value, err;
    int split_dim;
    long id;
};

struct GmWorse {
    bool operator()(const GmRegion& x, const GmRegion& y) const {
        if (x.err != y.err) return x.err < y.err;
        return x.id > y.id;
    }
};

void gm_eval(const FnN& f, const GmRule& rule, GmRegion& reg) {
    const int d = rule.dim;
    std::vector<double> p(reg.center);
    double vol = 1.0;
    for (int i = 0; i < d; ++i) vol *= 2.0 * reg.half[i];

    const double f0 = f(p);
    double sum2 = 0.0, sum3 = 0.0, sum4 = 0.0, sum5 = 0.0;
    std::vector<double> fourth(d, 0.0);
    const double ratio = (rule.lam2 * rule.lam2) / (rule.lam4 * rule.lam4);

    for (int i = 0; i < d; ++i) {
        const double ci = reg.center[i];
        const double h2 = rule.lam2 * reg.half[i];
        const double h4 = rule.lam4 * reg.half[i];
        p[i] = ci - h2;
        const double fm2 = f(p);
        p[i] = ci + h2;
        const double fp2 = f(p);
        p[i] = ci - h4;
        const double fm4 = f(p);
        p[i] = ci + h4;
        const double fp4 = f(p);
        p[i] = ci;
        sum2 += fm2 + fp2;
        sum3 += fm4 + fp4;
        fourth[i] = std::abs(fm2 + fp2 - 2.0 * f0 - ratio * (fm4 + fp4 - 2.0 * f0));
    }

    // pairs (+-lam4, +-lam4)
    for (int i = 0; i < d; ++i) {
        for (int j = i + 1; j < d; ++j) {
            const double hi = rule.lam4 * reg.half[i];
            const double hj = rule.lam4 * reg.half[j];
            for (int si = -1; si <= 1; si += 2) {
                for (int sj = -1; sj <= 1; sj += 2) {
                    p[i] = reg.center[i] + si * hi;
                    p[j] = reg.center[j] + sj * hj;
                    sum4 += f(p);
                }
            }
            p[i] = reg.center[i];
            p[j] = reg.center[j];
        }
    }

    // corners (+-lam5,...,+-lam5)
    for (long mask = 0; mask < (1L << d); ++mask) {
        for (int i = 0; i < d; ++i) {
            const double s = (mask >> i) & 1 ? 1.0 : -1.0;
            p[i] = reg.center[i] + s * rule.lam5 * reg.half[i];
        }
        sum5 += f(p);
    }

    const double res7 = vol * (rule.w[0] * f0 + rule.w[1] * sum2 + rule.w[2] * sum3 + rule.w[3] * sum4 +
                               rule.w[4] * sum5);
    const double res5 = vol * (rule.we[0] * f0 + rule.we[1] * sum2 + rule.we[2] * sum3 + rule.we[3] * sum4);
    reg.value = res7;
    reg.err = std::abs(res7 - res5);
    int sd = 0;
    double best = -1.0;
    for (int i = 0; i < d; ++i) {
        if (fourth[i] > best) {
            best = fourth[i];
            sd = i;
        }
    }
    reg.split_dim = sd;
}

}  // namespace

IntegralResult integrate_box(const FnN& f, std::span<const double> lo, std::span<const double> hi,
                             const QuadratureSpec& spec) {
    const int d = static_cast<int>(lo.size());
    if (d == 0 || hi.size() != lo.size()) throw std::invalid_argument("integrate_box: bad bounds");
    if (d == 1) {
        return integrate_1d([&f](double x) { return f(std::span<const double>(&x, 1)); }, lo[0], hi[0], spec);
    }
    const GmRule rule(d);
    IntegralResult res;
    long id = 0;
    GmRegion root;
    root.center.resize(d);
    root.half.resize(d);
    for (int i = 0; i < d; ++i) {
        root.center[i] = 0.5 * (lo[i] + hi[i]);
        root.half[i] = 0.5 * (hi[i] - lo[i]);
    }
    root.id = id++;
    gm_eval(f, rule, root);
    res.evals = rule.points;
    double total_val = root.value, total_err = root.err;
    std::priority_queue<GmRegion, std::vector<GmRegion>, GmWorse> heap;
    heap.push(std::move(root));
    while (total_err > std::max(spec.abs_tol, spec.rel_tol * std::abs(total_val))) {
        if (res.evals + 2 * rule.points > spec.max_evals) {
            res.status = QuadStatus::budget_exhausted;
            break;
        }
        GmRegion worst = heap.top();
        heap.pop();
        const int sd = worst.split_dim;
        GmRegion a = worst, b = worst;
        a.half[sd] *= 0.5;
        b.half[sd] *= 0.5;
        a.center[sd] -= a.half[sd];
        b.center[sd] += b.half[sd];
        a.id = id++;
        b.id = id++;
        gm_eval(f, rule, a);
        gm_eval(f, rule, b);
        res.evals += 2 * rule.points;
        total_val += a.value + b.value - worst.value;
        total_err += a.err + b.err - worst.err;
        heap.push(std::move(a));
        heap.push(std::move(b));
    }
    res.value = total_val;
    res.err_est = total_err;
    return res;
}

IntegralResult integrate_rd(const FnN& f, int d, const QuadratureSpec& spec) {
    std::vector<double> lo(d, -1.0), hi(d, 1.0);
    std::vector<double> y(d);
    const FnN g = [&](std::span<const double> t) -> double {
        double jac = 1.0;
        for (int i = 0; i < d; ++i) {
            const double ti = t[i];
            const double om = 1.0 - ti * ti;
            y[i] = ti / om;
            jac *= (1.0 + ti * ti) / (om * om);
        }
        const double fv = f(y);
        return fv == 0.0 ? 0.0 : fv * jac;
    };
    return integrate_box(g, lo, hi, spec);
}

// ---------------------------------------------------------------------------
// Surface moments
// ---------------------------------------------------------------------------
double surface_moment_closed(std::span<const int> alpha) {
    int total = 0;
    for (int a : alpha) {
        if (a % 2 != 0) return 0.0;
        total += a;
    }
    const int n = static_cast<int>(alpha.size());
    double logv = std::log(2.0);
    for (int a : alpha) logv += std::lgamma(0.5 * (a + 1));
    logv -= std::lgamma(0.5 * (n + total));
    return std::exp(logv);
}

double surface_moment_quad(std::span<const int> alpha, const QuadratureSpec& spec) {
    const int n = static_cast<int>(alpha.size());
    if (n == 1) return (alpha[0] % 2 == 0) ? 2.0 : 0.0;
    int rest = 0;
    for (int i = 1; i < n; ++i) rest += alpha[i];
    const int a0 = alpha[0];
    const int sin_pow = n - 2 + rest;
    const auto th = integrate_1d(
        [&](double t) { return std::pow(std::cos(t), a0) * std::pow(std::sin(t), sin_pow); }, 0.0, M_PI, spec);
    return th.value * surface_moment_quad(alpha.subspan(1), spec);
}

IntegralResult integrate_monomial_radial(std::span<const int> alpha, const Fn1& radial, int dim,
                                         const QuadratureSpec& spec) {
    int total = 0;
    for (int a : alpha) total += a;
    const double ang = surface_moment_quad(alpha, spec);
    IntegralResult r = integrate_radial(
        [&](double rho) { return radial(rho) * std::pow(rho, dim - 1 + total); }, spec);
    r.value *= ang;
    r.err_est *= std::abs(ang);
    return r;
}

// ---------------------------------------------------------------------------
// Annulus integration in the (r, y'') geometry
// ---------------------------------------------------------------------------
IntegralResult integrate_annulus_cyl(const CylFn& F, double rho_inner, double rho_outer, double r0, int dim,
                                     const QuadratureSpec& spec) {
    if (!(0.0 <= rho_inner && rho_inner <= rho_outer))
        throw std::invalid_argument("integrate_annulus_cyl: need 0 <= rho_inner <= rho_outer");
    if (rho_outer >= r0)
        throw std::invalid_argument("integrate_annulus_cyl: rho_outer must stay below r0 (r > 0 region)");
    IntegralResult res;
    if (rho_inner == rho_outer) return res;
    const int d2 = dim - 4;  // q^{N-4} weight from the y''-shell
    const double front = sphere_area(3) * sphere_area(dim - 3);
    std::array<double, 2> lo{rho_inner, 0.0}, hi{rho_outer, M_PI};
    const FnN g = [&](std::span<const double> st) -> double {
        const double s = st[0], theta = st[1];
        const double r = r0 + s * std::cos(theta);
        const double q = s * std::sin(theta);
        return F(r, q) * r * r * std::pow(q, d2) * s;
    };
    res = integrate_box(g, lo, hi, spec);
    res.value *= front;
    res.err_est *= front;
    return res;
}

AnnulusResult integrate_annulus(const FnN& f, double rho_inner, double rho_outer, double r0, const Vec& y0pp,
                                const SpaceSpec& space, const QuadratureSpec& spec, int n_sphere, int n_phi) {
    const int N = space.dim;
    // quadrature over the y'-sphere (polar x azimuth) and the y''-polar angle
    std::vector<double> cn, cw;
    gauss_legendre(n_sphere, cn, cw);
    std::vector<double> pn, pw;
    gauss_legendre(n_phi, pn, pw);
    // y''-polar weight sin^{N-5}
    double phi_norm = 0.0;
    std::vector<double> phiw(n_phi);
    std::vector<double> phin(n_phi);
    for (int i = 0; i < n_phi; ++i) {
        const double phi = 0.5 * M_PI * (pn[i] + 1.0);
        phin[i] = phi;
        phiw[i] = pw[i] * std::pow(std::sin(phi), N - 5);
        phi_norm += phiw[i];
    }

    Vec y(N);
    bool warned = false;
    double spread = 0.0;
    const auto sphere_mean = [&](double r, double q) {
        double acc = 0.0;
        double wacc = 0.0;
        for (int ia = 0; ia < n_sphere; ++ia) {
            const double ca = cn[ia];
            const double sa = std::sqrt(std::max(0.0, 1.0 - ca * ca));
            for (int ib = 0; ib < n_sphere; ++ib) {
                const double beta = 2.0 * M_PI * ib / n_sphere;
                y[0] = r * sa * std::cos(beta);
                y[1] = r * sa * std::sin(beta);
                y[2] = r * ca;
                for (int ip = 0; ip < n_phi; ++ip) {
                    for (int i = 3; i < N; ++i) y[i] = y0pp[i - 3];
                    y[3] += q * std::cos(phin[ip]);
                    if (N > 4) y[4] += q * std::sin(phin[ip]);
                    acc += f(y) * cw[ia] * phiw[ip];
                    wacc += cw[ia] * phiw[ip];
                }
            }
        }
        return acc / wacc;
    };

    // probe the assumed axial symmetry of the y''-dependence
    if (N > 5) {
        const double s = 0.5 * (rho_inner + rho_outer) > 0 ? 0.5 * (rho_inner + rho_outer) : rho_outer;
        const double r = r0, q = 0.7 * s;
        for (int i = 3; i < N; ++i) y[i] = y0pp[i - 3];
        y[0] = r;
        y[1] = 0.0;
        y[2] = 0.0;
        y[4] += q;  // in the (e1,e2) plane of the reduction
        const double f1 = f(y);
        y[4] -= q;
        y[N - 1] += q;  // off-plane direction with the same polar angle
        const double f2 = f(y);
        const double scale = std::max({std::abs(f1), std::abs(f2), 1e-300});
        spread = std::abs(f1 - f2) / scale;
        warned = spread > 1e-8;
    }

    const CylFn F = [&](double r, double q) { return sphere_mean(r, q); };
    AnnulusResult out;
    out.integral = integrate_annulus_cyl(F, rho_inner, rho_outer, r0, N, spec);
    out.symmetry_warning = warned;
    out.symmetry_spread = spread;
    return out;
}

double annulus_monte_carlo(const FnN& f, double rho_inner, double rho_outer, double r0, const Vec& y0pp,
                           const SpaceSpec& space, long samples, std::uint64_t seed) {
    const int N = space.dim;
    // bounding box: |y'| <= r0 + rho_outer, |y''_i - y0_i| <= rho_outer
    const double ry = r0 + rho_outer;
    Rng rng(seed);
    double vol = std::pow(2.0 * ry, 3);
    for (int i = 3; i < N; ++i) vol *= 2.0 * rho_outer;
    std::vector<double> acc;
    acc.reserve(samples);
    Vec y(N);
    for (long s = 0; s < samples; ++s) {
        for (int i = 0; i < 3; ++i) y[i] = rng.uniform(-ry, ry);
        for (int i = 3; i < N; ++i) y[i] = y0pp[i - 3] + rng.uniform(-rho_outer, rho_outer);
        const double r = std::sqrt(y[0] * y[0] + y[1] * y[1] + y[2] * y[2]);
        double d2 = (r - r0) * (r - r0);
        for (int i = 3; i < N; ++i) {
            const double d = y[i] - y0pp[i - 3];
            d2 += d * d;
        }
        const double dist = std::sqrt(d2);
        acc.push_back((dist >= rho_inner && dist <= rho_outer) ? f(y) : 0.0);
    }
    return vol * pairwise_sum(acc) / static_cast<double>(samples);
}

// ---------------------------------------------------------------------------
// Center-local spherical integration with cylindrical angular reduction
// ---------------------------------------------------------------------------
IntegralResult integrate_center_local(const FnN& f, const Vec& center, double rho_max, const SpaceSpec& space,
                                      const CenterLocalSpec& ang, const QuadratureSpec& spec) {
    const int N = space.dim;
    const double rp = std::sqrt(center[0] * center[0] + center[1] * center[1] + center[2] * center[2]);
    if (!(rp > 0.0)) throw std::invalid_argument("integrate_center_local: center must have |y'| > 0");
    // frame in the y'-block
    const double xhat[3] = {center[0] / rp, center[1] / rp, center[2] / rp};
    // deterministic orthogonal complement
    int least = 0;
    for (int i = 1; i < 3; ++i)
        if (std::abs(xhat[i]) < std::abs(xhat[least])) least = i;
    double ea[3] = {0, 0, 0};
    ea[least] = 1.0;
    const double proj = ea[0] * xhat[0] + ea[1] * xhat[1] + ea[2] * xhat[2];
    for (int i = 0; i < 3; ++i) ea[i] -= proj * xhat[i];
    double na = std::sqrt(ea[0] * ea[0] + ea[1] * ea[1] + ea[2] * ea[2]);
    for (int i = 0; i < 3; ++i) ea[i] /= na;
    const double eb[3] = {xhat[1] * ea[2] - xhat[2] * ea[1], xhat[2] * ea[0] - xhat[0] * ea[2],
                          xhat[0] * ea[1] - xhat[1] * ea[0]};

    // frame in the y''-block
    const int n2 = N - 3;
    Vec e2(n2, 0.0), e2p(n2, 0.0);
    double off = 0.0;
    if (!ang.y2_ref.empty()) {
        for (int i = 0; i < n2; ++i) {
            e2[i] = center[3 + i] - ang.y2_ref[i];
            off += e2[i] * e2[i];
        }
        off = std::sqrt(off);
    }
    if (off > 1e-14) {
        for (int i = 0; i < n2; ++i) e2[i] /= off;
    } else {
        std::fill(e2.begin(), e2.end(), 0.0);
        e2[0] = 1.0;
    }
    {
        int l2 = 0;
        for (int i = 1; i < n2; ++i)
            if (std::abs(e2[i]) < std::abs(e2[l2])) l2 = i;
        e2p[l2] = 1.0;
        double pr = 0.0;
        for (int i = 0; i < n2; ++i) pr += e2p[i] * e2[i];
        for (int i = 0; i < n2; ++i) e2p[i] -= pr * e2[i];
        double nn = 0.0;
        for (int i = 0; i < n2; ++i) nn += e2p[i] * e2p[i];
        nn = std::sqrt(nn);
        for (int i = 0; i < n2; ++i) e2p[i] /= nn;
    }

    // chi nodes on [0, pi/2] with weight sin^2 chi cos^{N-4} chi
    std::vector<double> gn, gw;
    gauss_legendre(ang.n_chi, gn, gw);
    std::vector<double> chi(ang.n_chi), chiw(ang.n_chi);
    double chi_norm = 0.0;
    for (int i = 0; i < ang.n_chi; ++i) {
        const double c = 0.25 * M_PI * (gn[i] + 1.0);
        chi[i] = c;
        chiw[i] = gw[i] * std::pow(std::sin(c), 2) * std::pow(std::cos(c), N - 4);
        chi_norm += chiw[i];
    }
    // psi nodes: Gauss in cos(psi) on [-1,1], uniform weight 1/2
    std::vector<double> cpsi, wpsi;
    gauss_legendre(ang.n_psi, cpsi, wpsi);
    // phi nodes on [0,pi] with weight sin^{N-5}
    const int nphi = std::max(1, ang.n_phi);
    std::vector<double> phi(nphi, 0.0), phiw(nphi, 1.0);
    if (ang.n_phi > 0) {
        std::vector<double> qn, qw;
        gauss_legendre(ang.n_phi, qn, qw);
        double norm = 0.0;
        for (int i = 0; i < ang.n_phi; ++i) {
            phi[i] = 0.5 * M_PI * (qn[i] + 1.0);
            phiw[i] = qw[i] * std::pow(std::sin(phi[i]), N - 5);
            norm += phiw[i];
        }
        for (int i = 0; i < ang.n_phi; ++i) phiw[i] /= norm;
    }
    const int nbeta = std::max(1, ang.n_beta);

    Vec y(N);
    const auto sphere_mean = [&](double rho) {
        double acc = 0.0;
        for (int ic = 0; ic < ang.n_chi; ++ic) {
            const double sc = std::sin(chi[ic]), cc = std::cos(chi[ic]);
            double mean_uv = 0.0;
            for (int ip = 0; ip < ang.n_psi; ++ip) {
                const double cp = cpsi[ip];
                const double sp = std::sqrt(std::max(0.0, 1.0 - cp * cp));
                for (int ib = 0; ib < nbeta; ++ib) {
                    const double beta = 2.0 * M_PI * ib / nbeta;
                    const double ux = cp * xhat[0] + sp * (std::cos(beta) * ea[0] + std::sin(beta) * eb[0]);
                    const double uy = cp * xhat[1] + sp * (std::cos(beta) * ea[1] + std::sin(beta) * eb[1]);
                    const double uz = cp * xhat[2] + sp * (std::cos(beta) * ea[2] + std::sin(beta) * eb[2]);
                    for (int iq = 0; iq < nphi; ++iq) {
                        y[0] = center[0] + rho * sc * ux;
                        y[1] = center[1] + rho * sc * uy;
                        y[2] = center[2] + rho * sc * uz;
                        const double cf = std::cos(phi[iq]), sf = std::sin(phi[iq]);
                        for (int i = 0; i < n2; ++i)
                            y[3 + i] = center[3 + i] + rho * cc * (ang.n_phi > 0 ? cf * e2[i] + sf * e2p[i] : e2[i]);
                        mean_uv += f(y) * 0.5 * wpsi[ip] * phiw[iq] / nbeta;
                    }
                }
            }
            acc += chiw[ic] * mean_uv;
        }
        return acc / chi_norm;
    };

    const double area = sphere_area(N);
    const Fn1 radial = [&](double rho) {
        if (rho == 0.0) return 0.0;
        return std::pow(rho, N - 1) * sphere_mean(rho);
    };
    IntegralResult res = rho_max > 0.0 ? integrate_1d(radial, 0.0, rho_max, spec) : integrate_radial(radial, spec);
    const long per_shell = static_cast<long>(ang.n_chi) * ang.n_psi * nbeta * nphi;
    res.evals *= per_shell;
    res.value *= area;
    res.err_est *= area;
    return res;
}

// ---------------------------------------------------------------------------
// Bipolar reduction
// ---------------------------------------------------------------------------
IntegralResult integrate_bipolar(const BipolarFn& F, int dim, const QuadratureSpec& spec, double xi_lo,
                                 double xi_hi) {
    const double front = sphere_area(dim - 1);
    const bool whole_line = (xi_lo == 0.0 && xi_hi == 0.0);
    std::array<double, 2> lo{whole_line ? -1.0 : xi_lo, 0.0};
    std::array<double, 2> hi{whole_line ? 1.0 : xi_hi, 1.0};
    const FnN g = [&](std::span<const double> t) -> double {
        double xi, jxi;
        if (whole_line) {
            const double u = t[0];
            const double om = 1.0 - u * u;
            xi = u / om;
            jxi = (1.0 + u * u) / (om * om);
        } else {
            xi = t[0];
            jxi = 1.0;
        }
        const double s = t[1];
        const double oms = 1.0 - s;
        const double eta = s / oms;
        const double jeta = 1.0 / (oms * oms);
        const double fv = F(xi, eta);
        if (fv == 0.0) return 0.0;
        return fv * std::pow(eta, dim - 2) * jxi * jeta;
    };
    IntegralResult res = integrate_box(g, lo, hi, spec);
    res.value *= front;
    res.err_est *= front;
    return res;
}

}  // namespace polybubble
