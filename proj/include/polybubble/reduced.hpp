#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "polybubble/ansatz.hpp"
#include "polybubble/core.hpp"
#include "polybubble/fit.hpp"
#include "polybubble/potential.hpp"
#include "polybubble/quadrature.hpp"

namespace polybubble {

class SignConditionError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class IndexZeroError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class NoRootInBracketError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class IllConditionedFitError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// ---------------------------------------------------------------------------
// Moment constants of the energy-derivative expansion:
//   B1 = m * int U^2,  B2 = 1/((2m-1)! m*),
//   B1_tilde = B1 V(r0,y0'') - B2 sum_{|alpha|=2m} D^alpha Q * int y^alpha U^{m*}.
// Throws SignConditionError when B1_tilde <= 0 unless allow_nonpositive.
// ---------------------------------------------------------------------------
struct MomentConstants {
    double B1 = 0.0;
    double B2 = 0.0;
    double q_contraction = 0.0;  // sum D^alpha Q int y^alpha U^{m*}
    double B1_tilde = 0.0;
};

MomentConstants moment_constants(const SpaceSpec& space, const PotentialModel& pot, bool allow_nonpositive = false);

// ---------------------------------------------------------------------------
// Dominant pairing integrals of the lambda-derivative of the energy at
// phi = 0. The potential part collects the V-mass and Q-deviation pieces
// (diagonal in the bubbles); the interaction part collects the leading
// pairwise terms, reduced to two-center quadratures.
// ---------------------------------------------------------------------------
struct PairingQuadOptions {
    double rel_tol = 1e-7;
    long max_evals = 400'000;
    int n_chi = 12, n_psi = 12, n_phi = 12;
};

// 2k * [ int V U1 dU1/dlambda + int (1-Q) U1^{m*-1} dU1/dlambda ]
double pairing_potential_integral(const PotentialModel& pot, const DoubleCircleConfig& cfg,
                                  const PairingQuadOptions& opt = {});

// -I5 pairing: + (m*-1) * 2k * sum_{j != 1} int U1^{m*-2} U_j dU1/dlambda (sign folded in)
double pairing_interaction_integral(const DoubleCircleConfig& cfg, const PairingQuadOptions& opt = {});

struct PairingRow {
    int k = 0;
    double lambda = 0.0;
    double h = 0.0;
    double potential_part = 0.0;    // per the full integral (not divided by 2k)
    double interaction_part = 0.0;  // 0 when interactions disabled
};

struct EnergyExpansion {
    double B1 = 0.0;
    double B2 = 0.0;
    double B1_tilde_analytic = 0.0;
    double B1_tilde_fit = 0.0;
    ExpansionFit potential_fit;  // exponent ~ -(2m+1)
    double B3_tilde_fit = 0.0;
    double B4_tilde_fit = 0.0;
    std::vector<PairingRow> rows;
};

struct PairingSweepOptions {
    double t_param = 1.0;
    double lambda0 = 50.0;   // base of the fixed-k lambda sweep
    int n_lambda = 5;        // geometric doublings
    int k_fixed = 1;
    bool include_interaction = true;
    PairingQuadOptions quad;
};

EnergyExpansion pairing_sweep(const SpaceSpec& space, const PotentialModel& pot, const RegimeParams& regime,
                              std::span<const int> ks, const PairingSweepOptions& opt = {});

// ---------------------------------------------------------------------------
// Leading-order mass formulas on D_rho:
//   int h Z^2    ~ 2k lambda^{-2m} h(rbar, ybar'') int U^2
//   int h Z^{m*} ~ 2k            h(rbar, ybar'') int U^{m*}
// ---------------------------------------------------------------------------
struct MassComparison {
    double lhs_sq = 0.0;
    double pred_sq = 0.0;
    double lhs_crit = 0.0;
    double pred_crit = 0.0;
};

MassComparison mass_leading_order(const AnsatzSpec& spec, const CylFunc& h, double rho,
                                  const PairingQuadOptions& opt = {});

// int_{D_rho} weight * Z^2 (or Z_+^{m*}) with the diagonal terms integrated
// around one center and the interaction correction over the first sector,
// both scaled up by symmetry. weight_axial declares y''-dependence beyond
// |y''-y0''| (adds the polar angle to the angular reduction).
double ansatz_weighted_mass(const AnsatzSpec& spec, const FnN& weight, bool crit_power, double rho,
                            const PairingQuadOptions& opt = {}, bool weight_axial = false);

// ---------------------------------------------------------------------------
// The reduced balancing system: Newton on grad Q in (r, y''), a stability
// (index) certificate on a small sphere, and the scalar height/scale balance
// solved by bracketing in [L0 k^kappa, L1 k^kappa].
// ---------------------------------------------------------------------------
struct BalanceOptions {
    double B1_tilde = 0.0;  // <= 0: take the analytic value from moment_constants
    double B3_tilde = 1.0;
    double B4_tilde = 1.0;
    double case3_A = 0.0;  // Case 3 limit of (lambda^{beta2} h)^{-1}; 0 disables the extra term
    int newton_max_iter = 100;
    double newton_tol = 1e-12;
    int index_samples = 64;
    std::uint64_t seed = 1;
};

struct BalanceSolution {
    double t = 0.0;
    double lambda = 0.0;
    double r_bar = 0.0;
    Vec y2_bar;
    RegimeCase case_id = RegimeCase::Case2;
    int k = 0;
    Vec residuals;  // |dQ/dr|, |grad_{y''} Q|, |scalar balance|
};

// critical point of Q near (r0, y0'') by damped Newton; throws on divergence
Vec find_critical_point(const PotentialModel& pot, const Vec& start_ry, int max_iter = 100, double tol = 1e-12);

// certificate that grad Q has a nonzero index: the radial component of
// grad Q keeps one sign on a small sphere (sufficient for index (+-1)^{N-2})
int critical_point_index_sign(const PotentialModel& pot, double radius, int samples, std::uint64_t seed);

// the scalar balance function F(lambda) at the regime's h(lambda)
double balance_function(double lambda, int k, const RegimeParams& regime, const BalanceOptions& opt);

BalanceSolution solve_balance(const SpaceSpec& space, const PotentialModel& pot, const RegimeParams& regime, int k,
                              const BalanceOptions& opt = {});

// model-layer closed form: Case 2 root of -B1/t^{2m+1} + B3 c /t^{N-2m+1} = 0
double balance_case2_closed_form(const SpaceSpec& space, double B1t, double B3t, double a_limit);

}  // namespace polybubble
