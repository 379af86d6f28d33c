#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "polybubble/core.hpp"
#include "polybubble/quadrature.hpp"

namespace polybubble {

enum class MomentPower {
    square,                 // U^2
    crit,                   // U^{m*}
    crit_minus_one_dlambda  // U^{m*-1} dU/dlambda
};

struct MomentSpec {
    SpaceSpec space;
    MomentPower power = MomentPower::crit;
    std::vector<int> alpha;  // multi-index, |alpha| in {0, 2m}
    double lambda = 1.0;
};

class DivergentMomentError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Exact value of  int y^alpha U_{0,lambda}^{power} dy  via surface-area /
// Beta-function identities. Odd multi-indices give exactly 0; divergent
// combinations raise DivergentMomentError.
double moment_closed_form(const MomentSpec& spec);

// Independent numeric path for the same quantity: 1-d polar-angle recursion
// for the angular factor, adaptive radial quadrature for the profile.
IntegralResult moment_quadrature(const MomentSpec& spec, const QuadratureSpec& quad);

// Convenience wrappers at lambda = 1.
double bubble_mass_l2(const SpaceSpec& space);          // int U^2
double bubble_mass_crit(const SpaceSpec& space);        // int U^{m*}
double bubble_moment_crit(const SpaceSpec& space, std::span<const int> alpha);  // int y^alpha U^{m*}

}  // namespace polybubble
