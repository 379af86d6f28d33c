#pragma once

#include <memory>
#include <span>
#include <vector>

#include "polybubble/bubble.hpp"
#include "polybubble/core.hpp"
#include "polybubble/cutoff.hpp"

namespace polybubble {

struct AnsatzSpec {
    DoubleCircleConfig cfg;
    CutoffSpec cutoff;
    bool with_cutoff = true;  // false -> the raw sum Z*
};

// Validates that the configured centers sit where xi == 1.
AnsatzSpec make_ansatz(const DoubleCircleConfig& cfg, const CutoffSpec& cutoff, bool with_cutoff = true);

// one-shot evaluation; AnsatzField is the efficient repeated-use evaluator
double eval_ansatz(const AnsatzSpec& spec, std::span<const double> y);

class AnsatzField {
public:
    explicit AnsatzField(const AnsatzSpec& spec);

    const AnsatzSpec& spec() const { return spec_; }
    const CutoffField& cutoff() const { return cutoff_; }
    const std::vector<BubbleField>& bubbles() const { return bubbles_; }
    const SpaceSpec& space() const { return spec_.cfg.space; }

    // Z (with cutoff) or Z* per spec.with_cutoff
    double value(std::span<const double> y) const;

    // raw sum Z* and its exact derivatives
    double raw(std::span<const double> y) const;
    Vec raw_grad(std::span<const double> y) const;
    double raw_polyharm(int l, std::span<const double> y) const;
    Vec raw_polyharm_grad(int l, std::span<const double> y) const;
    std::vector<double> raw_hessian(std::span<const double> y) const;
    double raw_dlambda(std::span<const double> y) const;

    // sum_j xi * (U_j^{m*-1}) over all 2k bubbles
    double cutoff_power_sum(std::span<const double> y) const;

    Jet raw_jet(const std::shared_ptr<const JetSpace>& sp, std::span<const double> y) const;

private:
    AnsatzSpec spec_;
    CutoffField cutoff_;
    std::vector<BubbleField> bubbles_;
};

}  // namespace polybubble
