#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

namespace polybubble {

// ---------------------------------------------------------------------------
// Truncated multivariate Taylor arithmetic ("jets").
//
// A Jet stores the Taylor coefficients of a smooth function at a base point,
// up to a fixed total order. Arithmetic (+, *, composition with univariate
// analytic maps) propagates coefficients exactly, so extracted derivatives
// are accurate to round-off. Higher-order operators like (-Delta)^m on
// products of cutoff and bubbles route through this, independent of the
// closed-form radial recurrences they are checked against.
// ---------------------------------------------------------------------------
class JetSpace {
public:
    static std::shared_ptr<const JetSpace> make(int nvars, int order);

    int nvars() const { return nvars_; }
    int order() const { return order_; }
    int size() const { return static_cast<int>(monos_.size()); }
    std::span<const int> mono(int i) const { return {monos_[i].data(), monos_[i].size()}; }
    int total_degree(int i) const { return degrees_[i]; }

    // position of a multi-index, -1 if |beta| > order
    int position(std::span<const int> beta) const;
    // position of beta_a + beta_b (by stored positions), -1 if truncated away
    int product_position(int a, int b) const;

    // factorial of a multi-index
    double mono_factorial(int i) const { return factorials_[i]; }

private:
    JetSpace(int nvars, int order);
    std::uint64_t pack(std::span<const int> beta) const;

    int nvars_;
    int order_;
    std::vector<std::vector<int>> monos_;
    std::vector<int> degrees_;
    std::vector<double> factorials_;
    std::unordered_map<std::uint64_t, int> index_;
    std::vector<std::int32_t> prod_table_;  // dense pair table when affordable
    bool has_table_ = false;
};

class Jet {
public:
    Jet() = default;
    explicit Jet(std::shared_ptr<const JetSpace> sp) : sp_(std::move(sp)), c_(sp_->size(), 0.0) {}

    static Jet constant(std::shared_ptr<const JetSpace> sp, double v);
    static Jet variable(std::shared_ptr<const JetSpace> sp, int i, double value_at_point);

    const std::shared_ptr<const JetSpace>& space() const { return sp_; }
    double value() const { return c_[0]; }
    double coeff(int i) const { return c_[i]; }
    double& coeff(int i) { return c_[i]; }

    Jet operator+(const Jet& o) const;
    Jet operator-(const Jet& o) const;
    Jet operator*(const Jet& o) const;
    Jet operator*(double s) const;
    Jet operator+(double s) const;
    Jet operator-() const;
    Jet& operator+=(const Jet& o);

    // g(f) given [g(f0), g'(f0), ..., g^{(K)}(f0)]
    Jet compose(std::span<const double> derivs_at_value) const;

    Jet rpow(double exponent) const;  // value() must be > 0
    Jet sqrt() const { return rpow(0.5); }
    Jet exp() const;
    Jet powi(int p) const;

    // D^beta f = coeff(beta) * beta!
    double deriv(std::span<const int> beta) const;
    // (-Delta)^m f at the base point (needs order >= 2m)
    double polyharm(int m) const;
    // D^gamma applied to (-Delta)^l f (needs order >= 2l + |gamma|)
    double polyharm_deriv(int l, std::span<const int> gamma) const;

private:
    std::shared_ptr<const JetSpace> sp_;
    std::vector<double> c_;
};

// Enumerate the multi-indices gamma >= 0 over n slots with |gamma| = total.
std::vector<std::vector<int>> multi_indices_of_degree(int n, int total);

}  // namespace polybubble
