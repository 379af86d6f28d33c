#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace polybubble {

// Exact rational arithmetic for the exponents that drive asymptotic fits
// (m*, tau, beta1, beta2, ...). Converted to double only at evaluation
// boundaries.
class Rational {
public:
    Rational() : num_(0), den_(1) {}
    Rational(std::int64_t n) : num_(n), den_(1) {}
    Rational(std::int64_t n, std::int64_t d) : num_(n), den_(d) { normalize(); }

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    Rational operator+(const Rational& o) const { return {num_ * o.den_ + o.num_ * den_, den_ * o.den_}; }
    Rational operator-(const Rational& o) const { return {num_ * o.den_ - o.num_ * den_, den_ * o.den_}; }
    Rational operator*(const Rational& o) const { return {num_ * o.num_, den_ * o.den_}; }
    Rational operator/(const Rational& o) const {
        if (o.num_ == 0) throw std::domain_error("Rational: division by zero");
        return {num_ * o.den_, den_ * o.num_};
    }
    Rational operator-() const { return {-num_, den_}; }

    bool operator==(const Rational& o) const { return num_ == o.num_ && den_ == o.den_; }
    bool operator!=(const Rational& o) const { return !(*this == o); }
    bool operator<(const Rational& o) const { return num_ * o.den_ < o.num_ * den_; }
    bool operator>(const Rational& o) const { return o < *this; }
    bool operator<=(const Rational& o) const { return !(o < *this); }
    bool operator>=(const Rational& o) const { return !(*this < o); }

    std::string str() const {
        if (den_ == 1) return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

private:
    void normalize() {
        if (den_ == 0) throw std::domain_error("Rational: zero denominator");
        if (den_ < 0) { num_ = -num_; den_ = -den_; }
        const std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
        if (g > 1) { num_ /= g; den_ /= g; }
    }

    std::int64_t num_;
    std::int64_t den_;
};

}  // namespace polybubble
