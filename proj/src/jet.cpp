#include "polybubble/jet.hpp"

#include <cmath>
#include <stdexcept>

namespace polybubble {

std::vector<std::vector<int>> multi_indices_of_degree(int n, int total) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur(n, 0);
    // lexicographic enumeration by recursion on slots
    struct Rec {
        int n;
        std::vector<std::vector<int>>& out;
        std::vector<int>& cur;
        void go(int slot, int remaining) {
            if (slot == n - 1) {
                cur[slot] = remaining;
                out.push_back(cur);
                return;
            }
            for (int v = remaining; v >= 0; --v) {
                cur[slot] = v;
                go(slot + 1, remaining - v);
            }
        }
    } rec{n, out, cur};
    rec.go(0, total);
    return out;
}

std::uint64_t JetSpace::pack(std::span<const int> beta) const {
    // order <= 15 and nvars <= 16 keeps 4 bits per slot exact
    std::uint64_t key = 0;
    for (int i = 0; i < nvars_; ++i) key = (key << 4) | static_cast<std::uint64_t>(beta[i]);
    return key;
}

JetSpace::JetSpace(int nvars, int order) : nvars_(nvars), order_(order) {
    if (nvars < 1 || nvars > 16) throw std::invalid_argument("JetSpace: nvars out of range [1,16]");
    if (order < 0 || order > 15) throw std::invalid_argument("JetSpace: order out of range [0,15]");
    for (int d = 0; d <= order; ++d) {
        for (auto& m : multi_indices_of_degree(nvars, d)) {
            degrees_.push_back(d);
            monos_.push_back(std::move(m));
        }
    }
    index_.reserve(monos_.size() * 2);
    factorials_.resize(monos_.size());
    for (std::size_t i = 0; i < monos_.size(); ++i) {
        index_[pack({monos_[i].data(), monos_[i].size()})] = static_cast<int>(i);
        double f = 1.0;
        for (int e : monos_[i])
            for (int j = 2; j <= e; ++j) f *= j;
        factorials_[i] = f;
    }
    const std::size_t sz = monos_.size();
    if (sz * sz <= 10'000'000) {
        prod_table_.assign(sz * sz, -1);
        std::vector<int> sum(nvars_);
        for (std::size_t a = 0; a < sz; ++a) {
            for (std::size_t b = 0; b < sz; ++b) {
                if (degrees_[a] + degrees_[b] > order_) continue;
                for (int i = 0; i < nvars_; ++i) sum[i] = monos_[a][i] + monos_[b][i];
                prod_table_[a * sz + b] = static_cast<std::int32_t>(index_.at(pack(sum)));
            }
        }
        has_table_ = true;
    }
}

std::shared_ptr<const JetSpace> JetSpace::make(int nvars, int order) {
    return std::shared_ptr<const JetSpace>(new JetSpace(nvars, order));
}

int JetSpace::position(std::span<const int> beta) const {
    int total = 0;
    for (int i = 0; i < nvars_; ++i) total += beta[i];
    if (total > order_) return -1;
    const auto it = index_.find(pack(beta));
    return it == index_.end() ? -1 : it->second;
}

int JetSpace::product_position(int a, int b) const {
    if (has_table_) return prod_table_[static_cast<std::size_t>(a) * monos_.size() + b];
    if (degrees_[a] + degrees_[b] > order_) return -1;
    std::vector<int> sum(nvars_);
    for (int i = 0; i < nvars_; ++i) sum[i] = monos_[a][i] + monos_[b][i];
    return index_.at(pack(sum));
}

Jet Jet::constant(std::shared_ptr<const JetSpace> sp, double v) {
    Jet j(std::move(sp));
    j.c_[0] = v;
    return j;
}

Jet Jet::variable(std::shared_ptr<const JetSpace> sp, int i, double value_at_point) {
    Jet j(sp);
    j.c_[0] = value_at_point;
    std::vector<int> e(sp->nvars(), 0);
    e[i] = 1;
    const int pos = sp->position(e);
    if (pos < 0) throw std::invalid_argument("Jet::variable: order 0 space cannot hold a variable");
    j.c_[pos] = 1.0;
    return j;
}

Jet Jet::operator+(const Jet& o) const {
    Jet r = *this;
    for (int i = 0; i < sp_->size(); ++i) r.c_[i] += o.c_[i];
    return r;
}

Jet& Jet::operator+=(const Jet& o) {
    for (int i = 0; i < sp_->size(); ++i) c_[i] += o.c_[i];
    return *this;
}

Jet Jet::operator-(const Jet& o) const {
    Jet r = *this;
    for (int i = 0; i < sp_->size(); ++i) r.c_[i] -= o.c_[i];
    return r;
}

Jet Jet::operator*(const Jet& o) const {
    Jet r(sp_);
    const int n = sp_->size();
    for (int a = 0; a < n; ++a) {
        const double ca = c_[a];
        if (ca == 0.0) continue;
        for (int b = 0; b < n; ++b) {
            const double cb = o.c_[b];
            if (cb == 0.0) continue;
            const int pos = sp_->product_position(a, b);
            if (pos >= 0) r.c_[pos] += ca * cb;
        }
    }
    return r;
}

Jet Jet::operator*(double s) const {
    Jet r = *this;
    for (double& v : r.c_) v *= s;
    return r;
}

Jet Jet::operator+(double s) const {
    Jet r = *this;
    r.c_[0] += s;
    return r;
}

Jet Jet::operator-() const {
    Jet r = *this;
    for (double& v : r.c_) v = -v;
    return r;
}

Jet Jet::compose(std::span<const double> derivs_at_value) const {
    const int K = sp_->order();
    if (static_cast<int>(derivs_at_value.size()) < K + 1)
        throw std::invalid_argument("Jet::compose: need K+1 derivative values");
    // z = nilpotent part
    Jet z = *this;
    z.c_[0] = 0.0;
    // Horner in z with Taylor coefficients g^{(j)}/j!
    double fact = 1.0;
    for (int j = 2; j <= K; ++j) fact *= j;
    Jet r = Jet::constant(sp_, derivs_at_value[K] / fact);
    for (int j = K - 1; j >= 0; --j) {
        fact = 1.0;
        for (int i = 2; i <= j; ++i) fact *= i;
        r = r * z + derivs_at_value[j] / fact;
    }
    return r;
}

Jet Jet::rpow(double exponent) const {
    const double x0 = c_[0];
    if (!(x0 > 0.0)) throw std::domain_error("Jet::rpow: base value must be > 0");
    const int K = sp_->order();
    std::vector<double> d(K + 1);
    double coef = 1.0;
    for (int j = 0; j <= K; ++j) {
        d[j] = coef * std::pow(x0, exponent - j);
        coef *= (exponent - j);
    }
    return compose(d);
}

Jet Jet::exp() const {
    const int K = sp_->order();
    std::vector<double> d(K + 1, std::exp(c_[0]));
    return compose(d);
}

Jet Jet::powi(int p) const {
    if (p < 0) throw std::invalid_argument("Jet::powi: negative power");
    Jet r = Jet::constant(sp_, 1.0);
    Jet base = *this;
    while (p > 0) {
        if (p & 1) r = r * base;
        base = base * base;
        p >>= 1;
    }
    return r;
}

double Jet::deriv(std::span<const int> beta) const {
    const int pos = sp_->position(beta);
    if (pos < 0) throw std::invalid_argument("Jet::deriv: order exceeded");
    return c_[pos] * sp_->mono_factorial(pos);
}

double Jet::polyharm(int m) const {
    const std::vector<int> gamma(sp_->nvars(), 0);
    return polyharm_deriv(m, gamma);
}

double Jet::polyharm_deriv(int l, std::span<const int> gamma) const {
    const int n = sp_->nvars();
    double lfact = 1.0;
    for (int i = 2; i <= l; ++i) lfact *= i;
    double sum = 0.0;
    std::vector<int> beta(n);
    for (const auto& delta : multi_indices_of_degree(n, l)) {
        double dfact = 1.0;
        for (int e : delta)
            for (int i = 2; i <= e; ++i) dfact *= i;
        for (int i = 0; i < n; ++i) beta[i] = 2 * delta[i] + gamma[i];
        sum += lfact / dfact * deriv(beta);
    }
    return (l % 2 == 0) ? sum : -sum;
}

}  // namespace polybubble
