#pragma once

#include "orbitkit/bigint.hpp"

#include <initializer_list>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

namespace orbitkit {

/// Dense polynomial with exact integer coefficients; c[i] multiplies z^i.
class Poly {
public:
    Poly() = default;
    Poly(std::initializer_list<Int> c) : c_(c) { normalize(); }
    explicit Poly(std::vector<Int> c) : c_(std::move(c)) { normalize(); }

    static Poly zero() { return Poly(); }
    static Poly one() { return Poly({Int(1)}); }
    static Poly monomial(std::size_t deg, Int coeff = Int(1)) {
        std::vector<Int> c(deg + 1);
        c[deg] = std::move(coeff);
        return Poly(std::move(c));
    }

    bool is_zero() const { return c_.empty(); }
    long long degree() const { return static_cast<long long>(c_.size()) - 1; }  // -1 for zero

    Int coeff(std::size_t i) const { return i < c_.size() ? c_[i] : Int(0); }
    const std::vector<Int>& coeffs() const { return c_; }

    Poly operator-() const {
        std::vector<Int> r(c_);
        for (Int& x : r) x = -x;
        return Poly(std::move(r));
    }

    Poly operator+(const Poly& o) const {
        std::vector<Int> r(std::max(c_.size(), o.c_.size()));
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = coeff(i) + o.coeff(i);
        return Poly(std::move(r));
    }

    Poly operator-(const Poly& o) const { return *this + (-o); }

    Poly operator*(const Poly& o) const {
        if (is_zero() || o.is_zero()) return Poly();
        std::vector<Int> r(c_.size() + o.c_.size() - 1);
        for (std::size_t i = 0; i < c_.size(); ++i)
            for (std::size_t j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
        return Poly(std::move(r));
    }

    Poly operator*(const Int& s) const {
        std::vector<Int> r(c_);
        for (Int& x : r) x *= s;
        return Poly(std::move(r));
    }

    Poly shifted(std::size_t s) const {  // multiply by z^s
        if (is_zero()) return Poly();
        std::vector<Int> r(c_.size() + s);
        for (std::size_t i = 0; i < c_.size(); ++i) r[i + s] = c_[i];
        return Poly(std::move(r));
    }

    bool operator==(const Poly& o) const { return c_ == o.c_; }
    bool operator!=(const Poly& o) const { return !(*this == o); }

    Int eval(const Int& x) const {
        Int acc = 0;
        for (std::size_t i = c_.size(); i-- > 0;) acc = acc * x + c_[i];
        return acc;
    }

    /// Long division; requires the divisor's leading coefficient to be +-1
    /// so quotient and remainder stay integral.
    static std::pair<Poly, Poly> divmod(const Poly& num, const Poly& den) {
        if (den.is_zero()) throw std::invalid_argument("Poly::divmod: division by zero");
        const Int& lead = den.c_.back();
        if (lead != 1 && lead != -1)
            throw std::invalid_argument("Poly::divmod: divisor leading coefficient must be +-1");
        std::vector<Int> rem(num.c_);
        std::vector<Int> quot;
        long long dq = num.degree() - den.degree();
        if (dq < 0) return {Poly(), num};
        quot.assign(static_cast<std::size_t>(dq) + 1, Int(0));
        for (long long i = num.degree(); i >= den.degree(); --i) {
            Int& top = rem[static_cast<std::size_t>(i)];
            if (top == 0) continue;
            Int q = lead == 1 ? top : -top;
            std::size_t off = static_cast<std::size_t>(i - den.degree());
            quot[off] = q;
            for (std::size_t j = 0; j < den.c_.size(); ++j) rem[off + j] -= q * den.c_[j];
        }
        return {Poly(std::move(quot)), Poly(std::move(rem))};
    }

    static std::optional<Poly> div_exact(const Poly& num, const Poly& den) {
        auto [q, r] = divmod(num, den);
        if (!r.is_zero()) return std::nullopt;
        return q;
    }

    static bool divides(const Poly& den, const Poly& num) {
        return div_exact(num, den).has_value();
    }

private:
    void normalize() {
        while (!c_.empty() && c_.back() == 0) c_.pop_back();
    }

    std::vector<Int> c_;
};

inline Poly one_minus_z_pow(long long P) {
    if (P < 1) throw std::invalid_argument("one_minus_z_pow: P must be >= 1");
    std::vector<Int> c(static_cast<std::size_t>(P) + 1);
    c[0] = 1;
    c[static_cast<std::size_t>(P)] = -1;
    return Poly(std::move(c));
}

inline std::vector<long long> divisors_of(long long n) {
    std::vector<long long> small, large;
    for (long long d = 1; d * d <= n; ++d) {
        if (n % d != 0) continue;
        small.push_back(d);
        if (d != n / d) large.push_back(n / d);
    }
    small.insert(small.end(), large.rbegin(), large.rend());
    return small;
}

/// Irreducible factor of 1 - z^q attached to divisor d: the d-th cyclotomic
/// polynomial, sign-normalized to constant term 1 (so cyclo_factor(1) is
/// 1 - z). With this normalization 1 - z^q = prod_{d | q} cyclo_factor(d).
inline const Poly& cyclo_factor(long long d) {
    static std::map<long long, Poly> cache;
    auto it = cache.find(d);
    if (it != cache.end()) return it->second;
    if (d < 1) throw std::invalid_argument("cyclo_factor: d must be >= 1");
    Poly f = one_minus_z_pow(d);
    for (long long dd : divisors_of(d)) {
        if (dd == d) continue;
        auto q = Poly::div_exact(f, cyclo_factor(dd));
        if (!q) throw std::logic_error("cyclo_factor: exact division failed");
        f = std::move(*q);
    }
    return cache.emplace(d, std::move(f)).first->second;
}

}  // namespace orbitkit
