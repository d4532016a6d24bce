#pragma once

#include "orbitkit/inverse_orbit.hpp"
#include "orbitkit/poly.hpp"

#include <map>
#include <optional>
#include <string>

namespace orbitkit {

/// Exact rational function num(z) / prod_d cyclo_factor(d)^e_d. Keeping the
/// denominator as cyclotomic factors (all with constant term 1, irreducible
/// over Q) makes reduction a chain of exact division probes and keeps the
/// pole-structure check a division test; the expansion recurrence needs no
/// divisions because the denominator's constant term is 1.
class RationalSeries {
public:
    RationalSeries() = default;
    RationalSeries(Poly num, std::map<long long, int> den_factors, std::string var = "z")
        : num_(std::move(num)), den_(std::move(den_factors)), var_(std::move(var)) {
        prune();
    }

    /// num / (1 - z^P)^e
    static RationalSeries over_pow(Poly num, long long P, int e, std::string var = "z") {
        std::map<long long, int> f;
        if (e > 0)
            for (long long d : divisors_of(P)) f[d] = e;
        return RationalSeries(std::move(num), std::move(f), std::move(var));
    }

    const Poly& numerator() const { return num_; }
    const std::map<long long, int>& denominator_factors() const { return den_; }
    const std::string& variable() const { return var_; }

    Poly denominator_poly() const {
        Poly d = Poly::one();
        for (const auto& [fac, e] : den_)
            for (int i = 0; i < e; ++i) d = d * cyclo_factor(fac);
        return d;
    }

    /// {P, e} iff the denominator equals (1 - z^P)^e with e >= 1.
    std::optional<std::pair<long long, int>> structured_denominator() const {
        if (den_.empty()) return std::nullopt;
        long long P = den_.rbegin()->first;
        int e = den_.begin()->second;
        auto divs = divisors_of(P);
        if (den_.size() != divs.size()) return std::nullopt;
        for (long long d : divs) {
            auto it = den_.find(d);
            if (it == den_.end() || it->second != e) return std::nullopt;
        }
        return std::make_pair(P, e);
    }

    /// Strips every cyclotomic factor shared between numerator and
    /// denominator; afterwards gcd(num, den) is a unit.
    void reduce() {
        for (auto it = den_.begin(); it != den_.end();) {
            while (it->second > 0) {
                auto q = Poly::div_exact(num_, cyclo_factor(it->first));
                if (!q) break;
                num_ = std::move(*q);
                --it->second;
            }
            it = it->second == 0 ? den_.erase(it) : std::next(it);
        }
    }

    /// Exact series coefficients c_0..c_{n_terms-1}.
    std::vector<Int> expand(std::size_t n_terms) const {
        Poly den = denominator_poly();
        if (den.coeff(0) != 1) throw std::logic_error("RationalSeries: denominator constant term != 1");
        std::vector<Int> c(n_terms);
        for (std::size_t n = 0; n < n_terms; ++n) {
            Int acc = num_.coeff(n);
            std::size_t top = std::min<std::size_t>(n, static_cast<std::size_t>(den.degree()));
            for (std::size_t j = 1; j <= top; ++j) acc -= den.coeff(j) * c[n - j];
            c[n] = std::move(acc);
        }
        return c;
    }

    bool operator==(const RationalSeries& o) const { return num_ == o.num_ && den_ == o.den_; }

private:
    void prune() {
        for (auto it = den_.begin(); it != den_.end();)
            it = it->second <= 0 ? den_.erase(it) : std::next(it);
    }

    Poly num_;
    std::map<long long, int> den_;
    std::string var_ = "z";
};

/// Per-residue-class affine data for the m-th iterate: splitting inputs as
/// n = a + j*2^m, the m-th iterate is affine in j with slope 3^e(a), where
/// e(a) counts odd states among the first m states of a's trajectory.
struct AffineClassTable {
    int m = 0;
    std::vector<Int> endpoint;    // T^m(a) for a in [0, 2^m)
    std::vector<int> odd_count;   // e(a)

    std::size_t rows() const { return endpoint.size(); }
};

inline AffineClassTable affine_class_table(const MapParam& p, int m) {
    if (m < 0) throw std::invalid_argument("affine_class_table: m must be >= 0");
    if (m > 22) throw std::invalid_argument("affine_class_table: 2^m table exceeds size budget");
    std::size_t rows = static_cast<std::size_t>(1) << m;
    AffineClassTable t;
    t.m = m;
    t.endpoint.resize(rows);
    t.odd_count.resize(rows);
    for (std::size_t a = 0; a < rows; ++a) {
        Int v = a;
        int odd = 0;
        for (int step = 0; step < m; ++step) {
            if (is_odd(v)) ++odd;
            v = t_apply(p, v);
        }
        t.endpoint[a] = std::move(v);
        t.odd_count[a] = odd;
    }
    return t;
}

/// The m-th iterate generating function sum_{n>=1} T^m(n) z^n as an exact
/// rational function over (1 - z^{2^m})^2, assembled from the affine class
/// table and then reduced. The closed form is re-verified against direct
/// iteration on the first 512 coefficients before returning; m = 0 is
/// admitted as the identity-map series z/(1-z)^2.
inline RationalSeries iterate_gf(const MapParam& p, int m, std::size_t oracle_terms = 512) {
    if (m < 0) throw std::invalid_argument("iterate_gf: m must be >= 0");
    AffineClassTable t = affine_class_table(p, m);
    const std::size_t period = t.rows();  // 2^m
    if (t.endpoint[0] != 0)
        throw std::logic_error("iterate_gf: T^m(0) != 0");
    // sum_a z^a * [ c_a/(1-Z) + 3^e(a) Z/(1-Z)^2 ]  with Z = z^(2^m);
    // numerator over (1-Z)^2 is sum_a z^a (c_a (1-Z) + b_a Z), where the
    // a = 0 row contributes only its slope term (the j = 0 term is n = 0).
    Poly num;
    Poly zP = Poly::monomial(period);  // Z
    for (std::size_t a = 0; a < period; ++a) {
        Int b = 1;
        for (int i = 0; i < t.odd_count[a]; ++i) b *= 3;
        Poly term = Poly::monomial(0, b) * zP;  // b_a Z
        if (a != 0) {
            Poly ca({t.endpoint[a]});
            term = term + ca - ca * zP;  // + c_a (1 - Z)
        }
        num = num + term.shifted(a);
    }
    RationalSeries g = RationalSeries::over_pow(std::move(num), static_cast<long long>(period), 2);
    g.reduce();

    std::vector<Int> coeffs = g.expand(oracle_terms);
    if (!coeffs.empty() && coeffs[0] != 0)
        throw std::logic_error("iterate_gf: nonzero constant coefficient");
    for (std::size_t n = 1; n < oracle_terms; ++n) {
        Int v = n;
        for (int step = 0; step < m; ++step) v = t_apply(p, v);
        if (coeffs[n] != v) throw std::logic_error("iterate_gf: closed form failed the coefficient oracle");
    }
    return g;
}

/// True iff the reduced denominator divides (1 - z^{2^m})^2 exactly, which
/// certifies poles only at 2^m-th roots of unity with order at most two.
inline bool verify_pole_structure(const RationalSeries& g, int m) {
    if (m < 0 || m > 22) throw std::invalid_argument("verify_pole_structure: bad m");
    Poly target = one_minus_z_pow(1LL << m);
    target = target * target;
    return Poly::divides(g.denominator_poly(), target);
}

/// Forward-orbit generating function sum_m T^m(n) w^m. Rational exactly
/// when the orbit is eventually periodic; an orbit that hits the caps
/// yields nullopt (its divergence status is open, so nothing is claimed).
inline std::optional<RationalSeries> forward_gf(const MapParam& p, const Int& n) {
    Trajectory t = iterate(p, n);
    if (t.outcome != TrajectoryOutcome::EnteredCycle) return std::nullopt;
    std::size_t pre = t.cycle_first_index;
    std::size_t q = t.entry_index - t.cycle_first_index;
    std::vector<Int> head(t.states.begin(), t.states.begin() + static_cast<std::ptrdiff_t>(pre));
    std::vector<Int> cyc(t.states.begin() + static_cast<std::ptrdiff_t>(pre),
                         t.states.begin() + static_cast<std::ptrdiff_t>(t.entry_index));
    Poly num = Poly(std::move(head)) * one_minus_z_pow(static_cast<long long>(q)) +
               Poly(std::move(cyc)).shifted(pre);
    RationalSeries h = RationalSeries::over_pow(std::move(num), static_cast<long long>(q), 1, "w");
    h.reduce();
    return h;
}

/// Coefficient window [1, N] of the backward-orbit generating function of m,
/// computed by the forward-membership oracle; exact up to the first value
/// whose forward orbit hits the caps.
inline MembershipWindow backward_gf_window(const MapParam& p, const Int& m, long long N) {
    if (m == 0) throw std::invalid_argument("backward_gf_window: m = 0 is the degenerate orbit {0}");
    if (N < 1) throw std::invalid_argument("backward_gf_window: N must be >= 1");
    MembershipWindow w;
    w.k = p.k;
    w.lo = 1;
    w.hi = N;
    w.bits.assign(static_cast<std::size_t>(N), 0);
    w.exact_below = N + 1;
    detail::ReachOracle oracle(p, m);
    bool exact = true;
    for (long long n = 1; n <= N; ++n) {
        detail::Reach r = oracle.query(Int(n));
        if (r == detail::Reach::Yes) w.bits[static_cast<std::size_t>(n - 1)] = 1;
        if (r == detail::Reach::Unknown && exact) {
            w.exact_below = n;
            exact = false;
        }
    }
    return w;
}

}  // namespace orbitkit
