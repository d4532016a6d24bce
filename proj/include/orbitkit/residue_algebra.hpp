#pragma once

#include "orbitkit/map_kernel.hpp"

#include <cstdint>
#include <random>
#include <set>

namespace orbitkit {

/// Subset of Z/|k|Z. "Closed" means stable under r -> 2r and r -> 3r.
struct ResidueSet {
    long long modulus = 1;
    std::vector<long long> members;  // sorted ascending, within [0, modulus)

    bool contains(long long a) const {
        return std::binary_search(members.begin(), members.end(), a);
    }
};

inline long long residue_modulus(const Int& k) {
    if (!valid_k(k)) throw std::invalid_argument("residue_modulus: invalid k");
    Int m = abs_int(k);
    if (m > 1000000000) throw std::invalid_argument("residue_modulus: |k| too large for residue tables");
    return m.convert_to<long long>();
}

/// Orbit of a under repeated multiplication by 2 and 3 mod |k|: the minimal
/// closed set containing a, computed as a worklist fixpoint.
inline ResidueSet residue_component(const Int& k, long long a) {
    long long m = residue_modulus(k);
    if (a < 0 || a >= m) throw std::invalid_argument("residue_component: residue out of range");
    std::set<long long> seen{a};
    std::vector<long long> work{a};
    while (!work.empty()) {
        long long v = work.back();
        work.pop_back();
        for (long long w : {(2 * v) % m, (3 * v) % m}) {
            if (seen.insert(w).second) work.push_back(w);
        }
    }
    ResidueSet out;
    out.modulus = m;
    out.members.assign(seen.begin(), seen.end());
    return out;
}

struct ComponentPartition {
    long long modulus = 1;
    std::vector<ResidueSet> components;  // pairwise disjoint, cover [0, modulus), ordered by least element

    const ResidueSet* component_of(long long a) const {
        for (const ResidueSet& c : components)
            if (c.contains(a)) return &c;
        return nullptr;
    }
};

inline ComponentPartition component_partition(const Int& k) {
    long long m = residue_modulus(k);
    ComponentPartition part;
    part.modulus = m;
    std::vector<char> assigned(static_cast<std::size_t>(m), 0);
    for (long long a = 0; a < m; ++a) {
        if (assigned[static_cast<std::size_t>(a)]) continue;
        ResidueSet c = residue_component(k, a);
        for (long long v : c.members) assigned[static_cast<std::size_t>(v)] = 1;
        part.components.push_back(std::move(c));
    }
    return part;
}

inline bool closure_check(const ResidueSet& X) {
    for (long long a : X.members) {
        if (!X.contains((2 * a) % X.modulus)) return false;
        if (!X.contains((3 * a) % X.modulus)) return false;
    }
    return true;
}

/// The two commutator identities over exact rationals, with S1(r) = 2r and
/// S3(r) = 3r + k:
///   S1 S3 S1^-1 S3^-1 (r) = r + k,   S3 S1 S3^-1 S1^-1 (r) = r - k.
inline bool commutator_identity_holds(const Int& k, const Rat& r) {
    Rat kk(k);
    auto s1 = [](const Rat& x) { return x * 2; };
    auto s1i = [](const Rat& x) { return x / 2; };
    auto s3 = [&](const Rat& x) { return x * 3 + kk; };
    auto s3i = [&](const Rat& x) { return (x - kk) / 3; };
    return s1(s3(s1i(s3i(r)))) == r + kk && s3(s1(s3i(s1i(r)))) == r - kk;
}

/// Checks the identities at r plus `depth` seeded random rationals.
inline bool commutator_check(const Int& k, const Rat& r, int depth = 0, std::uint64_t seed = 0) {
    if (!valid_k(k)) throw std::invalid_argument("commutator_check: invalid k");
    if (!commutator_identity_holds(k, r)) return false;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<long long> num(-1000000, 1000000);
    std::uniform_int_distribution<long long> den(1, 1000000);
    for (int i = 0; i < depth; ++i) {
        Rat x(num(rng), den(rng));
        if (!commutator_identity_holds(k, x)) return false;
    }
    return true;
}

/// Multiplication conjugacy between T_{k'} and T_k for k = multiplier * k':
/// multiplier * T_{k'}(n) = T_k(multiplier * n), checked exactly on [lo, hi].
/// The multiplier is exposed explicitly; this is the index convention that
/// holds as an arithmetic identity (multiplier odd since it divides odd k,
/// so multiplying preserves parity).
inline bool divisor_conjugacy_check(const Int& k, const Int& multiplier, const Int& lo,
                                    const Int& hi) {
    if (!valid_k(k)) throw std::invalid_argument("divisor_conjugacy_check: invalid k");
    if (multiplier <= 0 || k % multiplier != 0)
        throw std::invalid_argument("divisor_conjugacy_check: multiplier must be a positive divisor of k");
    Int k_small = k / multiplier;
    if (!valid_k(k_small))
        throw std::invalid_argument("divisor_conjugacy_check: k/multiplier not a valid parameter");
    MapParam big(k), small(k_small);
    for (Int n = lo; n <= hi; ++n) {
        if (multiplier * t_apply(small, n) != t_apply(big, multiplier * n)) return false;
    }
    return true;
}

}  // namespace orbitkit
