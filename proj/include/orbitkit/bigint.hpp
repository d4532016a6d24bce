#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>

namespace orbitkit {

// Exact arithmetic everywhere: 3x+k trajectories are not bounded a priori,
// so fixed-width integers would silently corrupt results.
using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline bool is_odd(const Int& n) { return n % 2 != 0; }
inline bool is_even(const Int& n) { return n % 2 == 0; }

inline Int abs_int(const Int& n) { return boost::multiprecision::abs(n); }

/// Bits in |n|; 0 for n = 0.
inline unsigned bit_length(const Int& n) {
    if (n == 0) return 0;
    return boost::multiprecision::msb(abs_int(n)) + 1;
}

inline std::string to_dec(const Int& n) { return n.str(); }

inline Int from_dec(const std::string& s) { return Int(s); }

/// Canonical residue of n in [0, m) for m > 0.
inline Int mod_nonneg(const Int& n, const Int& m) {
    Int r = n % m;
    if (r < 0) r += m;
    return r;
}

}  // namespace orbitkit
