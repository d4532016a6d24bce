#pragma once

#include "orbitkit/bigint.hpp"

#include <cstddef>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

namespace orbitkit {

/// k is admissible iff k = +-1 (mod 6): k odd keeps (3n+k)/2 integral on odd
/// n, and gcd(k, 3) = 1 keeps 2 and 3 invertible mod |k|.
inline bool valid_k(const Int& k) {
    Int r = abs_int(k) % 6;
    return r == 1 || r == 5;
}

struct MapParam {
    Int k;
    std::size_t max_steps;  // forward-iteration cap
    unsigned max_bits;      // cap on bit_length of any iterate

    explicit MapParam(Int k_, std::size_t max_steps_ = 100000, unsigned max_bits_ = 4096)
        : k(std::move(k_)), max_steps(max_steps_), max_bits(max_bits_) {
        if (!valid_k(k))
            throw std::invalid_argument("MapParam: k must be congruent to +-1 (mod 6), got " + k.str());
        if (max_steps < 1) throw std::invalid_argument("MapParam: max_steps must be >= 1");
        if (max_bits < 8) throw std::invalid_argument("MapParam: max_bits must be >= 8");
    }
};

/// One application of the map: (3n+k)/2 on odd n, n/2 on even n.
/// 3n+k is even exactly when n is odd (k odd), so the division is exact.
inline Int t_apply(const MapParam& p, const Int& n) {
    if (is_odd(n)) return (3 * n + p.k) / 2;
    return n / 2;
}

/// All integer preimages of n, doubling branch first. The second branch
/// (2n-k)/3 is a preimage iff it is an integer and odd; this is Eq-style
/// case analysis of t_apply(m) = n on both parities, valid for every k.
inline std::vector<Int> inverse_step(const MapParam& p, const Int& n) {
    std::vector<Int> pre;
    pre.push_back(2 * n);
    Int t = 2 * n - p.k;
    if (t % 3 == 0) {
        Int q = t / 3;
        if (is_odd(q)) pre.push_back(q);
    }
    return pre;
}

enum class TrajectoryOutcome { EnteredCycle, CapExceeded };

struct Trajectory {
    Int start;
    std::vector<Int> states;  // states[0] = start, states[j+1] = t_apply(states[j])
    TrajectoryOutcome outcome = TrajectoryOutcome::CapExceeded;
    std::size_t entry_index = 0;        // index of the first state repeating an earlier one
    std::size_t cycle_first_index = 0;  // index of that state's earlier occurrence

    /// One full period, in trajectory order (valid for EnteredCycle).
    std::vector<Int> cycle_states() const {
        return {states.begin() + static_cast<std::ptrdiff_t>(cycle_first_index),
                states.begin() + static_cast<std::ptrdiff_t>(entry_index)};
    }

    /// Element of smallest absolute value on the cycle, positive on ties.
    Int cycle_generator() const {
        Int best = states[cycle_first_index];
        for (std::size_t i = cycle_first_index + 1; i < entry_index; ++i) {
            const Int& v = states[i];
            Int av = abs_int(v), ab = abs_int(best);
            if (av < ab || (av == ab && v > best)) best = v;
        }
        return best;
    }

    bool start_on_cycle() const {
        return outcome == TrajectoryOutcome::EnteredCycle && cycle_first_index == 0;
    }
};

/// Forward-iterates until a state repeats or a cap is hit. CapExceeded is an
/// outcome, not an error: divergence of trajectories is an open question and
/// the caps make it an explicit result.
inline Trajectory iterate(const MapParam& p, const Int& n) {
    Trajectory tr;
    tr.start = n;
    tr.states.push_back(n);
    if (bit_length(n) > p.max_bits) return tr;
    std::unordered_map<Int, std::size_t> seen;
    seen.emplace(n, 0);
    for (std::size_t step = 0; step < p.max_steps; ++step) {
        Int next = t_apply(p, tr.states.back());
        tr.states.push_back(next);
        auto it = seen.find(next);
        if (it != seen.end()) {
            tr.outcome = TrajectoryOutcome::EnteredCycle;
            tr.entry_index = tr.states.size() - 1;
            tr.cycle_first_index = it->second;
            return tr;
        }
        if (bit_length(next) > p.max_bits) return tr;
        seen.emplace(next, tr.states.size() - 1);
    }
    return tr;
}

/// Self-test of the negation conjugacy T_k(-n) = -T_{-k}(n) on [lo, hi].
inline bool conjugacy_negation_check(const Int& k, const Int& lo, const Int& hi) {
    MapParam pk(k), pn(-k);
    for (Int n = lo; n <= hi; ++n) {
        if (t_apply(pk, -n) != -t_apply(pn, n)) return false;
    }
    return true;
}

}  // namespace orbitkit
