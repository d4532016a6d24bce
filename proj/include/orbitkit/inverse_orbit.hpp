#pragma once

#include "orbitkit/cycle_engine.hpp"

#include <cstdint>
#include <queue>
#include <sstream>
#include <unordered_set>

namespace orbitkit {

namespace detail {

enum class Reach : std::int8_t { Yes, No, Unknown };

/// Decides "does the forward orbit of v contain target?" by direct forward
/// iteration with memoization. This is the sound membership test for
/// backward orbits: v is in O^-(target) iff target is on v's forward path,
/// and forward paths to cycle entry are finite.
class ReachOracle {
public:
    ReachOracle(const MapParam& p, Int target) : p_(p), target_(std::move(target)) {
        memo_.emplace(target_, Reach::Yes);
    }

    Reach query(const Int& v) {
        auto it = memo_.find(v);
        if (it != memo_.end()) return it->second;
        std::vector<Int> path{v};
        std::unordered_map<Int, std::size_t> pos{{v, 0}};
        for (std::size_t j = 0; j < p_.max_steps; ++j) {
            if (bit_length(path.back()) > p_.max_bits) {
                memo_.emplace(v, Reach::Unknown);  // suffix values keep fresh budgets
                return Reach::Unknown;
            }
            Int next = t_apply(p_, path.back());
            auto mit = memo_.find(next);
            if (mit != memo_.end()) {
                if (mit->second == Reach::Unknown) {
                    memo_.emplace(v, Reach::Unknown);
                    return Reach::Unknown;
                }
                mark_all(path, mit->second);
                return mit->second;
            }
            auto pit = pos.find(next);
            if (pit != pos.end()) {
                // Closed a cycle without meeting the target: the whole path
                // (and the cycle it ends in) can never reach it.
                mark_all(path, Reach::No);
                return Reach::No;
            }
            pos.emplace(next, path.size());
            path.push_back(next);
        }
        memo_.emplace(v, Reach::Unknown);
        return Reach::Unknown;
    }

private:
    void mark_all(const std::vector<Int>& path, Reach r) {
        for (const Int& u : path) memo_.emplace(u, r);
    }

    const MapParam& p_;
    Int target_;
    std::unordered_map<Int, Reach> memo_;
};

}  // namespace detail

/// Bounded, explored portion of a backward orbit, split by sign. Membership
/// below frontier_exhausted_below is exact; beyond it the sample is a
/// subset of the orbit.
struct OrbitSample {
    Int root;
    std::vector<Int> positive_members;  // ascending, all <= N_cap
    std::vector<Int> negative_members;  // ascending
    Int frontier_exhausted_below = 0;   // all orbit members with |v| < this are present
    std::size_t depth_used = 0;
    std::size_t nodes_expanded = 0;

    bool contains(const Int& v) const {
        if (v == 0) return root == 0;
        const auto& side = v > 0 ? positive_members : negative_members;
        return std::binary_search(side.begin(), side.end(), v);
    }

    std::size_t size() const {
        return positive_members.size() + negative_members.size() + (root == 0 ? 1 : 0);
    }
};

/// Breadth-first expansion of the inverse map from m, by increasing absolute
/// value, pruning beyond N_cap and node_cap. The exactness watermark is NOT
/// taken from the BFS frontier: preimage chains are not monotone in absolute
/// value (a small member can hang below a huge excursion), so the watermark
/// is established by a forward-membership sweep over |v| < exact_request.
/// exact_request < 0 selects min(N_cap, 10000); 0 skips the sweep.
inline OrbitSample enumerate_backward(const MapParam& p, const Int& m, const Int& n_cap,
                                      std::size_t node_cap = 1u << 20,
                                      Int exact_request = Int(-1)) {
    if (n_cap < abs_int(m)) throw std::invalid_argument("enumerate_backward: N_cap < |m|");
    if (node_cap < 1) throw std::invalid_argument("enumerate_backward: node_cap must be >= 1");

    OrbitSample s;
    s.root = m;
    if (m == 0) {
        // Degenerate fixed orbit {0}: no nonzero integer ever maps to 0.
        s.frontier_exhausted_below = n_cap + 1;
        return s;
    }

    std::unordered_set<Int> members;
    // (|v|, v, depth); ordering by (|v|, v) makes expansion deterministic.
    struct Node {
        Int av, v;
        std::size_t depth;
    };
    auto cmp = [](const Node& a, const Node& b) {
        return a.av != b.av ? a.av > b.av : a.v > b.v;
    };
    std::priority_queue<Node, std::vector<Node>, decltype(cmp)> queue(cmp);
    members.insert(m);
    queue.push({abs_int(m), m, 0});
    while (!queue.empty() && s.nodes_expanded < node_cap) {
        Node cur = queue.top();
        queue.pop();
        ++s.nodes_expanded;
        s.depth_used = std::max(s.depth_used, cur.depth);
        for (const Int& pre : inverse_step(p, cur.v)) {
            if (abs_int(pre) > n_cap) continue;
            if (members.insert(pre).second) queue.push({abs_int(pre), pre, cur.depth + 1});
        }
    }

    // The doubling chain of the root always exists; keep it present even
    // when node_cap truncated the search.
    for (Int v = 2 * m; abs_int(v) <= n_cap; v *= 2) members.insert(v);

    if (exact_request < 0) exact_request = std::min(n_cap, Int(10000));
    if (exact_request > n_cap + 1) exact_request = n_cap + 1;
    Int watermark = exact_request;
    if (exact_request > 0) {
        detail::ReachOracle oracle(p, m);
        for (Int a = 1; a < exact_request; ++a) {
            bool undecided = false;
            for (const Int& v : {Int(a), Int(-a)}) {
                detail::Reach r = oracle.query(v);
                if (r == detail::Reach::Yes) members.insert(v);
                if (r == detail::Reach::Unknown) undecided = true;
            }
            if (undecided) {
                watermark = a;
                break;
            }
        }
    }
    s.frontier_exhausted_below = watermark;

    for (const Int& v : members) {
        (v > 0 ? s.positive_members : s.negative_members).push_back(v);
    }
    std::sort(s.positive_members.begin(), s.positive_members.end());
    std::sort(s.negative_members.begin(), s.negative_members.end());
    return s;
}

/// Coefficient window of a backward-orbit generating function: bits[i] is
/// the 0/1 coefficient of z^(lo+i). Entries with n < exact_below are exact.
struct MembershipWindow {
    Int k;
    long long lo = 1, hi = 0;
    std::vector<std::uint8_t> bits;
    long long exact_below = 0;

    bool bit(long long n) const { return bits[static_cast<std::size_t>(n - lo)] != 0; }
    long long length() const { return hi - lo + 1; }
    bool exact() const { return exact_below > hi; }
};

enum class Relation { Disjoint, NestedFirstInSecond, NestedSecondInFirst, Unresolved };

inline const char* relation_name(Relation r) {
    switch (r) {
        case Relation::Disjoint: return "Disjoint";
        case Relation::NestedFirstInSecond: return "NestedFirstInSecond";
        case Relation::NestedSecondInFirst: return "NestedSecondInFirst";
        default: return "Unresolved";
    }
}

struct DisjointnessVerdict {
    Int m1, m2;
    Relation relation = Relation::Unresolved;
    std::string witness;
};

/// Orbit trichotomy, decided by forward iteration only: m1 lies in O^-(m2)
/// iff m2 appears on the forward path of m1. Disjoint requires both forward
/// orbits to resolve to cycles; a nested verdict is sound even from a capped
/// prefix, because the witness is positive. When each start reaches the
/// other (both on one cycle) the two orbits coincide; this is reported as
/// NestedFirstInSecond with a witness noting the coincidence.
inline DisjointnessVerdict trichotomy(const MapParam& p, const Int& m1, const Int& m2) {
    if (m1 == m2) throw std::invalid_argument("trichotomy: m1 and m2 must differ");
    DisjointnessVerdict v;
    v.m1 = m1;
    v.m2 = m2;
    Trajectory t1 = iterate(p, m1);
    Trajectory t2 = iterate(p, m2);
    auto index_of = [](const Trajectory& t, const Int& x) -> long long {
        for (std::size_t i = 0; i < t.states.size(); ++i)
            if (t.states[i] == x) return static_cast<long long>(i);
        return -1;
    };
    long long i12 = index_of(t1, m2);  // m2 on forward path of m1
    long long i21 = index_of(t2, m1);
    std::ostringstream w;
    if (i12 >= 0) {
        v.relation = Relation::NestedFirstInSecond;
        w << "T^" << i12 << "(" << m1 << ") = " << m2;
        if (i21 >= 0) w << "; orbits coincide (both on one cycle)";
        v.witness = w.str();
        return v;
    }
    if (i21 >= 0) {
        v.relation = Relation::NestedSecondInFirst;
        w << "T^" << i21 << "(" << m2 << ") = " << m1;
        v.witness = w.str();
        return v;
    }
    bool r1 = t1.outcome == TrajectoryOutcome::EnteredCycle;
    bool r2 = t2.outcome == TrajectoryOutcome::EnteredCycle;
    if (r1 && r2) {
        v.relation = Relation::Disjoint;
        w << "forward orbit of " << m1 << " enters cycle of " << t1.cycle_generator()
          << " without meeting " << m2 << "; forward orbit of " << m2 << " enters cycle of "
          << t2.cycle_generator() << " without meeting " << m1;
        v.witness = w.str();
        return v;
    }
    v.relation = Relation::Unresolved;
    w << "forward orbit of " << (r1 ? m2 : m1) << " hit iteration caps";
    v.witness = w.str();
    return v;
}

/// Certifies the lacunary structure behind the gap-theorem special case:
/// for m > 0 with m = 0 (mod 3) the odd inverse branch never applies (2v-k
/// is never divisible by 3 on multiples of 3), so the whole backward orbit
/// is the doubling chain {m 2^j}. Returns true iff the bounded enumeration
/// yields exactly {m 2^j : m 2^j <= N_cap}.
inline bool fabry_case_check(const MapParam& p, const Int& m, const Int& n_cap) {
    if (m <= 0 || m % 3 != 0)
        throw std::invalid_argument("fabry_case_check: m must be positive and divisible by 3");
    OrbitSample s = enumerate_backward(p, m, n_cap, 1u << 20, Int(0));
    std::vector<Int> chain;
    for (Int v = m; v <= n_cap; v *= 2) chain.push_back(v);
    return s.negative_members.empty() && s.positive_members == chain;
}

/// One refinement step of a disjoint-orbit collection: the root at `index`
/// is replaced by its preimages, minus any preimage on the root's own cycle
/// (the orbit of a periodic root is the cycle plus the trees hanging off
/// it); the singleton {m} contributed by the root itself is dropped.
inline std::vector<Int> partition_refine(const MapParam& p, const std::vector<Int>& roots,
                                         std::size_t index = 0) {
    if (roots.empty()) throw std::invalid_argument("partition_refine: empty collection");
    if (index >= roots.size()) throw std::invalid_argument("partition_refine: index out of range");
    for (std::size_t i = 0; i < roots.size(); ++i) {
        for (std::size_t j = i + 1; j < roots.size(); ++j) {
            DisjointnessVerdict v = trichotomy(p, roots[i], roots[j]);
            if (v.relation != Relation::Disjoint)
                throw std::invalid_argument(
                    std::string("partition_refine: roots not pairwise disjoint (") +
                    relation_name(v.relation) + " for " + roots[i].str() + ", " + roots[j].str() + ")");
        }
    }
    const Int& m = roots[index];
    std::unordered_set<Int> own_cycle;
    Trajectory t = iterate(p, m);
    if (t.start_on_cycle()) {
        for (const Int& e : t.cycle_states()) own_cycle.insert(e);
    }
    std::vector<Int> refined;
    refined.reserve(roots.size() + 1);
    for (std::size_t i = 0; i < roots.size(); ++i) {
        if (i != index) {
            refined.push_back(roots[i]);
            continue;
        }
        for (const Int& pre : inverse_step(p, m))
            if (!own_cycle.count(pre)) refined.push_back(pre);
    }
    return refined;
}

}  // namespace orbitkit
