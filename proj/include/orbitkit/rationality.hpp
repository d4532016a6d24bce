#pragma once

#include "orbitkit/genfun.hpp"
#include "orbitkit/residue_algebra.hpp"

#include <optional>
#include <sstream>

namespace orbitkit {

enum class RationalityStatus { ConsistentWithRational, InconsistentWithinWindow, Inconclusive };

inline const char* rationality_status_name(RationalityStatus s) {
    switch (s) {
        case RationalityStatus::ConsistentWithRational: return "ConsistentWithRational";
        case RationalityStatus::InconsistentWithinWindow: return "InconsistentWithinWindow";
        default: return "Inconclusive";
    }
}

/// A finite-window statement, never a proof: Consistent means the window
/// tail looks like a union of arithmetic progressions mod |k|; Inconsistent
/// means some residue class visibly mixes members and non-members on the
/// tail of an exact window.
struct RationalityVerdict {
    RationalityStatus status = RationalityStatus::Inconclusive;
    ResidueSet X;       // residues whose classes are eventually full (Consistent only)
    long long k0 = 0;   // least index from which membership is exactly "residue in X"
    bool closure_ok = false;
    std::pair<long long, long long> witness{0, 0};  // (member, non-member) in one class
    std::string note;
};

struct RationalityOptions {
    int min_tail_periods = 10;  // tail must span at least this many full periods of |k|
};

/// Eventual behavior is judged on the second half of the exact part of the
/// window (a tail anchored at a fixed fraction; a suffix-only rule would
/// declare any sparse set "eventually empty" past its last member). Each
/// residue class must be constant there; k0 is then the minimal consistent
/// split point over the whole window.
inline RationalityVerdict rationality_check(const MembershipWindow& w,
                                            RationalityOptions opt = {}) {
    RationalityVerdict v;
    long long M = residue_modulus(w.k);
    long long hi_exact = std::min(w.hi, w.exact_below - 1);
    if (hi_exact < w.lo) {
        v.note = "no exact entries in window";
        return v;
    }
    long long exact_len = hi_exact - w.lo + 1;
    long long tail_start = w.lo + exact_len / 2;
    if (hi_exact - tail_start + 1 < static_cast<long long>(opt.min_tail_periods) * M) {
        v.note = "window too short for the configured tail";
        return v;
    }
    std::vector<int> tail_value(static_cast<std::size_t>(M), -1);  // -1 unseen, 0/1 constant, 2 mixed
    long long wit_one = -1, wit_zero = -1;
    for (long long n = tail_start; n <= hi_exact; ++n) {
        long long a = n % M;
        int b = w.bit(n) ? 1 : 0;
        int& tv = tail_value[static_cast<std::size_t>(a)];
        if (tv == -1) tv = b;
        else if (tv != b && tv != 2) tv = 2;
    }
    for (long long a = 0; a < M; ++a) {
        if (tail_value[static_cast<std::size_t>(a)] != 2) continue;
        for (long long n = hi_exact; n >= tail_start; --n) {
            if (n % M != a) continue;
            if (w.bit(n) && wit_one < 0) wit_one = n;
            if (!w.bit(n) && wit_zero < 0) wit_zero = n;
            if (wit_one >= 0 && wit_zero >= 0) break;
        }
        std::ostringstream os;
        os << "class " << a << " (mod " << M << ") mixes member " << wit_one
           << " and non-member " << wit_zero << " on the window tail";
        v.witness = {wit_one, wit_zero};
        v.note = os.str();
        v.status = w.exact() ? RationalityStatus::InconsistentWithinWindow
                             : RationalityStatus::Inconclusive;
        if (!w.exact()) v.note += " (window not exact; verdict withheld)";
        return v;
    }
    v.status = RationalityStatus::ConsistentWithRational;
    v.X.modulus = M;
    for (long long a = 0; a < M; ++a)
        if (tail_value[static_cast<std::size_t>(a)] == 1) v.X.members.push_back(a);
    v.k0 = w.lo;
    for (long long n = hi_exact; n >= w.lo; --n) {
        bool in_x = v.X.contains(n % M);
        if (w.bit(n) != in_x) {
            v.k0 = n + 1;
            break;
        }
    }
    v.closure_ok = closure_check(v.X);
    return v;
}

/// Outcome of the finite-window zero-pattern scan: the zero set restricted
/// to [n0, N] is exactly a union of full residue classes mod d.
struct SmlResult {
    bool matched = false;
    long long d = 0;
    std::vector<long long> progressions;  // residues a mod d with full classes of zeros
    long long n0 = 0;
    std::vector<long long> exceptions;  // symmetric difference below n0
};

/// Least d <= d_max and least n0 fitting the pattern. The matched tail must
/// cover at least half the window (same discipline as rationality_check):
/// without that floor, any set whose last few indices are quiet would match
/// d = 1 with its entire content demoted to "exceptions", and geometric
/// sets would never be rejected. N >= 4*d_max then guarantees every class
/// at least two entries of tail evidence.
inline SmlResult sml_pattern(const std::vector<long long>& zero_indices, long long N,
                             long long d_max) {
    if (d_max < 1) throw std::invalid_argument("sml_pattern: d_max must be >= 1");
    if (N < 4 * d_max) throw std::invalid_argument("sml_pattern: need N >= 4*d_max");
    std::vector<char> zero(static_cast<std::size_t>(N) + 1, 0);
    for (long long z : zero_indices) {
        if (z < 1 || z > N) throw std::invalid_argument("sml_pattern: zero index outside [1, N]");
        zero[static_cast<std::size_t>(z)] = 1;
    }
    SmlResult res;
    for (long long d = 1; d <= d_max; ++d) {
        long long n0 = 1;
        std::vector<char> full(static_cast<std::size_t>(d), 0);
        for (long long a = 0; a < d; ++a) {
            long long last = N - ((N - a) % d + d) % d;  // largest n <= N with n = a (mod d)
            if (last < 1) continue;
            char v = zero[static_cast<std::size_t>(last)];
            full[static_cast<std::size_t>(a)] = v;
            for (long long n = last - d; n >= 1; n -= d) {
                if (zero[static_cast<std::size_t>(n)] != v) {
                    n0 = std::max(n0, n + 1);
                    break;
                }
            }
        }
        if (n0 > N / 2) continue;
        res.matched = true;
        res.d = d;
        res.n0 = n0;
        for (long long a = 0; a < d; ++a)
            if (full[static_cast<std::size_t>(a)]) res.progressions.push_back(a);
        for (long long n = 1; n < n0; ++n) {
            bool in_zero = zero[static_cast<std::size_t>(n)] != 0;
            bool in_prog = full[static_cast<std::size_t>(n % d)] != 0;
            if (in_zero != in_prog) res.exceptions.push_back(n);
        }
        return res;
    }
    return res;
}

/// A sound natural-boundary certificate for f_{k,m}: a positive partner m'
/// in the same residue component whose backward orbit is provably disjoint
/// from m's. Existence of the pair rules out the cofinite tail a rational
/// generating function would force. Absence of a certificate proves
/// nothing.
struct CertificateResult {
    bool found = false;
    Int m;
    Int partner;                  // valid when found
    DisjointnessVerdict verdict;  // the witnessing trichotomy
    bool saw_unresolved = false;  // some candidates hit caps during the scan
};

inline CertificateResult natural_boundary_certificate(const MapParam& p, const Int& m,
                                                      const Int& partner_search_bound) {
    if (m < 1) throw std::invalid_argument("natural_boundary_certificate: m must be >= 1");
    if (partner_search_bound < 1)
        throw std::invalid_argument("natural_boundary_certificate: bound must be >= 1");
    CertificateResult res;
    res.m = m;
    long long M = residue_modulus(p.k);
    ResidueSet comp = residue_component(p.k, (mod_nonneg(m, Int(M))).convert_to<long long>());
    for (Int cand = 1; cand <= partner_search_bound; ++cand) {
        if (cand == m) continue;
        if (!comp.contains((mod_nonneg(cand, Int(M))).convert_to<long long>())) continue;
        DisjointnessVerdict v = trichotomy(p, m, cand);
        if (v.relation == Relation::Disjoint) {
            res.found = true;
            res.partner = cand;
            res.verdict = std::move(v);
            return res;
        }
        if (v.relation == Relation::Unresolved) res.saw_unresolved = true;
    }
    return res;
}

namespace detail {

enum class SubtreePositivity { Yes, No, Unknown };

/// Smallest positive n <= bound forward-attracted to the given cycle.
inline Int smallest_positive_attracted(const MapParam& p, const Cycle& target, const Int& bound,
                                       const CycleSet& known) {
    for (Int n = 1; n <= bound; ++n) {
        ClassifyOutcome out = classify(p, n, known);
        if (out.status == ClassifyStatus::Attracted && out.cycle_generator == target.generator)
            return n;
    }
    throw std::logic_error("no positive representative found for attractor " +
                           target.generator.str());
}

/// Does the backward orbit of root contain a positive integer? Decidable
/// upward (any positive member doubles forever); "No" is only provable for
/// k > 0, where preimages of negatives stay negative. For k < 0 a negative
/// node may climb back above -|k|/2 through the odd branch and jump sign,
/// so exhausting the caps yields Unknown.
inline SubtreePositivity subtree_contains_positive(const MapParam& p, const Int& root,
                                                   std::size_t depth_cap = 32,
                                                   std::size_t node_cap = 4096) {
    if (root > 0) return SubtreePositivity::Yes;
    if (root == 0 || p.k > 0) return SubtreePositivity::No;
    std::unordered_set<Int> seen{root};
    std::vector<std::pair<Int, std::size_t>> stack{{root, 0}};
    std::size_t popped = 0;
    while (!stack.empty() && popped < node_cap) {
        auto [v, depth] = stack.back();
        stack.pop_back();
        ++popped;
        if (depth >= depth_cap) continue;
        for (const Int& pre : inverse_step(p, v)) {
            if (pre > 0) return SubtreePositivity::Yes;
            if (seen.insert(pre).second) stack.emplace_back(pre, depth + 1);
        }
    }
    return SubtreePositivity::Unknown;
}

}  // namespace detail

enum class ComponentStatus { Certified, Unresolved };

struct ComponentReport {
    ResidueSet component;
    ComponentStatus status = ComponentStatus::Unresolved;
    std::vector<Int> exceptional;      // E intersected with this component
    std::optional<Int> branch_node;    // spine case only
    std::vector<Int> certificate_pair; // two positive values with disjoint backward orbits
    std::vector<Int> attractors;       // generators of positive-attracting cycles found
    std::string reason;
};

struct ExceptionalSetReport {
    Int k;
    std::vector<ComponentReport> per_component;
    bool all_certified = false;
    std::vector<Int> E;  // union of exceptional sets, valid when all_certified
};

/// The halting-permitting search for the finite exceptional set E_k: per
/// residue component, either two disjoint infinite positive families are
/// exhibited (two attractor cycles, two entry trees, or the two children of
/// the first spine branching) -- certifying a natural boundary for every
/// positive m outside the listed exceptional elements -- or the component is
/// reported Unresolved with the obstacle. Exceptional elements are positive
/// cycle members plus positive spine nodes up to and including the branch
/// node, whose own backward orbits still cover both families.
inline ExceptionalSetReport exceptional_set(const MapParam& p, const Int& cycle_bound,
                                            const Int& partner_search_bound) {
    if (cycle_bound < 1 || partner_search_bound < 1)
        throw std::invalid_argument("exceptional_set: bounds must be >= 1");
    ExceptionalSetReport rep;
    rep.k = p.k;
    long long M = residue_modulus(p.k);
    ComponentPartition part = component_partition(p.k);
    CycleSearchResult found = find_cycles(p, cycle_bound, Domain::Positive);

    for (const ResidueSet& comp : part.components) {
        ComponentReport cr;
        cr.component = comp;
        std::vector<const Cycle*> attractors;
        for (const Cycle& c : found.cycles.cycles()) {
            long long res = mod_nonneg(c.generator, Int(M)).convert_to<long long>();
            if (comp.contains(res)) {
                attractors.push_back(&c);
                cr.attractors.push_back(c.generator);
            }
        }
        if (attractors.empty()) {
            cr.reason = "no positive-attracting cycle found within the cycle bound";
            rep.per_component.push_back(std::move(cr));
            continue;
        }
        if (attractors.size() >= 2) {
            // Two attractors split the component's positive integers into
            // disjoint infinite backward families; every positive m misses
            // at least one of them, so nothing is exceptional here.
            Int rep1 = detail::smallest_positive_attracted(p, *attractors[0], cycle_bound, found.cycles);
            Int rep2 = detail::smallest_positive_attracted(p, *attractors[1], cycle_bound, found.cycles);
            DisjointnessVerdict v = trichotomy(p, rep1, rep2);
            if (v.relation != Relation::Disjoint) {
                cr.reason = "attractor representatives failed disjointness re-verification";
                rep.per_component.push_back(std::move(cr));
                continue;
            }
            cr.status = ComponentStatus::Certified;
            cr.certificate_pair = {rep1, rep2};
            std::ostringstream os;
            os << attractors.size() << " attractor cycles certify every positive value";
            cr.reason = os.str();
            rep.per_component.push_back(std::move(cr));
            continue;
        }

        // Single attractor: walk the inverse tree from the cycle along the
        // spine until two subtrees carry positive integers.
        const Cycle& c = *attractors[0];
        std::unordered_set<Int> cycle_els(c.elements.begin(), c.elements.end());
        for (const Int& e : c.elements)
            if (e > 0) cr.exceptional.push_back(e);

        std::vector<Int> tree_roots;
        for (const Int& e : c.elements)
            for (const Int& pre : inverse_step(p, e))
                if (!cycle_els.count(pre)) tree_roots.push_back(pre);
        std::sort(tree_roots.begin(), tree_roots.end(), [](const Int& a, const Int& b) {
            Int aa = abs_int(a), ab = abs_int(b);
            return aa != ab ? aa < ab : a < b;
        });
        std::vector<Int> pos_roots;
        bool unknown = false;
        for (const Int& r : tree_roots) {
            auto s = detail::subtree_contains_positive(p, r);
            if (s == detail::SubtreePositivity::Yes) pos_roots.push_back(r);
            if (s == detail::SubtreePositivity::Unknown) unknown = true;
        }
        if (unknown) {
            cr.reason = "subtree positivity undecided within caps";
            cr.exceptional.clear();
            rep.per_component.push_back(std::move(cr));
            continue;
        }
        if (pos_roots.empty()) {
            cr.reason = "no entry tree carries positive integers";
            cr.exceptional.clear();
            rep.per_component.push_back(std::move(cr));
            continue;
        }
        if (pos_roots.size() >= 2) {
            DisjointnessVerdict v = trichotomy(p, pos_roots[0], pos_roots[1]);
            if (v.relation != Relation::Disjoint) {
                cr.reason = "entry-tree roots failed disjointness re-verification";
                cr.exceptional.clear();
                rep.per_component.push_back(std::move(cr));
                continue;
            }
            cr.status = ComponentStatus::Certified;
            cr.certificate_pair = {pos_roots[0], pos_roots[1]};
            cr.reason = "multiple positive entry trees below the cycle";
            std::sort(cr.exceptional.begin(), cr.exceptional.end());
            rep.per_component.push_back(std::move(cr));
            continue;
        }

        Int node = pos_roots[0];
        Int steps = 1;
        while (true) {
            if (steps > partner_search_bound) {
                cr.reason = "spine walk exceeded the search bound before branching";
                cr.exceptional.clear();
                break;
            }
            if (node > 0) cr.exceptional.push_back(node);
            std::vector<Int> pos_children;
            bool child_unknown = false;
            for (const Int& pre : inverse_step(p, node)) {
                if (cycle_els.count(pre)) continue;
                auto s = detail::subtree_contains_positive(p, pre);
                if (s == detail::SubtreePositivity::Yes) pos_children.push_back(pre);
                if (s == detail::SubtreePositivity::Unknown) child_unknown = true;
            }
            if (child_unknown) {
                cr.reason = "subtree positivity undecided within caps";
                cr.exceptional.clear();
                break;
            }
            if (pos_children.empty()) {
                cr.reason = "positive integers lost along the spine";
                cr.exceptional.clear();
                break;
            }
            if (pos_children.size() == 1) {
                node = pos_children[0];
                ++steps;
                continue;
            }
            DisjointnessVerdict v = trichotomy(p, pos_children[0], pos_children[1]);
            if (v.relation != Relation::Disjoint) {
                cr.reason = "branch children failed disjointness re-verification";
                cr.exceptional.clear();
                break;
            }
            cr.status = ComponentStatus::Certified;
            cr.branch_node = node;
            cr.certificate_pair = {pos_children[0], pos_children[1]};
            cr.reason = "first two-positive-subtree branching on the spine";
            std::sort(cr.exceptional.begin(), cr.exceptional.end());
            break;
        }
        rep.per_component.push_back(std::move(cr));
    }

    rep.all_certified = !rep.per_component.empty();
    for (const ComponentReport& cr : rep.per_component)
        if (cr.status != ComponentStatus::Certified) rep.all_certified = false;
    if (rep.all_certified) {
        for (const ComponentReport& cr : rep.per_component)
            rep.E.insert(rep.E.end(), cr.exceptional.begin(), cr.exceptional.end());
        std::sort(rep.E.begin(), rep.E.end());
    }
    return rep;
}

}  // namespace orbitkit
