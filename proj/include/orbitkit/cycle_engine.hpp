#pragma once

#include "orbitkit/map_kernel.hpp"

#include <algorithm>
#include <optional>
#include <string>

namespace orbitkit {

/// A periodic orbit in canonical form: elements listed for one full period
/// starting at the generator (the element of smallest absolute value,
/// positive preferred on ties).
struct Cycle {
    std::vector<Int> elements;
    Int generator;
    std::string id;  // decimal generator, stable across runs

    static Cycle canonical(std::vector<Int> period) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < period.size(); ++i) {
            Int ai = abs_int(period[i]), ab = abs_int(period[best]);
            if (ai < ab || (ai == ab && period[i] > period[best])) best = i;
        }
        std::rotate(period.begin(), period.begin() + static_cast<std::ptrdiff_t>(best), period.end());
        Cycle c;
        c.generator = period.front();
        c.id = c.generator.str();
        c.elements = std::move(period);
        return c;
    }

    std::size_t length() const { return elements.size(); }
};

/// Closure under t_apply, no repeats, generator canonical.
inline bool verify_cycle(const MapParam& p, const Cycle& c) {
    if (c.elements.empty()) return false;
    for (std::size_t i = 0; i < c.elements.size(); ++i) {
        const Int& next = c.elements[(i + 1) % c.elements.size()];
        if (t_apply(p, c.elements[i]) != next) return false;
        for (std::size_t j = i + 1; j < c.elements.size(); ++j)
            if (c.elements[i] == c.elements[j]) return false;
    }
    Cycle canon = Cycle::canonical(c.elements);
    return canon.generator == c.generator && canon.elements == c.elements;
}

/// Canonical cycles with O(1) element membership.
class CycleSet {
public:
    CycleSet() = default;

    /// Adds a canonical cycle; returns false if a cycle with the same
    /// generator is already present.
    bool add(Cycle c) {
        if (by_generator_.count(c.generator)) return false;
        std::size_t idx = cycles_.size();
        by_generator_.emplace(c.generator, idx);
        for (const Int& e : c.elements) element_to_cycle_.emplace(e, idx);
        cycles_.push_back(std::move(c));
        return true;
    }

    const Cycle* cycle_of_element(const Int& v) const {
        auto it = element_to_cycle_.find(v);
        return it == element_to_cycle_.end() ? nullptr : &cycles_[it->second];
    }

    const Cycle* find_generator(const Int& g) const {
        auto it = by_generator_.find(g);
        return it == by_generator_.end() ? nullptr : &cycles_[it->second];
    }

    const std::vector<Cycle>& cycles() const { return cycles_; }
    std::size_t size() const { return cycles_.size(); }
    bool empty() const { return cycles_.empty(); }

    void sort_by_generator() {
        std::sort(cycles_.begin(), cycles_.end(),
                  [](const Cycle& a, const Cycle& b) { return a.generator < b.generator; });
        reindex();
    }

private:
    void reindex() {
        by_generator_.clear();
        element_to_cycle_.clear();
        for (std::size_t i = 0; i < cycles_.size(); ++i) {
            by_generator_.emplace(cycles_[i].generator, i);
            for (const Int& e : cycles_[i].elements) element_to_cycle_.emplace(e, i);
        }
    }

    std::vector<Cycle> cycles_;
    std::unordered_map<Int, std::size_t> by_generator_;
    std::unordered_map<Int, std::size_t> element_to_cycle_;
};

enum class ClassifyStatus { Attracted, Unresolved };

struct ClassifyOutcome {
    Int n;
    ClassifyStatus status = ClassifyStatus::Unresolved;
    Int cycle_generator;            // valid when Attracted
    std::size_t steps_to_entry = 0; // forward steps until the first on-cycle state
};

/// Forward-iterates n until it lands on a known cycle or closes a new one.
/// A cycle not in `known` is appended to `discovered` (when given) and still
/// reported as Attracted: the finiteness of the cycle list is conjectural,
/// so surprises are merged rather than rejected.
inline ClassifyOutcome classify(const MapParam& p, const Int& n, const CycleSet& known,
                                CycleSet* discovered = nullptr) {
    ClassifyOutcome out;
    out.n = n;
    std::vector<Int> path{n};
    std::unordered_map<Int, std::size_t> pos{{n, 0}};
    auto on_cycle = [&](const Int& v) -> const Cycle* {
        if (const Cycle* c = known.cycle_of_element(v)) return c;
        if (discovered)
            if (const Cycle* c = discovered->cycle_of_element(v)) return c;
        return nullptr;
    };
    for (std::size_t j = 0;; ++j) {
        const Int& cur = path.back();
        if (const Cycle* c = on_cycle(cur)) {
            out.status = ClassifyStatus::Attracted;
            out.cycle_generator = c->generator;
            out.steps_to_entry = j;
            return out;
        }
        if (j >= p.max_steps || bit_length(cur) > p.max_bits) return out;
        Int next = t_apply(p, cur);
        auto it = pos.find(next);
        if (it != pos.end()) {
            std::vector<Int> period(path.begin() + static_cast<std::ptrdiff_t>(it->second), path.end());
            Cycle c = Cycle::canonical(std::move(period));
            out.status = ClassifyStatus::Attracted;
            out.cycle_generator = c.generator;
            out.steps_to_entry = it->second;
            if (discovered) discovered->add(std::move(c));
            return out;
        }
        pos.emplace(next, path.size());
        path.push_back(next);
    }
}

namespace detail {

/// Memoizing classifier shared by find_cycles, classify_range and the
/// census. Results are identical to independent classification; the memo
/// only short-circuits work.
class RangeClassifier {
public:
    RangeClassifier(const MapParam& p, const CycleSet& known) : p_(p), cycles_(known) {}

    ClassifyOutcome run(const Int& n) {
        ClassifyOutcome out;
        out.n = n;
        std::vector<Int> path{n};
        std::unordered_map<Int, std::size_t> pos{{n, 0}};
        for (std::size_t j = 0;; ++j) {
            const Int& cur = path.back();
            // Cycle membership is checked before the memo: a cycle element
            // has steps_to_entry 0 regardless of how it was first reached.
            if (const Cycle* c = cycles_.cycle_of_element(cur)) {
                out.status = ClassifyStatus::Attracted;
                out.cycle_generator = c->generator;
                out.steps_to_entry = j;
                memo_path(path, j, out.cycle_generator, j);
                return out;
            }
            if (j > 0) {  // n itself handled by the caller's memo lookup
                auto mit = memo_.find(cur);
                if (mit != memo_.end()) {
                    out.status = ClassifyStatus::Attracted;
                    out.cycle_generator = mit->second.first;
                    out.steps_to_entry = j + mit->second.second;
                    memo_path(path, j, out.cycle_generator, out.steps_to_entry);
                    return out;
                }
            }
            if (j >= p_.max_steps || bit_length(cur) > p_.max_bits) {
                ++unresolved_;
                return out;  // capped paths are never memoized
            }
            Int next = t_apply(p_, cur);
            auto it = pos.find(next);
            if (it != pos.end()) {
                std::vector<Int> period(path.begin() + static_cast<std::ptrdiff_t>(it->second), path.end());
                Cycle c = Cycle::canonical(std::move(period));
                out.status = ClassifyStatus::Attracted;
                out.cycle_generator = c.generator;
                out.steps_to_entry = it->second;
                cycles_.add(std::move(c));
                // Path entries at or past the entry index sit on the cycle.
                for (std::size_t i = 0; i < path.size(); ++i) {
                    std::size_t steps = i < out.steps_to_entry ? out.steps_to_entry - i : 0;
                    memo_.emplace(path[i], std::make_pair(out.cycle_generator, steps));
                }
                return out;
            }
            pos.emplace(next, path.size());
            path.push_back(next);
        }
    }

    ClassifyOutcome run_memo(const Int& n) {
        auto mit = memo_.find(n);
        if (mit != memo_.end() && !cycles_.cycle_of_element(n)) {
            ClassifyOutcome out;
            out.n = n;
            out.status = ClassifyStatus::Attracted;
            out.cycle_generator = mit->second.first;
            out.steps_to_entry = mit->second.second;
            return out;
        }
        return run(n);
    }

    const CycleSet& cycles() const { return cycles_; }
    std::size_t unresolved_count() const { return unresolved_; }

private:
    void memo_path(const std::vector<Int>& path, std::size_t hit_index, const Int& gen,
                   std::size_t steps_at_start) {
        // steps_at_start = steps_to_entry of path[0]; walking forward loses one
        // step per edge until the entry point, then stays 0 on the cycle.
        for (std::size_t i = 0; i <= hit_index && i < path.size(); ++i) {
            std::size_t steps = i < steps_at_start ? steps_at_start - i : 0;
            memo_.emplace(path[i], std::make_pair(gen, steps));
        }
    }

    const MapParam& p_;
    CycleSet cycles_;
    std::unordered_map<Int, std::pair<Int, std::size_t>> memo_;
    std::size_t unresolved_ = 0;
};

}  // namespace detail

enum class Domain { Positive, AllIntegers };

struct CycleSearchResult {
    CycleSet cycles;                 // sorted by generator
    std::size_t unresolved_count = 0;  // starting points skipped at caps
};

/// All distinct cycles reachable by forward iteration from every start with
/// |n| <= search_bound (n >= 1 when domain is Positive), each reported once
/// in canonical form, ordered by generator. Completeness is relative to the
/// scanned starting points only.
inline CycleSearchResult find_cycles(const MapParam& p, const Int& search_bound,
                                     Domain domain = Domain::Positive) {
    if (search_bound < 1) throw std::invalid_argument("find_cycles: search_bound must be >= 1");
    detail::RangeClassifier rc(p, CycleSet{});
    Int lo = domain == Domain::Positive ? Int(1) : -search_bound;
    for (Int n = lo; n <= search_bound; ++n) rc.run_memo(n);
    CycleSearchResult res;
    res.cycles = rc.cycles();
    res.cycles.sort_by_generator();
    res.unresolved_count = rc.unresolved_count();
    for (const Cycle& c : res.cycles.cycles()) {
        if (!verify_cycle(p, c))
            throw std::logic_error("find_cycles: reported cycle failed closure re-verification");
    }
    return res;
}

/// Elementwise classify over [lo, hi] with memoization; output equals the
/// map of classify over the range.
inline std::vector<ClassifyOutcome> classify_range(const MapParam& p, const Int& lo, const Int& hi,
                                                   const CycleSet& known) {
    if (lo > hi) throw std::invalid_argument("classify_range: empty range");
    detail::RangeClassifier rc(p, known);
    std::vector<ClassifyOutcome> out;
    for (Int n = lo; n <= hi; ++n) out.push_back(rc.run_memo(n));
    return out;
}

}  // namespace orbitkit
