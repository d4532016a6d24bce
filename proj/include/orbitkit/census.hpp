#pragma once

#include "orbitkit/cycle_engine.hpp"

#include <cstdint>
#include <map>
#include <thread>

namespace orbitkit {

struct RunConfig {
    Int k = 1;
    std::size_t max_steps = 100000;
    unsigned max_bits = 4096;
    Int lo = 1, hi = 100;
    long long block_size = 100;
    Int cycle_search_bound = 0;  // 0: use max(hi, 1)
    std::string format = "json";
    std::string cache_path;
    std::uint64_t seed = 0;
    int threads = 1;

    MapParam map_param() const { return MapParam(k, max_steps, max_bits); }
};

struct BlockStats {
    Int lo, hi;
    std::map<std::string, long long> counts;  // attractor label -> count
    long long unresolved = 0;
    long long run_count = 0;
    long long alternation_count = 0;

    long long size() const { return (hi - lo + 1).convert_to<long long>(); }

    bool operator==(const BlockStats& o) const {
        return lo == o.lo && hi == o.hi && counts == o.counts && unresolved == o.unresolved &&
               run_count == o.run_count && alternation_count == o.alternation_count;
    }
};

inline const std::string kUnresolvedLabel = "Unresolved";

struct CensusTable {
    Int k;
    std::size_t max_steps = 100000;
    unsigned max_bits = 4096;
    Int lo, hi;
    long long block_size = 0;
    std::vector<std::string> labels;  // one per n in [lo, hi]: attractor generator or "Unresolved"
    std::vector<BlockStats> blocks;

    bool operator==(const CensusTable& o) const {
        return k == o.k && max_steps == o.max_steps && max_bits == o.max_bits && lo == o.lo &&
               hi == o.hi && block_size == o.block_size && labels == o.labels;
    }
};

/// Per-block statistics from the labels: counts, maximal constant-label
/// runs, and adjacent label changes (runs = alternations + 1 per block).
inline std::vector<BlockStats> compute_block_stats(const Int& lo, const Int& hi,
                                                   long long block_size,
                                                   const std::vector<std::string>& labels) {
    std::vector<BlockStats> blocks;
    std::size_t i = 0;
    Int n = lo;
    while (n <= hi) {
        BlockStats b;
        b.lo = n;
        b.hi = std::min(Int(n + block_size - 1), hi);
        const std::string* prev = nullptr;
        for (Int v = b.lo; v <= b.hi; ++v, ++i) {
            const std::string& lab = labels[i];
            if (lab == kUnresolvedLabel) ++b.unresolved;
            else ++b.counts[lab];
            if (prev == nullptr) b.run_count = 1;
            else if (*prev != lab) {
                ++b.alternation_count;
                ++b.run_count;
            }
            prev = &lab;
        }
        Int next = b.hi + 1;
        blocks.push_back(std::move(b));
        n = next;
    }
    return blocks;
}

/// Classifies every n in [lo, hi] by attractor cycle and tabulates
/// per-block statistics. The range is sharded over `threads` contiguous
/// chunks; classification is a pure function of n, so the merged result is
/// independent of the worker count.
inline CensusTable census(const RunConfig& cfg) {
    if (cfg.lo > cfg.hi) throw std::invalid_argument("census: empty range");
    if (cfg.block_size < 1) throw std::invalid_argument("census: block_size must be >= 1");
    MapParam p = cfg.map_param();
    Int bound = cfg.cycle_search_bound > 0 ? cfg.cycle_search_bound : std::max(cfg.hi, Int(1));
    Domain dom = cfg.lo < 1 ? Domain::AllIntegers : Domain::Positive;
    CycleSearchResult base = find_cycles(p, bound, dom);

    CensusTable t;
    t.k = cfg.k;
    t.max_steps = cfg.max_steps;
    t.max_bits = cfg.max_bits;
    t.lo = cfg.lo;
    t.hi = cfg.hi;
    t.block_size = cfg.block_size;
    long long total = (cfg.hi - cfg.lo + 1).convert_to<long long>();
    t.labels.assign(static_cast<std::size_t>(total), std::string());

    int workers = std::max(1, cfg.threads);
    if (static_cast<long long>(workers) > total) workers = static_cast<int>(total);
    auto work = [&](int w) {
        long long begin = total * w / workers, end = total * (w + 1) / workers;
        detail::RangeClassifier rc(p, base.cycles);
        for (long long i = begin; i < end; ++i) {
            ClassifyOutcome out = rc.run_memo(cfg.lo + i);
            t.labels[static_cast<std::size_t>(i)] =
                out.status == ClassifyStatus::Attracted ? out.cycle_generator.str() : kUnresolvedLabel;
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (auto& th : pool) th.join();
    }
    t.blocks = compute_block_stats(t.lo, t.hi, t.block_size, t.labels);
    return t;
}

}  // namespace orbitkit
