#pragma once

#include "orbitkit/census.hpp"
#include "orbitkit/genfun.hpp"
#include "orbitkit/rationality.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace orbitkit {

using json = nlohmann::json;

// Big integers travel as decimal strings; residues and other small indices
// as plain numbers.

inline json int_list(const std::vector<Int>& xs) {
    json a = json::array();
    for (const Int& x : xs) a.push_back(x.str());
    return a;
}

inline json cycles_to_json(const std::vector<Cycle>& cs) {
    json a = json::array();
    for (const Cycle& c : cs) a.push_back({{"generator", c.generator.str()}, {"elements", int_list(c.elements)}});
    return a;
}

inline json classify_to_json(const ClassifyOutcome& o) {
    json j;
    j["n"] = o.n.str();
    if (o.status == ClassifyStatus::Attracted) {
        j["status"] = "Attracted";
        j["cycle"] = o.cycle_generator.str();
        j["steps_to_entry"] = o.steps_to_entry;
    } else {
        j["status"] = "Unresolved";
    }
    return j;
}

inline json sample_to_json(const OrbitSample& s) {
    return json{{"root", s.root.str()},
                {"positive", int_list(s.positive_members)},
                {"negative", int_list(s.negative_members)},
                {"exhausted_below", s.frontier_exhausted_below.str()},
                {"depth_used", s.depth_used},
                {"nodes_expanded", s.nodes_expanded}};
}

inline json trichotomy_to_json(const DisjointnessVerdict& v) {
    return json{{"m1", v.m1.str()},
                {"m2", v.m2.str()},
                {"relation", relation_name(v.relation)},
                {"witness", v.witness}};
}

inline json residue_set_to_json(const ResidueSet& r) {
    return json{{"modulus", r.modulus}, {"members", r.members}};
}

inline json partition_to_json(const ComponentPartition& p) {
    json comps = json::array();
    for (const ResidueSet& c : p.components) comps.push_back(c.members);
    return json{{"modulus", p.modulus}, {"components", comps}};
}

inline json window_to_json(const MembershipWindow& w) {
    std::string bits(w.bits.size(), '0');
    for (std::size_t i = 0; i < w.bits.size(); ++i)
        if (w.bits[i]) bits[i] = '1';
    return json{{"k", w.k.str()}, {"lo", w.lo}, {"hi", w.hi}, {"bits", bits}, {"exact_below", w.exact_below}};
}

inline json verdict_to_json(const RationalityVerdict& v) {
    json j;
    j["status"] = rationality_status_name(v.status);
    j["X"] = v.X.members;
    j["k0"] = v.k0;
    j["closure_ok"] = v.closure_ok;
    if (v.status == RationalityStatus::InconsistentWithinWindow)
        j["witness"] = {v.witness.first, v.witness.second};
    if (!v.note.empty()) j["note"] = v.note;
    return j;
}

inline json sml_to_json(const SmlResult& r) {
    if (!r.matched) return json{{"matched", false}};
    return json{{"matched", true},
                {"d", r.d},
                {"progressions", r.progressions},
                {"n0", r.n0},
                {"exceptions", r.exceptions}};
}

inline json certificate_to_json(const CertificateResult& c) {
    json j;
    j["m"] = c.m.str();
    if (c.found) {
        j["status"] = "Certificate";
        j["partner"] = c.partner.str();
        j["witness"] = c.verdict.witness;
    } else {
        j["status"] = "NoCertificateFound";
        j["saw_unresolved"] = c.saw_unresolved;
    }
    return j;
}

inline json exceptional_to_json(const ExceptionalSetReport& r) {
    json j;
    json e = json::array();
    for (const Int& x : r.E) e.push_back(x.convert_to<long long>());
    j["E"] = e;
    j["all_certified"] = r.all_certified;
    const ComponentReport* spine = nullptr;
    for (const ComponentReport& cr : r.per_component)
        if (cr.branch_node) spine = &cr;
    if (spine) {
        j["branch"] = spine->branch_node->convert_to<long long>();
        json ch = json::array();
        for (const Int& x : spine->certificate_pair) ch.push_back(x.convert_to<long long>());
        j["children"] = ch;
    } else {
        j["branch"] = nullptr;
        j["children"] = json::array();
    }
    json comps = json::array();
    for (const ComponentReport& cr : r.per_component) {
        json cj;
        cj["component"] = cr.component.members;
        cj["status"] = cr.status == ComponentStatus::Certified ? "Certified" : "Unresolved";
        cj["exceptional"] = int_list(cr.exceptional);
        cj["certificate_pair"] = int_list(cr.certificate_pair);
        cj["attractors"] = int_list(cr.attractors);
        cj["reason"] = cr.reason;
        if (cr.branch_node) cj["branch"] = cr.branch_node->str();
        comps.push_back(std::move(cj));
    }
    j["components"] = comps;
    return j;
}

inline json series_to_json(const RationalSeries& g) {
    json j;
    json num = json::array();
    for (const Int& c : g.numerator().coeffs()) num.push_back(c.str());
    j["num"] = num;
    j["var"] = g.variable();
    if (g.denominator_factors().empty()) {
        j["den"] = json::array({"1"});
        return j;
    }
    if (auto pe = g.structured_denominator()) {
        j["den_pow"] = json{{"P", pe->first}, {"e", pe->second}};
    } else {
        json den = json::array();
        for (const Int& c : g.denominator_poly().coeffs()) den.push_back(c.str());
        j["den"] = den;
    }
    return j;
}

inline RationalSeries series_from_json(const json& j) {
    std::vector<Int> num;
    for (const auto& c : j.at("num")) num.emplace_back(c.get<std::string>());
    std::string var = j.value("var", "z");
    if (j.contains("den_pow")) {
        long long P = j["den_pow"].at("P").get<long long>();
        int e = j["den_pow"].at("e").get<int>();
        return RationalSeries::over_pow(Poly(std::move(num)), P, e, var);
    }
    std::vector<Int> den;
    for (const auto& c : j.at("den")) den.emplace_back(c.get<std::string>());
    Poly d(std::move(den));
    // Recover cyclotomic factors by trial division; the formats emitted by
    // this library always have cyclotomic-product denominators.
    std::map<long long, int> factors;
    long long deg = d.degree();
    for (long long f = 1; f <= deg && d.degree() > 0; ++f) {
        while (true) {
            auto q = Poly::div_exact(d, cyclo_factor(f));
            if (!q) break;
            d = std::move(*q);
            ++factors[f];
        }
    }
    if (d != Poly::one()) throw std::invalid_argument("series_from_json: denominator is not a product of 1 - z^d factors");
    return RationalSeries(Poly(std::move(num)), std::move(factors), var);
}

inline std::string format_density(long long count, long long size) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", size ? static_cast<double>(count) / static_cast<double>(size) : 0.0);
    return buf;
}

inline json census_to_json(const CensusTable& t) {
    json j;
    j["k"] = t.k.str();
    j["max_steps"] = t.max_steps;
    j["max_bits"] = t.max_bits;
    j["lo"] = t.lo.str();
    j["hi"] = t.hi.str();
    j["block_size"] = t.block_size;
    j["labels"] = t.labels;
    json blocks = json::array();
    for (const BlockStats& b : t.blocks) {
        json bj;
        bj["lo"] = b.lo.str();
        bj["hi"] = b.hi.str();
        json counts = json::object(), densities = json::object();
        for (const auto& [label, count] : b.counts) {
            counts[label] = count;
            densities[label] = format_density(count, b.size());
        }
        bj["counts"] = counts;
        bj["densities"] = densities;
        bj["unresolved"] = b.unresolved;
        bj["runs"] = b.run_count;
        bj["alternations"] = b.alternation_count;
        blocks.push_back(std::move(bj));
    }
    j["blocks"] = blocks;
    return j;
}

inline CensusTable census_from_json(const json& j) {
    CensusTable t;
    t.k = Int(j.at("k").get<std::string>());
    t.max_steps = j.at("max_steps").get<std::size_t>();
    t.max_bits = j.at("max_bits").get<unsigned>();
    t.lo = Int(j.at("lo").get<std::string>());
    t.hi = Int(j.at("hi").get<std::string>());
    t.block_size = j.at("block_size").get<long long>();
    t.labels = j.at("labels").get<std::vector<std::string>>();
    t.blocks = compute_block_stats(t.lo, t.hi, t.block_size, t.labels);
    return t;
}

/// CSV schema: header "n,label,block", one row per integer, block is the
/// 0-based block index. Metadata (k, caps) travels outside the CSV.
inline std::string census_to_csv(const CensusTable& t) {
    std::ostringstream os;
    os << "n,label,block\n";
    Int n = t.lo;
    for (std::size_t i = 0; i < t.labels.size(); ++i, ++n) {
        long long block = static_cast<long long>(i) / t.block_size;
        os << n << ',' << t.labels[i] << ',' << block << '\n';
    }
    return os.str();
}

/// Rebuilds a table from CSV rows plus the externally supplied metadata.
inline CensusTable census_from_csv(const std::string& text, const Int& k, std::size_t max_steps,
                                   unsigned max_bits, long long block_size) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line) || line != "n,label,block")
        throw std::invalid_argument("census_from_csv: bad header");
    CensusTable t;
    t.k = k;
    t.max_steps = max_steps;
    t.max_bits = max_bits;
    t.block_size = block_size;
    bool first = true;
    Int n;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        auto c1 = line.find(',');
        auto c2 = line.find(',', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos)
            throw std::invalid_argument("census_from_csv: bad row");
        n = Int(line.substr(0, c1));
        if (first) {
            t.lo = n;
            first = false;
        }
        t.labels.push_back(line.substr(c1 + 1, c2 - c1 - 1));
    }
    if (first) throw std::invalid_argument("census_from_csv: no rows");
    t.hi = n;
    t.blocks = compute_block_stats(t.lo, t.hi, t.block_size, t.labels);
    return t;
}

struct CacheError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Census cache: length-prefixed JSON lines ("<byte length> <json>"), a
/// versioned header first, one row per integer, and an end marker so
/// truncation is detected. Human-inspectable on purpose.
inline void cache_store(const std::string& path, const CensusTable& t) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw CacheError("cache_store: cannot open " + path);
    auto emit = [&out](const json& j) {
        std::string s = j.dump();
        out << s.size() << ' ' << s << '\n';
    };
    emit(json{{"format_version", 1},
              {"kind", "census"},
              {"k", t.k.str()},
              {"max_steps", t.max_steps},
              {"max_bits", t.max_bits},
              {"lo", t.lo.str()},
              {"hi", t.hi.str()},
              {"block_size", t.block_size},
              {"rows", t.labels.size()}});
    Int n = t.lo;
    for (const std::string& lab : t.labels) {
        emit(json{{"n", n.str()}, {"label", lab}});
        ++n;
    }
    emit(json{{"end", true}});
    if (!out) throw CacheError("cache_store: write failed for " + path);
}

namespace detail {
inline json cache_read_line(std::istream& in, const std::string& path) {
    std::string line;
    if (!std::getline(in, line)) throw CacheError("cache: truncated file " + path);
    auto sp = line.find(' ');
    if (sp == std::string::npos) throw CacheError("cache: malformed line in " + path);
    std::size_t len = 0;
    try {
        len = std::stoull(line.substr(0, sp));
    } catch (...) {
        throw CacheError("cache: malformed length prefix in " + path);
    }
    std::string payload = line.substr(sp + 1);
    if (payload.size() != len) throw CacheError("cache: length mismatch in " + path);
    json j = json::parse(payload, nullptr, false);
    if (j.is_discarded()) throw CacheError("cache: corrupt JSON in " + path);
    return j;
}
}  // namespace detail

/// Loads a census cache, rejecting version, parameter, or range mismatches
/// outright: a cache built under different caps is never silently reused.
inline CensusTable cache_load(const std::string& path, const RunConfig& expected) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CacheError("cache_load: cannot open " + path);
    json h = detail::cache_read_line(in, path);
    if (h.value("format_version", -1) != 1 || h.value("kind", "") != "census")
        throw CacheError("cache_load: unsupported header in " + path);
    CensusTable t;
    t.k = Int(h.at("k").get<std::string>());
    t.max_steps = h.at("max_steps").get<std::size_t>();
    t.max_bits = h.at("max_bits").get<unsigned>();
    t.lo = Int(h.at("lo").get<std::string>());
    t.hi = Int(h.at("hi").get<std::string>());
    t.block_size = h.at("block_size").get<long long>();
    if (t.k != expected.k || t.max_steps != expected.max_steps || t.max_bits != expected.max_bits ||
        t.lo != expected.lo || t.hi != expected.hi || t.block_size != expected.block_size)
        throw CacheError("cache_load: cache was built under different parameters");
    std::size_t rows = h.at("rows").get<std::size_t>();
    Int n = t.lo;
    for (std::size_t i = 0; i < rows; ++i, ++n) {
        json r = detail::cache_read_line(in, path);
        if (Int(r.at("n").get<std::string>()) != n) throw CacheError("cache_load: row order corrupt");
        t.labels.push_back(r.at("label").get<std::string>());
    }
    json tail = detail::cache_read_line(in, path);
    if (tail.value("end", false) != true) throw CacheError("cache_load: missing end marker");
    t.blocks = compute_block_stats(t.lo, t.hi, t.block_size, t.labels);
    return t;
}

}  // namespace orbitkit
