// orbitkit command-line interface: cycle census, inverse-orbit exploration,
// residue algebra, rationality window checks, boundary certificates, and
// exact generating functions for 3x+k maps.

#include "orbitkit/orbitkit.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

using namespace orbitkit;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;       // precondition or usage violation
constexpr int kExitUnresolved = 2;  // cap-limited result under --strict

struct GlobalOpts {
    std::string k = "1";
    std::size_t max_steps = 100000;
    unsigned max_bits = 4096;
    std::string format = "json";
    std::string out;
    std::string cache;
    std::uint64_t seed = 0;
    bool strict = false;

    MapParam param() const { return MapParam(Int(k), max_steps, max_bits); }

    std::string cache_path() const {
        if (const char* env = std::getenv("ORBITKIT_CACHE")) return env;
        return cache;
    }
};

void emit(const GlobalOpts& g, const std::string& text) {
    std::string payload = text;
    if (payload.empty() || payload.back() != '\n') payload += '\n';
    if (g.out.empty()) {
        std::cout << payload;
        return;
    }
    std::ofstream f(g.out, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open output file " + g.out);
    f << payload;
}

void emit_json(const GlobalOpts& g, const json& j) { emit(g, j.dump(2)); }

std::vector<Int> parse_int_list(const std::string& csv) {
    std::vector<Int> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.emplace_back(item);
    }
    if (out.empty()) throw std::invalid_argument("empty integer list");
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"orbitkit: experimental analysis of 3x+k maps"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOpts g;
    app.add_option("--k", g.k, "map parameter k, congruent to +-1 (mod 6)");
    app.add_option("--max-steps", g.max_steps, "forward-iteration cap");
    app.add_option("--max-bits", g.max_bits, "bit cap on iterates");
    app.add_option("--format", g.format, "output format: json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--out", g.out, "write output to this path instead of stdout");
    app.add_option("--cache", g.cache, "census cache path (ORBITKIT_CACHE overrides)");
    app.add_option("--seed", g.seed, "seed for randomized checks");
    app.add_flag("--strict", g.strict, "exit 2 on cap-limited (unresolved) results");

    // cycles
    auto* sc_cycles = app.add_subcommand("cycles", "bounded periodic-orbit search");
    std::string bound = "1000";
    std::string domain = "positive";
    sc_cycles->add_option("--bound", bound, "scan starting points up to this bound");
    sc_cycles->add_option("--domain", domain, "positive or all")->check(CLI::IsMember({"positive", "all"}));

    // classify
    auto* sc_classify = app.add_subcommand("classify", "attractor cycle of a single value");
    std::string cls_n;
    std::string cls_bound = "1000";
    sc_classify->add_option("--n", cls_n, "value to classify")->required();
    sc_classify->add_option("--bound", cls_bound, "cycle search bound");

    // inverse-orbit
    auto* sc_inv = app.add_subcommand("inverse-orbit", "bounded backward-orbit enumeration");
    std::string inv_m, inv_ncap = "10000", inv_exact = "-1";
    std::size_t inv_nodecap = 1u << 20;
    sc_inv->add_option("--m", inv_m, "orbit root")->required();
    sc_inv->add_option("--ncap", inv_ncap, "absolute-value cap on members");
    sc_inv->add_option("--node-cap", inv_nodecap, "node expansion budget");
    sc_inv->add_option("--exact-below", inv_exact, "request exact membership below this value (-1: default)");

    // trichotomy
    auto* sc_tri = app.add_subcommand("trichotomy", "orbit containment relation of two values");
    std::string tri_m1, tri_m2;
    sc_tri->add_option("--m1", tri_m1)->required();
    sc_tri->add_option("--m2", tri_m2)->required();

    // residues
    auto* sc_res = app.add_subcommand("residues", "bi-invariant residue components mod |k|");
    long long res_a = -1;
    sc_res->add_option("--a", res_a, "single residue to expand (default: full partition)");

    // rationality-check
    auto* sc_rat = app.add_subcommand("rationality-check", "window check against unions of progressions");
    std::string rat_m;
    long long rat_n = 10000;
    int rat_tail = 10;
    sc_rat->add_option("--m", rat_m, "orbit root for the membership window")->required();
    sc_rat->add_option("--N", rat_n, "window upper end");
    sc_rat->add_option("--min-tail", rat_tail, "minimum tail length in periods of |k|");

    // sml
    auto* sc_sml = app.add_subcommand("sml", "zero-pattern scan for progressions mod d");
    std::string sml_m, sml_zeros_file;
    long long sml_n = 2000, sml_dmax = 64;
    sc_sml->add_option("--m", sml_m, "orbit root; zeros are the window's non-members");
    sc_sml->add_option("--zeros-file", sml_zeros_file, "file with one zero index per line");
    sc_sml->add_option("--N", sml_n, "window upper end");
    sc_sml->add_option("--d-max", sml_dmax, "largest modulus to try");

    // certify
    auto* sc_cert = app.add_subcommand("certify", "natural-boundary certificate search");
    std::string cert_m, cert_bound = "10000";
    sc_cert->add_option("--m", cert_m)->required();
    sc_cert->add_option("--partner-bound", cert_bound, "partner search bound");

    // exceptional-set
    auto* sc_exc = app.add_subcommand("exceptional-set", "finite exceptional set per residue component");
    std::string exc_cycle_bound = "1000", exc_partner_bound = "10000";
    sc_exc->add_option("--cycle-bound", exc_cycle_bound);
    sc_exc->add_option("--partner-bound", exc_partner_bound);

    // genfun-iterate
    auto* sc_gfi = app.add_subcommand("genfun-iterate", "m-th iterate generating function");
    int gfi_m = 1;
    sc_gfi->add_option("--m", gfi_m, "iterate count")->required();

    // genfun-forward
    auto* sc_gff = app.add_subcommand("genfun-forward", "forward-orbit generating function");
    std::string gff_n;
    sc_gff->add_option("--n", gff_n, "starting value")->required();

    // orbit-window
    auto* sc_win = app.add_subcommand("orbit-window", "0/1 coefficient window of a backward orbit");
    std::string win_m;
    long long win_n = 100;
    sc_win->add_option("--m", win_m)->required();
    sc_win->add_option("--N", win_n, "window upper end");

    // census
    auto* sc_census = app.add_subcommand("census", "attractor membership census with block statistics");
    std::string cen_lo = "1", cen_hi = "100", cen_cycle_bound = "0";
    long long cen_block = 100;
    int cen_threads = 1;
    sc_census->add_option("--lo", cen_lo);
    sc_census->add_option("--hi", cen_hi);
    sc_census->add_option("--block", cen_block, "block size for statistics");
    sc_census->add_option("--cycle-bound", cen_cycle_bound, "cycle search bound (0: use hi)");
    sc_census->add_option("--threads", cen_threads, "worker count (output is worker-independent)");

    // refine
    auto* sc_ref = app.add_subcommand("refine", "one partition-refinement step on disjoint roots");
    std::string ref_roots;
    std::size_t ref_index = 0;
    sc_ref->add_option("--roots", ref_roots, "comma-separated disjoint orbit roots")->required();
    sc_ref->add_option("--index", ref_index, "which root to replace by its preimages");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        int rc = kExitOk;
        if (*sc_cycles) {
            auto res = find_cycles(g.param(), Int(bound),
                                   domain == "positive" ? Domain::Positive : Domain::AllIntegers);
            if (g.format == "csv") {
                std::ostringstream os;
                os << "generator,length,elements\n";
                for (const Cycle& c : res.cycles.cycles()) {
                    os << c.generator << ',' << c.length() << ',';
                    for (std::size_t i = 0; i < c.elements.size(); ++i)
                        os << (i ? " " : "") << c.elements[i];
                    os << '\n';
                }
                emit(g, os.str());
            } else {
                emit_json(g, cycles_to_json(res.cycles.cycles()));
            }
            if (g.strict && res.unresolved_count > 0) rc = kExitUnresolved;
        } else if (*sc_classify) {
            auto found = find_cycles(g.param(), Int(cls_bound));
            ClassifyOutcome out = classify(g.param(), Int(cls_n), found.cycles);
            emit_json(g, classify_to_json(out));
            if (g.strict && out.status == ClassifyStatus::Unresolved) rc = kExitUnresolved;
        } else if (*sc_inv) {
            OrbitSample s = enumerate_backward(g.param(), Int(inv_m), Int(inv_ncap), inv_nodecap,
                                               Int(inv_exact));
            if (g.format == "csv") {
                std::ostringstream os;
                os << "member\n";
                for (const Int& v : s.negative_members) os << v << '\n';
                if (s.root == 0) os << 0 << '\n';
                for (const Int& v : s.positive_members) os << v << '\n';
                emit(g, os.str());
            } else {
                emit_json(g, sample_to_json(s));
            }
            if (g.strict && Int(inv_exact) > 0 && s.frontier_exhausted_below < Int(inv_exact))
                rc = kExitUnresolved;
        } else if (*sc_tri) {
            DisjointnessVerdict v = trichotomy(g.param(), Int(tri_m1), Int(tri_m2));
            emit_json(g, trichotomy_to_json(v));
            if (g.strict && v.relation == Relation::Unresolved) rc = kExitUnresolved;
        } else if (*sc_res) {
            if (res_a >= 0)
                emit_json(g, residue_set_to_json(residue_component(Int(g.k), res_a)));
            else
                emit_json(g, partition_to_json(component_partition(Int(g.k))));
        } else if (*sc_rat) {
            MembershipWindow w = backward_gf_window(g.param(), Int(rat_m), rat_n);
            RationalityVerdict v = rationality_check(w, RationalityOptions{rat_tail});
            emit_json(g, verdict_to_json(v));
            if (g.strict && v.status == RationalityStatus::Inconclusive) rc = kExitUnresolved;
        } else if (*sc_sml) {
            std::vector<long long> zeros;
            if (!sml_zeros_file.empty()) {
                std::ifstream f(sml_zeros_file);
                if (!f) throw std::invalid_argument("cannot open " + sml_zeros_file);
                long long z;
                while (f >> z) zeros.push_back(z);
            } else if (!sml_m.empty()) {
                MembershipWindow w = backward_gf_window(g.param(), Int(sml_m), sml_n);
                if (g.strict && !w.exact()) rc = kExitUnresolved;
                for (long long n = w.lo; n <= w.hi; ++n)
                    if (!w.bit(n)) zeros.push_back(n);
            } else {
                throw std::invalid_argument("sml: provide --m or --zeros-file");
            }
            emit_json(g, sml_to_json(sml_pattern(zeros, sml_n, sml_dmax)));
        } else if (*sc_cert) {
            CertificateResult res = natural_boundary_certificate(g.param(), Int(cert_m), Int(cert_bound));
            emit_json(g, certificate_to_json(res));
            if (g.strict && !res.found && res.saw_unresolved) rc = kExitUnresolved;
        } else if (*sc_exc) {
            ExceptionalSetReport rep =
                exceptional_set(g.param(), Int(exc_cycle_bound), Int(exc_partner_bound));
            emit_json(g, exceptional_to_json(rep));
            if (g.strict && !rep.all_certified) rc = kExitUnresolved;
        } else if (*sc_gfi) {
            emit_json(g, series_to_json(iterate_gf(g.param(), gfi_m)));
        } else if (*sc_gff) {
            auto h = forward_gf(g.param(), Int(gff_n));
            if (h) {
                emit_json(g, series_to_json(*h));
            } else {
                emit_json(g, json{{"status", "Unresolved"}});
                if (g.strict) rc = kExitUnresolved;
            }
        } else if (*sc_win) {
            MembershipWindow w = backward_gf_window(g.param(), Int(win_m), win_n);
            if (g.format == "csv") {
                std::ostringstream os;
                os << "n,coefficient\n";
                for (long long n = w.lo; n <= w.hi; ++n) os << n << ',' << (w.bit(n) ? 1 : 0) << '\n';
                emit(g, os.str());
            } else {
                emit_json(g, window_to_json(w));
            }
            if (g.strict && !w.exact()) rc = kExitUnresolved;
        } else if (*sc_census) {
            RunConfig cfg;
            cfg.k = Int(g.k);
            cfg.max_steps = g.max_steps;
            cfg.max_bits = g.max_bits;
            cfg.lo = Int(cen_lo);
            cfg.hi = Int(cen_hi);
            cfg.block_size = cen_block;
            cfg.cycle_search_bound = Int(cen_cycle_bound);
            cfg.format = g.format;
            cfg.seed = g.seed;
            cfg.threads = cen_threads;
            cfg.cache_path = g.cache_path();
            CensusTable t;
            if (!cfg.cache_path.empty() && std::filesystem::exists(cfg.cache_path)) {
                t = cache_load(cfg.cache_path, cfg);  // mismatch is an error, never reuse
            } else {
                t = census(cfg);
                if (!cfg.cache_path.empty()) cache_store(cfg.cache_path, t);
            }
            emit(g, g.format == "csv" ? census_to_csv(t) : census_to_json(t).dump(2));
            bool any_unresolved = false;
            for (const std::string& lab : t.labels) any_unresolved |= (lab == kUnresolvedLabel);
            if (g.strict && any_unresolved) rc = kExitUnresolved;
        } else if (*sc_ref) {
            std::vector<Int> roots = parse_int_list(ref_roots);
            std::vector<Int> refined = partition_refine(g.param(), roots, ref_index);
            emit_json(g, json{{"roots", int_list(roots)}, {"refined", int_list(refined)}});
        }
        return rc;
    } catch (const CacheError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
}
