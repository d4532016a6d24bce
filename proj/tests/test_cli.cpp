#include "orbitkit/serialize.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>

using orbitkit::json;

namespace {

struct CliResult {
    int exit_code = -1;
    std::string out;
};

CliResult run_cli(const std::string& args, const std::string& env = "") {
    std::string cmd = env + " " + std::string(ORBITKIT_CLI_PATH) + " " + args + " 2>/dev/null";
    std::array<char, 4096> buf{};
    CliResult res;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::size_t got;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) res.out.append(buf.data(), got);
    int status = pclose(pipe);
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

json run_json(const std::string& args) {
    CliResult r = run_cli(args);
    REQUIRE(r.exit_code == 0);
    return json::parse(r.out);
}

}  // namespace

TEST_CASE("cycles subcommand, JSON schema") {
    json j = run_json("cycles --k -1 --bound 200");
    REQUIRE(j.is_array());
    REQUIRE(j.size() == 3);
    CHECK(j[0]["generator"] == "1");
    CHECK(j[1]["generator"] == "5");
    CHECK(j[2]["generator"] == "17");
    CHECK(j[1]["elements"] == json::array({"5", "7", "10"}));
    CHECK(j[2]["elements"].size() == 11);
}

TEST_CASE("cycles subcommand, CSV") {
    CliResult r = run_cli("cycles --k -1 --bound 200 --format csv");
    CHECK(r.exit_code == 0);
    CHECK(r.out.rfind("generator,length,elements\n", 0) == 0);
    CHECK(r.out.find("5,3,5 7 10\n") != std::string::npos);
}

TEST_CASE("classify subcommand") {
    json j = run_json("classify --k 1 --n 27");
    CHECK(j["status"] == "Attracted");
    CHECK(j["cycle"] == "1");
}

TEST_CASE("inverse-orbit subcommand") {
    json j = run_json("inverse-orbit --k 1 --m 3 --ncap 100");
    CHECK(j["root"] == "3");
    CHECK(j["positive"] == json::array({"3", "6", "12", "24", "48", "96"}));
    CHECK(j["negative"] == json::array());
}

TEST_CASE("trichotomy subcommand") {
    json j = run_json("trichotomy --k 1 --m1 5 --m2 16");
    CHECK(j["relation"] == "Disjoint");
    json n = run_json("trichotomy --k 1 --m1 3 --m2 5");
    CHECK(n["relation"] == "NestedFirstInSecond");
}

TEST_CASE("residues subcommand") {
    json j = run_json("residues --k 5");
    CHECK(j["modulus"] == 5);
    REQUIRE(j["components"].size() == 2);
    CHECK(j["components"][0] == json::array({0}));
    CHECK(j["components"][1] == json::array({1, 2, 3, 4}));
    json c = run_json("residues --k 5 --a 1");
    CHECK(c["members"] == json::array({1, 2, 3, 4}));
}

TEST_CASE("rationality-check subcommand emits the verdict schema") {
    json j = run_json("rationality-check --k 1 --m 1 --N 2000");
    CHECK(j["status"] == "ConsistentWithRational");
    CHECK(j["X"] == json::array({0}));
    CHECK(j["k0"] == 1);
    CHECK(j["closure_ok"] == true);

    json i = run_json("rationality-check --k 1 --m 3 --N 10000");
    CHECK(i["status"] == "InconsistentWithinWindow");
}

TEST_CASE("sml subcommand on an orbit window") {
    // zeros of the O^-(3) window are everything off the doubling chain;
    // geometric exceptions defeat every modulus
    json j = run_json("sml --k 1 --m 3 --N 2000 --d-max 10");
    CHECK(j["matched"] == false);
}

TEST_CASE("sml subcommand on a zeros file") {
    auto tmp = std::filesystem::temp_directory_path() / "orbitkit_sml_zeros.txt";
    {
        std::ofstream f(tmp);
        for (long long n = 2; n <= 800; n += 2) f << n << '\n';
    }
    json j = run_json("sml --zeros-file " + tmp.string() + " --N 800 --d-max 10");
    std::filesystem::remove(tmp);
    CHECK(j["matched"] == true);
    CHECK(j["d"] == 2);
    CHECK(j["progressions"] == json::array({0}));
}

TEST_CASE("certify subcommand") {
    json j = run_json("certify --k -1 --m 1");
    CHECK(j["status"] == "Certificate");
    CHECK(j["partner"] == "5");
    json none = run_json("certify --k 1 --m 4 --partner-bound 500");
    CHECK(none["status"] == "NoCertificateFound");
}

TEST_CASE("exceptional-set subcommand") {
    json j = run_json("exceptional-set --k 1");
    CHECK(j["E"] == json::array({1, 2, 4, 8}));
    CHECK(j["branch"] == 8);
    CHECK(j["children"] == json::array({16, 5}));

    json m = run_json("exceptional-set --k -1");
    CHECK(m["E"] == json::array());
    CHECK(m["branch"].is_null());
    CHECK(m["all_certified"] == true);
}

TEST_CASE("genfun-iterate subcommand") {
    json j = run_json("genfun-iterate --k 1 --m 1");
    CHECK(j["num"] == json::array({"0", "2", "1", "1"}));
    CHECK(j["den_pow"]["P"] == 2);
    CHECK(j["den_pow"]["e"] == 2);
    // round trip through the series parser
    auto g = orbitkit::series_from_json(j);
    CHECK(orbitkit::series_to_json(g) == j);
}

TEST_CASE("genfun-forward subcommand") {
    json j = run_json("genfun-forward --k -1 --n 5");
    CHECK(j["num"] == json::array({"5", "7", "10"}));
    CHECK(j["den_pow"]["P"] == 3);
    CHECK(j["den_pow"]["e"] == 1);
    CHECK(j["var"] == "w");

    CliResult r = run_cli("genfun-forward --k 1 --n 27 --max-steps 3 --strict");
    CHECK(r.exit_code == 2);
    CHECK(json::parse(r.out)["status"] == "Unresolved");
}

TEST_CASE("orbit-window subcommand, CSV") {
    CliResult r = run_cli("orbit-window --k 1 --m 3 --N 8 --format csv");
    CHECK(r.exit_code == 0);
    CHECK(r.out == "n,coefficient\n1,0\n2,0\n3,1\n4,0\n5,0\n6,1\n7,0\n8,0\n");
}

TEST_CASE("census subcommand with cache") {
    auto tmp = std::filesystem::temp_directory_path() / "orbitkit_cli_cache.jsonl";
    std::filesystem::remove(tmp);
    std::string args = "census --k -1 --lo 1 --hi 10 --block 10 --cache " + tmp.string();
    CliResult first = run_cli(args);
    CHECK(first.exit_code == 0);
    REQUIRE(std::filesystem::exists(tmp));
    CliResult second = run_cli(args);  // served from cache
    CHECK(second.exit_code == 0);
    CHECK(second.out == first.out);
    // same cache re-read under different caps: explicit failure
    CliResult bad = run_cli("census --k -1 --lo 1 --hi 10 --block 10 --max-steps 7 --cache " + tmp.string());
    CHECK(bad.exit_code == 1);
    std::filesystem::remove(tmp);
}

TEST_CASE("ORBITKIT_CACHE env overrides --cache") {
    auto env_tmp = std::filesystem::temp_directory_path() / "orbitkit_env_cache.jsonl";
    std::filesystem::remove(env_tmp);
    CliResult r = run_cli("census --k -1 --lo 1 --hi 5 --block 5 --cache /nonexistent/ignored.jsonl",
                          "ORBITKIT_CACHE=" + env_tmp.string());
    CHECK(r.exit_code == 0);
    CHECK(std::filesystem::exists(env_tmp));
    std::filesystem::remove(env_tmp);
}

TEST_CASE("census CSV output") {
    CliResult r = run_cli("census --k -1 --lo 1 --hi 10 --block 10 --format csv");
    CHECK(r.exit_code == 0);
    CHECK(r.out.rfind("n,label,block\n", 0) == 0);
    CHECK(r.out.find("9,5,0\n") != std::string::npos);
}

TEST_CASE("census reproducibility across runs and workers") {
    std::string base = "census --k -1 --lo 1 --hi 200 --block 50";
    CliResult a = run_cli(base);
    CliResult b = run_cli(base + " --threads 4");
    CHECK(a.out == b.out);
}

TEST_CASE("refine subcommand") {
    json j = run_json("refine --k 1 --roots 8");
    CHECK(j["refined"] == json::array({"16", "5"}));
    json jm = run_json("refine --k -1 --roots 1");
    CHECK(jm["refined"] == json::array({"2"}));
}

TEST_CASE("--out writes the payload to a file") {
    auto tmp = std::filesystem::temp_directory_path() / "orbitkit_out.json";
    std::filesystem::remove(tmp);
    CliResult r = run_cli("cycles --k 1 --bound 10 --out " + tmp.string());
    CHECK(r.exit_code == 0);
    CHECK(r.out.empty());
    std::ifstream f(tmp);
    json j = json::parse(f);
    CHECK(j[0]["generator"] == "1");
    std::filesystem::remove(tmp);
}

TEST_CASE("exit codes") {
    CHECK(run_cli("cycles --k 2 --bound 10").exit_code == 1);      // invalid k
    CHECK(run_cli("inverse-orbit --k 1 --m 50 --ncap 10").exit_code == 1);  // precondition
    CHECK(run_cli("bogus-subcommand").exit_code == 1);             // usage
    CHECK(run_cli("trichotomy --k 1 --m1 27 --m2 9 --max-steps 2 --strict").exit_code == 2);
    CHECK(run_cli("trichotomy --k 1 --m1 27 --m2 9 --max-steps 2").exit_code == 0);
}
