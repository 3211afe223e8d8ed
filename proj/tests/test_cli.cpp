#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "curvelab/cli.hpp"
#include "json.hpp"

using nlohmann::json;

namespace {

namespace fs = std::filesystem;

fs::path scratch_dir() {
    auto d = fs::temp_directory_path() / "curvelab-cli-tests";
    fs::create_directories(d);
    return d;
}

fs::path write_file(const std::string& name, const std::string& text) {
    auto p = scratch_dir() / name;
    std::ofstream out(p, std::ios::binary);
    out << text;
    return p;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

int run(std::vector<std::string> args) {
    std::vector<const char*> argv{"curvelab"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return curvelab::run_cli(static_cast<int>(argv.size()), argv.data());
}

// Runs the CLI with stdout temporarily redirected into a file.
int run_capture_stdout(std::vector<std::string> args, const fs::path& capture) {
    std::fflush(stdout);
    int saved = dup(fileno(stdout));
    FILE* f = std::freopen(capture.string().c_str(), "wb", stdout);
    REQUIRE(f != nullptr);
    int code = run(std::move(args));
    std::fflush(stdout);
    dup2(saved, fileno(stdout));
    close(saved);
    return code;
}

const char* kPairSpec = R"({
  "branches": [
    {"param": {"n": 2, "y": [[3, 1]]}},
    {"param": {"n": 2, "y": [[3, 1], [4, 1]]}}
  ]
})";

const char* kPairPolySpec = R"({
  "branches": [
    {"poly": "y^2 - x^3"},
    {"poly": "(y - x^2)^2 - x^3"}
  ]
})";

json analyze_pair(const std::string& tag, std::vector<std::string> extra = {}) {
    auto spec = write_file(tag + ".json", kPairSpec);
    auto out = scratch_dir() / (tag + ".out");
    std::vector<std::string> args{"analyze", spec.string(), "--out", out.string(), "--seed", "5"};
    for (auto& e : extra) args.push_back(e);
    REQUIRE(run(args) == 0);
    return json::parse(read_file(out));
}

} // namespace

TEST_CASE("analyze produces the full report for a two-branch curve") {
    auto rep = analyze_pair("pair");
    CHECK(rep.at("schema") == "curvelab-report/1");
    CHECK(rep.at("seed") == 5);
    CHECK(rep.at("branches").size() == 2);
    CHECK(rep.at("branches")[0].at("semigroup_generators") == json::array({2, 3}));
    CHECK(rep.at("branches")[0].at("milnor") == 2);
    CHECK(rep.at("pairwise_intersections")[0][1] == 7);

    const auto& c = rep.at("curve");
    CHECK(c.at("milnor") == 17);
    CHECK(c.at("delta") == 9);
    CHECK(c.at("semigroup_conductor") == json::array({9, 9}));
    CHECK(c.at("tjurina_berger") == 15);
    CHECK(c.at("tjurina_closed") == 15);
    CHECK(c.at("tjurina_oracle") == 15);
    CHECK(c.at("theta") == json::array({0, 4}));
    CHECK(c.at("lambda_conductor") == json::array({6, 6}));
    CHECK(c.at("ratio") == "17/15");

    CHECK(rep.at("all_passed") == true);
    for (const auto& [name, ok] : rep.at("verdicts").items()) {
        INFO("verdict ", name);
        CHECK(ok == true);
    }
    // Small boxes get their value sets dumped into the report.
    CHECK(rep.contains("semigroup_values"));
    CHECK(rep.contains("kahler_values"));
    const auto& mem = rep.at("semigroup_values").at("members");
    CHECK(mem.size() == 13);
}

TEST_CASE("reports are byte stable across runs and worker counts") {
    auto spec = write_file("stable.json", kPairSpec);
    auto o1 = scratch_dir() / "stable1.out";
    auto o2 = scratch_dir() / "stable2.out";
    auto o3 = scratch_dir() / "stable3.out";
    REQUIRE(run({"analyze", spec.string(), "--out", o1.string(), "--seed", "7", "--jobs", "1"}) == 0);
    REQUIRE(run({"analyze", spec.string(), "--out", o2.string(), "--seed", "7", "--jobs", "1"}) == 0);
    REQUIRE(run({"analyze", spec.string(), "--out", o3.string(), "--seed", "7", "--jobs", "8"}) == 0);
    auto b1 = read_file(o1);
    CHECK(b1 == read_file(o2));
    CHECK(b1 == read_file(o3));
    CHECK_FALSE(b1.empty());
}

TEST_CASE("invariants are seed independent") {
    auto a = analyze_pair("seedA");
    auto spec = write_file("seedB.json", kPairSpec);
    auto out = scratch_dir() / "seedB.out";
    REQUIRE(run({"analyze", spec.string(), "--out", out.string(), "--seed", "999"}) == 0);
    auto b = json::parse(read_file(out));
    CHECK(a.at("curve") == b.at("curve"));
    CHECK(a.at("verdicts") == b.at("verdicts"));
    CHECK(a.at("semigroup_values") == b.at("semigroup_values"));
}

TEST_CASE("polynomial branch entries match parametrized ones") {
    auto spec = write_file("poly.json", kPairPolySpec);
    auto out = scratch_dir() / "poly.out";
    REQUIRE(run({"analyze", spec.string(), "--out", out.string(), "--seed", "5"}) == 0);
    auto rep = json::parse(read_file(out));
    CHECK(rep.at("curve") == analyze_pair("polyref").at("curve"));
}

TEST_CASE("oracle switch precedence") {
    // CLI flag wins over the spec option.
    auto rep = analyze_pair("noracle", {"--oracle", "off"});
    CHECK(rep.at("curve").at("tjurina_oracle").is_null());
    CHECK_FALSE(rep.at("verdicts").contains("berger-vs-oracle"));
    CHECK(rep.at("all_passed") == true);

    std::string spec_off = R"({
      "branches": [
        {"param": {"n": 2, "y": [[3, 1]]}},
        {"param": {"n": 2, "y": [[3, 1], [4, 1]]}}
      ],
      "options": {"oracle": "off"}
    })";
    auto p = write_file("spec_off.json", spec_off);
    auto out = scratch_dir() / "spec_off.out";
    REQUIRE(run({"analyze", p.string(), "--out", out.string()}) == 0);
    CHECK(json::parse(read_file(out)).at("curve").at("tjurina_oracle").is_null());

    auto out2 = scratch_dir() / "spec_off2.out";
    REQUIRE(run({"analyze", p.string(), "--out", out2.string(), "--oracle", "on"}) == 0);
    CHECK(json::parse(read_file(out2)).at("curve").at("tjurina_oracle") == 15);
}

TEST_CASE("semigroup subcommand") {
    auto spec = write_file("sg.json", R"({"branches": [{"param": {"n": 2, "y": [[3, 1]]}}]})");
    auto out = scratch_dir() / "sg.out";
    REQUIRE(run({"semigroup", spec.string(), "--out", out.string()}) == 0);
    auto rep = json::parse(read_file(out));
    CHECK(rep.at("schema") == "curvelab-semigroup/1");
    CHECK(rep.at("value_set").at("tail_conductor") == json::array({2}));
    CHECK(rep.at("value_set").at("members") == json::parse("[[0],[2]]"));
}

TEST_CASE("lambda subcommand") {
    auto spec = write_file("lam.json", kPairSpec);
    auto out = scratch_dir() / "lam.out";
    REQUIRE(run({"lambda", spec.string(), "--out", out.string()}) == 0);
    auto rep = json::parse(read_file(out));
    CHECK(rep.at("schema") == "curvelab-lambda/1");
    CHECK(rep.at("conductor") == json::array({6, 6}));
    bool has55 = false;
    for (const auto& m : rep.at("maximals").at("absolute_maximals"))
        has55 = has55 || m == json::array({5, 5});
    CHECK(has55);
}

TEST_CASE("experiment subcommand in both formats") {
    std::string spec = R"({
      "experiment": {"generators": [2, 3], "target": 7, "samples": 2}
    })";
    auto p = write_file("exp.json", spec);
    auto out = scratch_dir() / "exp.out";
    REQUIRE(run({"experiment", p.string(), "--out", out.string(), "--seed", "11", "--json"}) == 0);
    auto rep = json::parse(read_file(out));
    CHECK(rep.at("schema") == "curvelab-experiment/1");
    REQUIRE(rep.at("rows").size() == 2);
    for (const auto& row : rep.at("rows")) {
        CHECK(row.at("generated") == true);
        CHECK(row.at("intersection") == 7);
        CHECK(row.at("tau_berger") == 15);
    }
    CHECK(rep.at("summaries")[0].at("min_tau_berger") == 15);
    CHECK(rep.at("summaries")[0].at("reference_2I_plus_c") == 16);

    auto out2 = scratch_dir() / "exp.tsv";
    REQUIRE(run({"experiment", p.string(), "--out", out2.string(), "--seed", "11"}) == 0);
    auto table = read_file(out2);
    CHECK(table.find('\t') != std::string::npos);
    CHECK(table.find("# target 7") != std::string::npos);
}

TEST_CASE("reports go to stdout when no output file is given") {
    auto spec = write_file("stdout.json", R"({"branches": [{"param": {"n": 2, "y": [[3, 1]]}}]})");
    auto cap = scratch_dir() / "stdout.cap";
    REQUIRE(run_capture_stdout({"semigroup", spec.string()}, cap) == 0);
    auto rep = json::parse(read_file(cap));
    CHECK(rep.at("schema") == "curvelab-semigroup/1");
}

TEST_CASE("smooth branches through the spec surface") {
    std::string spec = R"({
      "branches": [
        {"param": {"n": 1, "y": []}},
        {"param": {"n": 1, "y": [], "axis_swap": true}}
      ]
    })";
    auto p = write_file("node.json", spec);
    auto out = scratch_dir() / "node.out";
    REQUIRE(run({"analyze", p.string(), "--out", out.string()}) == 0);
    auto rep = json::parse(read_file(out));
    CHECK(rep.at("curve").at("milnor") == 1);
    CHECK(rep.at("curve").at("tjurina_berger") == 1);
    CHECK(rep.at("all_passed") == true);
}

TEST_CASE("rational coefficients in parameter terms") {
    std::string spec = R"({
      "branches": [{"param": {"n": 2, "y": [[3, "1/2"], [5, -2]]}}]
    })";
    auto p = write_file("rat.json", spec);
    auto out = scratch_dir() / "rat.out";
    REQUIRE(run({"analyze", p.string(), "--out", out.string()}) == 0);
    CHECK(json::parse(read_file(out)).at("curve").at("milnor") == 2);
}

TEST_CASE("errors exit with code 1") {
    auto bad = write_file("bad.json", "{ not json");
    CHECK(run({"analyze", bad.string()}) == 1);

    auto badpoly = write_file("badpoly.json", R"({"branches": [{"poly": "z + 1"}]})");
    CHECK(run({"analyze", badpoly.string()}) == 1);

    auto dup = write_file("dup.json", R"({
      "branches": [
        {"param": {"n": 2, "y": [[3, 1]]}},
        {"param": {"n": 2, "y": [[3, 1]]}}
      ]
    })");
    CHECK(run({"analyze", dup.string()}) == 1);

    auto nonred = write_file("nonred.json", R"({"branches": [{"poly": "(y^2 - x^3)^2"}]})");
    CHECK(run({"analyze", nonred.string()}) == 1);

    CHECK(run({"analyze", (scratch_dir() / "missing.json").string()}) == 1);

    // Experiment subcommand without an experiment section.
    auto noexp = write_file("noexp.json", kPairSpec);
    CHECK(run({"experiment", noexp.string()}) == 1);
}

TEST_CASE("command line misuse is rejected by the parser") {
    CHECK(run({}) != 0);
    CHECK(run({"analyze"}) != 0);                       // missing spec
    CHECK(run({"frobnicate", "x.json"}) != 0);          // unknown subcommand
    auto spec = write_file("misuse.json", kPairSpec);
    CHECK(run({"analyze", spec.string(), "--oracle", "sometimes"}) != 0);
}
