#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>
#include <string>
#include <vector>

#include "curvelab/errors.hpp"
#include "curvelab/invariants.hpp"
#include "curvelab/oracle.hpp"

using namespace curvelab;

namespace {

constexpr std::uint64_t kSeed = 0xBEEFCAFE;

Parametrization cusp() { return make_parametrization(2, {{3, Rat(1)}}); }

BranchList cusp_pair() {
    return {cusp(), make_parametrization(2, {{3, Rat(1)}, {4, Rat(1)}})};
}

BranchList cusp_triple() {
    return {cusp(), make_parametrization(2, {{3, Rat(1)}, {4, Rat(1)}}),
            make_parametrization(2, {{3, Rat(1)}, {4, Rat(2)}})};
}

std::set<std::string> verdict_names(const InvariantReport& rep) {
    std::set<std::string> names;
    for (const auto& [k, v] : rep.verdicts) names.insert(k);
    return names;
}

void check_all_verdicts(const InvariantReport& rep) {
    for (const auto& [name, ok] : rep.verdicts) {
        INFO("verdict ", name);
        CHECK(ok);
    }
}

bool same_report(const InvariantReport& a, const InvariantReport& b) {
    return a.branch_milnor == b.branch_milnor && a.branch_delta == b.branch_delta &&
           a.branch_tjurina == b.branch_tjurina && a.inter == b.inter && a.milnor == b.milnor &&
           a.delta == b.delta && a.cs == b.cs && a.tjurina_berger == b.tjurina_berger &&
           a.tjurina_closed == b.tjurina_closed && a.tjurina_oracle == b.tjurina_oracle &&
           a.theta == b.theta && a.lambda_conductor == b.lambda_conductor && a.ratio == b.ratio &&
           a.verdicts == b.verdicts;
}

} // namespace

TEST_CASE("milnor and delta by the intersection formulas") {
    auto cd1 = curve_data({cusp()});
    CHECK(milnor(cd1) == 2);
    CHECK(delta_invariant(cd1, kSeed) == 1);

    auto cd2 = curve_data(cusp_pair());
    CHECK(milnor(cd2) == 17);
    CHECK(delta_invariant(cd2, kSeed) == 9);

    auto cd3 = curve_data(cusp_triple());
    CHECK(milnor(cd3) == 46);
    CHECK(delta_invariant(cd3, kSeed) == 24);
    // mu = 2 delta - r + 1 for any reduced germ.
    CHECK(milnor(cd3) == 2 * delta_invariant(cd3, kSeed) - 3 + 1);
}

TEST_CASE("tjurina by the set-distance route") {
    CHECK(tjurina_berger(curve_data({cusp()}), kSeed) == 2);
    CHECK(tjurina_berger(curve_data(cusp_pair()), kSeed) == 15);
    CHECK(tjurina_berger(curve_data(cusp_triple()), kSeed) == 39);
}

TEST_CASE("closed two-branch formula and its applicability") {
    // Diagonal pair: 2I + c - 1 = 14 + 2 - 1.
    auto closed = tjurina_closed(curve_data(cusp_pair()));
    REQUIRE(closed.has_value());
    CHECK(*closed == 15);

    // Intersection at the threshold: not applicable.
    CHECK_FALSE(tjurina_closed(curve_data({cusp(), make_parametrization(2, {{3, Rat(2)}})}))
                    .has_value());
    // Different semigroups: not applicable.
    CHECK_FALSE(tjurina_closed(curve_data({cusp(), make_parametrization(2, {{5, Rat(1)}})}))
                    .has_value());
    // One or three branches: not applicable.
    CHECK_FALSE(tjurina_closed(curve_data({cusp()})).has_value());
    CHECK_FALSE(tjurina_closed(curve_data(cusp_triple())).has_value());

    // Higher-genus diagonal pair: I = 58, c = 42.
    auto b0 = make_parametrization(6, {{9, Rat(1)}, {10, Rat(1)}});
    auto b1 = make_parametrization(6, {{9, Rat(1)}, {10, Rat(1)}, {11, Rat(1)}});
    auto closed2 = tjurina_closed(curve_data({b0, b1}));
    REQUIRE(closed2.has_value());
    CHECK(*closed2 == 157);
}

TEST_CASE("single-branch tjurina via differential values") {
    CHECK(branch_tjurina_valueset(cusp(), kSeed) == 2);
    // Quasi-homogeneous: tau = mu.
    CHECK(branch_tjurina_valueset(make_parametrization(3, {{4, Rat(1)}}), kSeed) == 6);
    CHECK(branch_tjurina_valueset(make_parametrization(5, {{8, Rat(1)}}), kSeed) == 28);
    // Genus two, no longer quasi-homogeneous: tau = 14 < mu = 16.
    CHECK(branch_tjurina_valueset(make_parametrization(4, {{6, Rat(1)}, {7, Rat(1)}}), kSeed) == 14);
}

TEST_CASE("truncated quotient dimensions") {
    CHECK(quotient_dim_truncated({parse_bivar("x"), parse_bivar("y")}, 3, 1000003) == 1);
    CHECK(quotient_dim_truncated({parse_bivar("x^2"), parse_bivar("y^2")}, 4, 1000003) == 4);
    CHECK(quotient_dim_truncated({}, 2, 1000003) == 3);
}

TEST_CASE("colength oracles on hand-checked germs") {
    CHECK(milnor_oracle(parse_bivar("x y"), kSeed) == 1);
    CHECK(tjurina_oracle(parse_bivar("x y"), kSeed) == 1);
    CHECK(milnor_oracle(parse_bivar("y^2 - x^3"), kSeed) == 2);
    CHECK(tjurina_oracle(parse_bivar("y^2 - x^3"), kSeed) == 2);

    auto prod = parse_bivar("(y^2 - x^3)((y - x^2)^2 - x^3)");
    CHECK(milnor_oracle(prod, kSeed) == 17);
    CHECK(tjurina_oracle(prod, kSeed) == 15);

    // Genus-two branch: mu and tau differ.
    auto f = implicitize(make_parametrization(4, {{6, Rat(1)}, {7, Rat(1)}}));
    CHECK(milnor_oracle(f, kSeed) == 16);
    CHECK(tjurina_oracle(f, kSeed) == 14);
}

TEST_CASE("oracle reports non-stabilizing input") {
    // x^2 is not reduced; the quotient keeps growing with the cap.
    CHECK_THROWS_AS(tjurina_oracle(parse_bivar("x^2"), kSeed, OracleOptions{40, 1}),
                    OracleInconclusive);
}

TEST_CASE("ratio bound and the sharp two-branch identity") {
    auto rep = verify_all(spec_from_branches(cusp_pair()), {.seed = kSeed});
    CHECK(rep.ratio == rat(17, 15));
    CHECK(ratio_check(rep));
    // Tampering with tau so that mu/tau hits 4/3 must fail the check.
    auto bad = rep;
    bad.milnor = 4;
    bad.tjurina_berger = 3;
    bad.tjurina_closed.reset();
    CHECK_FALSE(ratio_check(bad));
}

TEST_CASE("full verification of the cusp pair") {
    auto rep = verify_all(spec_from_branches(cusp_pair()), {.seed = kSeed});
    CHECK(rep.milnor == 17);
    CHECK(rep.delta == 9);
    CHECK(rep.cs == ValueVector{9, 9});
    CHECK(rep.tjurina_berger == 15);
    REQUIRE(rep.tjurina_closed.has_value());
    CHECK(*rep.tjurina_closed == 15);
    REQUIRE(rep.tjurina_oracle.has_value());
    CHECK(*rep.tjurina_oracle == 15);
    CHECK(rep.theta == std::vector<std::uint64_t>{0, 4});
    CHECK(rep.lambda_conductor == ValueVector{6, 6});
    CHECK(rep.branch_milnor == std::vector<std::uint64_t>{2, 2});
    CHECK(rep.branch_tjurina == std::vector<std::uint64_t>{2, 2});

    CHECK(verdict_names(rep) ==
          std::set<std::string>{"berger-vs-oracle", "branch-tjurina-oracle", "closed-vs-berger",
                                "delta-two-way", "jacobian-shift", "lambda-conductor",
                                "log-kernel-values", "milnor-two-way", "ratio-bound",
                                "theta-closed"});
    check_all_verdicts(rep);
}

TEST_CASE("verification of one branch and of three branches") {
    auto rep1 = verify_all(spec_from_branches({cusp()}), {.seed = kSeed});
    CHECK(rep1.milnor == 2);
    CHECK(rep1.tjurina_berger == 2);
    CHECK_FALSE(rep1.tjurina_closed.has_value());
    // The two-branch theorems drop out of the verdict set.
    CHECK(verdict_names(rep1) ==
          std::set<std::string>{"berger-vs-oracle", "branch-tjurina-oracle", "delta-two-way",
                                "jacobian-shift", "milnor-two-way", "ratio-bound"});
    check_all_verdicts(rep1);

    auto rep3 = verify_all(spec_from_branches(cusp_triple()), {.seed = kSeed});
    CHECK(rep3.milnor == 46);
    CHECK(rep3.tjurina_berger == 39);
    REQUIRE(rep3.tjurina_oracle.has_value());
    CHECK(*rep3.tjurina_oracle == 39);
    CHECK_FALSE(rep3.tjurina_closed.has_value());
    CHECK(rep3.theta == std::vector<std::uint64_t>{0, 4, 8});
    CHECK(rep3.lambda_conductor == ValueVector{10, 10, 10});
    CHECK(verdict_names(rep3) == verdict_names(rep1));
    check_all_verdicts(rep3);
}

TEST_CASE("verification is independent of the worker count") {
    auto spec = spec_from_branches(cusp_pair());
    auto a = verify_all(spec, {.seed = kSeed, .jobs = 1});
    auto b = verify_all(spec, {.seed = kSeed, .jobs = 8});
    CHECK(same_report(a, b));
}

TEST_CASE("oracle can be switched off") {
    auto rep = verify_all(spec_from_branches(cusp_pair()), {.seed = kSeed, .oracle = false});
    CHECK_FALSE(rep.tjurina_oracle.has_value());
    CHECK(verdict_names(rep).count("berger-vs-oracle") == 0);
    CHECK(verdict_names(rep).count("branch-tjurina-oracle") == 0);
    check_all_verdicts(rep);
    CHECK(rep.tjurina_berger == 15);
}

TEST_CASE("curve specs from polynomials") {
    auto spec = spec_from_polys({parse_bivar("y^2 - x^3"), parse_bivar("(y - x^2)^2 - x^3")});
    CHECK(spec.branches.size() == 2);
    REQUIRE(spec.product.has_value());
    CHECK(*spec.product == parse_bivar("(y^2 - x^3)((y - x^2)^2 - x^3)"));

    auto rep = verify_all(spec, {.seed = kSeed});
    CHECK(rep.milnor == 17);
    CHECK(rep.tjurina_berger == 15);
    check_all_verdicts(rep);

    // One factor may split into several branches.
    auto node = spec_from_polys({parse_bivar("x y")});
    CHECK(node.branches.size() == 2);
    auto nrep = verify_all(node, {.seed = kSeed});
    CHECK(nrep.milnor == 1);
    CHECK(nrep.delta == 1);
    CHECK(nrep.tjurina_berger == 1);
    check_all_verdicts(nrep);
}

TEST_CASE("higher-genus diagonal pair end to end") {
    auto b0 = make_parametrization(6, {{9, Rat(1)}, {10, Rat(1)}});
    auto b1 = make_parametrization(6, {{9, Rat(1)}, {10, Rat(1)}, {11, Rat(1)}});
    auto rep = verify_all(spec_from_branches({b0, b1}), {.seed = kSeed});
    CHECK(rep.milnor == 199);
    CHECK(rep.inter[0][1] == 58);
    CHECK(rep.tjurina_berger == 157);
    REQUIRE(rep.tjurina_closed.has_value());
    CHECK(*rep.tjurina_closed == 157);
    REQUIRE(rep.tjurina_oracle.has_value());
    CHECK(*rep.tjurina_oracle == 157);
    check_all_verdicts(rep);
    // 4 tau - 3 mu = 2I - 2c - 1 on diagonal pairs.
    CHECK(4 * rep.tjurina_berger - 3 * rep.milnor ==
          2 * rep.inter[0][1] - 2 * rep.chars[0].conductor - 1);
}
