#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "ulam/closed_forms.hpp"
#include "ulam/quasiball.hpp"

using namespace ulam;

namespace {

// The worked 2-quasiball in Q_4 with stem NYNN.
Quasiball example_ball() {
    Quasiball b;
    b.q = 4;
    b.radius = 2;
    b.assignment[{}] = "NYNN";
    b.assignment[{1}] = "YNNY";
    b.assignment[{2}] = "NNYN";
    b.assignment[{3}] = "NYYN";
    b.assignment[{4}] = "NYNY";
    b.assignment[{1, 2}] = "YYYN";
    b.assignment[{1, 3}] = "YNYN";
    b.assignment[{1, 4}] = "YNNN";
    b.assignment[{2, 3}] = "NNNY";
    b.assignment[{2, 4}] = "NNYY";
    b.assignment[{3, 4}] = "NYYY";
    return b;
}

std::string random_vertex(std::mt19937_64& rng, unsigned q) {
    std::string v(q, 'N');
    for (auto& ch : v)
        if (rng() & 1) ch = 'Y';
    return v;
}

}  // namespace

TEST_CASE("lie set text round-trips") {
    CHECK(lie_set_str({}) == "-");
    CHECK(lie_set_str({1, 3}) == "1,3");
    CHECK(parse_lie_set("-").empty());
    CHECK(parse_lie_set("2,5") == LieSet({2, 5}));
    CHECK_THROWS_AS(parse_lie_set("2,x"), shape_error);
}

TEST_CASE("the worked 2-quasiball in Q_4 validates") {
    Quasiball b = example_ball();
    CHECK(b.assignment.size() == binom_le(4, 2));
    CHECK(b.stem() == "NYNN");
    BallCheck chk = validate_quasiball(b);
    CHECK_MESSAGE(chk.ok, chk.message);
}

TEST_CASE("a single flipped vertex breaks the prefix rule") {
    Quasiball b = example_ball();
    b.assignment[{2, 3}] = "NNYY";  // must flip position 3 relative to f({2})=NNYN
    BallCheck chk = validate_quasiball(b);
    CHECK_FALSE(chk.ok);
    CHECK(!chk.message.empty());
}

TEST_CASE("radius-0 balls and the size law") {
    Quasiball b = hamming_ball("NYN", 0);
    CHECK(b.assignment.size() == 1);
    CHECK(validate_quasiball(b).ok);
    std::mt19937_64 rng(20090711);
    for (int t = 0; t < 60; ++t) {
        const unsigned q = 1 + rng() % 10;
        const unsigned i = std::min<unsigned>(rng() % 4, q);
        Quasiball hb = hamming_ball(random_vertex(rng, q), i);
        CHECK(hb.assignment.size() == binom_le(q, i));
        BallCheck chk = validate_quasiball(hb);
        CHECK_MESSAGE(chk.ok, chk.message);
    }
    CHECK_THROWS_AS(hamming_ball("NZN", 1), shape_error);
}

TEST_CASE("restriction drops one radius level and stays valid") {
    Quasiball b = example_ball();
    Quasiball r = restrict_ball(b);
    CHECK(r.radius == 1);
    CHECK(r.assignment.size() == binom_le(4, 1));
    CHECK(r.stem() == b.stem());
    CHECK(validate_quasiball(r).ok);
    CHECK_THROWS_AS(restrict_ball(hamming_ball("NY", 0)), std::domain_error);
}

TEST_CASE("winning pathological strategies become coverings") {
    Solver s;
    // four elements, one lie, four rounds: a tight threshold instance
    GameSpec spec{Variant::Pathological, StateVector({4, 0}), 4};
    SolveOutcome out = s.solve(spec, true);
    REQUIRE(out.strategy.has_value());
    QuasiballCollection coll = strategy_to_covering(*out.strategy, spec);
    CHECK(coll.mode == CoverMode::Covering);
    CHECK(coll.balls.size() == 4);
    CollectionCheck chk = validate_collection(coll);
    CHECK_MESSAGE(chk.ok, chk.message);
    CHECK(chk.slots == 20);  // 4 balls of size binom_le(4,1) = 5
    CHECK(chk.covered == 16);
    CHECK(chk.overlaps == 4);

    // a one-round game: two radius-1 balls blanketing Q_1
    GameSpec tiny{Variant::Pathological, StateVector({2, 0}), 1};
    SolveOutcome tout = s.solve(tiny, true);
    REQUIRE(tout.strategy.has_value());
    QuasiballCollection tcoll = strategy_to_covering(*tout.strategy, tiny);
    CollectionCheck tchk = validate_collection(tcoll);
    CHECK_MESSAGE(tchk.ok, tchk.message);
    CHECK(tchk.covered == 2);
}

TEST_CASE("winning original strategies become packings") {
    Solver s;
    const std::uint64_t n = s.f_original(5, 1);
    REQUIRE(n == 4);
    GameSpec spec{Variant::Original, StateVector({n, 0}), 5};
    SolveOutcome out = s.solve(spec, true);
    REQUIRE(out.strategy.has_value());
    QuasiballCollection coll = strategy_to_covering(*out.strategy, spec);
    CHECK(coll.mode == CoverMode::Packing);
    CollectionCheck chk = validate_collection(coll);
    CHECK_MESSAGE(chk.ok, chk.message);
    CHECK(chk.overlaps == 0);
    CHECK(chk.slots == 24);  // 4 balls of size binom_le(5,1) = 6, disjoint
    CHECK(chk.slots <= (std::uint64_t{1} << 5));
}

TEST_CASE("coverings convert back to winning strategies") {
    Solver s;
    for (auto [counts, q, variant] :
         std::vector<std::tuple<std::vector<std::uint64_t>, unsigned, Variant>>{
             {{4, 0}, 4u, Variant::Pathological},
             {{2, 0, 0}, 5u, Variant::Pathological},
             {{4, 0}, 5u, Variant::Original},
             {{3, 2}, 4u, Variant::Pathological}}) {
        GameSpec spec{variant, StateVector(counts), q};
        SolveOutcome out = s.solve(spec, true);
        REQUIRE(out.strategy.has_value());
        QuasiballCollection coll = strategy_to_covering(*out.strategy, spec);
        DecisionTree rebuilt = covering_to_strategy(coll, variant);
        TreeCheck tc = validate_tree(rebuilt, spec);
        CHECK_MESSAGE(tc.ok, tc.message);
    }
}

TEST_CASE("sphere bounds from collection arithmetic") {
    Solver s;
    // covering: total slots can never be fewer than 2^q
    GameSpec cspec{Variant::Pathological, StateVector({4, 0}), 4};
    QuasiballCollection cover =
        strategy_to_covering(*s.solve(cspec, true).strategy, cspec);
    CollectionCheck cc = validate_collection(cover);
    REQUIRE(cc.ok);
    CHECK(cc.slots >= (std::uint64_t{1} << cover.q));
    // packing: total slots can never exceed 2^q
    GameSpec pspec{Variant::Original, StateVector({4, 0}), 5};
    QuasiballCollection pack =
        strategy_to_covering(*s.solve(pspec, true).strategy, pspec);
    CollectionCheck pc = validate_collection(pack);
    REQUIRE(pc.ok);
    CHECK(pc.slots <= (std::uint64_t{1} << pack.q));
}

TEST_CASE("hand-built radius-0 collections") {
    QuasiballCollection coll;
    coll.q = 3;
    coll.k = 0;
    coll.mode = CoverMode::Covering;
    coll.profile = StateVector({8});
    for (char a : {'N', 'Y'})
        for (char b : {'N', 'Y'})
            for (char c : {'N', 'Y'})
                coll.balls.push_back(hamming_ball(std::string{a, b, c}, 0));
    CollectionCheck chk = validate_collection(coll);
    CHECK_MESSAGE(chk.ok, chk.message);
    CHECK(chk.covered == 8);
    CHECK(chk.overlaps == 0);

    // removing one ball leaves a vertex uncovered
    QuasiballCollection holey = coll;
    holey.balls.pop_back();
    holey.profile = StateVector({7});
    CollectionCheck hchk = validate_collection(holey);
    CHECK_FALSE(hchk.ok);
    CHECK(hchk.message.find("uncovered") != std::string::npos);

    // duplicated centers collide when read as a packing
    QuasiballCollection dup;
    dup.q = 2;
    dup.k = 0;
    dup.mode = CoverMode::Packing;
    dup.profile = StateVector({2});
    dup.balls.push_back(hamming_ball("NY", 0));
    dup.balls.push_back(hamming_ball("NY", 0));
    CollectionCheck dchk = validate_collection(dup);
    CHECK_FALSE(dchk.ok);
}

TEST_CASE("profile mismatches are rejected") {
    QuasiballCollection coll;
    coll.q = 4;
    coll.k = 2;
    coll.mode = CoverMode::Covering;
    coll.profile = StateVector({1, 0, 0});  // promises one radius-2 ball
    coll.balls.push_back(hamming_ball("NNNN", 1));
    CollectionCheck chk = validate_collection(coll);
    CHECK_FALSE(chk.ok);
}

TEST_CASE("certificates round-trip byte-identically") {
    Solver s;
    GameSpec spec{Variant::Pathological, StateVector({4, 0}), 4};
    QuasiballCollection coll = strategy_to_covering(*s.solve(spec, true).strategy, spec);
    const std::string text = serialize_collection(coll);
    CHECK(text.find("quasiball-cover v1") == 0);
    std::istringstream is(text);
    QuasiballCollection parsed = parse_collection(is);
    CHECK(parsed.q == coll.q);
    CHECK(parsed.k == coll.k);
    CHECK(parsed.mode == coll.mode);
    CHECK(serialize_collection(parsed) == text);
    CHECK(validate_collection(parsed).ok);

    std::istringstream bad("not a certificate\n");
    CHECK_THROWS_AS(parse_collection(bad), shape_error);
}
