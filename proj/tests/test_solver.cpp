#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "ulam/closed_forms.hpp"
#include "ulam/solver.hpp"

using namespace ulam;

namespace {

Winner winner_of(Solver& s, Variant v, std::vector<std::uint64_t> counts, unsigned q) {
    GameSpec spec{v, StateVector(std::move(counts)), q};
    return s.solve(spec).winner;
}

}  // namespace

TEST_CASE("base cases and tiny games") {
    Solver s;
    CHECK(winner_of(s, Variant::Pathological, {1}, 0) == Winner::Paul);
    CHECK(winner_of(s, Variant::Pathological, {0}, 0) == Winner::Carole);
    CHECK(winner_of(s, Variant::Original, {1}, 0) == Winner::Paul);
    CHECK(winner_of(s, Variant::Original, {2}, 0) == Winner::Carole);
    CHECK(winner_of(s, Variant::Original, {0, 0}, 3) == Winner::Paul);
    CHECK(winner_of(s, Variant::Pathological, {4, 0}, 4) == Winner::Paul);
}

TEST_CASE("the (3,1) four-round game is a Carole win despite tight weight") {
    Solver s;
    StateVector x({3, 1});
    CHECK(weight(4, x) == 16);  // exactly 2^4, so the sphere bound is silent
    CHECK(winner_of(s, Variant::Pathological, {3, 1}, 4) == Winner::Carole);
}

TEST_CASE("question candidates: symmetry classes, balanced-first order") {
    auto c1 = question_candidates(StateVector({2, 0}), 3);
    bool has_10 = false;
    for (const auto& a : c1) has_10 = has_10 || a == QuestionVector({1, 0});
    CHECK(has_10);
    // (2,0) and (0,0) are one symmetry class: exactly one of them appears.
    int extremes = 0;
    for (const auto& a : c1)
        if (a == QuestionVector({0, 0}) || a == QuestionVector({2, 0})) ++extremes;
    CHECK(extremes == 1);
    // first candidate for (3,1) at j=3 has |imbalance| 2
    auto c2 = question_candidates(StateVector({3, 1}), 3);
    REQUIRE(!c2.empty());
    i128 d = imbalance(3, StateVector({3, 1}), c2.front());
    CHECK((d == 2 || d == -2));
    // zero state: only the zero question
    auto c3 = question_candidates(StateVector({0, 0}), 2);
    REQUIRE(c3.size() == 1);
    CHECK(c3.front() == QuestionVector({0, 0}));
}

TEST_CASE("f_star at small parameters") {
    Solver s;
    CHECK(s.f_star(5, 0) == 32);
    CHECK(s.f_star(4, 1) == 4);
    CHECK(s.f_star(10, 2) == 20);
    CHECK(s.f_star(0, 1) == 1);
}

TEST_CASE("f_original at small parameters") {
    Solver s;
    CHECK(s.f_original(2, 0) == 4);
    CHECK(s.f_original(0, 2) == 1);
    // n=5 is odd and 2^5 < 5*6 + 4, so five elements are too many.
    CHECK(s.f_original(5, 1) == 4);
}

TEST_CASE("max winning rounds") {
    Solver s;
    CHECK(s.max_winning_rounds(StateVector({2, 0, 0}), Variant::Pathological) == 5);
    CHECK_FALSE(
        s.max_winning_rounds(StateVector({0, 0}), Variant::Pathological).has_value());
    CHECK(s.max_winning_rounds(StateVector({1, 0}), Variant::Pathological) == 1);
    CHECK_THROWS_AS(s.max_winning_rounds(StateVector({2, 0}), Variant::Original),
                    legality_error);
}

TEST_CASE("guards: dimension and budget refusals") {
    Solver s;
    CHECK_THROWS_AS(winner_of(s, Variant::Pathological, {1, 0, 0, 0}, 3), budget_error);
    CHECK_THROWS_AS(winner_of(s, Variant::Pathological, {2, 0}, 17), budget_error);
    CHECK_THROWS_AS(winner_of(s, Variant::Pathological, {2, 0, 0}, 15), budget_error);
    SolverOptions tight;
    tight.question_budget = 3;
    Solver small(tight);
    CHECK_THROWS_AS(winner_of(small, Variant::Pathological, {20, 0}, 6), budget_error);
}

TEST_CASE("sphere-bound soundness on random light states") {
    std::mt19937_64 rng(20090711);
    Solver s;
    int found = 0;
    while (found < 1000) {
        const unsigned k = 1 + rng() % 2;
        const unsigned q = 1 + rng() % 10;
        std::vector<std::uint64_t> c(k + 1);
        for (auto& v : c) v = rng() % 6;
        StateVector x(c);
        if (weight(q, x) >= (u128{1} << q)) continue;
        ++found;
        GameSpec spec{Variant::Pathological, x, q};
        REQUIRE(s.solve(spec).winner == Winner::Carole);
    }
}

TEST_CASE("monotonicity under covering and majorization") {
    std::mt19937_64 rng(31337);
    Solver s;
    int pairs = 0;
    while (pairs < 500) {
        const unsigned k = 1 + rng() % 2;
        const unsigned q = 1 + rng() % 8;
        std::vector<std::uint64_t> big(k + 1), small(k + 1);
        for (auto& v : big) v = rng() % 7;
        for (std::size_t i = 0; i <= k; ++i) small[i] = big[i] ? rng() % (big[i] + 1) : 0;
        StateVector x(big), y(small);
        ++pairs;
        const bool y_path = winner_of(s, Variant::Pathological, small, q) == Winner::Paul;
        const bool x_path = winner_of(s, Variant::Pathological, big, q) == Winner::Paul;
        if (y_path) CHECK(x_path);  // covering monotonicity, pathological
        const bool x_orig = winner_of(s, Variant::Original, big, q) == Winner::Paul;
        const bool y_orig = winner_of(s, Variant::Original, small, q) == Winner::Paul;
        if (x_orig) CHECK(y_orig);  // covering monotonicity, original
        // majorization: shift mass rightward to build y' majorized by x
        std::vector<std::uint64_t> shifted = big;
        for (std::size_t i = 0; i + 1 <= k && shifted[i] > 0; ++i) {
            const std::uint64_t mv = rng() % (shifted[i] + 1);
            shifted[i] -= mv;
            shifted[i + 1] += mv;
        }
        StateVector yp(shifted);
        REQUIRE(majorizes(x, yp));
        if (winner_of(s, Variant::Pathological, shifted, q) == Winner::Paul) CHECK(x_path);
    }
}

TEST_CASE("extracted trees validate and replay") {
    Solver s;
    for (auto [counts, q, variant] :
         std::vector<std::tuple<std::vector<std::uint64_t>, unsigned, Variant>>{
             {{4, 0}, 4u, Variant::Pathological},
             {{2, 0, 0}, 5u, Variant::Pathological},
             {{1}, 0u, Variant::Pathological},
             {{4, 0}, 5u, Variant::Original},
             {{3, 2}, 4u, Variant::Pathological}}) {
        GameSpec spec{variant, StateVector(counts), q};
        SolveOutcome out = s.solve(spec, true);
        REQUIRE(out.winner == Winner::Paul);
        REQUIRE(out.strategy.has_value());
        TreeCheck tc = validate_tree(*out.strategy, spec);
        CHECK_MESSAGE(tc.ok, tc.message);
    }
    // losing positions yield no tree
    GameSpec losing{Variant::Pathological, StateVector({3, 1}), 4};
    SolveOutcome out = s.solve(losing, true);
    CHECK(out.winner == Winner::Carole);
    CHECK_FALSE(out.strategy.has_value());
}

TEST_CASE("validate_tree rejects corrupted trees") {
    Solver s;
    GameSpec spec{Variant::Pathological, StateVector({4, 0}), 4};
    SolveOutcome out = s.solve(spec, true);
    REQUIRE(out.strategy.has_value());
    DecisionTree& tree = *out.strategy;
    // corrupt one leaf state
    DecisionTree::Node* n = tree.root.get();
    while (n->yes_child) n = n->yes_child.get();
    n->state = StateVector({0, 0});
    TreeCheck tc = validate_tree(tree, spec);
    CHECK_FALSE(tc.ok);
    CHECK(!tc.message.empty());
}

TEST_CASE("determinism across thread counts") {
    SolverOptions mt;
    mt.threads = 4;
    Solver s1, s4(mt);
    std::mt19937_64 rng(99);
    for (int t = 0; t < 40; ++t) {
        const unsigned k = 1 + rng() % 2;
        const unsigned q = 1 + rng() % 8;
        std::vector<std::uint64_t> c(k + 1);
        for (auto& v : c) v = rng() % 8;
        for (Variant v : {Variant::Pathological, Variant::Original}) {
            GameSpec spec{v, StateVector(c), q};
            CHECK(s1.solve(spec).winner == s4.solve(spec).winner);
        }
    }
}

TEST_CASE("cache persistence round-trips") {
    Solver s;
    GameSpec spec{Variant::Pathological, StateVector({4, 0}), 4};
    s.solve(spec);
    std::ostringstream os;
    s.save_cache(os, Variant::Pathological);
    const std::string dump = os.str();
    CHECK(dump.find("Paul") != std::string::npos);

    Solver fresh;
    std::istringstream is(dump);
    const std::size_t loaded = fresh.load_cache(is, Variant::Pathological);
    CHECK(loaded > 0);
    CHECK(fresh.solve(spec).winner == Winner::Paul);
    std::ostringstream os2;
    fresh.solve(spec);
    s.reset_stats();

    std::istringstream bad("7 3 1,0,0,0,0,0,0,0 Paul\n");
    Solver reject;
    CHECK_THROWS_AS(reject.load_cache(bad, Variant::Pathological), shape_error);
}

TEST_CASE("stats are populated") {
    Solver s;
    GameSpec spec{Variant::Pathological, StateVector({4, 0}), 4};
    SolveOutcome out = s.solve(spec);
    CHECK(out.stats.visited > 0);
    CHECK(out.stats.questions_enumerated > 0);
}
