#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ulam/core.hpp"

using namespace ulam;

namespace {

StateVector random_state(std::mt19937_64& rng, unsigned k, std::uint64_t max_count) {
    std::vector<std::uint64_t> c(k + 1);
    for (auto& v : c) v = rng() % (max_count + 1);
    return StateVector(std::move(c));
}

QuestionVector random_question(std::mt19937_64& rng, const StateVector& x) {
    std::vector<std::uint64_t> a(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) a[i] = x[i] == 0 ? 0 : rng() % (x[i] + 1);
    return QuestionVector(std::move(a));
}

}  // namespace

TEST_CASE("binomial helpers") {
    CHECK(binom_le(4, 2) == 11);
    CHECK(binom_le(4, 0) == 1);
    CHECK(binom_le(4, -1) == 0);
    CHECK(binom_le(4, 7) == 16);
    CHECK(binom_le(0, 0) == 1);
    CHECK(binom(5, 2) == 10);
    CHECK(binom(1, 2) == 0);
    CHECK(binom(-1, 2) == 0);
    CHECK(binom(7, 0) == 1);
    // row sums: binom_le(q, m) - binom_le(q, m-1) = C(q, m)
    for (unsigned q = 0; q <= 40; ++q)
        for (long long m = 0; m <= q; ++m)
            CHECK(binom_le(q, m) - binom_le(q, m - 1) == binom(q, static_cast<unsigned>(m)));
}

TEST_CASE("state and question parsing round-trips") {
    StateVector x = StateVector::parse("3,1");
    CHECK(x.k() == 1);
    CHECK(x[0] == 3);
    CHECK(x.total() == 4);
    CHECK(x.str() == "3,1");
    CHECK(StateVector::parse("0").is_zero());
    CHECK_THROWS_AS(StateVector::parse(""), shape_error);
    CHECK_THROWS_AS(StateVector::parse("3,,1"), shape_error);
    CHECK_THROWS_AS(StateVector::parse("3,x"), shape_error);
    QuestionVector a = QuestionVector::parse("2,0,1");
    CHECK(a.str() == "2,0,1");
}

TEST_CASE("weight basics") {
    // wt_q((n,0)) = n*(q+1) + 0
    CHECK(weight(4, StateVector({3, 1})) == 3 * 5 + 1);
    // Example state: wt_4(3,1) = 16
    CHECK(weight(4, StateVector({3, 1})) == 16);
    CHECK(weight(0, StateVector({2, 5})) == 7);
    CHECK(weight(10, StateVector({0, 0, 0})) == 0);
}

TEST_CASE("transitions follow the push rules") {
    StateVector x({3, 1});
    QuestionVector a({2, 0});
    StateVector y = transition(x, a, Response::Yes);
    CHECK(y == StateVector({2, 1}));
    StateVector n = transition(x, a, Response::No);
    CHECK(n == StateVector({1, 3}));
    CHECK_THROWS_AS(transition(x, QuestionVector({4, 0}), Response::Yes), legality_error);
    CHECK_THROWS_AS(transition(x, QuestionVector({1, 0, 0}), Response::Yes), legality_error);
    CHECK(is_legal(x, a));
    CHECK_FALSE(is_legal(x, QuestionVector({0, 2})));
}

TEST_CASE("conservation of weight under transitions") {
    std::mt19937_64 rng(20090711);
    for (int trial = 0; trial < 10000; ++trial) {
        const unsigned k = rng() % 5;
        const unsigned q = 1 + rng() % 30;
        StateVector x = random_state(rng, k, 50);
        QuestionVector a = random_question(rng, x);
        const u128 wt = weight(q, x);
        const u128 wy = weight(q - 1, transition(x, a, Response::Yes));
        const u128 wn = weight(q - 1, transition(x, a, Response::No));
        REQUIRE(wt == wy + wn);
    }
}

TEST_CASE("imbalance: weight route equals the closed form") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 10000; ++trial) {
        const unsigned k = rng() % 5;
        const unsigned j = rng() % 30;
        StateVector x = random_state(rng, k, 40);
        QuestionVector a = random_question(rng, x);
        REQUIRE(imbalance(j, x, a) == imbalance_closed_form(j, x, a));
    }
}

TEST_CASE("imbalance anti-symmetry under complementation") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 2000; ++trial) {
        const unsigned k = rng() % 4;
        const unsigned j = rng() % 20;
        StateVector x = random_state(rng, k, 30);
        QuestionVector a = random_question(rng, x);
        std::vector<std::uint64_t> comp(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) comp[i] = x[i] - a[i];
        CHECK(imbalance(j, x, a) == -imbalance(j, x, QuestionVector(comp)));
    }
}

TEST_CASE("count bookkeeping: totals never grow") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 2000; ++trial) {
        const unsigned k = rng() % 4;
        StateVector x = random_state(rng, k, 30);
        QuestionVector a = random_question(rng, x);
        for (Response r : {Response::Yes, Response::No}) {
            StateVector next = transition(x, a, r);
            CHECK(next.total() <= x.total());
            // Yes drops exactly the complement's class-k coins; No drops a_k.
            const std::uint64_t dropped =
                r == Response::Yes ? x[x.k()] - a[x.k()] : a[x.k()];
            CHECK(next.total() == x.total() - dropped);
        }
    }
}

TEST_CASE("sphere bound values") {
    CHECK(sphere_bound(4, 1) == 4);   // ceil(16/5)
    CHECK(sphere_bound(4, 2) == 2);   // ceil(16/11)
    CHECK(sphere_bound(0, 0) == 1);
    CHECK(sphere_bound(25, 2) == 102928);
    CHECK_THROWS_AS(sphere_bound(101, 1), capacity_error);
}

TEST_CASE("character of 1-lie states") {
    CHECK_FALSE(character(0, 0).has_value());
    // ch is the largest q with (q+1)x0 + x1 >= 2^q
    CHECK(character(1, 0) == 1);      // 2*1 >= 2, 3*1 < 4
    CHECK(character(2, 0) == 3);      // 4*2 = 8 >= 8, 5*2 = 10 < 16
    CHECK(character(0, 1) == 0);
    CHECK(character(4, 0) == 4);      // 5*4 = 20 >= 16, 6*4 = 24 < 32
    CHECK(character(0, 5) == 2);      // 5 >= 4, 5 < 8
    CHECK(character(1, 11) == 4);     // 5 + 11 = 16 >= 16, 6 + 11 < 32
}

TEST_CASE("character corrections against the inequality") {
    // direct recomputation against the defining inequality
    auto brute = [](std::uint64_t x0, std::uint64_t x1) -> std::optional<unsigned> {
        std::optional<unsigned> best;
        for (unsigned q = 0; q <= 70; ++q) {
            u128 lhs = u128{q + 1} * x0 + x1;
            if (lhs >= (u128{1} << q)) best = q;
        }
        return best;
    };
    CHECK(character(2, 0) == brute(2, 0));
    CHECK(character(1, 11) == brute(1, 11));
    std::mt19937_64 rng(17);
    for (int t = 0; t < 500; ++t) {
        std::uint64_t x0 = rng() % 1000, x1 = rng() % 1000;
        if (x0 == 0 && x1 == 0) continue;
        CHECK(character(x0, x1) == brute(x0, x1));
    }
}

TEST_CASE("character is monotone in each coordinate") {
    std::mt19937_64 rng(19);
    for (int t = 0; t < 1000; ++t) {
        std::uint64_t x0 = rng() % 500, x1 = rng() % 500;
        if (x0 == 0 && x1 == 0) x0 = 1;
        auto base = character(x0, x1);
        REQUIRE(base.has_value());
        CHECK(character(x0 + 1, x1).value() >= *base);
        CHECK(character(x0, x1 + 1).value() >= *base);
    }
}

TEST_CASE("covers and majorizes") {
    StateVector x({3, 1}), y({2, 2});
    CHECK(majorizes(x, y));
    CHECK_FALSE(covers(x, y));
    CHECK(covers(x, StateVector({3, 0})));
    CHECK(covers(x, x));
    CHECK(majorizes(x, x));
    // covers implies majorizes
    std::mt19937_64 rng(23);
    for (int t = 0; t < 1000; ++t) {
        const unsigned k = rng() % 4;
        StateVector a = random_state(rng, k, 20);
        std::vector<std::uint64_t> sub(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) sub[i] = a[i] ? rng() % (a[i] + 1) : 0;
        StateVector b(sub);
        CHECK(covers(a, b));
        CHECK(majorizes(a, b));
    }
}

TEST_CASE("128-bit arithmetic guards") {
    const u128 big = ~u128{0};
    CHECK_THROWS_AS(checked_add(big, 1), capacity_error);
    CHECK_THROWS_AS(checked_mul(big, 2), capacity_error);
    CHECK(checked_mul(big, 1) == big);
    CHECK(to_string(u128{0}) == "0");
    CHECK(to_string(i128{-5}) == "-5");
    CHECK(to_string((u128{1} << 100)) == "1267650600228229401496703205376");
}
