// Constructive strategies as move-generating policies: floor-ceiling
// openings, the 1-lie and 2-lie full-game policies, greedy coin trimming,
// fictitious play, and an exhaustive policy verifier.

#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ulam/core.hpp"
#include "ulam/solver.hpp"

namespace ulam {

struct strategy_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Near-halving question: even coordinates split exactly; odd coordinates, in
// increasing index order, alternate ceiling/floor starting with a ceiling at
// the least odd index. |imbalance| stays within C(j, k).
QuestionVector floor_ceiling_question(const StateVector& x, unsigned rounds_remaining);

// The 1-lie per-state question rule (x0 <= 1 and x0 >= 2 cases), evaluated
// at q = character(x0, x1).
QuestionVector one_lie_move(std::uint64_t x0, std::uint64_t x1);

// The prescribed first two questions of the 2-lie game, keyed on n mod 4
// and (q-2) mod 4.
struct OpeningCase {
    std::uint64_t p = 0;  // n = 4p + r
    unsigned r = 0;
    std::uint64_t l = 0;  // q - 2 = 4l + s
    unsigned s = 0;
    QuestionVector a{std::vector<std::uint64_t>{0}};
    QuestionVector b_yes{std::vector<std::uint64_t>{0}};
    QuestionVector b_no{std::vector<std::uint64_t>{0}};
};

OpeningCase two_lie_opening(std::uint64_t n, unsigned q);

// Exhaustive two-round expansion of an opening: realized worst-case weight
// deficit and minimum penny count across the four response branches.
struct OpeningExpansion {
    i128 realized_delta = 0;     // min over branches of 4*wt_{q-2} - wt_q
    i128 expected_delta = 0;     // -A*C(q-1,2) - B*C(q-2,1)
    u128 min_pennies = 0;
    u128 penny_floor = 0;        // (q-2)^2 + binom_le(q-2, 2)
    bool delta_matches = false;
    bool pennies_ok = false;
};

OpeningExpansion expand_two_lie_opening(const OpeningCase& opening, std::uint64_t n, unsigned q);

// Removes coins highest-weight-first, skipping any whose removal would drop
// the j-weight below 2^j, until the weight is exactly 2^j.
std::pair<StateVector, StateVector> greedy_trim(const StateVector& x, unsigned j);

// The k=2 endgame question: v0, v1 split by the parity of p0, v2 chosen to
// zero the imbalance exactly. Requires weight(rounds_remaining, p) to equal
// 2^rounds_remaining.
QuestionVector fictitious_play_move(const StateVector& p, unsigned rounds_remaining);

// Replay cursor: the full game state plus the shadow ledger of coins the
// policy ignores (trimmed coins always sit on the complement side).
struct PolicyCursor {
    StateVector state;
    StateVector shadow;

    bool operator==(const PolicyCursor&) const = default;
};

class Policy {
public:
    virtual ~Policy() = default;

    virtual QuestionVector question(const PolicyCursor& cursor,
                                    unsigned rounds_remaining) const = 0;

    // Advances the cursor by Carole's response. Shadow coins are never in
    // the question, so they take a lie exactly on a Yes response.
    virtual void advance(PolicyCursor& cursor, const QuestionVector& asked, Response response,
                         unsigned rounds_remaining_before) const;
};

// 1-lie constructive policy: opening split (ceil(n/2), 0), then per-state moves.
std::unique_ptr<Policy> one_lie_full_policy(std::uint64_t n, unsigned q);

// 2-lie constructive policy: two opening rounds, virtual greedy trim, fictitious
// play down to 6 remaining rounds, exact-solver endgame. Requires q >= 25;
// use the exact solver for smaller games.
std::unique_ptr<Policy> two_lie_full_policy(std::uint64_t n, unsigned q);

struct VerificationReport {
    std::uint64_t branches = 0;
    std::uint64_t wins = 0;
    std::optional<std::string> first_loss;  // lexicographically least, 'N' < 'Y'
    std::uint64_t min_leaf_survivors = 0;
    // Index j = rounds remaining; minimum of wt_j(state) - 2^j, saturated.
    std::vector<long long> min_weight_margin;

    bool all_win() const { return wins == branches; }
    std::string str() const;
};

// Replays the policy against every Carole response sequence (2^q branches,
// deduplicated through shared positions).
VerificationReport verify_policy(const GameSpec& spec, const Policy& policy);

// One level of a fictitious-play expansion; pennies may formally go
// negative, so entries are signed.
using FicState = std::array<std::int64_t, 3>;

struct FictitiousLevel {
    unsigned j = 0;
    std::vector<FicState> states;  // distinct, sorted
    // Largest deviations from perfect play at this level, as exact
    // numerators over the common denominator 2^(q-j).
    i128 max_e0_num = 0;
    i128 max_e1_num = 0;
    i128 max_e2_num = 0;
    i128 max_e01_num = 0;
};

struct FictitiousTrace {
    unsigned q = 0;
    StateVector initial{std::vector<std::uint64_t>{0}};
    bool exhaustive = true;
    std::uint64_t branches_covered = 0;
    std::vector<FictitiousLevel> levels;  // j = q down to 6
    std::vector<FicState> final_states;   // distinct states at j = 6

    std::string str() const;
};

// Runs fictitious play against all Carole sequences down to j = 6 and
// asserts the endgame claims (weight halving, nonnegative pennies, the
// allowed j=6 state list, and the deviation bounds). Throws strategy_error
// with a detailed message on any violation.
FictitiousTrace fictitious_simulation(const StateVector& x, unsigned q,
                                      std::size_t state_budget = 1u << 20);

}  // namespace ulam
