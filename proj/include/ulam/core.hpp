// Core value types and arithmetic for the liar-game engine: state and
// question vectors, transitions, Berlekamp weights, imbalance, character,
// sphere bound, and the covering/majorization orders.

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ulam {

using u128 = unsigned __int128;
using i128 = __int128;

// Weight arithmetic is capped at 128 bits; q is capped so 2^q always fits.
inline constexpr unsigned kMaxRounds = 100;

struct capacity_error : std::overflow_error {
    using std::overflow_error::overflow_error;
};

struct legality_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct shape_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct budget_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

u128 checked_add(u128 a, u128 b);
u128 checked_mul(u128 a, u128 b);
std::string to_string(u128 v);
std::string to_string(i128 v);

enum class Response : std::uint8_t { Yes, No };

inline Response complement(Response r) {
    return r == Response::Yes ? Response::No : Response::Yes;
}

enum class Variant : std::uint8_t { Pathological, Original };

enum class Winner : std::uint8_t { Paul, Carole };

std::string to_string(Variant v);
std::string to_string(Winner w);

// Counts (x_0,...,x_k) of surviving elements carrying i lies. Elements past
// k lies are dropped and never represented.
class StateVector {
public:
    explicit StateVector(std::vector<std::uint64_t> counts);

    unsigned k() const { return static_cast<unsigned>(counts_.size()) - 1; }
    std::size_t size() const { return counts_.size(); }
    std::uint64_t operator[](std::size_t i) const { return counts_[i]; }
    const std::vector<std::uint64_t>& counts() const { return counts_; }
    std::uint64_t total() const;
    bool is_zero() const;

    // Comma-separated decimal integers, no spaces: "3,1".
    std::string str() const;
    static StateVector parse(const std::string& text);

    bool operator==(const StateVector& o) const = default;

private:
    std::vector<std::uint64_t> counts_;
};

// Paul's split (a_0,...,a_k); legality relative to a state is checked by the
// operations that consume it, not at construction.
class QuestionVector {
public:
    explicit QuestionVector(std::vector<std::uint64_t> entries);

    std::size_t size() const { return entries_.size(); }
    std::uint64_t operator[](std::size_t i) const { return entries_[i]; }
    const std::vector<std::uint64_t>& entries() const { return entries_; }

    std::string str() const;
    static QuestionVector parse(const std::string& text);

    bool operator==(const QuestionVector& o) const = default;

private:
    std::vector<std::uint64_t> entries_;
};

bool is_legal(const StateVector& x, const QuestionVector& a);

struct GameSpec {
    Variant variant;
    StateVector initial;
    unsigned rounds;  // q

    unsigned lies() const { return initial.k(); }
};

// Sum_{j=0}^{m} C(q,j). Zero for m < 0, 2^q for m >= q. Exact.
u128 binom_le(unsigned q, long long m);

// C(m, j) with the convention C(m, j) = 0 when m < j.
u128 binom(long long m, unsigned j);

// Berlekamp q-weight: sum_i x_i * binom_le(q, k-i).
u128 weight(unsigned q, const StateVector& x);

// The successor state for Carole's response. Yes pushes the complement of
// the question right one lie class; No pushes the question itself.
StateVector transition(const StateVector& x, const QuestionVector& a, Response r);

// wt_j(Y(x,a)) - wt_j(N(x,a)), evaluated as the difference of weights.
i128 imbalance(unsigned j, const StateVector& x, const QuestionVector& a);

// Same quantity via the closed form sum_i (2a_i - x_i) * C(j, k-i).
i128 imbalance_closed_form(unsigned j, const StateVector& x, const QuestionVector& a);

// ceil(2^q / binom_le(q, k)).
u128 sphere_bound(unsigned q, unsigned k);

// Largest q with (q+1)x0 + x1 >= 2^q, for 1-lie states. Empty for (0,0).
std::optional<unsigned> character(std::uint64_t x0, std::uint64_t x1);

// y_i <= x_i for all i.
bool covers(const StateVector& x, const StateVector& y);

// All prefix sums of y bounded by those of x.
bool majorizes(const StateVector& x, const StateVector& y);

struct StateVectorHash {
    std::size_t operator()(const StateVector& s) const;
};

}  // namespace ulam
