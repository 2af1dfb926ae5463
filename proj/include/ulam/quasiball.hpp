// Adaptive Hamming balls (quasiballs), coverings/packings of the hypercube,
// the strategy <-> covering equivalence in both directions, validators, and
// the certificate file format.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "ulam/core.hpp"
#include "ulam/solver.hpp"

namespace ulam {

// Default RNG seed for sampled validation; fixed for reproducibility.
inline constexpr std::uint64_t kDefaultSeed = 20090711ull;

// Strictly increasing 1-indexed round positions at which lies occur.
using LieSet = std::vector<unsigned>;

// Orders lie sets by (size, lexicographic positions); this is also the
// certificate line order.
struct SubsetOrder {
    bool operator()(const LieSet& a, const LieSet& b) const {
        if (a.size() != b.size()) return a.size() < b.size();
        return a < b;
    }
};

std::string lie_set_str(const LieSet& s);     // "-" for the empty set
LieSet parse_lie_set(const std::string& text);

// The image of an injective f : C([q], <= radius) -> Q_q such that whenever
// A is a sorted-order prefix of B, f(A) and f(B) agree strictly before the
// first added position and differ at it. Vertices are length-q Y/N strings.
struct Quasiball {
    unsigned q = 0;
    unsigned radius = 0;
    std::map<LieSet, std::string, SubsetOrder> assignment;

    const std::string& stem() const { return assignment.at(LieSet{}); }
};

enum class CoverMode : std::uint8_t { Covering, Packing };

std::string to_string(CoverMode m);

// x_i balls of radius k-i; union must be Q_q (covering) or the images must
// be pairwise disjoint (packing).
struct QuasiballCollection {
    unsigned q = 0;
    unsigned k = 0;
    CoverMode mode = CoverMode::Covering;
    StateVector profile{std::vector<std::uint64_t>{0}};
    std::vector<Quasiball> balls;
};

struct BallCheck {
    bool ok = false;
    std::string message;
    std::string note;  // sampling assumption, when random pairs were used
};

// Exhaustive adjacent-prefix-pair checking plus 10*binom_le(q, radius)
// random non-adjacent prefix pairs (larger gaps follow by transitivity
// through intermediate sets; the sampling guards that reading).
BallCheck validate_quasiball(const Quasiball& ball, std::uint64_t seed = kDefaultSeed);

struct CollectionCheck {
    bool ok = false;
    std::string message;
    std::string note;
    std::uint64_t slots = 0;     // sum of ball sizes
    std::uint64_t covered = 0;   // distinct vertices hit
    std::uint64_t overlaps = 0;  // slots - covered
};

// Validates every ball (in parallel), the radius profile, and the mode
// condition over a 2^q occupancy table (q <= 28). Witnesses are
// lexicographically least with N < Y.
CollectionCheck validate_collection(const QuasiballCollection& coll,
                                    std::uint64_t seed = kDefaultSeed, unsigned threads = 1);

// Expands the initial state to labeled elements (questions take the lowest
// labels within each lie class), replays the tree, and emits one quasiball
// per element from its response vertices. Mode follows the variant. Throws
// std::domain_error naming a violating leaf if the tree is not winning.
QuasiballCollection strategy_to_covering(const DecisionTree& tree, const GameSpec& spec);

// Rebuilds the depth-q decision tree: an element joins the question iff its
// residual stem's current bit is Y; balls restrict/descend per response.
// Throws std::domain_error if the collection does not validate.
DecisionTree covering_to_strategy(const QuasiballCollection& coll, Variant variant);

// The radius-i Hamming ball around a center, realized by pure
// complementation: f(A) flips the center exactly at the positions of A.
Quasiball hamming_ball(const std::string& center, unsigned radius);

// Restriction to sets of size <= radius-1; drops one radius level.
Quasiball restrict_ball(const Quasiball& ball);

// Line-oriented certificate format; parse/serialize round-trip
// byte-identically.
std::string serialize_collection(const QuasiballCollection& coll);
QuasiballCollection parse_collection(std::istream& is);

}  // namespace ulam
