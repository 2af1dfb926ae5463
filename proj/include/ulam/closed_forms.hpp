// Exact win characterizations and threshold formulas for the 1-lie and
// 2-lie pathological games, plus the reversed-inequality original-game
// 1-lie characterization.

#pragma once

#include <cstdint>

#include "ulam/core.hpp"

namespace ulam {

// Parity corrections for the 2-lie win inequality: A = n mod 2, B keyed by
// n mod 4 (least nonnegative residues throughout).
struct TwoLieCorrection {
    unsigned A;  // 0 or 1
    unsigned B;  // in {0,1,2,3}

    bool operator==(const TwoLieCorrection&) const = default;
};

TwoLieCorrection two_lie_correction(std::uint64_t n, unsigned q);

// 2^q <= n(q+1) for n even, 2^q <= n(q+1)-(q-1) for n odd.
bool paul_wins_1lie_pathological(std::uint64_t n, unsigned q);

// The same inequality reversed, valid for q >= 1; q = 0 reduces to the
// bare win condition (at most one element may remain).
bool paul_wins_1lie_original(std::uint64_t n, unsigned q);

// 2^q <= n*binom_le(q,2) - A*C(q-1,2) - B*C(q-2,1).
bool paul_wins_2lie_pathological(std::uint64_t n, unsigned q);

// Minimum n winning the 1-lie pathological game, from the inequality above.
std::uint64_t f_star_1(unsigned q);

// The branch formula on top of the sphere bound SB*_1 = ceil(2^q/(q+1)).
// Disagrees with f_star_1 at q = 1; kept as a cross-check, not ground truth.
std::uint64_t f_star_1_corollary(unsigned q);

// Minimum n winning the 2-lie pathological game; linear scan upward from
// the sphere bound.
std::uint64_t f_star_2(unsigned q);

}  // namespace ulam
