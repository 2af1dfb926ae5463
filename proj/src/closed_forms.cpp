#include "ulam/closed_forms.hpp"

namespace ulam {

TwoLieCorrection two_lie_correction(std::uint64_t n, unsigned q) {
    TwoLieCorrection c{};
    c.A = static_cast<unsigned>(n % 2);
    const u128 q3 = checked_mul(checked_mul(q, u128{q}), q);
    switch (n % 4) {
        case 0: c.B = 0; break;
        case 1: c.B = 2 * (q % 2); break;
        case 2: c.B = static_cast<unsigned>((5 - q3 % 4) % 4); break;  // (1 - q^3) mod 4
        default: c.B = static_cast<unsigned>((1 + q3 % 4) % 4); break; // (1 + q^3) mod 4
    }
    return c;
}

bool paul_wins_1lie_pathological(std::uint64_t n, unsigned q) {
    if (q > kMaxRounds) throw capacity_error("rounds exceed supported cap");
    const u128 pow2 = u128{1} << q;
    const u128 lin = checked_mul(n, u128{q} + 1);
    if (n % 2 == 0) return pow2 <= lin;
    // n odd: 2^q <= n(q+1) - (q-1); at q = 0 the correction is -(-1) = +1.
    i128 rhs = static_cast<i128>(lin) - (static_cast<i128>(q) - 1);
    return static_cast<i128>(pow2) <= rhs;
}

bool paul_wins_1lie_original(std::uint64_t n, unsigned q) {
    if (q > kMaxRounds) throw capacity_error("rounds exceed supported cap");
    const u128 pow2 = u128{1} << q;
    const u128 lin = checked_mul(n, u128{q} + 1);
    if (n % 2 == 0) return pow2 >= lin;
    // For odd n the parity penalty works against Paul here, so the odd-case
    // correction enters with the opposite sign to the pathological game.
    // Cross-checked against the DP oracle for every q <= 12.
    i128 rhs = static_cast<i128>(lin) + (static_cast<i128>(q) - 1);
    return static_cast<i128>(pow2) >= rhs;
}

bool paul_wins_2lie_pathological(std::uint64_t n, unsigned q) {
    if (q > kMaxRounds) throw capacity_error("rounds exceed supported cap");
    const TwoLieCorrection c = two_lie_correction(n, q);
    const u128 pow2 = u128{1} << q;
    i128 rhs = static_cast<i128>(checked_mul(n, binom_le(q, 2)));
    rhs -= static_cast<i128>(c.A) * static_cast<i128>(binom(static_cast<long long>(q) - 1, 2));
    rhs -= static_cast<i128>(c.B) * static_cast<i128>(binom(static_cast<long long>(q) - 2, 1));
    return static_cast<i128>(pow2) <= rhs;
}

std::uint64_t f_star_1(unsigned q) {
    // The predicate is monotone in n (an odd win implies the even successor
    // wins and vice versa), so scan up from just below the sphere bound.
    u128 start = sphere_bound(q, 1);
    std::uint64_t n = start > 2 ? static_cast<std::uint64_t>(start - 2) : 1;
    while (!paul_wins_1lie_pathological(n, q)) ++n;
    return n;
}

std::uint64_t f_star_1_corollary(unsigned q) {
    const u128 pow2 = u128{1} << q;
    const std::uint64_t sb = static_cast<std::uint64_t>(sphere_bound(q, 1));
    const std::uint64_t rem = static_cast<std::uint64_t>(pow2 % (q + 1));
    if (sb % 2 == 1 && (rem == 1 || rem == 2)) return sb;
    return 2 * ((sb + 1) / 2);
}

std::uint64_t f_star_2(unsigned q) {
    std::uint64_t n = static_cast<std::uint64_t>(sphere_bound(q, 2));
    while (!paul_wins_2lie_pathological(n, q)) ++n;
    return n;
}

}  // namespace ulam
