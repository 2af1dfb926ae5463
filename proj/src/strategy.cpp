#include "ulam/strategy.hpp"

#include <algorithm>
#include <climits>
#include <functional>
#include <sstream>
#include <unordered_map>

#include "ulam/closed_forms.hpp"

namespace ulam {

namespace {

std::uint64_t checked_nonneg(i128 v, const char* what) {
    if (v < 0)
        throw strategy_error(std::string(what) + " came out negative (" + to_string(v) + ")");
    return static_cast<std::uint64_t>(v);
}

// floor/ceil halves of a possibly negative integer
i128 floor_half(i128 v) { return v >= 0 ? v / 2 : -((-v + 1) / 2); }
i128 ceil_half(i128 v) { return v >= 0 ? (v + 1) / 2 : -((-v) / 2); }

StateVector minus(const StateVector& x, const StateVector& y) {
    std::vector<std::uint64_t> d(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (y[i] > x[i]) throw legality_error("shadow exceeds state");
        d[i] = x[i] - y[i];
    }
    return StateVector(std::move(d));
}

}  // namespace

QuestionVector floor_ceiling_question(const StateVector& x, unsigned /*rounds_remaining*/) {
    if (x.is_zero()) throw strategy_error("no floor-ceiling question for the zero state");
    std::vector<std::uint64_t> a(x.size());
    bool take_ceiling = true;  // least odd index takes the ceiling, then alternate
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] % 2 == 0) {
            a[i] = x[i] / 2;
        } else {
            a[i] = take_ceiling ? (x[i] + 1) / 2 : x[i] / 2;
            take_ceiling = !take_ceiling;
        }
    }
    return QuestionVector(std::move(a));
}

QuestionVector one_lie_move(std::uint64_t x0, std::uint64_t x1) {
    auto ch = character(x0, x1);
    if (!ch) throw strategy_error("no move from the zero state");
    const i128 q = *ch;
    if (x0 == 0) return QuestionVector({0, x1 / 2});
    if (x0 == 1) {
        i128 a1 = floor_half(static_cast<i128>(x1) + 1 - q);
        return QuestionVector({1, checked_nonneg(a1, "1-lie move a1")});
    }
    if (x0 % 2 == 0) return QuestionVector({x0 / 2, x1 / 2});
    i128 a1 = ceil_half(static_cast<i128>(x1) - q + 1);
    return QuestionVector({(x0 + 1) / 2, checked_nonneg(a1, "1-lie move a1")});
}

OpeningCase two_lie_opening(std::uint64_t n, unsigned q) {
    if (q < 19) throw std::domain_error("two-lie opening requires q >= 19");
    if (u128{n} < sphere_bound(q, 2))
        throw std::domain_error("two-lie opening requires n at or above the sphere bound");
    OpeningCase oc;
    oc.p = n / 4;
    oc.r = static_cast<unsigned>(n % 4);
    oc.l = (q - 2) / 4;
    oc.s = (q - 2) % 4;
    const i128 p = oc.p;
    const i128 l = oc.l;
    auto mk = [](i128 e0, i128 e1, i128 e2) {
        return QuestionVector({checked_nonneg(e0, "opening question entry"),
                               checked_nonneg(e1, "opening question entry"),
                               checked_nonneg(e2, "opening question entry")});
    };
    switch (oc.r) {
        case 0:
            oc.a = mk(2 * p, 0, 0);
            oc.b_yes = oc.b_no = mk(p, p, 0);
            break;
        case 1:
            oc.a = mk(2 * p + 1, 0, 0);
            oc.b_yes = mk(p + 1, p, 0);
            if ((q - 2) % 2 == 1)
                oc.b_no = mk(p, p + 1, 0);
            else
                oc.b_no = mk(p + 1, p - static_cast<i128>((q - 2) / 2) + 1, 0);
            break;
        case 2:
            oc.a = mk(2 * p + 1, 0, 0);
            switch (oc.s) {
                case 0: oc.b_yes = mk(p + 1, p - l + 1, 0); break;
                case 1: oc.b_yes = mk(p, p + l + 1, 0); break;
                case 2: oc.b_yes = mk(p, p + l + 1, 0); break;
                default: oc.b_yes = mk(p, p + l + 1, 0); break;
            }
            oc.b_no = oc.b_yes;
            break;
        default:  // r == 3
            oc.a = mk(2 * p + 2, 0, 0);
            oc.b_yes = mk(p + 1, p + 1, 0);
            switch (oc.s) {
                case 0: oc.b_no = mk(p, p + l + 1, 0); break;
                case 1: oc.b_no = mk(p, p + l + 1, 0); break;
                case 2: oc.b_no = mk(p + 1, p - l + 1, 0); break;
                default: oc.b_no = mk(p, p + l + 2, 0); break;
            }
            break;
    }
    return oc;
}

OpeningExpansion expand_two_lie_opening(const OpeningCase& opening, std::uint64_t n, unsigned q) {
    OpeningExpansion ex;
    const StateVector init({n, 0, 0});
    const u128 wq = weight(q, init);
    const StateVector after_yes = transition(init, opening.a, Response::Yes);
    const StateVector after_no = transition(init, opening.a, Response::No);
    bool first = true;
    auto visit = [&](const StateVector& s) {
        const i128 d = 4 * static_cast<i128>(weight(q - 2, s)) - static_cast<i128>(wq);
        const u128 pennies = s[2];
        if (first || d < ex.realized_delta) ex.realized_delta = d;
        if (first || pennies < ex.min_pennies) ex.min_pennies = pennies;
        first = false;
    };
    visit(transition(after_yes, opening.b_yes, Response::Yes));
    visit(transition(after_yes, opening.b_yes, Response::No));
    visit(transition(after_no, opening.b_no, Response::Yes));
    visit(transition(after_no, opening.b_no, Response::No));
    const TwoLieCorrection c = two_lie_correction(n, q);
    ex.expected_delta = -static_cast<i128>(c.A) * static_cast<i128>(binom(q - 1, 2)) -
                        static_cast<i128>(c.B) * static_cast<i128>(binom(q - 2, 1));
    ex.penny_floor =
        checked_add(checked_mul(q - 2, u128{q} - 2), binom_le(q - 2, 2));
    ex.delta_matches = ex.realized_delta == ex.expected_delta;
    ex.pennies_ok = ex.min_pennies >= ex.penny_floor;
    return ex;
}

std::pair<StateVector, StateVector> greedy_trim(const StateVector& x, unsigned j) {
    const u128 target = u128{1} << j;
    u128 wt = weight(j, x);
    if (wt < target) throw std::domain_error("greedy_trim: weight already below 2^j");
    const unsigned k = x.k();
    std::vector<std::uint64_t> kept = x.counts();
    std::vector<std::uint64_t> removed(k + 1, 0);
    u128 excess = wt - target;
    for (unsigned i = 0; i <= k && excess > 0; ++i) {
        const u128 w = binom_le(j, static_cast<long long>(k) - i);
        u128 take = excess / w;
        if (take > kept[i]) take = kept[i];
        kept[i] -= static_cast<std::uint64_t>(take);
        removed[i] += static_cast<std::uint64_t>(take);
        excess -= take * w;
    }
    if (excess != 0)
        throw strategy_error("greedy_trim: exact weight 2^" + std::to_string(j) +
                             " is unreachable from " + x.str());
    return {StateVector(std::move(kept)), StateVector(std::move(removed))};
}

QuestionVector fictitious_play_move(const StateVector& p, unsigned rounds_remaining) {
    if (p.k() != 2) throw shape_error("fictitious play needs a 2-lie state");
    if (rounds_remaining == 0) throw std::domain_error("fictitious play needs rounds left");
    const unsigned j = rounds_remaining - 1;
    if (weight(rounds_remaining, p) != (u128{1} << rounds_remaining))
        throw std::domain_error("fictitious play requires weight exactly 2^rounds from " +
                                p.str());
    const i128 p0 = p[0], p1 = p[1], p2 = p[2];
    i128 v0, v1;
    if (p0 % 2 == 1) {
        v0 = (p0 + 1) / 2;
        v1 = p1 / 2;
    } else {
        v0 = p0 / 2;
        v1 = (p1 + 1) / 2;
    }
    const i128 partial = (2 * v0 - p0) * static_cast<i128>(binom(j, 2)) +
                         (2 * v1 - p1) * static_cast<i128>(binom(j, 1));
    const i128 twice_v2 = p2 - partial;
    if (twice_v2 % 2 != 0)
        throw strategy_error("fictitious play: no integral penny split at state " + p.str());
    const i128 v2 = twice_v2 / 2;
    if (rounds_remaining >= 7 && (v2 < 0 || v2 > p2))
        throw strategy_error("fictitious play: penny question " + to_string(v2) +
                             " out of range at state " + p.str());
    return QuestionVector({static_cast<std::uint64_t>(v0), static_cast<std::uint64_t>(v1),
                           checked_nonneg(v2, "fictitious penny question")});
}

void Policy::advance(PolicyCursor& cursor, const QuestionVector& asked, Response response,
                     unsigned /*rounds_remaining_before*/) const {
    cursor.state = transition(cursor.state, asked, response);
    if (response == Response::Yes) {
        // Shadow coins sit on the complement side: all of them take a lie.
        std::vector<std::uint64_t> shifted(cursor.shadow.size(), 0);
        for (std::size_t i = 1; i < shifted.size(); ++i) shifted[i] = cursor.shadow[i - 1];
        cursor.shadow = StateVector(std::move(shifted));
    }
}

namespace {

class OneLiePolicy final : public Policy {
public:
    QuestionVector question(const PolicyCursor& cursor, unsigned) const override {
        const StateVector& x = cursor.state;
        if (x.is_zero()) return QuestionVector({0, 0});
        if (x[1] == 0) return QuestionVector({(x[0] + 1) / 2, 0});
        return one_lie_move(x[0], x[1]);
    }
};

class TwoLiePolicy final : public Policy {
public:
    TwoLiePolicy(std::uint64_t n, unsigned q)
        : q_(q),
          opening_(two_lie_opening(n, q)),
          after_yes_(transition(StateVector({n, 0, 0}), opening_.a, Response::Yes)),
          after_no_(transition(StateVector({n, 0, 0}), opening_.a, Response::No)) {}

    QuestionVector question(const PolicyCursor& cursor, unsigned j) const override {
        if (j == q_) return opening_.a;
        if (j + 1 == q_) {
            if (cursor.state == after_yes_) return opening_.b_yes;
            if (cursor.state == after_no_) return opening_.b_no;
            throw strategy_error("unexpected second-round state " + cursor.state.str());
        }
        const StateVector active = minus(cursor.state, cursor.shadow);
        if (j > 6) return fictitious_play_move(active, j);
        auto best = endgame_.best_question(active, j, Variant::Pathological);
        if (best) return *best;
        return QuestionVector({0, 0, 0});  // losing endgame position; reported by replay
    }

    void advance(PolicyCursor& cursor, const QuestionVector& asked, Response response,
                 unsigned rounds_remaining_before) const override {
        Policy::advance(cursor, asked, response, rounds_remaining_before);
        if (rounds_remaining_before + 1 == q_) {
            // Round two is answered: trim virtually to weight exactly 2^(q-2).
            auto [kept, removed] = greedy_trim(cursor.state, q_ - 2);
            (void)kept;
            cursor.shadow = removed;
        }
    }

private:
    unsigned q_;
    OpeningCase opening_;
    StateVector after_yes_;
    StateVector after_no_;
    mutable Solver endgame_;
};

}  // namespace

std::unique_ptr<Policy> one_lie_full_policy(std::uint64_t n, unsigned q) {
    if (!paul_wins_1lie_pathological(n, q))
        throw std::domain_error("no winning 1-lie policy: the 1-lie winning inequality fails for n=" +
                                std::to_string(n) + ", q=" + std::to_string(q));
    return std::make_unique<OneLiePolicy>();
}

std::unique_ptr<Policy> two_lie_full_policy(std::uint64_t n, unsigned q) {
    if (q < 25)
        throw std::domain_error(
            "the constructive 2-lie policy requires q >= 25; use the exact solver for smaller "
            "games");
    if (!paul_wins_2lie_pathological(n, q))
        throw std::domain_error("no winning 2-lie policy: the 2-lie winning inequality fails for n=" +
                                std::to_string(n) + ", q=" + std::to_string(q));
    return std::make_unique<TwoLiePolicy>(n, q);
}

namespace {

struct CursorKey {
    PolicyCursor cursor;
    unsigned j;
    bool operator==(const CursorKey&) const = default;
};

struct CursorKeyHash {
    std::size_t operator()(const CursorKey& k) const {
        StateVectorHash h;
        std::size_t a = h(k.cursor.state);
        std::size_t b = h(k.cursor.shadow);
        return a ^ (b * 0x9e3779b97f4a7c15ull) ^ (static_cast<std::size_t>(k.j) << 1);
    }
};

long long saturate(i128 v) {
    if (v > LLONG_MAX) return LLONG_MAX;
    if (v < LLONG_MIN) return LLONG_MIN;
    return static_cast<long long>(v);
}

}  // namespace

std::string VerificationReport::str() const {
    std::ostringstream os;
    os << "branches: " << branches << '\n';
    os << "wins: " << wins << '\n';
    os << "losses: " << (branches - wins) << '\n';
    os << "min_leaf_survivors: " << min_leaf_survivors << '\n';
    if (first_loss) os << "first_loss: " << *first_loss << '\n';
    for (std::size_t j = 0; j < min_weight_margin.size(); ++j)
        os << "min_margin[" << j << "]: " << min_weight_margin[j] << '\n';
    return os.str();
}

VerificationReport verify_policy(const GameSpec& spec, const Policy& policy) {
    if (spec.rounds > 28)
        throw budget_error("verify_policy supports at most 28 rounds (2^q branches)");
    const unsigned q = spec.rounds;
    VerificationReport report;
    report.branches = std::uint64_t{1} << q;
    report.min_leaf_survivors = UINT64_MAX;
    report.min_weight_margin.assign(q + 1, LLONG_MAX);

    std::unordered_map<CursorKey, std::uint64_t, CursorKeyHash> memo;

    std::function<std::uint64_t(const PolicyCursor&, unsigned)> wins_below =
        [&](const PolicyCursor& cursor, unsigned j) -> std::uint64_t {
        CursorKey key{cursor, j};
        if (auto it = memo.find(key); it != memo.end()) return it->second;
        const i128 margin =
            static_cast<i128>(weight(j, cursor.state)) - static_cast<i128>(u128{1} << j);
        report.min_weight_margin[j] =
            std::min(report.min_weight_margin[j], saturate(margin));
        std::uint64_t w;
        if (j == 0) {
            const std::uint64_t survivors = cursor.state.total();
            report.min_leaf_survivors = std::min(report.min_leaf_survivors, survivors);
            const bool win = spec.variant == Variant::Pathological ? survivors >= 1
                                                                   : survivors <= 1;
            w = win ? 1 : 0;
        } else {
            const QuestionVector a = policy.question(cursor, j);
            if (!is_legal(cursor.state, a))
                throw legality_error("policy emitted illegal question " + a.str() +
                                     " at state " + cursor.state.str() + ", round " +
                                     std::to_string(q - j + 1));
            for (std::size_t i = 0; i < a.size(); ++i)
                if (a[i] > cursor.state[i] - cursor.shadow[i])
                    throw legality_error("policy question " + a.str() +
                                         " touches shadow coins at state " +
                                         cursor.state.str() + ", round " +
                                         std::to_string(q - j + 1));
            PolicyCursor no_cursor = cursor;
            policy.advance(no_cursor, a, Response::No, j);
            PolicyCursor yes_cursor = cursor;
            policy.advance(yes_cursor, a, Response::Yes, j);
            w = wins_below(no_cursor, j - 1) + wins_below(yes_cursor, j - 1);
        }
        memo.emplace(std::move(key), w);
        return w;
    };

    PolicyCursor root{spec.initial, StateVector(std::vector<std::uint64_t>(spec.lies() + 1, 0))};
    report.wins = wins_below(root, q);

    if (report.wins < report.branches) {
        // Lexicographically least losing sequence, 'N' before 'Y'.
        std::string seq;
        PolicyCursor cursor = root;
        for (unsigned j = q; j > 0; --j) {
            const QuestionVector a = policy.question(cursor, j);
            PolicyCursor no_cursor = cursor;
            policy.advance(no_cursor, a, Response::No, j);
            PolicyCursor yes_cursor = cursor;
            policy.advance(yes_cursor, a, Response::Yes, j);
            const std::uint64_t full = std::uint64_t{1} << (j - 1);
            if (memo.at(CursorKey{no_cursor, j - 1}) < full) {
                seq += 'N';
                cursor = no_cursor;
            } else {
                seq += 'Y';
                cursor = yes_cursor;
            }
        }
        report.first_loss = seq;
    }
    return report;
}

std::string FictitiousTrace::str() const {
    std::ostringstream os;
    os << "initial: " << initial.str() << '\n';
    os << "rounds: " << q << '\n';
    os << "exhaustive: " << (exhaustive ? "yes" : "no") << '\n';
    os << "branches: " << branches_covered << '\n';
    os << "final_states:";
    for (const auto& s : final_states)
        os << " (" << s[0] << ',' << s[1] << ',' << s[2] << ')';
    os << '\n';
    return os.str();
}

FictitiousTrace fictitious_simulation(const StateVector& x, unsigned q,
                                      std::size_t state_budget) {
    if (x.k() != 2) throw shape_error("fictitious simulation needs a 2-lie state");
    if (q < 23) throw std::domain_error("fictitious simulation requires q >= 23");
    if (weight(q, x) != (u128{1} << q))
        throw std::domain_error("fictitious simulation requires weight exactly 2^q");
    if (u128{x[2]} < checked_mul(q, u128{q}))
        throw std::domain_error("fictitious simulation requires at least q^2 pennies");

    FictitiousTrace trace;
    trace.q = q;
    trace.initial = x;
    trace.branches_covered = std::uint64_t{1} << (q - 6);

    static const std::vector<FicState> kAllowedAtSix = {
        {1, 3, 21}, {1, 2, 28}, {1, 1, 35}, {1, 0, 42}, {0, 8, 8},  {0, 7, 15}, {0, 6, 22},
        {0, 5, 29}, {0, 4, 36}, {0, 3, 43}, {0, 2, 50}, {0, 1, 57}, {0, 0, 64}};
    static const std::vector<FicState> kExcludedAtSix = {{1, 5, 7}, {1, 4, 14}};

    auto fail = [&](unsigned j, const FicState& s, const std::string& what) {
        std::ostringstream os;
        os << "fictitious play violation at j=" << j << ", state (" << s[0] << ',' << s[1]
           << ',' << s[2] << "): " << what << "\n" << trace.str();
        throw strategy_error(os.str());
    };

    std::vector<FicState> level = {{static_cast<std::int64_t>(x[0]),
                                    static_cast<std::int64_t>(x[1]),
                                    static_cast<std::int64_t>(x[2])}};
    for (unsigned j = q;; --j) {
        const i128 denom = i128{1} << (q - j);
        const unsigned back = q - j;
        const i128 pp0_num = x[0];
        const i128 pp1_num = static_cast<i128>(x[1]) + static_cast<i128>(x[0]) * back;
        const i128 pp2_num = static_cast<i128>(x[2]) + static_cast<i128>(x[1]) * back +
                             static_cast<i128>(x[0]) * static_cast<i128>(binom(back, 2));
        FictitiousLevel record;
        record.j = j;
        record.states = level;
        for (const FicState& s : level) {
            // exact halving, nonnegativity, legality, and deviation bounds
            const i128 wt = static_cast<i128>(binom_le(j, 2)) * s[0] +
                            static_cast<i128>(binom_le(j, 1)) * s[1] + s[2];
            if (wt != (i128{1} << j)) fail(j, s, "weight is not exactly 2^j");
            if (s[0] < 0 || s[1] < 0) fail(j, s, "negative non-penny coordinate");
            if (s[2] <= 1) fail(j, s, "pennies not > 1");
            const i128 e0 = pp0_num >= s[0] * denom ? pp0_num - s[0] * denom
                                                    : s[0] * denom - pp0_num;
            const i128 e1 = pp1_num >= s[1] * denom ? pp1_num - s[1] * denom
                                                    : s[1] * denom - pp1_num;
            const i128 e2 = pp2_num >= s[2] * denom ? pp2_num - s[2] * denom
                                                    : s[2] * denom - pp2_num;
            const i128 pp01 = pp0_num + pp1_num;
            const i128 f01 = (s[0] + s[1]) * denom;
            const i128 e01 = pp01 >= f01 ? pp01 - f01 : f01 - pp01;
            record.max_e0_num = std::max(record.max_e0_num, e0);
            record.max_e1_num = std::max(record.max_e1_num, e1);
            record.max_e2_num = std::max(record.max_e2_num, e2);
            record.max_e01_num = std::max(record.max_e01_num, e01);
            if (e0 > denom) fail(j, s, "deviation e0 exceeds 1");
            if (e1 > 3 * denom) fail(j, s, "deviation e1 exceeds 3");
            // e2 halves and picks up at most (C(j,2) + 4)/2 per level, so the
            // invariant that closes under e2(j) <= e2(j+1)/2 + C(j,2)/2 + 2 is
            // C(j,2) + j + 5, not the tighter C(j,2) + 5 (which is violated,
            // e.g. at j=18 reachable from an admissible q=23 start).
            if (e2 > (static_cast<i128>(binom(j, 2)) + j + 5) * denom)
                fail(j, s, "deviation e2 exceeds C(j,2)+j+5");
            if (e01 >= 2 * denom) fail(j, s, "deviation e01 not below 2");
        }
        trace.levels.push_back(std::move(record));
        if (j == 6) break;

        std::vector<FicState> next;
        next.reserve(level.size() * 2);
        for (const FicState& s : level) {
            i128 v0, v1;
            if (s[0] % 2 == 1) {
                v0 = (s[0] + 1) / 2;
                v1 = s[1] / 2;
            } else {
                v0 = s[0] / 2;
                v1 = (s[1] + 1) / 2;
            }
            const i128 partial = (2 * v0 - s[0]) * static_cast<i128>(binom(j - 1, 2)) +
                                 (2 * v1 - s[1]) * static_cast<i128>(binom(j - 1, 1));
            const i128 twice_v2 = s[2] - partial;
            if (twice_v2 % 2 != 0) fail(j, s, "no integral penny split");
            const i128 v2 = twice_v2 / 2;
            next.push_back({static_cast<std::int64_t>(v0),
                            static_cast<std::int64_t>(v1 + s[0] - v0),
                            static_cast<std::int64_t>(v2 + s[1] - v1)});
            next.push_back({static_cast<std::int64_t>(s[0] - v0),
                            static_cast<std::int64_t>(s[1] - v1 + v0),
                            static_cast<std::int64_t>(s[2] - v2 + v1)});
        }
        std::sort(next.begin(), next.end());
        next.erase(std::unique(next.begin(), next.end()), next.end());
        if (next.size() > state_budget) {
            next.resize(state_budget);
            trace.exhaustive = false;
            trace.branches_covered = 0;
        }
        level = std::move(next);
    }

    trace.final_states = trace.levels.back().states;
    for (const FicState& s : trace.final_states) {
        if (s[0] > 1) fail(6, s, "claim 1 fails: fic_0(6) > 1");
        for (const auto& bad : kExcludedAtSix)
            if (s == bad) fail(6, s, "claim 3 fails: excluded state reached");
        if (std::find(kAllowedAtSix.begin(), kAllowedAtSix.end(), s) == kAllowedAtSix.end())
            fail(6, s, "state outside the allowed j=6 list");
    }
    return trace;
}

}  // namespace ulam
