#include "ulam/solver.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

namespace ulam {

namespace {

bool leaf_win(const StateVector& x, Variant v) {
    return v == Variant::Pathological ? x.total() >= 1 : x.total() <= 1;
}

TreeCheck tree_fail(std::string msg) { return TreeCheck{false, std::move(msg)}; }

TreeCheck check_node(const DecisionTree::Node* node, unsigned remaining, const GameSpec& spec) {
    if (node == nullptr) return tree_fail("missing node");
    if (remaining == 0) {
        if (node->question || node->no_child || node->yes_child)
            return tree_fail("leaf at state " + node->state.str() + " has children");
        if (!leaf_win(node->state, spec.variant))
            return tree_fail("leaf state " + node->state.str() + " violates the win condition");
        return TreeCheck{true, ""};
    }
    if (!node->question || !node->no_child || !node->yes_child)
        return tree_fail("internal node at state " + node->state.str() + " is not full");
    if (!is_legal(node->state, *node->question))
        return tree_fail("illegal question " + node->question->str() + " at state " +
                         node->state.str());
    if (node->no_child->state != transition(node->state, *node->question, Response::No))
        return tree_fail("No-child state mismatch at " + node->state.str());
    if (node->yes_child->state != transition(node->state, *node->question, Response::Yes))
        return tree_fail("Yes-child state mismatch at " + node->state.str());
    TreeCheck c = check_node(node->no_child.get(), remaining - 1, spec);
    if (!c.ok) return c;
    return check_node(node->yes_child.get(), remaining - 1, spec);
}

}  // namespace

TreeCheck validate_tree(const DecisionTree& tree, const GameSpec& spec) {
    if (tree.depth != spec.rounds) return tree_fail("tree depth does not match rounds");
    if (!tree.root) return tree_fail("empty tree");
    if (tree.root->state != spec.initial) return tree_fail("root state mismatch");
    return check_node(tree.root.get(), spec.rounds, spec);
}

std::vector<QuestionVector> question_candidates(const StateVector& x, unsigned j) {
    const unsigned k = x.k();
    struct Entry {
        u128 abs_delta;
        std::vector<std::uint64_t> a;
    };
    std::vector<Entry> entries;
    std::vector<std::uint64_t> a(k + 1, 0);
    while (true) {
        // Exactly one representative of {a, x-a}: keep the lexicographically
        // smaller side (both map to the same successor pair, swapped).
        bool keep = true;
        for (unsigned i = 0; i <= k; ++i) {
            std::uint64_t comp = x[i] - a[i];
            if (a[i] != comp) {
                keep = a[i] < comp;
                break;
            }
        }
        if (keep) {
            i128 d = 0;
            for (unsigned i = 0; i <= k; ++i) {
                i128 coeff = 2 * static_cast<i128>(a[i]) - static_cast<i128>(x[i]);
                d += coeff * static_cast<i128>(binom(static_cast<long long>(j), k - i));
            }
            entries.push_back({static_cast<u128>(d < 0 ? -d : d), a});
        }
        unsigned i = 0;
        for (; i <= k; ++i) {
            if (a[i] < x[i]) {
                ++a[i];
                break;
            }
            a[i] = 0;
        }
        if (i > k) break;
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& l, const Entry& r) {
        if (l.abs_delta != r.abs_delta) return l.abs_delta < r.abs_delta;
        return l.a < r.a;
    });
    std::vector<QuestionVector> out;
    out.reserve(entries.size());
    for (auto& e : entries) out.emplace_back(std::move(e.a));
    return out;
}

Solver::Solver(SolverOptions opts) : opts_(opts) {}

SolveStats Solver::stats() const {
    SolveStats s;
    s.visited = visited_.load();
    s.memo_hits = memo_hits_.load();
    s.questions_enumerated = questions_.load();
    s.peak_memo = memo_size(Variant::Pathological) + memo_size(Variant::Original);
    return s;
}

void Solver::reset_stats() {
    visited_ = 0;
    memo_hits_ = 0;
    questions_ = 0;
}

void Solver::check_guard(unsigned k, unsigned q) const {
    unsigned cap;
    switch (k) {
        case 0: cap = opts_.max_rounds_k0; break;
        case 1: cap = opts_.max_rounds_k1; break;
        case 2: cap = opts_.max_rounds_k2; break;
        default:
            throw budget_error("solver guard: lie budget k=" + std::to_string(k) +
                               " exceeds the supported k<=2");
    }
    if (q > cap)
        throw budget_error("solver guard: q=" + std::to_string(q) + " exceeds cap " +
                           std::to_string(cap) + " for k=" + std::to_string(k));
}

Solver::Shard& Solver::shard_for(const MemoKey& key, Variant v) const {
    auto& shards = v == Variant::Pathological ? memo_path_ : memo_orig_;
    return shards[MemoKeyHash{}(key) % kShards];
}

std::size_t Solver::memo_size(Variant v) const {
    const auto& shards = v == Variant::Pathological ? memo_path_ : memo_orig_;
    std::size_t n = 0;
    for (const auto& s : shards) {
        std::lock_guard<std::mutex> lock(s.mu);
        n += s.map.size();
    }
    return n;
}

void Solver::charge_questions(std::uint64_t n) {
    if (questions_.fetch_add(n) + n > opts_.question_budget)
        throw budget_error("question-enumeration budget of " +
                           std::to_string(opts_.question_budget) + " exceeded");
}

bool Solver::paul_wins(const StateVector& x, unsigned j, Variant variant) {
    visited_.fetch_add(1, std::memory_order_relaxed);
    if (j == 0) return leaf_win(x, variant);
    if (variant == Variant::Pathological) {
        // Sphere bound: weight below 2^j is an exact Carole win.
        if (weight(j, x) < (u128{1} << j)) return false;
    } else {
        // At most one survivor already; zero questions preserve the win.
        if (x.total() <= 1) return true;
        // Dual sphere bound: weight above 2^j leaves Carole a heavy branch
        // all the way down, ending with two survivors.
        if (weight(j, x) > (u128{1} << j)) return false;
    }
    MemoKey key{j, x};
    Shard& shard = shard_for(key, variant);
    {
        std::lock_guard<std::mutex> lock(shard.mu);
        auto it = shard.map.find(key);
        if (it != shard.map.end()) {
            memo_hits_.fetch_add(1, std::memory_order_relaxed);
            return it->second;
        }
    }
    auto candidates = question_candidates(x, j - 1);
    charge_questions(candidates.size());
    bool win = false;
    for (const auto& a : candidates) {
        if (paul_wins(transition(x, a, Response::Yes), j - 1, variant) &&
            paul_wins(transition(x, a, Response::No), j - 1, variant)) {
            win = true;
            break;
        }
    }
    {
        std::lock_guard<std::mutex> lock(shard.mu);
        shard.map.emplace(std::move(key), win);
    }
    return win;
}

bool Solver::paul_wins_root(const StateVector& x, unsigned j, Variant variant) {
    const unsigned threads = std::max(1u, opts_.threads);
    if (threads == 1 || j == 0) return paul_wins(x, j, variant);
    visited_.fetch_add(1, std::memory_order_relaxed);
    if (variant == Variant::Pathological && weight(j, x) < (u128{1} << j)) return false;
    if (variant == Variant::Original &&
        (x.total() <= 1 || weight(j, x) > (u128{1} << j)))
        return x.total() <= 1;
    auto candidates = question_candidates(x, j - 1);
    charge_questions(candidates.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> found{false};
    std::atomic<bool> win{false};
    std::vector<std::thread> pool;
    auto worker = [&] {
        while (!found.load()) {
            std::size_t i = next.fetch_add(1);
            if (i >= candidates.size()) return;
            const auto& a = candidates[i];
            if (paul_wins(transition(x, a, Response::Yes), j - 1, variant) &&
                paul_wins(transition(x, a, Response::No), j - 1, variant)) {
                win = true;
                found = true;
            }
        }
    };
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return win.load();
}

SolveOutcome Solver::solve(const GameSpec& spec, bool want_tree) {
    check_guard(spec.lies(), spec.rounds);
    SolveOutcome out{Winner::Carole, std::nullopt, {}};
    bool win = paul_wins_root(spec.initial, spec.rounds, spec.variant);
    out.winner = win ? Winner::Paul : Winner::Carole;
    if (win && want_tree) {
        DecisionTree tree;
        tree.depth = spec.rounds;
        tree.root = extract_node(spec.initial, spec.rounds, spec.variant);
        out.strategy = std::move(tree);
    }
    out.stats = stats();
    return out;
}

std::unique_ptr<DecisionTree::Node> Solver::extract_node(const StateVector& x, unsigned j,
                                                         Variant variant) {
    auto node = std::make_unique<DecisionTree::Node>();
    node->state = x;
    if (j == 0) return node;
    auto q = best_question(x, j, variant);
    if (!q)
        throw legality_error("tree extraction from a losing position " + x.str());
    node->question = *q;
    node->yes_child = extract_node(transition(x, *q, Response::Yes), j - 1, variant);
    node->no_child = extract_node(transition(x, *q, Response::No), j - 1, variant);
    return node;
}

std::optional<QuestionVector> Solver::best_question(const StateVector& x, unsigned rounds,
                                                    Variant variant) {
    if (rounds == 0 || !paul_wins(x, rounds, variant)) return std::nullopt;
    auto candidates = question_candidates(x, rounds - 1);
    charge_questions(candidates.size());
    for (const auto& a : candidates) {
        if (paul_wins(transition(x, a, Response::Yes), rounds - 1, variant) &&
            paul_wins(transition(x, a, Response::No), rounds - 1, variant))
            return a;
    }
    return std::nullopt;  // unreachable for a winning position
}

std::optional<unsigned> Solver::max_winning_rounds(const StateVector& x, Variant variant) {
    if (variant != Variant::Pathological)
        throw legality_error(
            "max_winning_rounds is defined for the pathological game only: the original "
            "game's winning rounds are upward-closed, so no maximum exists");
    if (x.is_zero()) return std::nullopt;
    std::optional<unsigned> best;
    // The scan from q = 0 upward itself certifies the interval structure:
    // every q <= r* is evaluated as a win and r*+1 as a loss.
    for (unsigned q = 0;; ++q) {
        check_guard(x.k(), q);
        if (paul_wins_root(x, q, Variant::Pathological))
            best = q;
        else
            return best;
    }
}

std::uint64_t Solver::f_star(unsigned q, unsigned k) {
    check_guard(k, q);
    auto wins = [&](std::uint64_t n) {
        std::vector<std::uint64_t> c(k + 1, 0);
        c[0] = n;
        return paul_wins_root(StateVector(std::move(c)), q, Variant::Pathological);
    };
    // n below the sphere bound is an exact Carole win (the weight cut),
    // so exponential-then-binary search starts there.
    std::uint64_t lo = static_cast<std::uint64_t>(sphere_bound(q, k));  // first probe
    if (wins(lo)) return lo;
    std::uint64_t step = 1;
    std::uint64_t lose = lo;
    while (!wins(lose + step)) {
        lose += step;
        step *= 2;
    }
    std::uint64_t hi = lose + step;  // wins
    while (hi - lose > 1) {
        std::uint64_t mid = lose + (hi - lose) / 2;
        if (wins(mid))
            hi = mid;
        else
            lose = mid;
    }
    return hi;
}

std::uint64_t Solver::f_original(unsigned q, unsigned k) {
    check_guard(k, q);
    auto wins = [&](std::uint64_t n) {
        std::vector<std::uint64_t> c(k + 1, 0);
        c[0] = n;
        return paul_wins_root(StateVector(std::move(c)), q, Variant::Original);
    };
    // n = 1 always wins; double until the first loss, then binary search.
    std::uint64_t win_n = 1;
    std::uint64_t step = 1;
    while (wins(win_n + step)) {
        win_n += step;
        step *= 2;
    }
    std::uint64_t lose = win_n + step;
    while (lose - win_n > 1) {
        std::uint64_t mid = win_n + (lose - win_n) / 2;
        if (wins(mid))
            win_n = mid;
        else
            lose = mid;
    }
    return win_n;
}

void Solver::save_cache(std::ostream& os, Variant variant) const {
    const auto& shards = variant == Variant::Pathological ? memo_path_ : memo_orig_;
    // Deterministic output: collect and sort lines.
    std::vector<std::string> lines;
    for (const auto& s : shards) {
        std::lock_guard<std::mutex> lock(s.mu);
        for (const auto& [key, win] : s.map) {
            std::ostringstream line;
            line << key.state.k() << ' ' << key.rounds << ' ' << key.state.str() << ' '
                 << (win ? "Paul" : "Carole");
            lines.push_back(line.str());
        }
    }
    std::sort(lines.begin(), lines.end());
    for (const auto& l : lines) os << l << '\n';
}

std::size_t Solver::load_cache(std::istream& is, Variant variant) {
    std::size_t loaded = 0;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        unsigned k, q;
        std::string state_text, winner;
        if (!(ls >> k >> q >> state_text >> winner) || (winner != "Paul" && winner != "Carole"))
            throw shape_error("malformed cache line: '" + line + "'");
        if (k > 2 || q > kMaxRounds)
            throw shape_error("cache line out of supported range: '" + line + "'");
        StateVector state = StateVector::parse(state_text);
        if (state.k() != k)
            throw shape_error("cache line k mismatch: '" + line + "'");
        MemoKey key{q, std::move(state)};
        Shard& shard = shard_for(key, variant);
        std::lock_guard<std::mutex> lock(shard.mu);
        shard.map.emplace(std::move(key), winner == "Paul");
        ++loaded;
    }
    return loaded;
}

}  // namespace ulam
