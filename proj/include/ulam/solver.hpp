// Ground-truth memoized minimax evaluation of both game variants, threshold
// searches for F*_k(q) and F_k(q), and winning-strategy tree extraction.

#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ulam/core.hpp"

namespace ulam {

// Full binary tree of depth q: internal nodes carry the question asked at
// their state, children are the No/Yes successor states.
struct DecisionTree {
    struct Node {
        StateVector state{std::vector<std::uint64_t>{0}};
        std::optional<QuestionVector> question;  // internal nodes only
        std::unique_ptr<Node> no_child;
        std::unique_ptr<Node> yes_child;
    };
    std::unique_ptr<Node> root;
    unsigned depth = 0;
};

struct TreeCheck {
    bool ok = false;
    std::string message;
};

// Structural invariants plus a full replay of the win condition at every leaf.
TreeCheck validate_tree(const DecisionTree& tree, const GameSpec& spec);

struct SolverOptions {
    // Global cap on enumerated questions per Solver, for reproducible refusal.
    std::uint64_t question_budget = 1'000'000'000;
    unsigned threads = 1;
    // Dimension guard: largest admitted q per lie budget; k >= 3 is refused.
    unsigned max_rounds_k0 = 30;
    unsigned max_rounds_k1 = 16;
    unsigned max_rounds_k2 = 14;
};

struct SolveStats {
    std::uint64_t visited = 0;
    std::uint64_t memo_hits = 0;
    std::uint64_t peak_memo = 0;
    std::uint64_t questions_enumerated = 0;
};

struct SolveOutcome {
    Winner winner;
    std::optional<DecisionTree> strategy;
    SolveStats stats;
};

// All legal questions for x, one representative per {a, x-a} symmetry class,
// sorted by |imbalance at weight index j| ascending (lexicographic tie-break).
std::vector<QuestionVector> question_candidates(const StateVector& x, unsigned j);

class Solver {
public:
    explicit Solver(SolverOptions opts = {});

    SolveOutcome solve(const GameSpec& spec, bool want_tree = false);

    // Largest q for which Paul wins the pathological game from x, or empty
    // for the zero state. The winning set's interval structure is verified
    // instance-by-instance by the upward scan itself.
    std::optional<unsigned> max_winning_rounds(const StateVector& x, Variant variant);

    // Minimum n with Paul winning ((n,0,...,0), q, k) pathological.
    std::uint64_t f_star(unsigned q, unsigned k);

    // Maximum n with Paul winning ((n,0,...,0), q, k) original.
    std::uint64_t f_original(unsigned q, unsigned k);

    // First winning question in candidate order, if Paul wins the position.
    std::optional<QuestionVector> best_question(const StateVector& x, unsigned rounds,
                                                Variant variant);

    // Line-oriented memo persistence: "k q x0,...,xk winner".
    void save_cache(std::ostream& os, Variant variant) const;
    std::size_t load_cache(std::istream& is, Variant variant);

    const SolverOptions& options() const { return opts_; }
    SolveStats stats() const;
    void reset_stats();

private:
    struct MemoKey {
        unsigned rounds;
        StateVector state;
        bool operator==(const MemoKey&) const = default;
    };
    struct MemoKeyHash {
        std::size_t operator()(const MemoKey& k) const {
            return StateVectorHash{}(k.state) * 1000003u + k.rounds;
        }
    };
    struct Shard {
        mutable std::mutex mu;
        std::unordered_map<MemoKey, bool, MemoKeyHash> map;
    };
    static constexpr unsigned kShards = 64;

    void check_guard(unsigned k, unsigned q) const;
    bool paul_wins(const StateVector& x, unsigned j, Variant variant);
    bool paul_wins_root(const StateVector& x, unsigned j, Variant variant);
    std::unique_ptr<DecisionTree::Node> extract_node(const StateVector& x, unsigned j,
                                                     Variant variant);
    Shard& shard_for(const MemoKey& k, Variant v) const;
    void charge_questions(std::uint64_t n);
    std::size_t memo_size(Variant v) const;

    SolverOptions opts_;
    std::atomic<std::uint64_t> visited_{0};
    std::atomic<std::uint64_t> memo_hits_{0};
    std::atomic<std::uint64_t> questions_{0};
    mutable std::array<Shard, kShards> memo_path_;
    mutable std::array<Shard, kShards> memo_orig_;
};

}  // namespace ulam
