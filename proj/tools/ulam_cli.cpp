// ulam: command-line front end for the liar-game engine.
//
// Subcommands: solve, table, verify-policy, cover, check-cover, play, cache.
// Exit codes: 0 ok, 2 flag error, 3 budget/capacity, 4 policy refused,
// 5 no winning strategy.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "ulam/closed_forms.hpp"
#include "ulam/core.hpp"
#include "ulam/quasiball.hpp"
#include "ulam/solver.hpp"
#include "ulam/strategy.hpp"

namespace {

constexpr int kExitFlag = 2;
constexpr int kExitBudget = 3;
constexpr int kExitPolicyRefused = 4;
constexpr int kExitNoStrategy = 5;

struct FlagError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

ulam::Variant parse_variant(const std::string& name) {
    if (name == "pathological") return ulam::Variant::Pathological;
    if (name == "original") return ulam::Variant::Original;
    throw FlagError("unknown variant: " + name);
}

ulam::StateVector parse_state(const std::string& text, std::optional<unsigned> lies) {
    ulam::StateVector x = ulam::StateVector::parse(text);
    if (lies && x.k() != *lies)
        throw FlagError("--lies " + std::to_string(*lies) + " disagrees with --state " +
                        x.str() + " (k=" + std::to_string(x.k()) + ")");
    return x;
}

unsigned effective_threads(unsigned flag_value) {
    if (const char* env = std::getenv("ULAM_THREADS")) {
        char* end = nullptr;
        const unsigned long v = std::strtoul(env, &end, 10);
        if (end && *end == '\0' && v >= 1) return static_cast<unsigned>(v);
        throw FlagError(std::string("bad ULAM_THREADS value: ") + env);
    }
    return flag_value;
}

void dump_tree(std::ostream& os, const ulam::DecisionTree::Node* node, unsigned depth) {
    if (!node) return;
    os << std::string(2 * depth, ' ') << "state " << node->state.str();
    if (node->question) os << " question " << node->question->str();
    os << '\n';
    dump_tree(os, node->no_child.get(), depth + 1);
    dump_tree(os, node->yes_child.get(), depth + 1);
}

int cmd_solve(const std::string& variant_name, const std::string& state_text,
              std::optional<unsigned> lies, unsigned rounds, unsigned threads,
              std::uint64_t budget, const std::string& tree_out) {
    const ulam::Variant variant = parse_variant(variant_name);
    const ulam::StateVector x = parse_state(state_text, lies);
    ulam::SolverOptions opts;
    opts.threads = effective_threads(threads);
    opts.question_budget = budget;
    ulam::Solver solver(opts);
    ulam::GameSpec spec{variant, x, rounds};
    const bool want_tree = !tree_out.empty();
    ulam::SolveOutcome out = solver.solve(spec, want_tree);
    std::cout << "winner: " << ulam::to_string(out.winner) << '\n';
    std::cout << "visited: " << out.stats.visited << '\n';
    std::cout << "memo_hits: " << out.stats.memo_hits << '\n';
    std::cout << "questions: " << out.stats.questions_enumerated << '\n';
    if (want_tree && out.strategy) {
        std::ofstream f(tree_out);
        if (!f) throw FlagError("cannot open " + tree_out);
        dump_tree(f, out.strategy->root.get(), 0);
        std::cout << "tree: " << tree_out << '\n';
    }
    return 0;
}

int cmd_table(unsigned lies, unsigned max_rounds, const std::string& mode, unsigned threads) {
    const bool want_formula = mode == "formula" || mode == "both";
    const bool want_dp = mode == "dp" || mode == "both";
    if (!want_formula && !want_dp) throw FlagError("mode must be formula, dp, or both");
    if (want_formula && lies != 1 && lies != 2)
        throw FlagError("closed forms cover 1 or 2 lies only");
    ulam::SolverOptions opts;
    opts.threads = effective_threads(threads);
    ulam::Solver solver(opts);
    const unsigned dp_cap = lies == 0   ? opts.max_rounds_k0
                            : lies == 1 ? opts.max_rounds_k1
                                        : opts.max_rounds_k2;
    for (unsigned q = 1; q <= max_rounds; ++q) {
        std::optional<std::uint64_t> formula, dp;
        if (want_formula) formula = lies == 1 ? ulam::f_star_1(q) : ulam::f_star_2(q);
        if (want_dp && q <= dp_cap && lies <= 2) dp = solver.f_star(q, lies);
        std::ostringstream row;
        row << q;
        if (want_formula) row << ' ' << *formula;
        if (want_dp) row << ' ' << (dp ? std::to_string(*dp) : std::string("skipped"));
        const ulam::u128 sphere = ulam::sphere_bound(q, lies);
        row << ' ' << ulam::to_string(sphere);
        const std::uint64_t best = formula ? *formula : dp.value_or(0);
        if (best)
            row << ' ' << ulam::to_string(ulam::i128{best} - static_cast<ulam::i128>(sphere));
        else
            row << " skipped";
        if (formula && dp && *formula != *dp)
            row << " error: formula/dp mismatch";
        std::cout << row.str() << '\n';
    }
    return 0;
}

int cmd_verify_policy(const std::string& kind, std::uint64_t n, unsigned rounds) {
    std::unique_ptr<ulam::Policy> policy;
    try {
        if (kind == "one-lie")
            policy = ulam::one_lie_full_policy(n, rounds);
        else if (kind == "two-lie")
            policy = ulam::two_lie_full_policy(n, rounds);
        else
            throw FlagError("kind must be one-lie or two-lie");
    } catch (const std::domain_error& e) {
        std::cout << "refused: " << e.what() << '\n';
        return kExitPolicyRefused;
    }
    const unsigned k = kind == "one-lie" ? 1 : 2;
    std::vector<std::uint64_t> counts(k + 1, 0);
    counts[0] = n;
    ulam::GameSpec spec{ulam::Variant::Pathological, ulam::StateVector(counts), rounds};
    ulam::VerificationReport report = ulam::verify_policy(spec, *policy);
    std::cout << report.wins << '/' << report.branches
              << (report.all_win() ? " branches: win\n" : " branches: LOSS\n");
    std::cout << report.str();
    return report.all_win() ? 0 : 1;
}

int cmd_cover(const std::string& variant_name, const std::string& state_text,
              std::optional<unsigned> lies, unsigned rounds, const std::string& out_path,
              std::uint64_t seed, unsigned threads) {
    const ulam::Variant variant = parse_variant(variant_name);
    const ulam::StateVector x = parse_state(state_text, lies);
    ulam::SolverOptions opts;
    opts.threads = effective_threads(threads);
    ulam::Solver solver(opts);
    ulam::GameSpec spec{variant, x, rounds};
    ulam::SolveOutcome out = solver.solve(spec, true);
    if (out.winner != ulam::Winner::Paul) {
        std::cout << "no winning strategy exists\n";
        return kExitNoStrategy;
    }
    ulam::QuasiballCollection coll = ulam::strategy_to_covering(*out.strategy, spec);
    ulam::CollectionCheck check = ulam::validate_collection(coll, seed, opts.threads);
    std::cout << "profile: " << coll.profile.str() << '\n';
    std::cout << "mode: " << ulam::to_string(coll.mode) << '\n';
    std::cout << "slots: " << check.slots << '\n';
    std::cout << "covered: " << check.covered << '\n';
    std::cout << "overlaps: " << check.overlaps << '\n';
    std::cout << "valid: " << (check.ok ? "yes" : "no") << '\n';
    if (!check.ok) {
        std::cout << "reason: " << check.message << '\n';
        return 1;
    }
    if (!out_path.empty()) {
        std::ofstream f(out_path, std::ios::binary);
        if (!f) throw FlagError("cannot open " + out_path);
        f << ulam::serialize_collection(coll);
        std::cout << "certificate: " << out_path << '\n';
    }
    return 0;
}

int cmd_check_cover(const std::string& path, std::uint64_t seed, unsigned threads) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw FlagError("cannot open " + path);
    ulam::QuasiballCollection coll = ulam::parse_collection(f);
    ulam::CollectionCheck check =
        ulam::validate_collection(coll, seed, effective_threads(threads));
    std::cout << "profile: " << coll.profile.str() << '\n';
    std::cout << "mode: " << ulam::to_string(coll.mode) << '\n';
    std::cout << "slots: " << check.slots << '\n';
    std::cout << "covered: " << check.covered << '\n';
    std::cout << "overlaps: " << check.overlaps << '\n';
    std::cout << "valid: " << (check.ok ? "yes" : "no") << '\n';
    if (!check.ok) {
        std::cout << "reason: " << check.message << '\n';
        return 1;
    }
    return 0;
}

int cmd_play(const std::string& variant_name, const std::string& state_text,
             std::optional<unsigned> lies, unsigned rounds) {
    const ulam::Variant variant = parse_variant(variant_name);
    ulam::StateVector x = parse_state(state_text, lies);
    ulam::Solver solver;
    auto finish = [&](const ulam::StateVector& final_state) {
        const std::uint64_t survivors = final_state.total();
        const bool paul = variant == ulam::Variant::Pathological ? survivors >= 1
                                                                 : survivors <= 1;
        std::cout << "survivors: " << survivors << '\n';
        std::cout << "outcome: " << (paul ? "Paul wins" : "Carole wins") << '\n';
    };
    for (unsigned j = rounds; j > 0; --j) {
        std::optional<ulam::QuestionVector> best =
            solver.best_question(x, j, variant);
        ulam::QuestionVector a =
            best ? *best
                 : (x.is_zero() ? ulam::QuestionVector(
                                      std::vector<std::uint64_t>(x.size(), 0))
                                : ulam::floor_ceiling_question(x, j));
        std::cout << "round " << (rounds - j + 1) << " state: " << x.str() << '\n';
        std::cout << "question: " << a.str() << '\n';
        for (;;) {
            std::cout << "response [Y/N/hint]: " << std::flush;
            std::string line;
            if (!std::getline(std::cin, line)) {
                std::cout << "resigned\n";
                std::cout << "outcome: Paul wins\n";
                return 0;
            }
            if (line == "hint") {
                std::cout << "weight: " << ulam::to_string(ulam::weight(j, x))
                          << " threshold: " << ulam::to_string(ulam::u128{1} << j) << '\n';
                continue;
            }
            if (line == "Y" || line == "N") {
                x = ulam::transition(
                    x, a, line == "Y" ? ulam::Response::Yes : ulam::Response::No);
                break;
            }
            std::cout << "please answer Y or N\n";
        }
    }
    std::cout << "final state: " << x.str() << '\n';
    finish(x);
    return 0;
}

int cmd_cache(const std::string& variant_name, const std::string& state_text,
              std::optional<unsigned> lies, unsigned rounds, const std::string& in_path,
              const std::string& out_path) {
    const ulam::Variant variant = parse_variant(variant_name);
    const ulam::StateVector x = parse_state(state_text, lies);
    ulam::Solver solver;
    if (!in_path.empty()) {
        std::ifstream f(in_path);
        if (!f) throw FlagError("cannot open " + in_path);
        const std::size_t loaded = solver.load_cache(f, variant);
        std::cout << "loaded: " << loaded << '\n';
    }
    ulam::GameSpec spec{variant, x, rounds};
    ulam::SolveOutcome out = solver.solve(spec, false);
    std::cout << "winner: " << ulam::to_string(out.winner) << '\n';
    if (!out_path.empty()) {
        std::ofstream f(out_path);
        if (!f) throw FlagError("cannot open " + out_path);
        solver.save_cache(f, variant);
        std::cout << "dumped: " << out_path << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact solver and covering toolkit for q-round liar games"};
    app.require_subcommand(1);

    std::string variant = "pathological";
    std::string state_text;
    unsigned rounds = 0;
    std::optional<unsigned> lies;
    unsigned threads = 1;
    std::uint64_t budget = 1'000'000'000;
    std::uint64_t seed = ulam::kDefaultSeed;
    std::string out_path, in_path, tree_out, mode = "formula", kind;
    unsigned max_rounds = 1;
    std::uint64_t n = 0;
    std::string cert_path;

    auto add_state_flags = [&](CLI::App* sub, bool need_state) {
        sub->add_option("--variant", variant, "pathological or original");
        auto* s = sub->add_option("--state", state_text, "comma-separated state vector");
        if (need_state) s->required();
        sub->add_option("--lies", lies, "lie budget k (redundant with --state)");
        sub->add_option("--rounds", rounds, "number of rounds q")->required();
    };

    CLI::App* solve = app.add_subcommand("solve", "decide the winner");
    add_state_flags(solve, true);
    solve->add_option("--threads", threads, "worker threads");
    solve->add_option("--budget", budget, "question enumeration budget");
    solve->add_option("--tree-out", tree_out, "write the winning strategy tree");

    CLI::App* table = app.add_subcommand("table", "tabulate F*_k(q)");
    unsigned table_lies = 2;
    table->add_option("--lies", table_lies, "lie budget k")->required();
    table->add_option("--max-rounds", max_rounds, "largest q")->required();
    table->add_option("--mode", mode, "formula, dp, or both");
    table->add_option("--threads", threads, "worker threads");

    CLI::App* verify = app.add_subcommand("verify-policy", "replay a constructive policy");
    verify->add_option("--kind", kind, "one-lie or two-lie")->required();
    verify->add_option("--n", n, "initial truthful-element count")->required();
    verify->add_option("--rounds", rounds, "number of rounds q")->required();

    CLI::App* cover = app.add_subcommand("cover", "extract and validate a covering");
    add_state_flags(cover, true);
    cover->add_option("--out", out_path, "certificate output path");
    cover->add_option("--seed", seed, "sampling seed");
    cover->add_option("--threads", threads, "worker threads");

    CLI::App* check = app.add_subcommand("check-cover", "validate a certificate file");
    check->add_option("path", cert_path, "certificate file")->required();
    check->add_option("--seed", seed, "sampling seed");
    check->add_option("--threads", threads, "worker threads");

    CLI::App* play = app.add_subcommand("play", "play Carole against the engine");
    add_state_flags(play, true);

    CLI::App* cache = app.add_subcommand("cache", "dump or preload the solve memo");
    add_state_flags(cache, true);
    cache->add_option("--in", in_path, "cache file to preload");
    cache->add_option("--out", out_path, "cache file to write");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitFlag;
    }

    try {
        if (solve->parsed())
            return cmd_solve(variant, state_text, lies, rounds, threads, budget, tree_out);
        if (table->parsed()) return cmd_table(table_lies, max_rounds, mode, threads);
        if (verify->parsed()) return cmd_verify_policy(kind, n, rounds);
        if (cover->parsed())
            return cmd_cover(variant, state_text, lies, rounds, out_path, seed, threads);
        if (check->parsed()) return cmd_check_cover(cert_path, seed, threads);
        if (play->parsed()) return cmd_play(variant, state_text, lies, rounds);
        if (cache->parsed())
            return cmd_cache(variant, state_text, lies, rounds, in_path, out_path);
    } catch (const FlagError& e) {
        std::cerr << "flag error: " << e.what() << '\n';
        return kExitFlag;
    } catch (const ulam::shape_error& e) {
        std::cerr << "flag error: " << e.what() << '\n';
        return kExitFlag;
    } catch (const ulam::budget_error& e) {
        std::cerr << "budget error: " << e.what() << '\n';
        return kExitBudget;
    } catch (const ulam::capacity_error& e) {
        std::cerr << "capacity error: " << e.what() << '\n';
        return kExitBudget;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
