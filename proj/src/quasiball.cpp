#include "ulam/quasiball.hpp"

#include <algorithm>
#include <charconv>
#include <functional>
#include <istream>
#include <random>
#include <sstream>
#include <thread>
#include <unordered_set>

namespace ulam {

namespace {

void check_positions(const LieSet& s, unsigned q, unsigned radius) {
    if (s.size() > radius) throw shape_error("lie set larger than the ball radius");
    unsigned prev = 0;
    for (unsigned p : s) {
        if (p < 1 || p > q || p <= prev)
            throw shape_error("lie positions must be strictly increasing within [1,q]");
        prev = p;
    }
}

bool vertex_ok(const std::string& v, unsigned q) {
    if (v.size() != q) return false;
    return std::all_of(v.begin(), v.end(), [](char c) { return c == 'Y' || c == 'N'; });
}

// Checks the prefix/flip rule for A = the first prefix_len positions of B.
// On failure fills `message` with a human-readable diagnosis and returns false.
bool check_prefix_pair(const Quasiball& ball, const LieSet& b, std::size_t prefix_len,
                       std::string& message) {
    LieSet a(b.begin(), b.begin() + static_cast<std::ptrdiff_t>(prefix_len));
    const unsigned p = b[prefix_len];
    auto ita = ball.assignment.find(a);
    if (ita == ball.assignment.end()) {
        message = "missing lie set " + lie_set_str(a);
        return false;
    }
    const std::string& fa = ita->second;
    const std::string& fb = ball.assignment.at(b);
    for (unsigned pos = 1; pos < p; ++pos) {
        if (fa[pos - 1] != fb[pos - 1]) {
            message = "pair (" + lie_set_str(a) + "," + lie_set_str(b) + "): position " +
                      std::to_string(pos) + " must agree with " + fa;
            return false;
        }
    }
    if (fa[p - 1] == fb[p - 1]) {
        message = "pair (" + lie_set_str(a) + "," + lie_set_str(b) + "): position " +
                  std::to_string(p) + " must flip relative to " + fa;
        return false;
    }
    return true;
}

std::uint64_t vertex_index(const std::string& v) {
    // Position 1 is the most significant bit with N=0, Y=1, so index order
    // coincides with lexicographic order over Y/N strings.
    std::uint64_t idx = 0;
    for (char c : v) idx = (idx << 1) | (c == 'Y' ? 1u : 0u);
    return idx;
}

std::string vertex_from_index(std::uint64_t idx, unsigned q) {
    std::string v(q, 'N');
    for (unsigned pos = 0; pos < q; ++pos)
        if (idx & (std::uint64_t{1} << (q - 1 - pos))) v[pos] = 'Y';
    return v;
}

}  // namespace

std::string lie_set_str(const LieSet& s) {
    if (s.empty()) return "-";
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(s[i]);
    }
    return out;
}

LieSet parse_lie_set(const std::string& text) {
    if (text == "-") return {};
    LieSet s;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t comma = text.find(',', pos);
        if (comma == std::string::npos) comma = text.size();
        unsigned v = 0;
        auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + comma, v);
        if (ec != std::errc{} || ptr != text.data() + comma)
            throw shape_error("bad lie position list: " + text);
        s.push_back(v);
        pos = comma + 1;
    }
    return s;
}

std::string to_string(CoverMode m) {
    return m == CoverMode::Covering ? "covering" : "packing";
}

BallCheck validate_quasiball(const Quasiball& ball, std::uint64_t seed) {
    BallCheck r;
    const u128 expected = binom_le(ball.q, ball.radius);
    if (u128{ball.assignment.size()} != expected) {
        r.message = "image has " + std::to_string(ball.assignment.size()) +
                    " vertices, expected " + to_string(expected);
        return r;
    }
    std::unordered_set<std::string> seen;
    for (const auto& [lies, vertex] : ball.assignment) {
        check_positions(lies, ball.q, ball.radius);
        if (!vertex_ok(vertex, ball.q)) {
            r.message = "malformed vertex \"" + vertex + "\" at lie set " + lie_set_str(lies);
            return r;
        }
        if (!seen.insert(vertex).second) {
            r.message = "not injective: vertex " + vertex + " repeats at lie set " +
                        lie_set_str(lies);
            return r;
        }
    }
    // Adjacent prefix pairs, exhaustively.
    for (const auto& [lies, vertex] : ball.assignment) {
        (void)vertex;
        if (lies.empty()) continue;
        if (!check_prefix_pair(ball, lies, lies.size() - 1, r.message)) return r;
    }
    // Random non-adjacent prefix pairs (gap >= 2).
    std::vector<const LieSet*> deep;
    for (const auto& [lies, vertex] : ball.assignment) {
        (void)vertex;
        if (lies.size() >= 2) deep.push_back(&lies);
    }
    std::uint64_t samples = 0;
    if (!deep.empty()) {
        u128 want = checked_mul(10, expected);
        samples = want > 1'000'000 ? 1'000'000 : static_cast<std::uint64_t>(want);
        std::mt19937_64 rng(seed);
        for (std::uint64_t t = 0; t < samples; ++t) {
            const LieSet& b = *deep[rng() % deep.size()];
            const std::size_t prefix_len = rng() % (b.size() - 1);  // gap >= 2... or adjacent
            if (!check_prefix_pair(ball, b, prefix_len, r.message)) return r;
        }
    }
    r.ok = true;
    r.note = "checked all adjacent prefix pairs plus " + std::to_string(samples) +
             " sampled non-adjacent pairs; remaining pairs follow by transitivity";
    return r;
}

CollectionCheck validate_collection(const QuasiballCollection& coll, std::uint64_t seed,
                                    unsigned threads) {
    CollectionCheck r;
    if (coll.q > 28) throw budget_error("collection validation caps q at 28");
    if (coll.profile.size() != coll.k + 1) {
        r.message = "profile has " + std::to_string(coll.profile.size()) + " entries for k=" +
                    std::to_string(coll.k);
        return r;
    }
    std::vector<std::uint64_t> by_radius(coll.k + 1, 0);
    for (std::size_t b = 0; b < coll.balls.size(); ++b) {
        const Quasiball& ball = coll.balls[b];
        if (ball.q != coll.q) {
            r.message = "ball " + std::to_string(b + 1) + ": dimension " +
                        std::to_string(ball.q) + " differs from q=" + std::to_string(coll.q);
            return r;
        }
        if (ball.radius > coll.k) {
            r.message = "ball " + std::to_string(b + 1) + ": radius exceeds k";
            return r;
        }
        ++by_radius[ball.radius];
    }
    for (unsigned i = 0; i <= coll.k; ++i) {
        if (by_radius[coll.k - i] != coll.profile[i]) {
            r.message = "profile mismatch: x_" + std::to_string(i) + "=" +
                        std::to_string(coll.profile[i]) + " but " +
                        std::to_string(by_radius[coll.k - i]) + " balls have radius " +
                        std::to_string(coll.k - i);
            return r;
        }
    }

    std::vector<BallCheck> checks(coll.balls.size());
    if (threads <= 1 || coll.balls.size() < 2) {
        for (std::size_t b = 0; b < coll.balls.size(); ++b)
            checks[b] = validate_quasiball(coll.balls[b], seed + b);
    } else {
        const unsigned workers =
            std::min<std::size_t>(threads, coll.balls.size());
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t b = w; b < coll.balls.size(); b += workers)
                    checks[b] = validate_quasiball(coll.balls[b], seed + b);
            });
        }
        for (auto& t : pool) t.join();
    }
    for (std::size_t b = 0; b < coll.balls.size(); ++b) {
        if (!checks[b].ok) {
            r.message = "ball " + std::to_string(b + 1) + ": " + checks[b].message;
            return r;
        }
    }

    const std::uint64_t space = std::uint64_t{1} << coll.q;
    std::vector<std::uint8_t> occupancy(space, 0);
    for (const Quasiball& ball : coll.balls) {
        for (const auto& [lies, vertex] : ball.assignment) {
            (void)lies;
            std::uint8_t& o = occupancy[vertex_index(vertex)];
            if (o < 255) ++o;
            ++r.slots;
        }
    }
    for (std::uint64_t idx = 0; idx < space; ++idx)
        if (occupancy[idx] > 0) ++r.covered;
    r.overlaps = r.slots - r.covered;

    if (coll.mode == CoverMode::Covering) {
        for (std::uint64_t idx = 0; idx < space; ++idx) {
            if (occupancy[idx] == 0) {
                r.message = "uncovered vertex: " + vertex_from_index(idx, coll.q);
                return r;
            }
        }
    } else {
        for (std::uint64_t idx = 0; idx < space; ++idx) {
            if (occupancy[idx] >= 2) {
                r.message = "shared vertex: " + vertex_from_index(idx, coll.q);
                return r;
            }
        }
    }
    r.ok = true;
    r.note = "per-ball prefix pairs beyond adjacent ones were sampled, not enumerated";
    return r;
}

namespace {

struct Replay {
    unsigned q = 0;
    unsigned k = 0;
    Variant variant{};
    std::vector<unsigned> initial_class;                        // per label
    std::vector<std::map<LieSet, std::string, SubsetOrder>> fs;  // per label

    void walk(const DecisionTree::Node* node, std::vector<std::vector<int>> classes,
              std::vector<LieSet> lies, unsigned round, std::string& path) {
        if (!node) throw std::domain_error("decision tree is truncated before depth q");
        {
            std::vector<std::uint64_t> counts(k + 1, 0);
            for (unsigned i = 0; i <= k; ++i) counts[i] = classes[i].size();
            if (StateVector(counts) != node->state)
                throw std::domain_error("tree state disagrees with element replay at \"" +
                                        path + "\"");
        }
        if (round > q) {
            std::uint64_t survivors = 0;
            for (const auto& c : classes) survivors += c.size();
            const bool win =
                variant == Variant::Pathological ? survivors >= 1 : survivors <= 1;
            if (!win)
                throw std::domain_error("tree is not winning: leaf at response sequence \"" +
                                        path + "\" has " + std::to_string(survivors) +
                                        " survivors");
            for (unsigned i = 0; i <= k; ++i)
                for (int x : classes[i]) fs[x][lies[x]] = path;
            return;
        }
        if (!node->question)
            throw std::domain_error("internal node missing a question at \"" + path + "\"");
        const QuestionVector& a = *node->question;
        if (a.size() != k + 1) throw shape_error("question arity mismatch");
        // Realize the question set-wise: the a_i lowest labels of class i.
        std::vector<char> in_question(initial_class.size(), 0);
        for (unsigned i = 0; i <= k; ++i) {
            if (a[i] > classes[i].size())
                throw std::domain_error("illegal question in tree at \"" + path + "\"");
            for (std::uint64_t t = 0; t < a[i]; ++t) in_question[classes[i][t]] = 1;
        }
        for (Response resp : {Response::No, Response::Yes}) {
            std::vector<std::vector<int>> next(k + 1);
            std::vector<LieSet> next_lies = lies;
            for (unsigned i = 0; i <= k; ++i) {
                for (int x : classes[i]) {
                    const bool liar = (resp == Response::No) == bool(in_question[x]);
                    if (!liar) {
                        next[i].push_back(x);
                    } else if (i + 1 <= k) {
                        next[i + 1].push_back(x);
                        next_lies[x].push_back(round);
                    }
                }
            }
            for (auto& c : next) std::sort(c.begin(), c.end());
            path += resp == Response::No ? 'N' : 'Y';
            walk(resp == Response::No ? node->no_child.get() : node->yes_child.get(),
                 std::move(next), std::move(next_lies), round + 1, path);
            path.pop_back();
        }
    }
};

}  // namespace

QuasiballCollection strategy_to_covering(const DecisionTree& tree, const GameSpec& spec) {
    if (tree.depth != spec.rounds) throw shape_error("tree depth differs from the round count");
    if (!tree.root) throw shape_error("empty decision tree");
    Replay rp;
    rp.q = spec.rounds;
    rp.k = spec.lies();
    rp.variant = spec.variant;
    for (unsigned i = 0; i <= rp.k; ++i)
        for (std::uint64_t t = 0; t < spec.initial[i]; ++t) rp.initial_class.push_back(i);
    rp.fs.resize(rp.initial_class.size());

    std::vector<std::vector<int>> classes(rp.k + 1);
    for (std::size_t x = 0; x < rp.initial_class.size(); ++x)
        classes[rp.initial_class[x]].push_back(static_cast<int>(x));
    std::string path;
    rp.walk(tree.root.get(), std::move(classes), std::vector<LieSet>(rp.initial_class.size()),
            1, path);

    QuasiballCollection coll;
    coll.q = rp.q;
    coll.k = rp.k;
    coll.mode =
        spec.variant == Variant::Pathological ? CoverMode::Covering : CoverMode::Packing;
    coll.profile = spec.initial;
    for (std::size_t x = 0; x < rp.fs.size(); ++x) {
        Quasiball ball;
        ball.q = rp.q;
        ball.radius = rp.k - rp.initial_class[x];
        ball.assignment = std::move(rp.fs[x]);
        coll.balls.push_back(std::move(ball));
    }
    return coll;
}

namespace {

std::unique_ptr<DecisionTree::Node> build_from_balls(
    const QuasiballCollection& coll, const std::vector<std::optional<LieSet>>& lies,
    unsigned round) {
    const unsigned k = coll.k;
    auto node = std::make_unique<DecisionTree::Node>();
    std::vector<std::uint64_t> counts(k + 1, 0);
    for (std::size_t b = 0; b < coll.balls.size(); ++b)
        if (lies[b]) ++counts[k - coll.balls[b].radius + lies[b]->size()];
    node->state = StateVector(counts);
    if (round > coll.q) return node;

    std::vector<std::uint64_t> a(k + 1, 0);
    for (std::size_t b = 0; b < coll.balls.size(); ++b) {
        if (!lies[b]) continue;
        const std::string& stem = coll.balls[b].assignment.at(*lies[b]);
        if (stem[round - 1] == 'Y') ++a[k - coll.balls[b].radius + lies[b]->size()];
    }
    node->question = QuestionVector(a);
    for (Response resp : {Response::No, Response::Yes}) {
        std::vector<std::optional<LieSet>> next = lies;
        for (std::size_t b = 0; b < coll.balls.size(); ++b) {
            if (!next[b]) continue;
            const Quasiball& ball = coll.balls[b];
            const char bit = ball.assignment.at(*next[b])[round - 1];
            const bool truthful = (bit == 'Y') == (resp == Response::Yes);
            if (!truthful) {
                LieSet grown = *next[b];
                grown.push_back(round);
                if (grown.size() > ball.radius)
                    next[b].reset();
                else
                    next[b] = std::move(grown);
            }
        }
        auto child = build_from_balls(coll, next, round + 1);
        if (resp == Response::No)
            node->no_child = std::move(child);
        else
            node->yes_child = std::move(child);
    }
    return node;
}

}  // namespace

DecisionTree covering_to_strategy(const QuasiballCollection& coll, Variant variant) {
    CollectionCheck check = validate_collection(coll);
    if (!check.ok) throw std::domain_error("invalid collection: " + check.message);
    const CoverMode wanted =
        variant == Variant::Pathological ? CoverMode::Covering : CoverMode::Packing;
    if (coll.mode != wanted)
        throw std::domain_error("collection mode " + to_string(coll.mode) +
                                " does not match the requested game variant");
    DecisionTree tree;
    tree.depth = coll.q;
    tree.root = build_from_balls(
        coll, std::vector<std::optional<LieSet>>(coll.balls.size(), LieSet{}), 1);
    if (coll.q <= 20) {
        GameSpec spec{variant, coll.profile, coll.q};
        TreeCheck tc = validate_tree(tree, spec);
        if (!tc.ok)
            throw std::domain_error("rebuilt strategy failed replay: " + tc.message);
    }
    return tree;
}

Quasiball hamming_ball(const std::string& center, unsigned radius) {
    const unsigned q = static_cast<unsigned>(center.size());
    if (!vertex_ok(center, q)) throw shape_error("center must be a Y/N string");
    Quasiball ball;
    ball.q = q;
    ball.radius = radius;
    LieSet current;
    auto flip = [&](const LieSet& s) {
        std::string v = center;
        for (unsigned p : s) v[p - 1] = v[p - 1] == 'Y' ? 'N' : 'Y';
        return v;
    };
    // Enumerate all position sets of size <= radius.
    std::function<void(unsigned)> rec = [&](unsigned next) {
        ball.assignment[current] = flip(current);
        if (current.size() == radius) return;
        for (unsigned p = next; p <= q; ++p) {
            current.push_back(p);
            rec(p + 1);
            current.pop_back();
        }
    };
    rec(1);
    return ball;
}

Quasiball restrict_ball(const Quasiball& ball) {
    if (ball.radius == 0) throw std::domain_error("cannot restrict a radius-0 ball");
    Quasiball out;
    out.q = ball.q;
    out.radius = ball.radius - 1;
    for (const auto& [lies, vertex] : ball.assignment)
        if (lies.size() < ball.radius) out.assignment[lies] = vertex;
    return out;
}

std::string serialize_collection(const QuasiballCollection& coll) {
    std::ostringstream os;
    os << "quasiball-cover v1\n";
    os << "q=" << coll.q << " k=" << coll.k << " mode=" << to_string(coll.mode)
       << " x=" << coll.profile.str() << '\n';
    for (std::size_t b = 0; b < coll.balls.size(); ++b) {
        os << "ball " << (b + 1) << " radius " << coll.balls[b].radius << '\n';
        for (const auto& [lies, vertex] : coll.balls[b].assignment)
            os << lie_set_str(lies) << " : " << vertex << '\n';
    }
    return os.str();
}

QuasiballCollection parse_collection(std::istream& is) {
    auto fail = [](const std::string& what) -> void {
        throw shape_error("bad certificate: " + what);
    };
    std::string line;
    if (!std::getline(is, line) || line != "quasiball-cover v1") fail("missing header");
    if (!std::getline(is, line)) fail("missing parameter line");
    QuasiballCollection coll;
    {
        std::istringstream ps(line);
        std::string qf, kf, mf, xf;
        if (!(ps >> qf >> kf >> mf >> xf) || qf.rfind("q=", 0) != 0 ||
            kf.rfind("k=", 0) != 0 || mf.rfind("mode=", 0) != 0 || xf.rfind("x=", 0) != 0)
            fail("malformed parameter line: " + line);
        coll.q = static_cast<unsigned>(std::stoul(qf.substr(2)));
        coll.k = static_cast<unsigned>(std::stoul(kf.substr(2)));
        const std::string mode = mf.substr(5);
        if (mode == "covering")
            coll.mode = CoverMode::Covering;
        else if (mode == "packing")
            coll.mode = CoverMode::Packing;
        else
            fail("unknown mode: " + mode);
        coll.profile = StateVector::parse(xf.substr(2));
    }
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line.rfind("ball ", 0) == 0) {
            std::istringstream bs(line);
            std::string word;
            std::size_t ordinal = 0;
            unsigned radius = 0;
            bs >> word >> ordinal >> word >> radius;
            if (!bs || word != "radius" || ordinal != coll.balls.size() + 1)
                fail("malformed ball line: " + line);
            Quasiball ball;
            ball.q = coll.q;
            ball.radius = radius;
            coll.balls.push_back(std::move(ball));
            continue;
        }
        if (coll.balls.empty()) fail("assignment line before any ball: " + line);
        const std::size_t sep = line.find(" : ");
        if (sep == std::string::npos) fail("malformed assignment line: " + line);
        LieSet lies = parse_lie_set(line.substr(0, sep));
        std::string vertex = line.substr(sep + 3);
        if (!vertex_ok(vertex, coll.q)) fail("malformed vertex: " + vertex);
        auto [it, inserted] = coll.balls.back().assignment.emplace(std::move(lies), vertex);
        (void)it;
        if (!inserted) fail("duplicate lie set in ball " + std::to_string(coll.balls.size()));
    }
    return coll;
}

}  // namespace ulam
