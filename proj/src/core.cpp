#include "ulam/core.hpp"

#include <charconv>
#include <sstream>

namespace ulam {

u128 checked_add(u128 a, u128 b) {
    u128 r;
    if (__builtin_add_overflow(a, b, &r))
        throw capacity_error("128-bit overflow in addition");
    return r;
}

u128 checked_mul(u128 a, u128 b) {
    u128 r;
    if (__builtin_mul_overflow(a, b, &r))
        throw capacity_error("128-bit overflow in multiplication");
    return r;
}

std::string to_string(u128 v) {
    if (v == 0) return "0";
    std::string s;
    while (v > 0) {
        s.insert(s.begin(), static_cast<char>('0' + static_cast<unsigned>(v % 10)));
        v /= 10;
    }
    return s;
}

std::string to_string(i128 v) {
    if (v < 0) return "-" + to_string(static_cast<u128>(-v));
    return to_string(static_cast<u128>(v));
}

std::string to_string(Variant v) {
    return v == Variant::Pathological ? "pathological" : "original";
}

std::string to_string(Winner w) {
    return w == Winner::Paul ? "Paul" : "Carole";
}

StateVector::StateVector(std::vector<std::uint64_t> counts) : counts_(std::move(counts)) {
    if (counts_.empty())
        throw shape_error("state vector must have at least one entry");
    total();  // enforce the 64-bit total invariant up front
}

std::uint64_t StateVector::total() const {
    std::uint64_t sum = 0;
    for (std::uint64_t c : counts_)
        if (__builtin_add_overflow(sum, c, &sum))
            throw capacity_error("state vector total exceeds 64 bits");
    return sum;
}

bool StateVector::is_zero() const {
    for (std::uint64_t c : counts_)
        if (c != 0) return false;
    return true;
}

namespace {

std::vector<std::uint64_t> parse_csv_u64(const std::string& text, const char* what) {
    std::vector<std::uint64_t> out;
    std::size_t pos = 0;
    while (true) {
        std::size_t comma = text.find(',', pos);
        std::string tok = text.substr(pos, comma == std::string::npos ? comma : comma - pos);
        std::uint64_t v = 0;
        const char* b = tok.data();
        const char* e = b + tok.size();
        auto [p, ec] = std::from_chars(b, e, v);
        if (ec != std::errc() || p != e || tok.empty())
            throw shape_error(std::string("malformed ") + what + " entry: '" + tok + "'");
        out.push_back(v);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

std::string csv_u64(const std::vector<std::uint64_t>& v) {
    std::ostringstream os;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) os << ',';
        os << v[i];
    }
    return os.str();
}

}  // namespace

std::string StateVector::str() const { return csv_u64(counts_); }

StateVector StateVector::parse(const std::string& text) {
    return StateVector(parse_csv_u64(text, "state vector"));
}

QuestionVector::QuestionVector(std::vector<std::uint64_t> entries) : entries_(std::move(entries)) {
    if (entries_.empty())
        throw shape_error("question vector must have at least one entry");
}

std::string QuestionVector::str() const { return csv_u64(entries_); }

QuestionVector QuestionVector::parse(const std::string& text) {
    return QuestionVector(parse_csv_u64(text, "question vector"));
}

bool is_legal(const StateVector& x, const QuestionVector& a) {
    if (a.size() != x.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (a[i] > x[i]) return false;
    return true;
}

u128 binom_le(unsigned q, long long m) {
    if (q > kMaxRounds)
        throw capacity_error("rounds exceed supported cap of " + std::to_string(kMaxRounds));
    if (m < 0) return 0;
    if (static_cast<unsigned long long>(m) >= q) return u128{1} << q;
    u128 sum = 1;   // C(q,0)
    u128 term = 1;
    for (long long j = 0; j < m; ++j) {
        term = term * (q - j) / (j + 1);  // exact: running binomial
        sum += term;
    }
    return sum;
}

u128 binom(long long m, unsigned j) {
    if (m < 0 || static_cast<unsigned long long>(m) < j) return 0;
    if (m > static_cast<long long>(kMaxRounds))
        throw capacity_error("binomial upper index exceeds supported cap");
    u128 r = 1;
    for (unsigned i = 0; i < j; ++i)
        r = r * static_cast<unsigned long long>(m - i) / (i + 1);
    return r;
}

u128 weight(unsigned q, const StateVector& x) {
    const unsigned k = x.k();
    u128 sum = 0;
    for (unsigned i = 0; i <= k; ++i)
        sum = checked_add(sum, checked_mul(x[i], binom_le(q, static_cast<long long>(k) - i)));
    return sum;
}

StateVector transition(const StateVector& x, const QuestionVector& a, Response r) {
    if (!is_legal(x, a))
        throw legality_error("question " + a.str() + " is not legal for state " + x.str());
    const unsigned k = x.k();
    std::vector<std::uint64_t> next(k + 1);
    if (r == Response::Yes) {
        next[0] = a[0];
        for (unsigned i = 1; i <= k; ++i) next[i] = a[i] + x[i - 1] - a[i - 1];
    } else {
        next[0] = x[0] - a[0];
        for (unsigned i = 1; i <= k; ++i) next[i] = x[i] - a[i] + a[i - 1];
    }
    return StateVector(std::move(next));
}

i128 imbalance(unsigned j, const StateVector& x, const QuestionVector& a) {
    u128 wy = weight(j, transition(x, a, Response::Yes));
    u128 wn = weight(j, transition(x, a, Response::No));
    return static_cast<i128>(wy) - static_cast<i128>(wn);
}

i128 imbalance_closed_form(unsigned j, const StateVector& x, const QuestionVector& a) {
    if (!is_legal(x, a))
        throw legality_error("question " + a.str() + " is not legal for state " + x.str());
    const unsigned k = x.k();
    i128 sum = 0;
    for (unsigned i = 0; i <= k; ++i) {
        i128 coeff = 2 * static_cast<i128>(a[i]) - static_cast<i128>(x[i]);
        sum += coeff * static_cast<i128>(binom(static_cast<long long>(j), k - i));
    }
    return sum;
}

u128 sphere_bound(unsigned q, unsigned k) {
    if (q > kMaxRounds)
        throw capacity_error("rounds exceed supported cap of " + std::to_string(kMaxRounds));
    u128 pow2 = u128{1} << q;
    u128 ball = binom_le(q, k);
    return (pow2 + ball - 1) / ball;
}

std::optional<unsigned> character(std::uint64_t x0, std::uint64_t x1) {
    if (x0 == 0 && x1 == 0) return std::nullopt;
    // The admissible set {q : (q+1)x0 + x1 >= 2^q} is a downward-closed
    // interval, so scan upward until the inequality first fails.
    for (unsigned q = 0; q <= kMaxRounds; ++q) {
        u128 wt = checked_add(checked_mul(u128{q} + 1, x0), x1);
        if (wt < (u128{1} << q)) return q - 1;  // q >= 1 here: q=0 always holds
    }
    throw capacity_error("character exceeds supported rounds cap");
}

bool covers(const StateVector& x, const StateVector& y) {
    if (x.k() != y.k()) throw shape_error("covers: mismatched lie budgets");
    for (std::size_t i = 0; i < x.size(); ++i)
        if (y[i] > x[i]) return false;
    return true;
}

bool majorizes(const StateVector& x, const StateVector& y) {
    if (x.k() != y.k()) throw shape_error("majorizes: mismatched lie budgets");
    u128 px = 0, py = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        px += x[i];
        py += y[i];
        if (py > px) return false;
    }
    return true;
}

std::size_t StateVectorHash::operator()(const StateVector& s) const {
    std::size_t h = 0x9e3779b97f4a7c15ull ^ s.size();
    for (std::uint64_t c : s.counts()) {
        h ^= c + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
}

}  // namespace ulam
