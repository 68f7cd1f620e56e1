#include "henonlab/symbolic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

namespace henonlab {

SymbolWord::SymbolWord(std::vector<std::uint8_t> bits, int anchor)
    : bits_(std::move(bits)), anchor_(anchor) {
    if (bits_.empty()) throw ContractError("SymbolWord must be nonempty");
    if (anchor_ < 0 || anchor_ >= static_cast<int>(bits_.size()))
        throw ContractError("SymbolWord anchor out of range");
    for (auto b : bits_)
        if (b > 1) throw ContractError("SymbolWord symbols must be 0 or 1");
}

SymbolWord SymbolWord::parse(std::string_view text) {
    std::vector<std::uint8_t> bits;
    int anchor = 0;
    bool seen_marker = false;
    for (char c : text) {
        if (c == '.') {
            if (seen_marker) throw ContractError("SymbolWord: more than one anchor marker");
            seen_marker = true;
            anchor = static_cast<int>(bits.size());
        } else if (c == '0' || c == '1') {
            bits.push_back(static_cast<std::uint8_t>(c - '0'));
        } else {
            throw ContractError(std::string("SymbolWord: unexpected character '") + c + "'");
        }
    }
    return SymbolWord(std::move(bits), anchor);
}

std::uint8_t SymbolWord::at(int j) const {
    if (!covers(j)) throw std::out_of_range("SymbolWord position outside support");
    return bits_[static_cast<std::size_t>(j + anchor_)];
}

std::string SymbolWord::to_string() const {
    std::string out;
    out.reserve(bits_.size() + 1);
    for (std::size_t i = 0; i < bits_.size(); ++i) {
        if (anchor_ != 0 && static_cast<int>(i) == anchor_) out.push_back('.');
        out.push_back(static_cast<char>('0' + bits_[i]));
    }
    return out;
}

PeriodicSequence::PeriodicSequence(SymbolWord period_word) : word_(std::move(period_word)) {
    if (word_.anchor() != 0) {
        // Re-express with position 0 at the front.
        std::vector<std::uint8_t> rotated(word_.bits().begin() + word_.anchor(), word_.bits().end());
        rotated.insert(rotated.end(), word_.bits().begin(), word_.bits().begin() + word_.anchor());
        word_ = SymbolWord(std::move(rotated), 0);
    }
}

std::uint8_t PeriodicSequence::at(int j) const {
    const int n = period();
    return word_.bits()[static_cast<std::size_t>(((j % n) + n) % n)];
}

int PeriodicSequence::minimal_period() const {
    const int n = period();
    for (int p = 1; p < n; ++p) {
        if (n % p != 0) continue;
        bool ok = true;
        for (int j = 0; j < n && ok; ++j) ok = at(j) == at(j + p);
        if (ok) return p;
    }
    return n;
}

SymbolWord shift(const SymbolWord& s, int k) {
    const int anchor = s.anchor() + k;
    if (anchor < 0 || anchor >= s.size())
        throw std::out_of_range("shift moves position 0 outside the finite word");
    return SymbolWord(s.bits(), anchor);
}

PeriodicSequence shift(const PeriodicSequence& s, int k) {
    const int n = s.period();
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) bits[static_cast<std::size_t>(j)] = s.at(j + k);
    return PeriodicSequence(SymbolWord(std::move(bits), 0));
}

double sequence_metric(const SymbolWord& s, const SymbolWord& t) {
    const int lo = std::max(s.first_position(), t.first_position());
    const int hi = std::min(s.last_position(), t.last_position());
    double d = 0.0;
    for (int j = lo; j <= hi; ++j)
        if (s.at(j) != t.at(j)) d += std::ldexp(1.0, -std::abs(j));
    return d;
}

namespace {

// Words up to 64 symbols are packed with a leading sentinel bit so that
// different lengths never collide.
std::uint64_t pack(const std::uint8_t* first, int n) {
    std::uint64_t key = 1;
    for (int i = 0; i < n; ++i) key = (key << 1) | first[i];
    return key;
}

void require_length(int n) {
    if (n < 1) throw ContractError("word length must be >= 1");
    if (n > 63) throw ContractError("word length must be <= 63");
}

}  // namespace

std::uint64_t count_admissible_words(const std::vector<SymbolWord>& observed, int n) {
    require_length(n);
    std::set<std::uint64_t> seen;
    for (const auto& w : observed) {
        const auto& b = w.bits();
        for (int i = 0; i + n <= w.size(); ++i) seen.insert(pack(b.data() + i, n));
    }
    return seen.size();
}

std::uint64_t count_admissible_words(const std::vector<PeriodicSequence>& observed, int n) {
    require_length(n);
    std::set<std::uint64_t> seen;
    std::vector<std::uint8_t> window(static_cast<std::size_t>(n));
    for (const auto& s : observed) {
        for (int i = 0; i < s.period(); ++i) {
            for (int j = 0; j < n; ++j) window[static_cast<std::size_t>(j)] = s.at(i + j);
            seen.insert(pack(window.data(), n));
        }
    }
    return seen.size();
}

EntropyEstimate entropy_estimate(const std::function<std::uint64_t(int)>& word_count, int n_max) {
    if (n_max < 3) throw ContractError("entropy_estimate: insufficient data (n_max < 3)");
    std::vector<double> logs(static_cast<std::size_t>(n_max) + 1, 0.0);
    std::uint64_t prev = 0;
    for (int n = 1; n <= n_max; ++n) {
        const std::uint64_t s = word_count(n);
        if (s < 1) throw ContractError("entropy_estimate: S(n) must be >= 1");
        if (s < prev) throw ContractError("entropy_estimate: S(n) must be nondecreasing");
        prev = s;
        logs[static_cast<std::size_t>(n)] = std::log(static_cast<double>(s));
    }
    EntropyEstimate est;
    est.n_max = n_max;
    est.point_estimate = logs[static_cast<std::size_t>(n_max)] / n_max;
    // Least squares through three equally spaced points reduces to the outer difference.
    est.slope_estimate =
        0.5 * (logs[static_cast<std::size_t>(n_max)] - logs[static_cast<std::size_t>(n_max - 2)]);
    return est;
}

Rational operator+(const Rational& l, const Rational& r) {
    const std::uint64_t g = std::gcd(l.den, r.den);
    const std::uint64_t den = l.den / g * r.den;
    Rational out{l.num * (den / l.den) + r.num * (den / r.den), den};
    const std::uint64_t h = std::gcd(out.num, out.den);
    if (h > 1) {
        out.num /= h;
        out.den /= h;
    }
    return out;
}

Rational cylinder_mass(const std::vector<std::uint8_t>& word, int level) {
    if (level < 0 || level > 31) throw ContractError("cylinder_mass: level must be in [0, 31]");
    if (static_cast<int>(word.size()) != 2 * level)
        throw ContractError("cylinder_mass: word length must equal 2*level");
    for (auto s : word)
        if (s > 1) throw ContractError("cylinder_mass: symbols must be 0 or 1");
    return {1, std::uint64_t{1} << (2 * level)};
}

bool is_horseshoe_regime(const MapParams& m) {
    if (!m.is_real()) return false;
    const double R = m.radius();
    return m.a().real() - std::abs(m.b().real()) * R > R;
}

SymbolWord code_orbit(const PointC2& p, const MapParams& m, int n_back, int n_fwd) {
    if (n_back < 0 || n_fwd < 1) throw ContractError("code_orbit: need n_back >= 0 and n_fwd >= 1");
    if (!is_horseshoe_regime(m)) throw CodingError("coding hypothesis violated: not in the horseshoe regime");
    const double R = m.radius();
    const int len = n_back + n_fwd;
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(len));

    auto symbol = [](const PointC2& q) -> std::uint8_t { return q.x.real() < 0.0 ? 0 : 1; };
    auto check = [&](const PointC2& q, int j) {
        if (!q.finite() || classify_region(q, R) != Region::B)
            throw CodingError("not codable: orbit leaves B at step " + std::to_string(j));
    };

    PointC2 q = p;
    for (int j = 0; j < n_fwd; ++j) {
        check(q, j);
        bits[static_cast<std::size_t>(n_back + j)] = symbol(q);
        if (j + 1 < n_fwd) q = henon_apply_raw(q, m.a(), m.b());
    }
    q = p;
    for (int j = 1; j <= n_back; ++j) {
        q = henon_inverse_raw(q, m.a(), m.b());
        check(q, -j);
        bits[static_cast<std::size_t>(n_back - j)] = symbol(q);
    }
    return SymbolWord(std::move(bits), n_back);
}

std::vector<std::vector<std::uint8_t>> all_words(int n) {
    if (n < 0 || n > 24) throw ContractError("all_words: n must be in [0, 24]");
    std::vector<std::vector<std::uint8_t>> out;
    const std::uint64_t count = std::uint64_t{1} << n;
    out.reserve(count);
    for (std::uint64_t k = 0; k < count; ++k) {
        std::vector<std::uint8_t> w(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) w[static_cast<std::size_t>(i)] = (k >> (n - 1 - i)) & 1U;
        out.push_back(std::move(w));
    }
    return out;
}

std::vector<std::vector<std::uint8_t>> necklaces(int n) {
    std::vector<std::vector<std::uint8_t>> out;
    for (auto& w : all_words(n)) {
        bool least = true;
        for (int r = 1; r < n && least; ++r) {
            std::vector<std::uint8_t> rot(w.begin() + r, w.end());
            rot.insert(rot.end(), w.begin(), w.begin() + r);
            if (rot < w) least = false;
        }
        if (least) out.push_back(std::move(w));
    }
    return out;
}

}  // namespace henonlab
