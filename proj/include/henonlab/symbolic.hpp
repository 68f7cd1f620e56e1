#pragma once

// Shift-space combinatorics over the alphabet {0, 1}.

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "henonlab/dynamics.hpp"

namespace henonlab {

/// Finite window of a bi-infinite 0/1 sequence. bits[anchor] is position 0,
/// bits[anchor + j] is position j.
class SymbolWord {
public:
    /// Throws ContractError for an empty word, a symbol outside {0,1} or an anchor out of range.
    SymbolWord(std::vector<std::uint8_t> bits, int anchor = 0);

    /// Parses "0110" (anchor 0) or "01.10" where '.' precedes position 0.
    static SymbolWord parse(std::string_view text);

    const std::vector<std::uint8_t>& bits() const noexcept { return bits_; }
    int anchor() const noexcept { return anchor_; }
    int size() const noexcept { return static_cast<int>(bits_.size()); }
    int first_position() const noexcept { return -anchor_; }
    int last_position() const noexcept { return size() - 1 - anchor_; }
    bool covers(int j) const noexcept { return j >= first_position() && j <= last_position(); }
    /// Symbol s_j; throws std::out_of_range outside the support.
    std::uint8_t at(int j) const;

    /// Serialized form; inverse of parse().
    std::string to_string() const;

    friend bool operator==(const SymbolWord&, const SymbolWord&) = default;

private:
    std::vector<std::uint8_t> bits_;
    int anchor_;
};

/// A periodic sequence, represented by one period starting at position 0.
class PeriodicSequence {
public:
    explicit PeriodicSequence(SymbolWord period_word);

    const SymbolWord& period_word() const noexcept { return word_; }
    int period() const noexcept { return word_.size(); }
    std::uint8_t at(int j) const;
    /// Smallest p dividing period() such that the sequence is p-periodic.
    int minimal_period() const;

    friend bool operator==(const PeriodicSequence&, const PeriodicSequence&) = default;

private:
    SymbolWord word_;
};

/// Left shift by k: the result satisfies shift(s,k)_j = s_{j+k}.
/// Throws std::out_of_range if position 0 would leave the finite support.
SymbolWord shift(const SymbolWord& s, int k);
PeriodicSequence shift(const PeriodicSequence& s, int k);

/// Sum over the common support of |s_j - t_j| 2^-|j|. Positions covered by
/// only one word (or neither) contribute 0.
double sequence_metric(const SymbolWord& s, const SymbolWord& t);

/// Distinct length-n factors of the finite words. Throws ContractError for n < 1.
std::uint64_t count_admissible_words(const std::vector<SymbolWord>& observed, int n);
/// Distinct length-n factors of the periodic sequences (read cyclically).
std::uint64_t count_admissible_words(const std::vector<PeriodicSequence>& observed, int n);

struct EntropyEstimate {
    /// (1/n_max) log S(n_max)
    double point_estimate = 0.0;
    /// Least-squares slope of log S(n) over n_max-2 .. n_max.
    double slope_estimate = 0.0;
    int n_max = 0;
};

/// Throws ContractError for n_max < 3 or S(n) < 1, and if S decreases on 1..n_max.
EntropyEstimate entropy_estimate(const std::function<std::uint64_t(int)>& word_count, int n_max);

/// Exact dyadic-friendly rational with unsigned 64-bit parts.
struct Rational {
    std::uint64_t num = 0;
    std::uint64_t den = 1;

    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
    friend bool operator==(const Rational& l, const Rational& r) {
        return static_cast<unsigned __int128>(l.num) * r.den ==
               static_cast<unsigned __int128>(r.num) * l.den;
    }
};

Rational operator+(const Rational& l, const Rational& r);

/// Mass 2^-2n of the level-n box coded by `word` (n backward symbols followed
/// by n forward ones). Throws ContractError if word length != 2*level or level > 31.
Rational cylinder_mass(const std::vector<std::uint8_t>& word, int level);

/// Real parameters for which the tip of f(B) lies outside B:
/// a - |b| R > R. In this regime K is conjugate to the full 2-shift.
bool is_horseshoe_regime(const MapParams& m);

/// Raised when the sign-of-Re(x) strip labelling cannot be trusted.
class CodingError : public ContractError {
public:
    using ContractError::ContractError;
};

/// Symbols s_j, j = -n_back .. n_fwd-1: 0 if Re(pi1 f^j(p)) < 0, else 1.
/// Throws CodingError ("coding hypothesis violated") outside the horseshoe
/// regime and ("not codable") if the orbit leaves B inside the window.
SymbolWord code_orbit(const PointC2& p, const MapParams& m, int n_back, int n_fwd);

/// All binary words of length n in lexicographic order.
std::vector<std::vector<std::uint8_t>> all_words(int n);

/// Canonical necklace representatives of length n (lexicographically least rotation).
std::vector<std::vector<std::uint8_t>> necklaces(int n);

}  // namespace henonlab
