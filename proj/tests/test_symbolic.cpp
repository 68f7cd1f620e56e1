#include <gtest/gtest.h>

#include <cmath>
#include <algorithm>
#include <random>
#include <set>

#include "henonlab/periodic.hpp"
#include "henonlab/symbolic.hpp"

using namespace henonlab;

namespace {

SymbolWord random_word(std::mt19937_64& rng, int n, int anchor) {
    std::vector<std::uint8_t> bits(n);
    for (auto& b : bits) b = static_cast<std::uint8_t>(rng() & 1U);
    return SymbolWord(bits, anchor);
}

}  // namespace

TEST(SymbolWord, ParseRoundTrip) {
    const auto w = SymbolWord::parse("01.10");
    EXPECT_EQ(w.anchor(), 2);
    EXPECT_EQ(w.at(0), 1);
    EXPECT_EQ(w.at(-1), 1);
    EXPECT_EQ(w.at(-2), 0);
    EXPECT_EQ(SymbolWord::parse(w.to_string()), w);
    EXPECT_EQ(SymbolWord::parse("0110"), SymbolWord({0, 1, 1, 0}, 0));
}

TEST(SymbolWord, RejectsBadInput) {
    EXPECT_THROW(SymbolWord({}, 0), ContractError);
    EXPECT_THROW(SymbolWord({0, 2}, 0), ContractError);
    EXPECT_THROW(SymbolWord({0, 1}, 2), ContractError);
    EXPECT_THROW(SymbolWord({0, 1}).at(5), std::out_of_range);
}

TEST(Shift, Basics) {
    const auto s = SymbolWord::parse("0.110");
    EXPECT_EQ(shift(s, 0), s);
    const auto t = shift(s, 1);
    for (int j = t.first_position(); j <= t.last_position(); ++j) EXPECT_EQ(t.at(j), s.at(j + 1));
    EXPECT_THROW(shift(s, 5), std::out_of_range);

    const PeriodicSequence p(SymbolWord::parse("01"));
    EXPECT_EQ(shift(p, 1), PeriodicSequence(SymbolWord::parse("10")));
    const PeriodicSequence q(SymbolWord::parse("00101"));
    EXPECT_EQ(shift(q, 5), q);
    EXPECT_EQ(shift(q, -1), shift(q, 4));
}

TEST(PeriodicSequence, MinimalPeriod) {
    EXPECT_EQ(PeriodicSequence(SymbolWord::parse("0101")).minimal_period(), 2);
    EXPECT_EQ(PeriodicSequence(SymbolWord::parse("000")).minimal_period(), 1);
    EXPECT_EQ(PeriodicSequence(SymbolWord::parse("001")).minimal_period(), 3);
}

TEST(SequenceMetric, Examples) {
    const auto s = SymbolWord::parse("0000.00000");
    EXPECT_DOUBLE_EQ(sequence_metric(s, s), 0.0);
    std::vector<std::uint8_t> zeros(41, 0), ones(41, 1);
    // Closed form 1 + 2 (1 - 2^-N) for N = 20.
    EXPECT_NEAR(sequence_metric(SymbolWord(zeros, 20), SymbolWord(ones, 20)), 3.0 - 2.0 * std::ldexp(1.0, -20), 1e-15);
    auto t = s.bits();
    t[4 + 2] = 1;
    EXPECT_DOUBLE_EQ(sequence_metric(s, SymbolWord(t, 4)), 0.25);
}

TEST(SequenceMetric, OutsideCommonSupportContributesZero) {
    EXPECT_DOUBLE_EQ(sequence_metric(SymbolWord::parse("1.0"), SymbolWord::parse(".0111")), 0.0);
}

TEST(SequenceMetric, Axioms) {
    std::mt19937_64 rng(11);
    for (int k = 0; k < 2000; ++k) {
        const auto s = random_word(rng, 15, 7), t = random_word(rng, 15, 7), u = random_word(rng, 15, 7);
        EXPECT_DOUBLE_EQ(sequence_metric(s, t), sequence_metric(t, s));
        EXPECT_LE(sequence_metric(s, u), sequence_metric(s, t) + sequence_metric(t, u) + 1e-15);
        EXPECT_GE(sequence_metric(s, t), 0.0);
        if (s != t) EXPECT_GT(sequence_metric(s, t), 0.0);
    }
}

TEST(CountAdmissibleWords, FullShiftAndConstant) {
    for (int n = 1; n <= 8; ++n) {
        std::vector<SymbolWord> words;
        for (const auto& w : all_words(n)) words.emplace_back(w);
        EXPECT_EQ(count_admissible_words(words, n), 1ULL << n);
        EXPECT_EQ(count_admissible_words(std::vector<SymbolWord>{SymbolWord(std::vector<std::uint8_t>(20, 0))}, n), 1U);
    }
    EXPECT_THROW(count_admissible_words(std::vector<SymbolWord>{}, 0), ContractError);
}

TEST(CountAdmissibleWords, PeriodicReadCyclically) {
    const std::vector<PeriodicSequence> seqs{PeriodicSequence(SymbolWord::parse("01"))};
    EXPECT_EQ(count_admissible_words(seqs, 5), 2U);
}

TEST(EntropyEstimate, Examples) {
    const auto full = entropy_estimate([](int n) { return 1ULL << n; }, 10);
    EXPECT_NEAR(full.point_estimate, std::log(2.0), 1e-15);
    EXPECT_NEAR(full.slope_estimate, std::log(2.0), 1e-14);
    const auto trivial = entropy_estimate([](int) { return std::uint64_t{1}; }, 10);
    EXPECT_EQ(trivial.point_estimate, 0.0);
    EXPECT_EQ(trivial.slope_estimate, 0.0);
    EXPECT_THROW(entropy_estimate([](int) { return std::uint64_t{1}; }, 2), ContractError);
    EXPECT_THROW(entropy_estimate([](int n) { return std::uint64_t(20 - n); }, 5), ContractError);
}

TEST(EntropyEstimate, GoldenMeanShift) {
    // Words avoiding "11", counted by brute force; the oracle is the transfer-matrix eigenvalue.
    auto count = [](int n) {
        std::uint64_t c = 0;
        for (std::uint64_t w = 0; w < (1ULL << n); ++w)
            if ((w & (w >> 1)) == 0) ++c;
        return c;
    };
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    const auto e = entropy_estimate(count, 20);
    EXPECT_LT(std::abs(e.point_estimate - std::log(phi)) / std::log(phi), 0.05);
    EXPECT_LT(std::abs(e.slope_estimate - std::log(phi)) / std::log(phi), 1e-3);
}

TEST(CylinderMass, Levels) {
    EXPECT_EQ(cylinder_mass({}, 0), (Rational{1, 1}));
    for (const auto& w : all_words(2)) EXPECT_EQ(cylinder_mass(w, 1), (Rational{1, 4}));
    Rational total{0, 1};
    for (const auto& w : all_words(6)) total = total + cylinder_mass(w, 3);
    EXPECT_EQ(total, (Rational{1, 1}));
    EXPECT_THROW(cylinder_mass({0, 1, 1}, 1), ContractError);
}

TEST(CylinderMass, ChildrenSumToParent) {
    for (const auto& w : all_words(4)) {
        Rational sum{0, 1};
        for (std::uint8_t l : {0, 1})
            for (std::uint8_t r : {0, 1}) {
                std::vector<std::uint8_t> child{l};
                child.insert(child.end(), w.begin(), w.end());
                child.push_back(r);
                sum = sum + cylinder_mass(child, 3);
            }
        EXPECT_EQ(sum, cylinder_mass(w, 2));
    }
}

TEST(Necklaces, CountsMatchMoebiusFormula) {
    // Number of binary necklaces: (1/n) sum_{d|n} phi(d) 2^{n/d}.
    auto totient = [](int n) {
        int r = n;
        for (int p = 2; p * p <= n; ++p)
            if (n % p == 0) {
                while (n % p == 0) n /= p;
                r -= r / p;
            }
        if (n > 1) r -= r / n;
        return r;
    };
    for (int n = 1; n <= 12; ++n) {
        std::uint64_t s = 0;
        for (int d = 1; d <= n; ++d)
            if (n % d == 0) s += static_cast<std::uint64_t>(totient(d)) << (n / d);
        EXPECT_EQ(necklaces(n).size(), s / n) << n;
    }
}

TEST(HorseshoeRegime, Classification) {
    EXPECT_TRUE(is_horseshoe_regime(MapParams(10.0, 0.3)));
    EXPECT_FALSE(is_horseshoe_regime(MapParams(1.4, 0.3)));
    EXPECT_FALSE(is_horseshoe_regime(MapParams({10.0, 1.0}, 0.3)));
}

TEST(CodeOrbit, FixedPointsAndPeriodTwo) {
    const MapParams m(10.0, 0.3);
    for (const auto& o : fixed_points_closed_form(m)) {
        const auto w = code_orbit(o.points[0], m, 5, 5);
        const std::uint8_t expected = o.points[0].x.real() < 0 ? 0 : 1;
        for (auto bit : w.bits()) EXPECT_EQ(bit, expected);
    }
    // Period-2 orbit: x0 + x1 = 1 + b, x0 x1 = (1+b)^2 - a.
    const double s = 1.3, p = s * s - 10.0;
    const double x0 = (s + std::sqrt(s * s - 4 * p)) / 2, x1 = s - x0;
    const auto w = code_orbit({x0, x1}, m, 4, 4);
    for (int j = w.first_position(); j <= w.last_position(); ++j) EXPECT_EQ(w.at(j), (j % 2 == 0) ? 1 : 0);
}

TEST(CodeOrbit, Equivariance) {
    const MapParams m(10.0, 0.3);
    const auto set = periodic_points_2d(m, 7, default_periodic_budget(7), 1);
    for (const auto& o : set.orbits) {
        const PointC2 p = o.points[0];
        const auto w0 = code_orbit(p, m, 6, 6);
        const auto w1 = code_orbit(henon_apply(p, m), m, 6, 6);
        const auto sw = shift(w0, 1);
        for (int j = -5; j <= 4; ++j) EXPECT_EQ(sw.at(j), w1.at(j));
    }
}

TEST(CodeOrbit, Errors) {
    EXPECT_THROW(code_orbit({0.0, 0.0}, MapParams(1.4, 0.3), 2, 2), CodingError);
    const MapParams m(10.0, 0.3);
    EXPECT_THROW(code_orbit({0.0, 0.0}, m, 2, 2), CodingError);
}

TEST(CodeOrbit, ConjugacyOnPeriodicPoints) {
    const MapParams m(10.0, 0.3);
    for (int n = 1; n <= 8; ++n) {
        const auto set = periodic_points_2d(m, n, default_periodic_budget(n), 1);
        ASSERT_TRUE(set.complete);
        std::set<std::vector<std::uint8_t>> seen;
        for (const auto& o : set.minimal()) {
            const auto w = code_orbit(o.points[0], m, 0, n);
            // Canonical rotation of the period word.
            auto best = w.bits();
            auto rot = best;
            for (int r = 0; r < n; ++r) {
                std::rotate(rot.begin(), rot.begin() + 1, rot.end());
                best = std::min(best, rot);
            }
            EXPECT_TRUE(seen.insert(best).second) << "duplicate code at n=" << n;
        }
        std::size_t primitive = 0;
        for (const auto& w : necklaces(n))
            if (PeriodicSequence(SymbolWord(w)).minimal_period() == n) {
                ++primitive;
                EXPECT_TRUE(seen.count(w)) << "necklace not realized at n=" << n;
            }
        EXPECT_EQ(seen.size(), primitive);
    }
}
