#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "henonlab/poly1d.hpp"
#include "henonlab/potential.hpp"

using namespace henonlab;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool contains(const std::vector<Complex>& pts, Complex z, double tol) {
    return std::any_of(pts.begin(), pts.end(), [&](Complex w) { return std::abs(w - z) < tol; });
}

}  // namespace

TEST(Poly, Construction) {
    EXPECT_THROW(Poly({1.0, 2.0}), ContractError);
    EXPECT_THROW(Poly({1.0, 0.0, 2.0}), ContractError);
    const Poly f({Complex(1.0), Complex(-2.0), Complex(1.0)});
    EXPECT_EQ(f.degree(), 2);
    EXPECT_EQ(f(3.0), Complex(4.0));
    EXPECT_EQ(f.derivative(3.0), Complex(4.0));
    EXPECT_DOUBLE_EQ(f.escape_radius(), 4.0);
}

TEST(SolvePreimages, ReproduceTarget) {
    const Poly f({Complex(0.1, 0.2), Complex(-1.0), Complex(0.0), Complex(0.5), Complex(1.0)});
    for (Complex w : {Complex(0.0), Complex(2.0, -1.0), Complex(-7.0, 3.0)}) {
        const auto roots = solve_preimages(f, w);
        ASSERT_EQ(roots.size(), 4U);
        for (Complex z : roots) EXPECT_LT(std::abs(f(z) - w), 1e-10 * std::max(1.0, std::abs(w)));
    }
}

TEST(Preimages, SquareMapRootsOfUnity) {
    const auto tree = preimages(Poly::quadratic(0.0), 1.0, 3, FullPreimages{});
    ASSERT_EQ(tree.levels[3].size(), 8U);
    for (int k = 0; k < 8; ++k) EXPECT_TRUE(contains(tree.levels[3], std::polar(1.0, kTwoPi * k / 8), 1e-12));
    const auto zero = preimages(Poly::quadratic(0.0), 0.0, 4, FullPreimages{});
    for (const auto& level : zero.levels)
        for (Complex z : level) EXPECT_EQ(z, Complex(0.0));
    const auto m1 = preimages(Poly::quadratic(-1.0), 1.0, 1, FullPreimages{});
    EXPECT_TRUE(contains(m1.levels[1], std::sqrt(2.0), 1e-15));
    EXPECT_TRUE(contains(m1.levels[1], -std::sqrt(2.0), 1e-15));
}

TEST(Preimages, ConsistencyAndCaps) {
    const Poly f = Poly::quadratic(Complex(-0.4, 0.6));
    const auto tree = preimages(f, Complex(0.3, 0.0), 8, FullPreimages{});
    for (std::size_t k = 1; k < tree.levels.size(); ++k) {
        ASSERT_EQ(tree.levels[k].size(), std::size_t{1} << k);
        for (std::size_t i = 0; i < tree.levels[k].size(); ++i)
            EXPECT_LT(std::abs(f(tree.levels[k][i]) - tree.levels[k - 1][i / 2]), 1e-9);
    }
    EXPECT_THROW(preimages(f, 0.0, 0, FullPreimages{}), ContractError);
    EXPECT_THROW(preimages(f, 0.0, 12, FullPreimages{}, 1000), ContractError);
    const auto walks = preimages(f, 0.3, 30, SampledPreimages{5, 9});
    EXPECT_TRUE(walks.sampled);
    EXPECT_EQ(walks.levels[30].size(), 5U);
}

TEST(Exceptional, Examples) {
    EXPECT_EQ(exceptional_check(Poly::quadratic(0.0), 0.0, 5), Exceptionality::Exceptional);
    EXPECT_EQ(exceptional_check(Poly::quadratic(0.0), 1.0, 5), Exceptionality::Nonexceptional);
    EXPECT_EQ(exceptional_check(Poly::quadratic(-2.0), 2.0, 5), Exceptionality::Nonexceptional);
}

TEST(PeriodicPoints1d, SquareMap) {
    const Poly f = Poly::quadratic(0.0);
    const auto p1 = periodic_points_1d(f, 1);
    ASSERT_EQ(p1.size(), 2U);
    EXPECT_TRUE(contains(p1, 0.0, 1e-12));
    EXPECT_TRUE(contains(p1, 1.0, 1e-12));
    const auto p2 = periodic_points_1d(f, 2);
    ASSERT_EQ(p2.size(), 4U);
    for (Complex z : {Complex(0.0), Complex(1.0), std::polar(1.0, kTwoPi / 3), std::polar(1.0, 2 * kTwoPi / 3)})
        EXPECT_TRUE(contains(p2, z, 1e-12));
}

TEST(PeriodicPoints1d, CountsAndResiduals) {
    const Poly f = Poly::quadratic(Complex(-0.12, 0.74));
    for (int n = 1; n <= 10; ++n) {
        const auto pts = periodic_points_1d(f, n);
        ASSERT_EQ(pts.size(), std::size_t{1} << n);
        for (Complex z : pts) {
            Complex w = z;
            for (int k = 0; k < n; ++k) w = f(w);
            EXPECT_LT(std::abs(w - z), 1e-8) << n;
            EXPECT_LE(std::abs(z), f.escape_radius());
        }
    }
    EXPECT_THROW(periodic_points_1d(f, 13), ContractError);
}

TEST(PeriodicPoints1d, ParabolicMultiplicity) {
    // z^2 + 1/4 has the double fixed point 1/2.
    const auto pts = periodic_points_1d(Poly::quadratic(0.25), 1);
    ASSERT_EQ(pts.size(), 2U);
    EXPECT_NEAR(std::abs(pts[0] - 0.5), 0.0, 1e-7);
    EXPECT_NEAR(std::abs(pts[1] - 0.5), 0.0, 1e-7);
}

TEST(Brolin, NormalizationAndExceptional) {
    const Poly f = Poly::quadratic(Complex(-0.5, 0.1));
    for (const BrolinMode mode : {BrolinMode(PreimageMeasure{0.7, 6}), BrolinMode(PeriodicMeasure{6})}) {
        const auto mu = brolin_measure(f, mode);
        ASSERT_TRUE(mu.exact_total_mass().has_value());
        EXPECT_EQ(*mu.exact_total_mass(), (Rational{1, 1}));
    }
    EXPECT_THROW(brolin_measure(Poly::quadratic(0.0), PreimageMeasure{0.0, 3}), ContractError);
}

TEST(Brolin, SquareMapMeasures) {
    const auto pre = brolin_measure(Poly::quadratic(0.0), PreimageMeasure{1.0, 10});
    EXPECT_EQ(pre.size(), 1024U);
    EXPECT_NEAR(angular_discrepancy(pre), 0.0, 1e-12);
    const auto per = brolin_measure(Poly::quadratic(0.0), PeriodicMeasure{8});
    EXPECT_EQ(per.size(), 256U);
    int at_zero = 0;
    for (const auto& a : per.atoms()) {
        if (std::abs(a.point.x) < 1e-12) ++at_zero;
        else EXPECT_NEAR(std::abs(a.point.x), 1.0, 1e-12);
    }
    EXPECT_EQ(at_zero, 1);
}

TEST(Brolin, ChebyshevPotentialMatchesArcsineOracle) {
    // Arcsine law on [-2,2]: int log|5 - x| dx / (pi sqrt(4 - x^2)), x = 2 cos t.
    const int nq = 20000;
    double oracle = 0.0;
    for (int k = 0; k < nq; ++k) {
        const double t = std::numbers::pi * (k + 0.5) / nq;
        oracle += std::log(std::abs(5.0 - 2.0 * std::cos(t)));
    }
    oracle /= nq;
    const auto mu = brolin_measure(Poly::quadratic(-2.0), PreimageMeasure{Complex(0.0, 1.0), 12});
    EXPECT_NEAR(potential_of_measure(mu, 5.0), oracle, 0.02);
}

TEST(Brolin, EquidistributionTrend) {
    const Poly f = Poly::quadratic(Complex(0.05, 0.02));
    const TestBattery battery(f.escape_radius());
    double prev = 1e9;
    for (int n : {2, 4, 6, 8}) {
        const double d = compare(brolin_measure(f, PeriodicMeasure{n}), brolin_measure(f, PeriodicMeasure{n + 2}), battery).value;
        EXPECT_LT(d, prev) << n;
        prev = d;
    }
}

TEST(JuliaRender, SquareMapPointsOnCircle) {
    const auto pts = julia_render_points(Poly::quadratic(0.0), Complex(0.3, 0.4), 64, 50, 40, 7);
    EXPECT_EQ(pts.size(), 64U * 10U);
    for (const auto& p : pts) EXPECT_NEAR(std::abs(p.z), 1.0, 1e-6);
    EXPECT_EQ(pts, julia_render_points(Poly::quadratic(0.0), Complex(0.3, 0.4), 64, 50, 40, 7));
}

TEST(JuliaRender, ChebyshevPointsOnSegment) {
    // With z = w + 1/w, G(z) = log|w| and the distance to [-2,2] is at most
    // about 2 G(z) = 2 G(c) / 2^level.
    const Poly f = Poly::quadratic(-2.0);
    const Complex c(0.5, 0.5);
    const double gc = green_poly(c, f).value;
    const auto pts = julia_render_points(f, c, 32, 40, kDefaultBurnIn, 3);
    ASSERT_FALSE(pts.empty());
    for (const auto& p : pts) {
        const double g = gc / std::ldexp(1.0, p.level);
        EXPECT_LT(std::abs(p.z.imag()), 2.1 * g + 1e-12);
        EXPECT_LE(std::abs(p.z.real()), 2.0 + 2.1 * g + 1e-12);
        if (p.level >= 14) EXPECT_LT(std::abs(p.z.imag()), 1e-4);
    }
}

TEST(JuliaRender, IndependentOfScheduling) {
    const ParallelFor reversed = [](std::size_t count, const std::function<void(std::size_t)>& task) {
        for (std::size_t i = count; i-- > 0;) task(i);
    };
    const Poly f = Poly::quadratic(Complex(-0.8, 0.156));
    EXPECT_EQ(julia_render_points(f, 0.1, 40, 30, 10, 5), julia_render_points(f, 0.1, 40, 30, 10, 5, reversed));
}
