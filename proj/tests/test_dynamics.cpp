#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "henonlab/dynamics.hpp"
#include "henonlab/periodic.hpp"

using namespace henonlab;

namespace {

// Independent reference for the map, written out from the formula.
PointC2 reference_apply(const PointC2& p, Complex a, Complex b) { return {a - p.x * p.x - b * p.y, p.x}; }

PointC2 random_point(std::mt19937_64& rng, double radius) {
    std::uniform_real_distribution<double> u(-radius, radius);
    return {{u(rng), u(rng)}, {u(rng), u(rng)}};
}

double rel_err(const PointC2& p, const PointC2& q) { return distance(p, q) / std::max(1.0, distance(q, {})); }

}  // namespace

TEST(HenonApply, Examples) {
    EXPECT_EQ(henon_apply({0.0, 0.0}, MapParams(0.0, 1.0)), (PointC2{0.0, 0.0}));
    EXPECT_EQ(henon_apply({1.0, 1.0}, MapParams(2.0, 1.0)), (PointC2{0.0, 1.0}));
}

TEST(HenonApply, MatchesReferenceFormula) {
    std::mt19937_64 rng(1);
    const MapParams m({1.4, 0.2}, {0.3, -0.1});
    for (int k = 0; k < 100; ++k) {
        const PointC2 p = random_point(rng, 3.0);
        EXPECT_LT(rel_err(henon_apply(p, m), reference_apply(p, m.a(), m.b())), 1e-15);
    }
}

TEST(HenonApply, OverflowCarriesLastFiniteIterate) {
    const MapParams m(1.0, 0.5);
    const PointC2 p{1e200, 0.0};
    try {
        henon_apply(p, m);
        FAIL() << "expected OverflowError";
    } catch (const OverflowError& e) {
        EXPECT_EQ(e.last_finite(), p);
    }
}

TEST(HenonInverse, Examples) {
    EXPECT_EQ(henon_inverse({0.0, 1.0}, MapParams(2.0, 1.0)), (PointC2{1.0, 1.0}));
    EXPECT_EQ(henon_inverse({1.0, 0.0}, MapParams(1.0, 0.5)), (PointC2{0.0, 0.0}));
}

TEST(HenonInverse, ZeroBIsParameterError) {
    EXPECT_THROW(MapParams(1.0, 0.0), ParameterError);
    EXPECT_THROW(escape_radius(1.0, 0.0), ParameterError);
}

TEST(HenonInverse, InvolutionOnBidisk) {
    std::mt19937_64 rng(2);
    for (const auto& m : {MapParams(10.0, 0.3), MapParams(3.0, -0.5), MapParams({1.4, 0.2}, 0.3)}) {
        for (int k = 0; k < 1000; ++k) {
            const PointC2 p = random_point(rng, m.radius() / std::sqrt(2.0));
            EXPECT_LT(rel_err(henon_inverse(henon_apply(p, m), m), p), 1e-12);
            EXPECT_LT(rel_err(henon_apply(henon_inverse(p, m), m), p), 1e-12);
        }
    }
}

TEST(Derivative, AtOriginAndDeterminant) {
    const MapParams m({0.5, 0.1}, {0.3, 0.2});
    const Mat2 d0 = derivative({0.0, 0.0}, m);
    EXPECT_EQ(d0.a00, Complex{});
    EXPECT_EQ(d0.a01, -m.b());
    EXPECT_EQ(d0.a10, Complex{1.0});
    EXPECT_EQ(d0.a11, Complex{});
    std::mt19937_64 rng(3);
    for (int k = 0; k < 50; ++k) {
        const Mat2 d = derivative(random_point(rng, 5.0), m);
        EXPECT_LE(std::abs(d.det() - m.b()), 1e-14 * std::abs(m.b()));
    }
}

TEST(Derivative, ChainRuleAgainstFiniteDifferences) {
    const MapParams m(1.4, 0.3);
    std::mt19937_64 rng(4);
    const double h = 1e-6;
    for (int k = 0; k < 20; ++k) {
        const PointC2 p = random_point(rng, 1.0);
        const Mat2 analytic = derivative(henon_apply(p, m), m) * derivative(p, m);
        auto f2 = [&](const PointC2& q) { return henon_apply(henon_apply(q, m), m); };
        // Holomorphic map: the complex derivative along each coordinate axis.
        const PointC2 dx = Complex(1.0 / (2 * h)) * (f2(p + PointC2{h, 0.0}) - f2(p - PointC2{h, 0.0}));
        const PointC2 dy = Complex(1.0 / (2 * h)) * (f2(p + PointC2{0.0, h}) - f2(p - PointC2{0.0, h}));
        const double scale = std::max({std::abs(analytic.a00), std::abs(analytic.a01), 1.0});
        EXPECT_LT(std::abs(dx.x - analytic.a00) / scale, 1e-6);
        EXPECT_LT(std::abs(dx.y - analytic.a10) / scale, 1e-6);
        EXPECT_LT(std::abs(dy.x - analytic.a01) / scale, 1e-6);
        EXPECT_LT(std::abs(dy.y - analytic.a11) / scale, 1e-6);
    }
}

TEST(Factors, CompositionEqualsMap) {
    std::mt19937_64 rng(5);
    const MapParams m({1.1, -0.4}, {0.7, 0.2});
    for (int k = 0; k < 200; ++k) {
        const PointC2 p = random_point(rng, 3.0);
        const PointC2 q = factor_shear(factor_rotate(factor_scale(p, m.b())), m.a());
        EXPECT_LT(distance(q, henon_apply(p, m)), 1e-14 * std::max(1.0, distance(q, {})));
    }
}

TEST(EscapeRadius, SmallAIsNearOne) {
    const double R = escape_radius(0.0, 1e-9);
    EXPECT_NEAR(R, 1.0, 1e-5);
    // Quadratic escape just beyond R.
    const Complex x = 1.001 * R;
    EXPECT_GT(std::abs(-x * x), std::abs(x));
}

TEST(EscapeRadius, MonotoneInAbsA) {
    double prev = 0.0;
    for (double a = 0.0; a <= 50.0; a += 0.5) {
        const double R = escape_radius(Complex(0.0, a), 0.3);
        EXPECT_GE(R, prev);
        prev = R;
    }
}

TEST(EscapeRadius, FiltrationPropertyOnRandomConePoints) {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (const auto& m : {MapParams(10.0, 0.3), MapParams(0.0, 1.0), MapParams({-2.0, 1.0}, {0.0, 1.5})}) {
        const double R = m.radius();
        for (int k = 0; k < 10000; ++k) {
            const double rx = R * (1.0 + 4.0 * u(rng));
            const PointC2 p{std::polar(rx, 6.283185307179586 * u(rng)), std::polar(rx * u(rng), 6.283185307179586 * u(rng))};
            const PointC2 q = henon_apply(p, m);
            ASSERT_EQ(classify_region(q, R), Region::Bminus);
            ASSERT_GT(std::abs(q.x), std::abs(p.x));
            // Same rule backwards for the mirrored cone.
            const PointC2 s{p.y, p.x};
            const PointC2 t = henon_inverse(s, m);
            ASSERT_EQ(classify_region(t, R), Region::Bplus);
            ASSERT_GT(std::abs(t.y), std::abs(s.y));
        }
    }
}

TEST(EscapeRadius, RealFixedPointLiesInsideB) {
    // For real a > 0, b > 0 the fixed point x = -(1+b+sqrt((1+b)^2+4a))/2 has |x| equal to the dominance root.
    const MapParams m(10.0, 0.3);
    for (const auto& o : fixed_points_closed_form(m)) EXPECT_EQ(classify_region(o.points[0], m.radius()), Region::B);
}

TEST(ClassifyRegion, Definitions) {
    const double R = 2.5;
    EXPECT_EQ(classify_region({0.0, 0.0}, R), Region::B);
    EXPECT_EQ(classify_region({2 * R, 0.0}, R), Region::Bminus);
    EXPECT_EQ(classify_region({0.0, 2 * R}, R), Region::Bplus);
    EXPECT_EQ(classify_region({Complex(0.0, 3.0), 3.0}, R), Region::Bminus);
    EXPECT_EQ(classify_region({R, 0.0}, R), Region::Bminus);
}

TEST(ClassifyOrbit, FixedPointStaysBounded) {
    // Rounding error grows by the unstable multiplier (about 8 forward, 26
    // backward here), so the budget stays below the loss-of-accuracy horizon.
    const MapParams m(10.0, 0.3);
    for (const auto& o : fixed_points_closed_form(m)) {
        for (auto dir : {Direction::Forward, Direction::Backward}) {
            const auto rec = classify_orbit(o.points[0], m, dir, 8);
            EXPECT_FALSE(rec.escaped());
            EXPECT_EQ(rec.bounded_up_to, 8);
            for (auto r : rec.region_trace) EXPECT_EQ(r, Region::B);
        }
    }
}

TEST(ClassifyOrbit, StartInConeEscapesImmediately) {
    const MapParams m(10.0, 0.3);
    const auto rec = classify_orbit({10.0 * m.radius(), 0.0}, m, Direction::Forward, 5);
    ASSERT_TRUE(rec.escaped());
    EXPECT_EQ(*rec.escape_step, 0);
}

TEST(ClassifyOrbit, BudgetMustBePositive) {
    EXPECT_THROW(classify_orbit({0.0, 0.0}, MapParams(1.0, 0.3), Direction::Forward, 0), ContractError);
}

TEST(ClassifyOrbit, NeverLeavesBminusOnceEntered) {
    const MapParams m(10.0, 0.3);
    std::mt19937_64 rng(7);
    for (int k = 0; k < 500; ++k) {
        const PointC2 p = random_point(rng, m.radius());
        // Record every step: continue iterating past escape and check the trace.
        PointC2 q = p;
        bool entered = false;
        for (int s = 0; s < 12 && q.finite(); ++s) {
            const Region r = classify_region(q, m.radius());
            if (entered) ASSERT_EQ(r, Region::Bminus);
            entered = entered || r == Region::Bminus;
            q = henon_apply_raw(q, m.a(), m.b());
        }
    }
}

TEST(ClassifyOrbit, OverflowReportedAsEscape) {
    const MapParams m(1.0, 1e-300);
    const auto rec = classify_orbit({0.0, 1e300}, m, Direction::Backward, 5);
    EXPECT_TRUE(rec.escaped());
}

TEST(WideComplex, TracksMagnitudeBeyondDoubleRange) {
    const MapParams m(10.0, 0.3);
    WidePoint p{Complex(10.0), Complex(1.0)};
    PointC2 q{10.0, 1.0};
    for (int k = 0; k < 4; ++k) {
        p = henon_apply_wide(p, m);
        q = henon_apply(q, m);
        EXPECT_NEAR(p.x.log_abs(), std::log(std::abs(q.x)), 1e-12);
    }
    for (int k = 0; k < 40; ++k) p = henon_apply_wide(p, m);
    EXPECT_GT(p.x.log_abs(), 1e9);
    EXPECT_TRUE(std::isfinite(p.x.log_abs()));
}
