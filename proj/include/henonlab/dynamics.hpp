#pragma once

// Complex Hénon maps f(x,y) = (-x^2 + a - b*y, x) on C^2: evaluation,
// inversion, derivatives, the B / B+ / B- filtration and orbit classification.

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "henonlab/errors.hpp"

namespace henonlab {

struct PointC2 {
    Complex x{};
    Complex y{};

    const Complex& pi1() const noexcept { return x; }
    const Complex& pi2() const noexcept { return y; }

    bool finite() const noexcept {
        return std::isfinite(x.real()) && std::isfinite(x.imag()) && std::isfinite(y.real()) &&
               std::isfinite(y.imag());
    }

    /// Sup norm max(|x|, |y|); the filtration is phrased in this norm.
    double norm() const noexcept { return std::max(std::abs(x), std::abs(y)); }

    friend bool operator==(const PointC2&, const PointC2&) = default;
};

inline PointC2 operator-(const PointC2& p, const PointC2& q) { return {p.x - q.x, p.y - q.y}; }
inline PointC2 operator+(const PointC2& p, const PointC2& q) { return {p.x + q.x, p.y + q.y}; }
inline PointC2 operator*(Complex s, const PointC2& p) { return {s * p.x, s * p.y}; }

/// Euclidean distance in C^2 = R^4.
inline double distance(const PointC2& p, const PointC2& q) {
    return std::sqrt(std::norm(p.x - q.x) + std::norm(p.y - q.y));
}

/// Row-major 2x2 complex matrix.
struct Mat2 {
    Complex a00{}, a01{}, a10{}, a11{};

    Complex det() const { return a00 * a11 - a01 * a10; }
    Complex trace() const { return a00 + a11; }

    friend Mat2 operator*(const Mat2& l, const Mat2& r) {
        return {l.a00 * r.a00 + l.a01 * r.a10, l.a00 * r.a01 + l.a01 * r.a11,
                l.a10 * r.a00 + l.a11 * r.a10, l.a10 * r.a01 + l.a11 * r.a11};
    }
};

/// The parameter pair (a, b) together with the derived filtration radius.
class MapParams {
public:
    /// Throws ParameterError if b == 0 or a parameter is not finite.
    MapParams(Complex a, Complex b);

    const Complex& a() const noexcept { return a_; }
    const Complex& b() const noexcept { return b_; }
    double radius() const noexcept { return radius_; }
    bool is_real() const noexcept { return a_.imag() == 0.0 && b_.imag() == 0.0; }

private:
    Complex a_;
    Complex b_;
    double radius_;
};

/// Raised when an iterate leaves the representable range.
class OverflowError : public std::runtime_error {
public:
    OverflowError(const PointC2& last_finite, int step)
        : std::runtime_error("non-finite iterate after step " + std::to_string(step)),
          last_finite_(last_finite), step_(step) {}

    const PointC2& last_finite() const noexcept { return last_finite_; }
    int step() const noexcept { return step_; }

private:
    PointC2 last_finite_;
    int step_;
};

PointC2 henon_apply(const PointC2& p, const MapParams& m);
PointC2 henon_inverse(const PointC2& q, const MapParams& m);

/// Unchecked evaluation; used inside hot loops that do their own finiteness checks.
inline PointC2 henon_apply_raw(const PointC2& p, const Complex& a, const Complex& b) {
    return {-p.x * p.x + a - b * p.y, p.x};
}
inline PointC2 henon_inverse_raw(const PointC2& q, const Complex& a, const Complex& b) {
    return {q.y, (a - q.y * q.y - q.x) / b};
}

/// The three factors with f = f3 o f2 o f1.
PointC2 factor_scale(const PointC2& p, const Complex& b);       // (x, b y)
PointC2 factor_rotate(const PointC2& p);                        // (-y, x)
PointC2 factor_shear(const PointC2& p, const Complex& a);       // (x - y^2 + a, y)

/// Df at p: [[-2x, -b], [1, 0]]. Its determinant is b everywhere.
Mat2 derivative(const PointC2& p, const MapParams& m);

/// Filtration radius. Throws ParameterError for b == 0.
double escape_radius(Complex a, Complex b);

enum class Region { B, Bplus, Bminus };

const char* to_string(Region r);

/// B if max(|x|,|y|) < R; B- if |x| >= R and |x| >= |y| (ties go to B-); B+ otherwise.
Region classify_region(const PointC2& p, double R);

enum class Direction { Forward, Backward };

struct OrbitRecord {
    PointC2 start;
    Direction direction = Direction::Forward;
    /// Step at which the orbit entered the absorbing cone (B- forward, B+ backward).
    std::optional<int> escape_step;
    double final_norm = 0.0;
    std::vector<Region> region_trace;
    int bounded_up_to = 0;
    /// Set when iteration produced non-finite values; the orbit is then reported as escaped.
    bool overflowed = false;

    bool escaped() const noexcept { return escape_step.has_value(); }
};

/// Iterates f (or f^-1) up to `budget` times. Throws ContractError if budget < 1.
OrbitRecord classify_orbit(const PointC2& p, const MapParams& m, Direction direction, int budget);

/// Complex number with a separate binary exponent, so orbits in B- can be
/// followed for many steps without overflow: value = mantissa * 2^exponent.
class WideComplex {
public:
    WideComplex() = default;
    WideComplex(Complex z);  // NOLINT(google-explicit-constructor)

    double log_abs() const;
    Complex mantissa() const noexcept { return m_; }
    std::int64_t exponent() const noexcept { return e_; }
    bool is_zero() const noexcept { return m_ == Complex{}; }

    friend WideComplex operator*(const WideComplex& l, const WideComplex& r);
    friend WideComplex operator+(const WideComplex& l, const WideComplex& r);
    friend WideComplex operator-(const WideComplex& z);
    friend WideComplex operator-(const WideComplex& l, const WideComplex& r) { return l + (-r); }

private:
    WideComplex(Complex m, std::int64_t e);
    void normalize();

    Complex m_{};
    std::int64_t e_ = 0;
};

struct WidePoint {
    WideComplex x;
    WideComplex y;
};

WidePoint henon_apply_wide(const WidePoint& p, const MapParams& m);

}  // namespace henonlab
