#include "henonlab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace henonlab {

namespace {

// Relative margin added to the quadratic-dominance root so that the real
// fixed point at x = -R0 lies strictly inside B.
constexpr double kRadiusMargin = 1e-6;

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

double dominance_root(double abs_a, double abs_b) {
    const double s = 1.0 + abs_b;
    return 0.5 * (s + std::sqrt(s * s + 4.0 * abs_a));
}

}  // namespace

MapParams::MapParams(Complex a, Complex b) : a_(a), b_(b) {
    if (!finite(a) || !finite(b)) throw ParameterError("map parameters must be finite");
    radius_ = escape_radius(a, b);
}

PointC2 henon_apply(const PointC2& p, const MapParams& m) {
    PointC2 q = henon_apply_raw(p, m.a(), m.b());
    if (!q.finite()) throw OverflowError(p, 1);
    return q;
}

PointC2 henon_inverse(const PointC2& q, const MapParams& m) {
    if (m.b() == Complex{}) throw ParameterError("henon_inverse requires b != 0");
    PointC2 p = henon_inverse_raw(q, m.a(), m.b());
    if (!p.finite()) throw OverflowError(q, 1);
    return p;
}

PointC2 factor_scale(const PointC2& p, const Complex& b) { return {p.x, b * p.y}; }
PointC2 factor_rotate(const PointC2& p) { return {-p.y, p.x}; }
PointC2 factor_shear(const PointC2& p, const Complex& a) { return {p.x - p.y * p.y + a, p.y}; }

Mat2 derivative(const PointC2& p, const MapParams& m) {
    return {-2.0 * p.x, -m.b(), Complex{1.0, 0.0}, Complex{}};
}

double escape_radius(Complex a, Complex b) {
    if (b == Complex{}) throw ParameterError("escape_radius requires b != 0");
    const double abs_a = std::abs(a);
    const double abs_b = std::abs(b);
    // Forward: |x'| >= |x|^2 - |a| - |b||x| > |x| for |x| > R0.
    // Backward: |y'| >= (|y|^2 - |a| - |y|)/|b| > |y| gives the same quadratic.
    const double forward = dominance_root(abs_a, abs_b);
    const double backward = dominance_root(abs_a, abs_b);
    return std::max(forward, backward) * (1.0 + kRadiusMargin);
}

const char* to_string(Region r) {
    switch (r) {
        case Region::B: return "B";
        case Region::Bplus: return "B+";
        case Region::Bminus: return "B-";
    }
    return "?";
}

Region classify_region(const PointC2& p, double R) {
    const double ax = std::abs(p.x);
    const double ay = std::abs(p.y);
    if (std::max(ax, ay) < R) return Region::B;
    if (ax >= R && ax >= ay) return Region::Bminus;
    return Region::Bplus;
}

OrbitRecord classify_orbit(const PointC2& p, const MapParams& m, Direction direction, int budget) {
    if (budget < 1) throw ContractError("classify_orbit: budget must be >= 1");
    const double R = m.radius();
    const Region absorbing = direction == Direction::Forward ? Region::Bminus : Region::Bplus;

    OrbitRecord rec;
    rec.start = p;
    rec.direction = direction;
    rec.region_trace.reserve(static_cast<std::size_t>(budget) + 1);

    PointC2 cur = p;
    for (int step = 0;; ++step) {
        const Region r = classify_region(cur, R);
        rec.region_trace.push_back(r);
        rec.final_norm = cur.norm();
        rec.bounded_up_to = step;
        if (r == absorbing) {
            rec.escape_step = step;
            return rec;
        }
        if (step == budget) return rec;
        PointC2 next = direction == Direction::Forward ? henon_apply_raw(cur, m.a(), m.b())
                                                       : henon_inverse_raw(cur, m.a(), m.b());
        if (!next.finite()) {
            rec.overflowed = true;
            rec.escape_step = step + 1;
            rec.bounded_up_to = step;
            rec.final_norm = std::numeric_limits<double>::infinity();
            return rec;
        }
        cur = next;
    }
}

// WideComplex

WideComplex::WideComplex(Complex z) : m_(z), e_(0) { normalize(); }

WideComplex::WideComplex(Complex m, std::int64_t e) : m_(m), e_(e) { normalize(); }

void WideComplex::normalize() {
    const double mag = std::max(std::abs(m_.real()), std::abs(m_.imag()));
    if (mag == 0.0) {
        m_ = {};
        e_ = 0;
        return;
    }
    int shift = 0;
    std::frexp(mag, &shift);
    m_ = {std::ldexp(m_.real(), -shift), std::ldexp(m_.imag(), -shift)};
    e_ += shift;
}

double WideComplex::log_abs() const {
    if (is_zero()) return -std::numeric_limits<double>::infinity();
    return std::log(std::abs(m_)) + static_cast<double>(e_) * std::log(2.0);
}

WideComplex operator*(const WideComplex& l, const WideComplex& r) {
    if (l.is_zero() || r.is_zero()) return {};
    return {l.m_ * r.m_, l.e_ + r.e_};
}

WideComplex operator+(const WideComplex& l, const WideComplex& r) {
    if (l.is_zero()) return r;
    if (r.is_zero()) return l;
    const WideComplex& big = l.e_ >= r.e_ ? l : r;
    const WideComplex& small = l.e_ >= r.e_ ? r : l;
    const std::int64_t gap = big.e_ - small.e_;
    if (gap > 1100) return big;
    const int g = static_cast<int>(gap);
    Complex s{std::ldexp(small.m_.real(), -g), std::ldexp(small.m_.imag(), -g)};
    return {big.m_ + s, big.e_};
}

WideComplex operator-(const WideComplex& z) {
    WideComplex out = z;
    out.m_ = -out.m_;
    return out;
}

WidePoint henon_apply_wide(const WidePoint& p, const MapParams& m) {
    const WideComplex a(m.a());
    const WideComplex b(m.b());
    return {-(p.x * p.x) + a - b * p.y, p.x};
}

}  // namespace henonlab
