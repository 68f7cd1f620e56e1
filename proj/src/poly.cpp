#include "henonlab/poly.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace henonlab {

Poly::Poly(std::vector<Complex> coefficients) : coeffs_(std::move(coefficients)) {
    if (coeffs_.size() < 3) throw ContractError("Poly: degree must be >= 2");
    if (coeffs_.back() != Complex{1.0, 0.0}) throw ContractError("Poly: polynomial must be monic");
    escape_radius_ = 1.0;
    for (std::size_t k = 0; k + 1 < coeffs_.size(); ++k) escape_radius_ += std::abs(coeffs_[k]);
}

Poly Poly::quadratic(Complex c) { return Poly({c, Complex{}, Complex{1.0, 0.0}}); }

Complex Poly::operator()(Complex z) const {
    Complex acc = coeffs_.back();
    for (std::size_t k = coeffs_.size() - 1; k-- > 0;) acc = acc * z + coeffs_[k];
    return acc;
}

Complex Poly::derivative(Complex z) const {
    const int d = degree();
    Complex acc = static_cast<double>(d) * coeffs_.back();
    for (int k = d - 1; k >= 1; --k) acc = acc * z + static_cast<double>(k) * coeffs_[static_cast<std::size_t>(k)];
    return acc;
}

double Poly::tail_ratio(Complex z) const {
    const double r = std::abs(z);
    const int d = degree();
    double s = 0.0;
    for (int k = 0; k < d; ++k) s += std::abs(coeffs_[static_cast<std::size_t>(k)]) * std::pow(r, k - d);
    return s;
}

RootSolve aberth_roots(const std::function<Complex(Complex)>& newton_ratio, std::vector<Complex> initial,
                       int max_iterations, double tol) {
    RootSolve out;
    auto& z = initial;
    const std::size_t n = z.size();
    std::vector<char> done(n, 0);
    std::size_t remaining = n;
    for (int it = 0; it < max_iterations && remaining > 0; ++it) {
        out.iterations = it + 1;
        for (std::size_t i = 0; i < n; ++i) {
            if (done[i]) continue;
            const Complex ratio = newton_ratio(z[i]);
            if (ratio == Complex{}) {
                done[i] = 1;
                --remaining;
                continue;
            }
            Complex repulsion{};
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) repulsion += 1.0 / (z[i] - z[j]);
            const Complex step = ratio / (1.0 - ratio * repulsion);
            if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) continue;
            z[i] -= step;
            if (std::abs(step) <= tol * (1.0 + std::abs(z[i]))) {
                done[i] = 1;
                --remaining;
            }
        }
    }
    out.converged = remaining == 0;
    out.roots = std::move(z);
    return out;
}

namespace {

std::vector<Complex> quadratic_roots(Complex c0, Complex c1) {
    // z^2 + c1 z + c0 = 0, computed without cancellation.
    const Complex disc = std::sqrt(c1 * c1 - 4.0 * c0);
    const Complex s = (std::real(std::conj(c1) * disc) >= 0.0) ? disc : -disc;
    const Complex q = -0.5 * (c1 + s);
    if (q == Complex{}) return {Complex{}, Complex{}};
    return {q, c0 / q};
}

}  // namespace

std::vector<Complex> solve_preimages(const Poly& f, Complex w) {
    const auto& c = f.coefficients();
    if (f.degree() == 2) return quadratic_roots(c[0] - w, c[1]);

    std::vector<Complex> shifted = c;
    shifted[0] -= w;
    const Poly g(shifted);
    const int d = g.degree();
    double bound = 0.0;
    for (int k = 0; k < d; ++k) bound = std::max(bound, std::abs(shifted[static_cast<std::size_t>(k)]));
    const double radius = 1.0 + bound;
    std::vector<Complex> guess;
    guess.reserve(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k)
        guess.push_back(std::polar(radius, 2.0 * std::numbers::pi * k / d + 0.4));
    auto ratio = [&](Complex z) {
        const Complex dz = g.derivative(z);
        return dz == Complex{} ? Complex{} : g(z) / dz;
    };
    RootSolve solved = aberth_roots(ratio, std::move(guess));
    for (auto& r : solved.roots) {
        for (int k = 0; k < 3; ++k) {
            const Complex dz = g.derivative(r);
            if (dz == Complex{}) break;
            r -= g(r) / dz;
        }
    }
    return solved.roots;
}

}  // namespace henonlab
