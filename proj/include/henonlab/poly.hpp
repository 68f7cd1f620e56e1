#pragma once

#include <functional>
#include <vector>

#include "henonlab/errors.hpp"

namespace henonlab {

/// Monic polynomial of degree >= 2, coefficients lowest order first.
class Poly {
public:
    /// Throws ContractError unless the leading coefficient is exactly 1 and degree >= 2.
    explicit Poly(std::vector<Complex> coefficients);

    /// z^2 + c
    static Poly quadratic(Complex c);

    int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
    const std::vector<Complex>& coefficients() const noexcept { return coeffs_; }

    Complex operator()(Complex z) const;
    Complex derivative(Complex z) const;

    /// r = 1 + sum_{k<d} |c_k|; |z| > r implies |f(z)| > |z|, so K lies in |z| <= r.
    double escape_radius() const noexcept { return escape_radius_; }

    /// sum_{k<d} |c_k| |z|^(k-d): relative size of the lower-order terms at z.
    double tail_ratio(Complex z) const;

private:
    std::vector<Complex> coeffs_;
    double escape_radius_;
};

struct RootSolve {
    std::vector<Complex> roots;
    int iterations = 0;
    bool converged = false;
};

/// Simultaneous (Aberth-Ehrlich) iteration for the `initial.size()` roots of a
/// monic polynomial given only through its Newton ratio p(z)/p'(z). Initial
/// guesses must be pairwise distinct.
RootSolve aberth_roots(const std::function<Complex(Complex)>& newton_ratio, std::vector<Complex> initial,
                       int max_iterations = 500, double tol = 1e-14);

/// All roots of f(z) = w with multiplicity. Closed form for quadratics,
/// Aberth iteration plus Newton polish otherwise.
std::vector<Complex> solve_preimages(const Poly& f, Complex w);

}  // namespace henonlab
