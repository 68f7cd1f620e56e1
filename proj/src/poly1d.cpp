#include "henonlab/poly1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace henonlab {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

namespace {

constexpr double kPreimageResidual = 1e-9;
constexpr double kClusterRadius = 1e-7;

// d^n, or 0 if it exceeds cap.
std::uint64_t checked_power(int d, int n, std::uint64_t cap) {
    std::uint64_t v = 1;
    for (int i = 0; i < n; ++i) {
        if (v > cap / static_cast<std::uint64_t>(d)) return 0;
        v *= static_cast<std::uint64_t>(d);
    }
    return v <= cap ? v : 0;
}

std::vector<Complex> checked_preimages(const Poly& f, Complex w) {
    std::vector<Complex> roots = solve_preimages(f, w);
    double worst = 0.0;
    for (auto r : roots) worst = std::max(worst, std::abs(f(r) - w));
    if (!(worst <= kPreimageResidual * std::max(1.0, std::abs(w))))
        throw RootFindError("preimage root-finder did not converge", worst);
    return roots;
}

bool lex_less(Complex l, Complex r) {
    if (l.real() != r.real()) return l.real() < r.real();
    return l.imag() < r.imag();
}

void merge_clusters(std::vector<Complex>& roots) {
    const std::size_t n = roots.size();
    std::vector<int> label(n, -1);
    int next = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (label[i] >= 0) continue;
        label[i] = next;
        std::vector<std::size_t> members{i};
        for (std::size_t k = 0; k < members.size(); ++k)
            for (std::size_t j = i + 1; j < n; ++j)
                if (label[j] < 0 && std::abs(roots[members[k]] - roots[j]) < kClusterRadius) {
                    label[j] = next;
                    members.push_back(j);
                }
        if (members.size() > 1) {
            Complex mean{};
            for (auto m : members) mean += roots[m];
            mean /= static_cast<double>(members.size());
            for (auto m : members) roots[m] = mean;
        }
        ++next;
    }
}

}  // namespace

PreimageTree preimages(const Poly& f, Complex c, int n, const PreimageMode& mode, std::uint64_t cap) {
    if (n < 1) throw ContractError("preimages: depth must be >= 1");
    PreimageTree tree;
    tree.root = c;
    tree.levels.push_back({c});

    if (const auto* sampled = std::get_if<SampledPreimages>(&mode)) {
        if (sampled->walks < 1) throw ContractError("preimages: walks must be >= 1");
        tree.sampled = true;
        const int d = f.degree();
        tree.levels.resize(static_cast<std::size_t>(n) + 1);
        for (int k = 1; k <= n; ++k) tree.levels[static_cast<std::size_t>(k)].resize(static_cast<std::size_t>(sampled->walks));
        for (int w = 0; w < sampled->walks; ++w) {
            std::mt19937_64 rng(splitmix64(sampled->seed ^ splitmix64(static_cast<std::uint64_t>(w))));
            Complex z = c;
            for (int k = 1; k <= n; ++k) {
                const auto roots = checked_preimages(f, z);
                z = roots[rng() % static_cast<std::uint64_t>(d)];
                tree.levels[static_cast<std::size_t>(k)][static_cast<std::size_t>(w)] = z;
            }
        }
        return tree;
    }

    if (checked_power(f.degree(), n, cap) == 0)
        throw ContractError("preimages: d^n exceeds the configured cap; use sampled mode");
    for (int k = 1; k <= n; ++k) {
        const auto& parent = tree.levels.back();
        std::vector<Complex> level;
        level.reserve(parent.size() * static_cast<std::size_t>(f.degree()));
        for (auto w : parent) {
            const auto roots = checked_preimages(f, w);
            level.insert(level.end(), roots.begin(), roots.end());
        }
        tree.levels.push_back(std::move(level));
    }
    return tree;
}

Exceptionality exceptional_check(const Poly& f, Complex c, int probe_depth) {
    if (probe_depth < 2) throw ContractError("exceptional_check: probe_depth must be >= 2");
    std::vector<Complex> seen{c};
    std::vector<Complex> frontier{c};
    auto is_new = [&](Complex z) {
        return std::none_of(seen.begin(), seen.end(), [&](Complex s) { return std::abs(s - z) < 1e-9; });
    };
    for (int k = 1; k <= probe_depth && !frontier.empty(); ++k) {
        std::vector<Complex> next;
        for (auto w : frontier) {
            for (auto z : solve_preimages(f, w)) {
                if (!is_new(z)) continue;
                seen.push_back(z);
                next.push_back(z);
                if (seen.size() >= 3) return Exceptionality::Nonexceptional;
            }
        }
        frontier = std::move(next);
    }
    return Exceptionality::Exceptional;
}

namespace {

// Newton ratio of P(z) = f^n(z) - z evaluated through the composition, so
// that no expanded coefficients are needed. Once an iterate is huge the
// ratio F/F' shrinks by exactly 1/d per further step to working precision.
Complex periodic_newton_ratio(const Poly& f, int n, Complex z) {
    constexpr double kHuge = 1e50;
    const double inv_d = 1.0 / f.degree();
    Complex F = z;
    Complex D{1.0, 0.0};
    for (int k = 0; k < n; ++k) {
        if (std::abs(F) > kHuge) return (F / D) * std::pow(inv_d, n - k);
        D = f.derivative(F) * D;
        F = f(F);
    }
    const Complex denom = D - 1.0;
    if (denom == Complex{}) return Complex{1e-12, 0.0};
    return (F - z) / denom;
}

Complex iterate(const Poly& f, int n, Complex z) {
    for (int k = 0; k < n; ++k) z = f(z);
    return z;
}

}  // namespace

std::vector<Complex> periodic_points_1d(const Poly& f, int n, std::uint64_t cap) {
    if (n < 1) throw ContractError("periodic_points_1d: n must be >= 1");
    const int d = f.degree();
    const std::uint64_t count = checked_power(d, n, cap);
    if (count == 0)
        throw ContractError("periodic_points_1d: d^n exceeds the configured cap; use sampled modes");

    // Start from the level-n preimages of the largest fixed point: they
    // already follow the equilibrium measure the periodic points converge to.
    std::vector<Complex> fixed_coeffs = f.coefficients();
    fixed_coeffs[1] -= 1.0;
    auto fixed = solve_preimages(Poly(fixed_coeffs), Complex{});
    const Complex beta = *std::max_element(fixed.begin(), fixed.end(),
                                           [](Complex l, Complex r) { return std::abs(l) < std::abs(r); });
    std::vector<Complex> guess = preimages(f, beta, n, FullPreimages{}, cap).levels.back();
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    const double jitter = 1e-3 / static_cast<double>(count);
    for (std::size_t k = 0; k < guess.size(); ++k)
        guess[k] += std::polar(jitter * (1.0 + static_cast<double>(k % 7)), golden * static_cast<double>(k));

    auto ratio = [&](Complex z) { return periodic_newton_ratio(f, n, z); };
    RootSolve solved = aberth_roots(ratio, std::move(guess), 1000);
    std::vector<Complex> roots = std::move(solved.roots);
    for (auto& r : roots)
        for (int k = 0; k < 2; ++k) {
            const Complex step = periodic_newton_ratio(f, n, r);
            if (std::isfinite(step.real()) && std::isfinite(step.imag()) && std::abs(step) < 1e-6) r -= step;
        }

    double worst = 0.0;
    bool ok = true;
    for (auto r : roots) {
        const double residual = std::abs(iterate(f, n, r) - r);
        // Accept |f^n(z) - z| < 1e-10 * max(1, |z|)^(d^n), compared in log form.
        const double log_scale = static_cast<double>(count) * std::log(std::max(1.0, std::abs(r)));
        const bool pass = std::isfinite(residual) ? (std::log(residual) < std::log(1e-10) + log_scale)
                                                  : log_scale > 700.0;
        if (!pass) ok = false;
        if (std::isfinite(residual)) worst = std::max(worst, residual);
    }
    if (!ok) throw RootFindError("periodic_points_1d: residual test failed", worst);

    merge_clusters(roots);
    std::sort(roots.begin(), roots.end(), lex_less);
    return roots;
}

DiscreteMeasure brolin_measure(const Poly& f, const BrolinMode& mode) {
    const auto d = static_cast<std::uint64_t>(f.degree());
    if (const auto* pre = std::get_if<PreimageMeasure>(&mode)) {
        if (exceptional_check(f, pre->c, 4) == Exceptionality::Exceptional)
            throw ContractError("brolin_measure: seed point is exceptional (backward orbit has < 3 points)");
        auto tree = preimages(f, pre->c, pre->depth, FullPreimages{});
        std::uint64_t denom = 1;
        for (int k = 0; k < pre->depth; ++k) denom *= d;
        auto mu = DiscreteMeasure::uniform_1d(tree.levels.back(), denom);
        mu.provenance = "preimages depth " + std::to_string(pre->depth);
        return mu;
    }
    const auto& per = std::get<PeriodicMeasure>(mode);
    auto pts = periodic_points_1d(f, per.period);
    auto mu = DiscreteMeasure::uniform_1d(pts, static_cast<std::uint64_t>(pts.size()));
    mu.provenance = "periodic points period " + std::to_string(per.period);
    return mu;
}

std::vector<CloudPoint> julia_render_points(const Poly& f, Complex c, int walks, int depth, int burn_in,
                                            std::uint64_t rng_seed, const ParallelFor& parallel) {
    if (walks < 1 || depth < 1) throw ContractError("julia_render_points: walks and depth must be >= 1");
    if (burn_in < 0 || burn_in >= depth) throw ContractError("julia_render_points: need 0 <= burn_in < depth");
    if (exceptional_check(f, c, 4) == Exceptionality::Exceptional)
        throw ContractError("julia_render_points: seed point is exceptional (backward orbit has < 3 points)");

    const auto d = static_cast<std::uint64_t>(f.degree());
    const std::size_t kept = static_cast<std::size_t>(depth - burn_in);
    std::vector<CloudPoint> cloud(static_cast<std::size_t>(walks) * kept);
    parallel(static_cast<std::size_t>(walks), [&](std::size_t w) {
        std::mt19937_64 rng(splitmix64(rng_seed ^ splitmix64(w)));
        Complex z = c;
        for (int level = 1; level <= depth; ++level) {
            const auto roots = checked_preimages(f, z);
            z = roots[rng() % d];
            if (level > burn_in)
                cloud[w * kept + static_cast<std::size_t>(level - burn_in - 1)] = {z, level};
        }
    });
    std::sort(cloud.begin(), cloud.end(), [](const CloudPoint& l, const CloudPoint& r) {
        if (l.level != r.level) return l.level < r.level;
        return lex_less(l.z, r.z);
    });
    return cloud;
}

}  // namespace henonlab
