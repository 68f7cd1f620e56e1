#include "henonlab/periodic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "henonlab/poly1d.hpp"
#include "henonlab/potential.hpp"
#include "henonlab/symbolic.hpp"

namespace henonlab {

const char* to_string(OrbitClass c) {
    switch (c) {
        case OrbitClass::Saddle: return "saddle";
        case OrbitClass::Sink: return "sink";
        case OrbitClass::Source: return "source";
        case OrbitClass::Nonhyperbolic: return "nonhyperbolic";
    }
    return "?";
}

const char* to_string(EntropyVerdict v) {
    switch (v) {
        case EntropyVerdict::Log2: return "log2";
        case EntropyVerdict::BelowLog2: return "below_log2";
        case EntropyVerdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

namespace {

using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

// Orbit equations in the x-coordinates alone: with p_j = (x_j, x_{j-1}),
// f(p_j) = p_{j+1} iff F_j = x_{j+1} + x_j^2 - a + b x_{j-1} = 0 (indices mod n).
CVec cyclic_residual(const CVec& x, Complex a, Complex b) {
    const Eigen::Index n = x.size();
    CVec F(n);
    for (Eigen::Index j = 0; j < n; ++j)
        F(j) = x((j + 1) % n) + x(j) * x(j) - a + b * x((j + n - 1) % n);
    return F;
}

CMat cyclic_jacobian(const CVec& x, Complex b) {
    const Eigen::Index n = x.size();
    CMat J = CMat::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        J(j, j) += 2.0 * x(j);
        J(j, (j + 1) % n) += 1.0;
        J(j, (j + n - 1) % n) += b;
    }
    return J;
}

double sup_norm(const CVec& v) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < v.size(); ++j) s = std::max(s, std::abs(v(j)));
    return s;
}

bool all_finite(const CVec& v) {
    for (Eigen::Index j = 0; j < v.size(); ++j)
        if (!std::isfinite(v(j).real()) || !std::isfinite(v(j).imag())) return false;
    return true;
}

bool residual_ok(const CVec& x, Complex a, Complex b) {
    if (!all_finite(x)) return false;
    const double s = sup_norm(x);
    return sup_norm(cyclic_residual(x, a, b)) < 1e-9 * (1.0 + s * s);
}

// Plain Newton on the cyclic system; returns false on breakdown.
bool newton_polish(CVec& x, Complex a, Complex b, int max_iter) {
    for (int it = 0; it < max_iter; ++it) {
        const CVec F = cyclic_residual(x, a, b);
        const CVec dx = cyclic_jacobian(x, b).fullPivLu().solve(-F);
        if (!all_finite(dx)) return false;
        x += dx;
        if (sup_norm(dx) <= 1e-15 * (1.0 + sup_norm(x))) break;
    }
    return all_finite(x);
}

double condition_number(const CVec& x, Complex b) {
    Eigen::JacobiSVD<CMat> svd(cyclic_jacobian(x, b));
    const auto& s = svd.singularValues();
    const double lo = s(s.size() - 1);
    return lo > 0.0 ? s(0) / lo : std::numeric_limits<double>::infinity();
}

CVec shift_vec(const CVec& x, Eigen::Index k) {
    const Eigen::Index n = x.size();
    CVec y(n);
    for (Eigen::Index j = 0; j < n; ++j) y(j) = x((j + k) % n);
    return y;
}

bool close(const CVec& u, const CVec& v) {
    const double scale = std::max(1.0, std::max(sup_norm(u), sup_norm(v)));
    return sup_norm(u - v) < kDedupTol * scale;
}

int minimal_period(const CVec& x) {
    const auto n = static_cast<int>(x.size());
    for (int m = 1; m < n; ++m) {
        if (n % m != 0) continue;
        if (close(x, shift_vec(x, m))) return m;
    }
    return n;
}

bool lex_less_point(const PointC2& l, const PointC2& r) {
    const double lv[4] = {l.x.real(), l.x.imag(), l.y.real(), l.y.imag()};
    const double rv[4] = {r.x.real(), r.x.imag(), r.y.real(), r.y.imag()};
    return std::lexicographical_compare(lv, lv + 4, rv, rv + 4);
}

Complex stable_sqrt_branch(Complex w, std::uint8_t symbol) {
    const Complex r = std::sqrt(w);
    // Symbol 0 selects the root with negative real part.
    return symbol == 0 ? (r.real() <= 0.0 ? r : -r) : (r.real() >= 0.0 ? r : -r);
}

}  // namespace

PeriodicOrbit make_orbit(std::vector<PointC2> points, const MapParams& m, int multiplicity) {
    if (points.empty()) throw ContractError("make_orbit: empty orbit");
    PeriodicOrbit o;
    o.period = static_cast<int>(points.size());
    o.multiplicity = multiplicity;
    Mat2 M{1.0, 0.0, 0.0, 1.0};
    // The determinant of the product loses all digits to cancellation once
    // the entries grow; the product of the per-step determinants does not.
    Complex det = 1.0;
    double max_imag = 0.0;
    for (std::size_t k = 0; k < points.size(); ++k) {
        const auto& p = points[k];
        const Mat2 D = derivative(p, m);
        M = D * M;
        det *= D.det();
        const PointC2 img = henon_apply_raw(p, m.a(), m.b());
        o.residual = std::max(o.residual, (img - points[(k + 1) % points.size()]).norm());
        max_imag = std::max({max_imag, std::abs(p.x.imag()), std::abs(p.y.imag())});
    }
    o.is_real = max_imag < kRealityTol;

    const Complex tr = M.trace();
    const Complex sq = std::sqrt(tr * tr - 4.0 * det);
    const Complex plus = 0.5 * (tr + sq);
    const Complex minus = 0.5 * (tr - sq);
    const Complex big = std::abs(plus) >= std::abs(minus) ? plus : minus;
    const Complex small = big == Complex{} ? Complex{} : det / big;
    o.multipliers = {small, big};

    const double ls = std::abs(small);
    const double lb = std::abs(big);
    if (std::abs(ls - 1.0) < kHyperbolicityTol || std::abs(lb - 1.0) < kHyperbolicityTol)
        o.cls = OrbitClass::Nonhyperbolic;
    else if (ls < 1.0 && lb > 1.0)
        o.cls = OrbitClass::Saddle;
    else if (lb < 1.0)
        o.cls = OrbitClass::Sink;
    else
        o.cls = OrbitClass::Source;

    CVec x(o.period);
    for (int k = 0; k < o.period; ++k) x(k) = points[static_cast<std::size_t>(k)].x;
    o.condition = condition_number(x, m.b());
    o.points = std::move(points);
    return o;
}

std::vector<PeriodicOrbit> fixed_points_closed_form(const MapParams& m) {
    const Complex a = m.a();
    const Complex c1 = 1.0 + m.b();
    const Complex disc = c1 * c1 + 4.0 * a;
    const double scale = std::norm(c1) + 4.0 * std::abs(a);
    if (std::abs(disc) <= 1e-14 * scale) {
        const Complex x = -0.5 * c1;
        return {make_orbit({{x, x}}, m, 2)};
    }
    const Complex sq = std::sqrt(disc);
    const Complex s = std::real(std::conj(c1) * sq) >= 0.0 ? sq : -sq;
    const Complex q = -0.5 * (c1 + s);
    const Complex x1 = q;
    const Complex x2 = -a / q;
    std::vector<PeriodicOrbit> out{make_orbit({{x1, x1}}, m), make_orbit({{x2, x2}}, m)};
    std::sort(out.begin(), out.end(),
              [](const PeriodicOrbit& l, const PeriodicOrbit& r) { return lex_less_point(l.points[0], r.points[0]); });
    return out;
}

std::optional<std::vector<Complex>> shadow_periodic(const MapParams& m, const std::vector<std::uint8_t>& word) {
    const auto n = static_cast<Eigen::Index>(word.size());
    if (n < 1) throw ContractError("shadow_periodic: empty word");
    const Complex a = m.a();
    const Complex b = m.b();
    const double start = std::sqrt(std::abs(a));
    CVec x(n);
    for (Eigen::Index j = 0; j < n; ++j) x(j) = word[static_cast<std::size_t>(j)] ? start : -start;
    bool converged = false;
    for (int it = 0; it < 500 && !converged; ++it) {
        double change = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            const Complex w = a - x((j + 1) % n) - b * x((j + n - 1) % n);
            const Complex v = stable_sqrt_branch(w, word[static_cast<std::size_t>(j)]);
            change = std::max(change, std::abs(v - x(j)));
            x(j) = v;
        }
        converged = change <= 1e-15 * (1.0 + sup_norm(x));
    }
    if (!converged || !newton_polish(x, a, b, 3) || !residual_ok(x, a, b)) return std::nullopt;
    for (Eigen::Index j = 0; j < n; ++j)
        if ((x(j).real() < 0.0) != (word[static_cast<std::size_t>(j)] == 0)) return std::nullopt;
    return std::vector<Complex>(x.data(), x.data() + n);
}

std::vector<PeriodicOrbit> PeriodicSet::minimal() const {
    std::vector<PeriodicOrbit> out;
    for (const auto& o : orbits)
        if (o.period == n) out.push_back(o);
    return out;
}

std::vector<PointC2> PeriodicSet::points() const {
    std::vector<PointC2> out;
    for (const auto& o : orbits)
        for (int r = 0; r < o.multiplicity; ++r) out.insert(out.end(), o.points.begin(), o.points.end());
    return out;
}

int default_periodic_budget(int n) { return 2 * (1 << std::min(n, 20)) + 128; }

namespace {

// Total-degree homotopy H(x,t) = (1-t) gamma G(x) + t F(x), G_j = x_j^2 - 1,
// tracked from the 2^n start solutions x_j = +-1 to t = 1.
class HomotopyTracker {
public:
    HomotopyTracker(Complex a, Complex b, Complex gamma) : a_(a), b_(b), gamma_(gamma) {}

    std::optional<CVec> track(CVec x) const {
        double t = 0.0;
        double dt = 0.02;
        int streak = 0;
        for (int step = 0; step < 100000 && t < 1.0; ++step) {
            const double h = std::min(dt, 1.0 - t);
            CVec pred;
            if (!predict(x, t, h, pred)) {
                if (!shrink(dt, streak)) break;
                continue;
            }
            if (correct(pred, t + h)) {
                x = pred;
                t = t + h >= 1.0 - 1e-15 ? 1.0 : t + h;
                if (++streak >= 4) {
                    dt = std::min(2.0 * dt, 0.1);
                    streak = 0;
                }
                if (sup_norm(x) > 1e8) return std::nullopt;
            } else if (!shrink(dt, streak)) {
                break;
            }
        }
        // Singular endpoints slow the tracker down near t = 1; finish with
        // Newton on F itself, which converges (linearly) there as well.
        if (t < 1.0 - 1e-6) return std::nullopt;
        if (!newton_polish(x, a_, b_, 80) || !residual_ok(x, a_, b_)) return std::nullopt;
        return x;
    }

private:
    static bool shrink(double& dt, int& streak) {
        dt *= 0.5;
        streak = 0;
        return dt > 1e-14;
    }

    CVec h_t(const CVec& x) const {
        CVec G = x.cwiseProduct(x) - CVec::Ones(x.size());
        return cyclic_residual(x, a_, b_) - gamma_ * G;
    }

    CMat h_x(const CVec& x, double t) const {
        CMat J = t * cyclic_jacobian(x, b_);
        for (Eigen::Index j = 0; j < x.size(); ++j) J(j, j) += (1.0 - t) * gamma_ * 2.0 * x(j);
        return J;
    }

    CVec h_val(const CVec& x, double t) const {
        CVec G = x.cwiseProduct(x) - CVec::Ones(x.size());
        return (1.0 - t) * gamma_ * G + t * cyclic_residual(x, a_, b_);
    }

    CVec velocity(const CVec& x, double t) const { return h_x(x, t).partialPivLu().solve(-h_t(x)); }

    bool predict(const CVec& x, double t, double h, CVec& out) const {
        const CVec k1 = velocity(x, t);
        const CVec k2 = velocity(x + 0.5 * h * k1, t + 0.5 * h);
        const CVec k3 = velocity(x + 0.5 * h * k2, t + 0.5 * h);
        const CVec k4 = velocity(x + h * k3, t + h);
        out = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        return all_finite(out);
    }

    bool correct(CVec& x, double t) const {
        for (int it = 0; it < 4; ++it) {
            const CVec dx = h_x(x, t).partialPivLu().solve(-h_val(x, t));
            if (!all_finite(dx)) return false;
            const double scale = 1.0 + sup_norm(x);
            if (it == 0 && sup_norm(dx) > 0.05 * scale) return false;
            x += dx;
            if (sup_norm(dx) < 1e-11 * scale) return true;
        }
        return false;
    }

    Complex a_, b_, gamma_;
};

double radical_inverse(std::uint64_t i, std::uint64_t base) {
    double inv = 1.0 / static_cast<double>(base);
    double f = inv;
    double r = 0.0;
    while (i > 0) {
        r += f * static_cast<double>(i % base);
        i /= base;
        f *= inv;
    }
    return r;
}

// Damped Newton on G(p) = f^n(p) - p, then conversion to the cyclic form.
std::optional<CVec> newton_from_seed(const PointC2& seed, const MapParams& m, int n) {
    const Complex a = m.a();
    const Complex b = m.b();
    auto eval = [&](const PointC2& p, Mat2* D) {
        PointC2 q = p;
        Mat2 M{1.0, 0.0, 0.0, 1.0};
        for (int k = 0; k < n; ++k) {
            if (D) M = derivative(q, m) * M;
            q = henon_apply_raw(q, a, b);
        }
        if (D) *D = M;
        return q - p;
    };
    auto size = [](const PointC2& g) { return g.finite() ? g.norm() : std::numeric_limits<double>::infinity(); };

    PointC2 p = seed;
    Mat2 D;
    PointC2 G = eval(p, &D);
    if (!G.finite()) return std::nullopt;
    bool converged = false;
    for (int it = 0; it < 60 && !converged; ++it) {
        const Mat2 J{D.a00 - 1.0, D.a01, D.a10, D.a11 - 1.0};
        const Complex det = J.det();
        if (det == Complex{}) return std::nullopt;
        const PointC2 step{-(J.a11 * G.x - J.a01 * G.y) / det, -(-J.a10 * G.x + J.a00 * G.y) / det};
        if (!step.finite()) return std::nullopt;
        const double g0 = size(G);
        double lambda = 1.0;
        bool accepted = false;
        for (int halve = 0; halve <= 20; ++halve, lambda *= 0.5) {
            const PointC2 trial = p + Complex(lambda) * step;
            const PointC2 Gt = eval(trial, nullptr);
            if (size(Gt) < g0) {
                p = trial;
                accepted = true;
                break;
            }
        }
        if (!accepted) return std::nullopt;
        G = eval(p, &D);
        converged = size(G) < 1e-11 * (1.0 + p.norm() * p.norm());
    }
    if (!converged) return std::nullopt;
    CVec x(n);
    PointC2 q = p;
    for (int k = 0; k < n; ++k) {
        x(k) = q.x;
        q = henon_apply_raw(q, a, b);
    }
    if (!newton_polish(x, a, b, 4) || !residual_ok(x, a, b)) return std::nullopt;
    return x;
}

struct Candidate {
    CVec x;
    int homotopy_hits = 0;
};

class SolutionPool {
public:
    explicit SolutionPool(Complex b) : b_(b) {}

    void insert(const CVec& x, bool from_homotopy) {
        for (auto& c : pool_)
            if (close(c.x, x)) {
                if (from_homotopy) ++c.homotopy_hits;
                return;
            }
        pool_.push_back({x, from_homotopy ? 1 : 0});
    }

    // Cyclic shifts of solutions are solutions; adding them closes every orbit.
    void close_under_shift() {
        const std::size_t base = pool_.size();
        for (std::size_t i = 0; i < base; ++i)
            for (Eigen::Index k = 1; k < pool_[i].x.size(); ++k) insert(shift_vec(pool_[i].x, k), false);
    }

    int multiplicity(const Candidate& c) const {
        if (c.homotopy_hits <= 1) return 1;
        return condition_number(c.x, b_) > 1e6 ? c.homotopy_hits : 1;
    }

    std::uint64_t count() const {
        std::uint64_t s = 0;
        for (const auto& c : pool_) s += static_cast<std::uint64_t>(multiplicity(c));
        return s;
    }

    const std::vector<Candidate>& items() const { return pool_; }

private:
    Complex b_;
    std::vector<Candidate> pool_;
};

}  // namespace

PeriodicSet periodic_points_2d(const MapParams& m, int n, int budget, std::uint64_t rng_seed,
                               const ParallelFor& parallel) {
    if (n < 1 || n > 16) throw ContractError("periodic_points_2d: need 1 <= n <= 16");
    if (budget < 1) throw ContractError("periodic_points_2d: budget must be >= 1");
    const Complex a = m.a();
    const Complex b = m.b();
    const std::uint64_t target = std::uint64_t{1} << n;

    PeriodicSet set;
    set.n = n;
    SolutionPool pool(b);
    int used = 0;

    if (is_horseshoe_regime(m)) {
        const auto words = necklaces(n);
        const std::size_t take = std::min<std::size_t>(words.size(), static_cast<std::size_t>(budget));
        std::vector<std::optional<std::vector<Complex>>> found(take);
        parallel(take, [&](std::size_t i) { found[i] = shadow_periodic(m, words[i]); });
        for (const auto& f : found)
            if (f) pool.insert(Eigen::Map<const CVec>(f->data(), n), false);
        used += static_cast<int>(take);
        pool.close_under_shift();
    }

    if (pool.count() < target && used < budget) {
        std::mt19937_64 rng(splitmix64(rng_seed));
        const double angle = std::uniform_real_distribution<double>(0.0, 2.0 * std::numbers::pi)(rng);
        const HomotopyTracker tracker(a, b, std::polar(1.0, angle));
        const std::size_t paths = std::min<std::uint64_t>(target, static_cast<std::uint64_t>(budget - used));
        std::vector<std::optional<CVec>> ends(paths);
        parallel(paths, [&](std::size_t i) {
            CVec start(n);
            for (int j = 0; j < n; ++j) start(j) = (i >> j) & 1U ? -1.0 : 1.0;
            ends[i] = tracker.track(start);
        });
        for (const auto& e : ends)
            if (e) pool.insert(*e, true);
        used += static_cast<int>(paths);
        pool.close_under_shift();
    }

    const double R = m.radius();
    const std::uint64_t offset = splitmix64(rng_seed ^ 0x5eedULL) % 100000;
    constexpr int kBatch = 32;
    while (pool.count() < target && used < budget) {
        const int batch = std::min(kBatch, budget - used);
        std::vector<std::optional<CVec>> found(static_cast<std::size_t>(batch));
        parallel(static_cast<std::size_t>(batch), [&](std::size_t i) {
            const std::uint64_t idx = offset + static_cast<std::uint64_t>(used) + i + 1;
            const double r1 = R * std::sqrt(radical_inverse(idx, 2));
            const double t1 = 2.0 * std::numbers::pi * radical_inverse(idx, 3);
            const double r2 = R * std::sqrt(radical_inverse(idx, 5));
            const double t2 = 2.0 * std::numbers::pi * radical_inverse(idx, 7);
            found[i] = newton_from_seed({std::polar(r1, t1), std::polar(r2, t2)}, m, n);
        });
        for (const auto& f : found)
            if (f) pool.insert(*f, false);
        used += batch;
        pool.close_under_shift();
    }

    // Group solution vectors into orbits.
    const auto& items = pool.items();
    std::vector<char> seen(items.size(), 0);
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (seen[i]) continue;
        const CVec& x = items[i].x;
        const int period = minimal_period(x);
        int mult = pool.multiplicity(items[i]);
        for (std::size_t j = i; j < items.size(); ++j) {
            if (seen[j]) continue;
            for (int k = 0; k < period; ++k)
                if (close(items[j].x, shift_vec(x, k))) {
                    seen[j] = 1;
                    mult = std::max(mult, pool.multiplicity(items[j]));
                    break;
                }
        }
        std::vector<PointC2> pts(static_cast<std::size_t>(period));
        for (int k = 0; k < period; ++k) pts[static_cast<std::size_t>(k)] = {x(k), x((k + n - 1) % n)};
        const auto first = std::min_element(pts.begin(), pts.end(), lex_less_point);
        std::rotate(pts.begin(), first, pts.end());
        set.orbits.push_back(make_orbit(std::move(pts), m, mult));
    }
    std::sort(set.orbits.begin(), set.orbits.end(), [](const PeriodicOrbit& l, const PeriodicOrbit& r) {
        if (l.period != r.period) return l.period < r.period;
        return lex_less_point(l.points[0], r.points[0]);
    });
    for (const auto& o : set.orbits)
        set.count += static_cast<std::uint64_t>(o.period) * static_cast<std::uint64_t>(o.multiplicity);
    set.complete = set.count == target;
    set.seeds_used = used;
    return set;
}

DiscreteMeasure mu_n_measure(const PeriodicSet& set) {
    if (set.orbits.empty()) throw ContractError("mu_n_measure: no periodic points");
    auto mu = DiscreteMeasure::uniform(2, set.points(), std::uint64_t{1} << set.n, set.complete);
    mu.provenance = "fixed points of f^" + std::to_string(set.n) + (set.complete ? "" : " (incomplete)");
    return mu;
}

SaddleTable saddle_count_ratio(const std::vector<PeriodicSet>& levels) {
    SaddleTable table;
    table.complete = !levels.empty();
    for (const auto& s : levels) {
        SaddleRow row;
        row.n = s.n;
        for (const auto& o : s.orbits)
            if (o.period == s.n && o.cls == OrbitClass::Saddle)
                row.saddles += static_cast<std::uint64_t>(o.period) * static_cast<std::uint64_t>(o.multiplicity);
        row.ratio = static_cast<double>(row.saddles) / std::ldexp(1.0, s.n);
        row.complete = s.complete;
        table.complete = table.complete && s.complete;
        table.rows.push_back(row);
    }
    bool monotone = true;
    for (std::size_t k = 1; k < table.rows.size(); ++k)
        if (table.rows[k].n > 3 && table.rows[k - 1].n >= 3 && table.rows[k].ratio < table.rows[k - 1].ratio)
            monotone = false;
    table.trend_increasing =
        table.complete && monotone && !table.rows.empty() && table.rows.back().ratio >= 0.75;
    return table;
}

SaddleTable saddle_count_ratio(const MapParams& m, int n_max, std::uint64_t rng_seed, const ParallelFor& parallel) {
    if (n_max < 1) throw ContractError("saddle_count_ratio: n_max must be >= 1");
    std::vector<PeriodicSet> levels;
    for (int n = 1; n <= n_max; ++n)
        levels.push_back(periodic_points_2d(m, n, default_periodic_budget(n), rng_seed, parallel));
    return saddle_count_ratio(levels);
}

RealityReport reality_conditions_report(const MapParams& m, const std::vector<PeriodicSet>& levels) {
    if (!m.is_real()) throw ContractError("reality_conditions_report: parameters must be real");
    if (levels.empty()) throw ContractError("reality_conditions_report: no levels");
    RealityReport rep;
    rep.horseshoe = is_horseshoe_regime(m);
    rep.complete = true;
    for (const auto& s : levels) {
        RealityLevel lv;
        lv.n = s.n;
        lv.count = s.count;
        lv.complete = s.complete;
        for (const auto& o : s.orbits) {
            for (const auto& p : o.points)
                lv.max_imag = std::max({lv.max_imag, std::abs(p.x.imag()), std::abs(p.y.imag())});
            lv.max_condition = std::max(lv.max_condition, o.condition);
        }
        rep.complete = rep.complete && s.complete;
        rep.max_imag = std::max(rep.max_imag, lv.max_imag);
        rep.levels.push_back(lv);
    }
    rep.all_real = rep.max_imag < kRealityTol;
    if (rep.complete) {
        rep.verdict = rep.all_real ? EntropyVerdict::Log2 : EntropyVerdict::BelowLog2;
        rep.kc_equals_kr_consistent = rep.all_real;
    }
    return rep;
}

RealityReport reality_conditions_report(const MapParams& m, int n_max, std::uint64_t rng_seed,
                                        const ParallelFor& parallel) {
    if (!m.is_real()) throw ContractError("reality_conditions_report: parameters must be real");
    if (n_max < 1) throw ContractError("reality_conditions_report: n_max must be >= 1");
    std::vector<PeriodicSet> levels;
    for (int n = 1; n <= n_max; ++n)
        levels.push_back(periodic_points_2d(m, n, default_periodic_budget(n), rng_seed, parallel));
    return reality_conditions_report(m, levels);
}

namespace {

struct DiskCell {
    double u0, v0, size;                // parameter square [u0, u0+size] x [v0, v0+size]
    std::array<PointC2, 4> corner;      // images of (u0,v0), (u1,v0), (u0,v1), (u1,v1)
};

double cell_diameter(const DiskCell& c) {
    double d = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) d = std::max(d, distance(c.corner[i], c.corner[j]));
    return d;
}

}  // namespace

UnstableCloud unstable_disk_sample(const PeriodicOrbit& orbit, const MapParams& m, int steps, int samples,
                                   double radius, double delta) {
    if (orbit.cls != OrbitClass::Saddle || std::abs(orbit.multipliers[1]) <= 1.0)
        throw ContractError("unstable_disk_sample: orbit is not a saddle");
    if (steps < 0 || samples < 16) throw ContractError("unstable_disk_sample: need steps >= 0 and samples >= 16");
    if (!(radius > 0.0) || !(delta > 0.0)) throw ContractError("unstable_disk_sample: radius and delta must be positive");

    const Complex a = m.a();
    const Complex b = m.b();
    const PointC2 p0 = orbit.points[0];
    Mat2 M{1.0, 0.0, 0.0, 1.0};
    for (const auto& p : orbit.points) M = derivative(p, m) * M;
    const Complex lu = orbit.multipliers[1];
    PointC2 v1{M.a01, lu - M.a00};
    PointC2 v2{lu - M.a11, M.a10};
    PointC2 v = distance(v1, {}) >= distance(v2, {}) ? v1 : v2;
    v = Complex(1.0 / distance(v, {})) * v;

    auto eval = [&](double u, double w, int j) {
        PointC2 q = p0 + Complex(u, w) * v;
        for (int k = 0; k < j; ++k) q = henon_apply_raw(q, a, b);
        return q;
    };

    // Initial 8x8 grid on the parameter square; s = 0 is a shared corner.
    constexpr int kGrid = 8;
    const double h0 = 2.0 * radius / kGrid;
    std::vector<DiskCell> cells;
    for (int j = 0; j < kGrid; ++j)
        for (int i = 0; i < kGrid; ++i) {
            const double u0 = -radius + h0 * i;
            const double v0 = -radius + h0 * j;
            const double uc = u0 + 0.5 * h0;
            const double vc = v0 + 0.5 * h0;
            if (uc * uc + vc * vc > radius * radius) continue;
            cells.push_back({u0, v0, h0, {eval(u0, v0, 0), eval(u0 + h0, v0, 0), eval(u0, v0 + h0, 0),
                                          eval(u0 + h0, v0 + h0, 0)}});
        }

    UnstableCloud out;
    out.steps = steps;
    const double R = m.radius();
    const auto cap = static_cast<std::size_t>(samples);
    for (int step = 1; step <= steps; ++step) {
        std::vector<DiskCell> next;
        next.reserve(cells.size());
        for (auto& c : cells) {
            bool keep = false;
            for (auto& q : c.corner) {
                q = henon_apply_raw(q, a, b);
                if (q.finite() && q.norm() <= 4.0 * R) keep = true;
            }
            if (keep) next.push_back(c);
        }
        // Refine wide cells near B, lowest escape rate G+ first, until the
        // cell budget is reached. Ties are broken by parameter position, so
        // the result is deterministic.
        struct Entry {
            double g;
            std::size_t idx;
        };
        auto later = [&](const Entry& l, const Entry& r) {
            if (l.g != r.g) return l.g > r.g;
            return l.idx > r.idx;
        };
        std::vector<DiskCell> pool = std::move(next);
        std::vector<char> alive(pool.size(), 1);
        std::vector<Entry> heap;
        auto wants_split = [&](const DiskCell& c) {
            bool near = false;
            for (const auto& q : c.corner) near = near || (q.finite() && q.norm() <= 2.0 * R);
            return near && cell_diameter(c) > delta;
        };
        auto priority = [&](const DiskCell& c) {
            double g = std::numeric_limits<double>::infinity();
            for (const auto& q : c.corner)
                if (q.finite()) g = std::min(g, green_plus(q, m, 1e-6, 40).value);
            return g;
        };
        auto push = [&](std::size_t i) {
            if (!wants_split(pool[i])) return;
            heap.push_back({priority(pool[i]), i});
            std::push_heap(heap.begin(), heap.end(), later);
        };
        for (std::size_t i = 0; i < pool.size(); ++i) push(i);
        std::size_t live = pool.size();
        while (!heap.empty()) {
            std::pop_heap(heap.begin(), heap.end(), later);
            const Entry e = heap.back();
            heap.pop_back();
            if (live + 3 > cap) {
                out.truncated = true;
                break;
            }
            const DiskCell c = pool[e.idx];
            alive[e.idx] = 0;
            const double hs = 0.5 * c.size;
            const double um = c.u0 + hs;
            const double vm = c.v0 + hs;
            const double u1 = c.u0 + c.size;
            const double w1 = c.v0 + c.size;
            const PointC2 mb = eval(um, c.v0, step);
            const PointC2 ml = eval(c.u0, vm, step);
            const PointC2 mc = eval(um, vm, step);
            const PointC2 mr = eval(u1, vm, step);
            const PointC2 mt = eval(um, w1, step);
            const DiskCell q[4] = {
                {c.u0, c.v0, hs, {c.corner[0], mb, ml, mc}},
                {um, c.v0, hs, {mb, c.corner[1], mc, mr}},
                {c.u0, vm, hs, {ml, mc, c.corner[2], mt}},
                {um, vm, hs, {mc, mr, mt, c.corner[3]}},
            };
            for (const auto& child : q) {
                pool.push_back(child);
                alive.push_back(1);
                push(pool.size() - 1);
            }
            live += 3;
        }
        std::vector<DiskCell> refined;
        refined.reserve(live);
        for (std::size_t i = 0; i < pool.size(); ++i)
            if (alive[i]) refined.push_back(pool[i]);
        cells = std::move(refined);
    }

    std::map<std::pair<double, double>, PointC2> corners;
    for (const auto& c : cells) {
        const double u1 = c.u0 + c.size;
        const double w1 = c.v0 + c.size;
        const std::pair<double, double> key[4] = {{c.u0, c.v0}, {u1, c.v0}, {c.u0, w1}, {u1, w1}};
        for (int k = 0; k < 4; ++k)
            if (c.corner[k].finite() && c.corner[k].norm() <= 4.0 * R) corners.emplace(key[k], c.corner[k]);
    }
    out.points.reserve(corners.size());
    for (const auto& [key, p] : corners) out.points.push_back(p);
    return out;
}

DiscreteMeasure cylinder_pushforward(const MapParams& m, int level, int pad) {
    if (!is_horseshoe_regime(m)) throw ContractError("cylinder_pushforward: requires the horseshoe regime");
    if (level < 1 || level > 10) throw ContractError("cylinder_pushforward: need 1 <= level <= 10");
    if (pad < 0) throw ContractError("cylinder_pushforward: pad must be >= 0");
    const Complex a = m.a();
    const Complex b = m.b();
    // Symbol-0 fixed point (negative x) supplies the boundary values.
    Complex x_star{};
    for (const auto& o : fixed_points_closed_form(m))
        if (o.points[0].x.real() < 0.0) x_star = o.points[0].x;

    const int len = 2 * level + 2 * pad;
    const int anchor = pad + level;
    std::vector<PointC2> pts;
    for (const auto& word : all_words(2 * level)) {
        std::vector<std::uint8_t> sym(static_cast<std::size_t>(len), 0);
        std::copy(word.begin(), word.end(), sym.begin() + pad);
        std::vector<Complex> x(static_cast<std::size_t>(len));
        for (int j = 0; j < len; ++j) x[static_cast<std::size_t>(j)] = sym[static_cast<std::size_t>(j)] ? -x_star : x_star;
        auto at = [&](int j) { return (j < 0 || j >= len) ? x_star : x[static_cast<std::size_t>(j)]; };
        bool converged = false;
        for (int it = 0; it < 500 && !converged; ++it) {
            double change = 0.0;
            for (int j = 0; j < len; ++j) {
                const Complex nv = stable_sqrt_branch(a - at(j + 1) - b * at(j - 1), sym[static_cast<std::size_t>(j)]);
                change = std::max(change, std::abs(nv - x[static_cast<std::size_t>(j)]));
                x[static_cast<std::size_t>(j)] = nv;
            }
            converged = change <= 1e-15 * (1.0 + std::abs(x_star));
        }
        if (!converged) throw IncompleteError("cylinder_pushforward: shadowing did not converge");
        pts.push_back({at(anchor), at(anchor - 1)});
    }
    auto mu = DiscreteMeasure::uniform(2, std::move(pts), std::uint64_t{1} << (2 * level));
    mu.provenance = "cylinder measure level " + std::to_string(level);
    return mu;
}

void write_orbits_csv(const std::string& path, const std::vector<PeriodicSet>& levels, const std::string& header) {
    std::ofstream out(path);
    if (!out) throw IoError(path, "cannot open for writing");
    out << "# " << header << '\n';
    out << "n,period,k,re_x,im_x,re_y,im_y,re_l1,im_l1,re_l2,im_l2,class,is_real,residual,multiplicity\n";
    out << std::setprecision(17);
    for (const auto& set : levels)
        for (const auto& o : set.orbits)
            for (std::size_t k = 0; k < o.points.size(); ++k) {
                const auto& p = o.points[k];
                out << set.n << ',' << o.period << ',' << k << ',' << p.x.real() << ',' << p.x.imag() << ','
                    << p.y.real() << ',' << p.y.imag() << ',' << o.multipliers[0].real() << ','
                    << o.multipliers[0].imag() << ',' << o.multipliers[1].real() << ',' << o.multipliers[1].imag()
                    << ',' << to_string(o.cls) << ',' << (o.is_real ? 1 : 0) << ',' << o.residual << ','
                    << o.multiplicity << '\n';
            }
    if (!out) throw IoError(path, "write failed");
}

}  // namespace henonlab
