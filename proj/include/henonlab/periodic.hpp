#pragma once

// Periodic orbits of Hénon maps: closed-form fixed points, enumeration of the
// fixed points of f^n, multiplier classification, the measures mu_n and the
// sampled unstable manifold of a saddle.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "henonlab/dynamics.hpp"
#include "henonlab/measures.hpp"
#include "henonlab/parallel.hpp"

namespace henonlab {

enum class OrbitClass { Saddle, Sink, Source, Nonhyperbolic };

const char* to_string(OrbitClass c);

inline constexpr double kRealityTol = 1e-7;
inline constexpr double kDedupTol = 1e-7;
inline constexpr double kHyperbolicityTol = 1e-8;

struct PeriodicOrbit {
    /// p_0, ..., p_{period-1} with f(p_k) = p_{k+1} (indices mod period).
    std::vector<PointC2> points;
    int period = 0;
    /// Eigenvalues of D(f^period) at points[0], ordered by increasing modulus.
    std::array<Complex, 2> multipliers{};
    OrbitClass cls = OrbitClass::Nonhyperbolic;
    bool is_real = false;
    /// max_k ||f(p_k) - p_{k+1}||, sup norm.
    double residual = 0.0;
    /// Number of coincident solutions represented (1 unless degenerate).
    int multiplicity = 1;
    /// 2-norm condition number of the Jacobian of the cyclic orbit equations.
    double condition = 0.0;
};

/// Builds an orbit record from its points: multipliers, class, reality and residual.
PeriodicOrbit make_orbit(std::vector<PointC2> points, const MapParams& m, int multiplicity = 1);

/// Solutions of x = y, x^2 + (1+b)x - a = 0. A double root is returned once
/// with multiplicity 2 (it is nonhyperbolic: one multiplier equals 1).
std::vector<PeriodicOrbit> fixed_points_closed_form(const MapParams& m);

/// Periodic orbit (x_0, ..., x_{n-1}) with sign(Re x_j) prescribed by `word`
/// (0 for negative), found by iterating x_j = +-sqrt(a - x_{j+1} - b x_{j-1})
/// cyclically and polishing with Newton. Empty if the iteration fails to
/// converge (outside the horseshoe regime).
std::optional<std::vector<Complex>> shadow_periodic(const MapParams& m, const std::vector<std::uint8_t>& word);

/// All fixed points of f^n found, grouped into orbits whose minimal period divides n.
struct PeriodicSet {
    int n = 0;
    std::vector<PeriodicOrbit> orbits;
    /// Sum over orbits of period * multiplicity.
    std::uint64_t count = 0;
    /// count == 2^n.
    bool complete = false;
    int seeds_used = 0;

    std::vector<PeriodicOrbit> minimal() const;
    /// Every fixed point of f^n, each repeated according to its multiplicity.
    std::vector<PointC2> points() const;
};

/// Seeds are consumed in order: symbolic shadowing (horseshoe regime, one per
/// necklace), total-degree homotopy paths, then quasi-random points of the
/// bidisk of radius R refined by damped Newton on f^n(p) - p. Enumeration
/// stops at 2^n points or when `budget` seeds are spent (then complete = false).
/// Throws ContractError for n < 1, n > 16 or budget < 1.
PeriodicSet periodic_points_2d(const MapParams& m, int n, int budget, std::uint64_t rng_seed,
                               const ParallelFor& parallel = run_serial);

/// Default budget: enough for one homotopy pass plus a quasi-random reserve.
int default_periodic_budget(int n);

/// Weight 2^-n on every fixed point of f^n; incompleteness is carried over.
DiscreteMeasure mu_n_measure(const PeriodicSet& set);

struct SaddleRow {
    int n = 0;
    std::uint64_t saddles = 0;  // saddle orbits' points of minimal period n
    double ratio = 0.0;         // saddles / 2^n
    bool complete = false;
};

struct SaddleTable {
    std::vector<SaddleRow> rows;
    bool complete = false;
    /// Ratio nondecreasing from n = 3 on and >= 0.75 at the last level.
    bool trend_increasing = false;
};

SaddleTable saddle_count_ratio(const MapParams& m, int n_max, std::uint64_t rng_seed,
                               const ParallelFor& parallel = run_serial);
SaddleTable saddle_count_ratio(const std::vector<PeriodicSet>& levels);

enum class EntropyVerdict { Log2, BelowLog2, Inconclusive };

const char* to_string(EntropyVerdict v);

struct RealityLevel {
    int n = 0;
    std::uint64_t count = 0;
    bool complete = false;
    double max_imag = 0.0;
    /// Largest condition number of the periodic-orbit Jacobian at this level.
    double max_condition = 0.0;
};

struct RealityReport {
    std::vector<RealityLevel> levels;
    bool complete = false;
    bool all_real = false;
    double max_imag = 0.0;
    EntropyVerdict verdict = EntropyVerdict::Inconclusive;
    /// Every periodic point real, as required for K_C = K_R; horseshoe regime
    /// predicts true. Unset when the enumeration is incomplete.
    std::optional<bool> kc_equals_kr_consistent;
    bool horseshoe = false;
};

/// Throws ContractError for nonreal parameters or n_max < 1.
RealityReport reality_conditions_report(const MapParams& m, int n_max, std::uint64_t rng_seed,
                                        const ParallelFor& parallel = run_serial);
RealityReport reality_conditions_report(const MapParams& m, const std::vector<PeriodicSet>& levels);

struct UnstableCloud {
    std::vector<PointC2> points;
    int steps = 0;
    /// Subdivision stopped early because the cell budget `samples` was reached.
    bool truncated = false;
};

/// Pushes a disk of radius `radius` along the unstable eigenvector of a
/// saddle forward `steps` times. The disk is tracked as a quadtree of cells in
/// the disk parameter; cells whose image is wider than `delta` are split,
/// cells entirely beyond 4R are dropped. Returns one point per cell corner.
/// Throws ContractError if the orbit is not a saddle.
UnstableCloud unstable_disk_sample(const PeriodicOrbit& orbit, const MapParams& m, int steps, int samples,
                                   double radius = 1e-6, double delta = 1e-2);

/// Level-`level` cylinder measure pushed to the horseshoe: each word of length
/// 2*level (positions -level .. level-1) is shadowed inside a window padded
/// with `pad` zeros on both sides, and the point at position 0 gets weight
/// 2^-2level. Throws ContractError outside the horseshoe regime.
DiscreteMeasure cylinder_pushforward(const MapParams& m, int level, int pad = 16);

/// Orbit table, one row per periodic point:
/// "n,period,k,re_x,im_x,re_y,im_y,re_l1,im_l1,re_l2,im_l2,class,is_real,residual,multiplicity".
void write_orbits_csv(const std::string& path, const std::vector<PeriodicSet>& levels, const std::string& header);

}  // namespace henonlab
