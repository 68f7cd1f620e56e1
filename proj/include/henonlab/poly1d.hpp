#pragma once

// One-variable polynomial dynamics: backward orbits, periodic points and the
// equal-weight estimators of the equilibrium measure built from them.

#include <cstdint>
#include <variant>
#include <vector>

#include "henonlab/measures.hpp"
#include "henonlab/parallel.hpp"
#include "henonlab/poly.hpp"

namespace henonlab {

struct FullPreimages {};

struct SampledPreimages {
    int walks = 1;
    std::uint64_t seed = 0;
};

using PreimageMode = std::variant<FullPreimages, SampledPreimages>;

/// levels[k] holds the level-k preimages of root (levels[0] == {root}). In
/// full mode level k has d^k entries; in sampled mode one entry per walk.
struct PreimageTree {
    Complex root{};
    std::vector<std::vector<Complex>> levels;
    bool sampled = false;
};

/// Root-finder failure; residual is the worst |f(z) - w| observed.
class RootFindError : public IncompleteError {
public:
    RootFindError(const std::string& what, double residual) : IncompleteError(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

inline constexpr std::uint64_t kDefaultPreimageCap = std::uint64_t{1} << 20;
inline constexpr std::uint64_t kDefaultPeriodicCap = 4096;

/// Throws ContractError for n < 1 or (full mode) d^n above cap; RootFindError
/// if some node's preimages do not reproduce it within 1e-9.
PreimageTree preimages(const Poly& f, Complex c, int n, const PreimageMode& mode,
                       std::uint64_t cap = kDefaultPreimageCap);

enum class Exceptionality { Exceptional, Nonexceptional };

/// Nonexceptional as soon as the backward orbit (including c) shows three distinct points.
Exceptionality exceptional_check(const Poly& f, Complex c, int probe_depth);

/// All d^n solutions of f^n(z) = z, with multiplicity. Roots closer than 1e-7
/// are merged to their cluster mean. Throws ContractError above the cap and
/// RootFindError if the residual test fails.
std::vector<Complex> periodic_points_1d(const Poly& f, int n, std::uint64_t cap = kDefaultPeriodicCap);

struct PreimageMeasure {
    Complex c{};
    int depth = 1;
};
struct PeriodicMeasure {
    int period = 1;
};
using BrolinMode = std::variant<PreimageMeasure, PeriodicMeasure>;

/// Equal weights d^-n on A_n. Throws ContractError for an exceptional seed.
DiscreteMeasure brolin_measure(const Poly& f, const BrolinMode& mode);

struct CloudPoint {
    Complex z{};
    int level = 0;

    friend bool operator==(const CloudPoint&, const CloudPoint&) = default;
};

inline constexpr int kDefaultBurnIn = 10;

/// Random backward walks from c; points at levels > burn_in are kept. Walk w
/// uses its own generator seeded from (rng_seed, w), so the output (sorted by
/// level, then real and imaginary part) does not depend on how `parallel`
/// schedules walks.
std::vector<CloudPoint> julia_render_points(const Poly& f, Complex c, int walks, int depth, int burn_in,
                                            std::uint64_t rng_seed, const ParallelFor& parallel = run_serial);

/// SplitMix64 step; used to derive independent per-task seeds.
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace henonlab
