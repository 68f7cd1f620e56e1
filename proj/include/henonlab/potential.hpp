#pragma once

// Potential kernels, escape-rate Green functions and discrete dd^c (Laplacian)
// mass recovery on sampled grids.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "henonlab/dynamics.hpp"
#include "henonlab/parallel.hpp"
#include "henonlab/poly.hpp"

namespace henonlab {

/// |z| for d = 1, log|z| for d = 2, -1/|z|^(d-2) for d >= 3 (d = z.size()).
/// Returns -inf at z = 0 for d >= 2. Throws ContractError for an empty z.
double potential_kernel(std::span<const double> z);

struct GreenEstimate {
    double value = 0.0;
    int n_used = 0;
    bool converged = false;
    /// A posteriori bound on |G - value|.
    double bound = 0.0;
    /// The orbit never passed the escape threshold within the budget; value is 0.
    bool presumed_in_k = false;
};

inline constexpr double kDefaultGreenTol = 1e-9;
inline constexpr int kDefaultPolyBudget = 200;
inline constexpr int kDefaultHenonBudget = 100;

/// G_K(z) = lim d^-n log+|f^n(z)|, with tail bound once |f^n(z)| > 2 r.
GreenEstimate green_poly(Complex z, const Poly& f, double tol = kDefaultGreenTol, int n_max = kDefaultPolyBudget);

/// G+(p) = lim 2^-n log+||f^n(p)||, with tail bound once in B- beyond 2R.
GreenEstimate green_plus(const PointC2& p, const MapParams& m, double tol = kDefaultGreenTol,
                         int n_max = kDefaultHenonBudget);
/// G-(p) = lim 2^-n log+||f^-n(p)||, with tail bound once in B+ beyond 2R.
GreenEstimate green_minus(const PointC2& p, const MapParams& m, double tol = kDefaultGreenTol,
                          int n_max = kDefaultHenonBudget);

/// Row-major samples of a real function on an axis-aligned complex grid:
/// value(i, j) is taken at origin + h*i + h*j*I (i = column, j = row).
class ScalarGrid {
public:
    enum Flag : std::uint8_t { Ok = 0, Boundary = 1, Singular = 2, NearSingular = 3 };

    ScalarGrid(Complex origin, double spacing, int width, int height);

    /// Samples g at every node, row by row through `parallel`.
    static ScalarGrid sample(Complex origin, double spacing, int width, int height,
                             const std::function<double(Complex)>& g, const ParallelFor& parallel = run_serial);

    Complex origin() const noexcept { return origin_; }
    double spacing() const noexcept { return spacing_; }
    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    Complex node(int i, int j) const { return origin_ + Complex(spacing_ * i, spacing_ * j); }

    double& at(int i, int j) { return values_[index(i, j)]; }
    double at(int i, int j) const { return values_[index(i, j)]; }
    std::uint8_t flag(int i, int j) const { return flags_[index(i, j)]; }
    void set_flag(int i, int j, std::uint8_t f) { flags_[index(i, j)] = f; }

    const std::vector<double>& values() const noexcept { return values_; }
    const std::vector<std::uint8_t>& flags() const noexcept { return flags_; }

    /// Bilinear interpolation; throws ContractError outside the grid.
    double interpolate(Complex z) const;

    /// Little-endian binary: width, height, origin.re, origin.im, spacing as
    /// doubles, then width*height row-major doubles (flagged cells as NaN).
    void write_binary(const std::string& path) const;
    static ScalarGrid read_binary(const std::string& path);

private:
    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(j) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(i);
    }

    Complex origin_;
    double spacing_;
    int width_;
    int height_;
    std::vector<double> values_;
    std::vector<std::uint8_t> flags_;
};

/// Mass of a block of singular cells, recovered from the discrete flux
/// through the block's outer edges.
struct LumpedMass {
    Complex center{};
    double mass = 0.0;
    std::vector<std::pair<int, int>> cells;
};

struct DdcMass {
    /// Five-point Laplacian times h^2 / (2 pi) per interior node. Boundary,
    /// singular and near-singular nodes are flagged and hold 0.
    ScalarGrid cells;
    std::vector<LumpedMass> singular;

    /// Sum of unflagged cell masses plus lumped masses whose center satisfies `inside`.
    double mass_where(const std::function<bool(Complex)>& inside) const;
    double total() const;
};

/// Throws ContractError for grids smaller than 3x3 or when every node is singular.
DdcMass discrete_ddc_mass(const ScalarGrid& grid);

struct SubaverageResult {
    bool passes = false;
    /// Circle average minus center value; >= 0 for subharmonic functions.
    double deficit = 0.0;
};

inline constexpr double kSubaverageTol = 1e-9;

/// Trapezoid-rule circle average versus the center value. Throws
/// ContractError for fewer than 8 samples or a nonpositive radius.
SubaverageResult subaverage_check(const std::function<double(Complex)>& g, Complex center, double radius,
                                  int samples = 256, double tol = kSubaverageTol);
/// Same on a sampled grid (bilinear interpolation); the circle must lie inside it.
SubaverageResult subaverage_check(const ScalarGrid& grid, Complex center, double radius, int samples = 256,
                                  double tol = kSubaverageTol);

/// Binary PGM (P5) with a comment line; values mapped linearly from [lo, hi] to 1..255,
/// with `black` cells written as 0.
void write_pgm(const std::string& path, int width, int height, const std::vector<double>& values, double lo,
               double hi, const std::vector<bool>& black, const std::string& comment);

}  // namespace henonlab
