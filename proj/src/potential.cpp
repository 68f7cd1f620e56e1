#include "henonlab/potential.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numbers>

namespace henonlab {

double potential_kernel(std::span<const double> z) {
    if (z.empty()) throw ContractError("potential_kernel: dimension must be >= 1");
    const auto d = z.size();
    double r2 = 0.0;
    for (double v : z) r2 += v * v;
    const double r = std::sqrt(r2);
    if (d == 1) return r;
    if (r == 0.0) return -std::numeric_limits<double>::infinity();
    if (d == 2) return std::log(r);
    return -1.0 / std::pow(r, static_cast<double>(d - 2));
}

namespace {

// Iterates stop once the tail estimate is far below any useful tolerance or
// the next squaring could overflow.
constexpr double kStopMagnitude = 1e100;

}  // namespace

GreenEstimate green_poly(Complex z, const Poly& f, double tol, int n_max) {
    if (!(tol > 0.0)) throw ContractError("green_poly: tol must be positive");
    const double threshold = 2.0 * f.escape_radius();
    const double d = f.degree();
    GreenEstimate est;
    double scale = 1.0;  // d^-n
    for (int n = 0; n <= n_max; ++n) {
        const double r = std::abs(z);
        if (r > threshold) {
            const double eps = f.tail_ratio(z);
            est.value = scale * std::log(r);
            est.bound = -std::log1p(-eps) * scale / (d - 1.0);
            est.n_used = n;
            est.converged = est.bound < tol;
            if (est.converged || r > kStopMagnitude) return est;
        }
        if (n == n_max) break;
        z = f(z);
        scale /= d;
    }
    if (est.n_used == 0 && std::abs(z) <= threshold) {
        est = {};
        est.n_used = n_max;
        est.converged = true;
        est.presumed_in_k = true;
    }
    return est;
}

namespace {

// Shared escape-rate loop for G+ and G-. `lead` picks the dominant coordinate
// in the absorbing cone, `eps` the relative size of the remaining terms and
// `shift` the constant added per step to log|lead| (0 forward, -log|b| backward).
template <typename Step, typename Lead, typename Eps>
GreenEstimate green_escape(PointC2 p, const MapParams& m, double tol, int n_max, Region cone, Step step,
                           Lead lead, Eps eps, double shift) {
    if (!(tol > 0.0)) throw ContractError("green: tol must be positive");
    const double threshold = 2.0 * m.radius();
    GreenEstimate est;
    bool escaped = false;
    double scale = 1.0;  // 2^-n
    for (int n = 0; n <= n_max; ++n) {
        const double r = std::abs(lead(p));
        if (classify_region(p, m.radius()) == cone && r > threshold) {
            escaped = true;
            const double e = eps(p);
            est.value = scale * (std::log(r) + shift);
            est.bound = -std::log1p(-e) * scale;
            est.n_used = n;
            est.converged = est.bound < tol;
            if (est.converged || r > kStopMagnitude) return est;
        }
        if (n == n_max) break;
        const PointC2 next = step(p);
        if (!next.finite()) break;  // keep the last analytic estimate
        p = next;
        scale *= 0.5;
    }
    if (!escaped) {
        est = {};
        est.n_used = n_max;
        est.converged = true;
        est.presumed_in_k = true;
    }
    return est;
}

}  // namespace

GreenEstimate green_plus(const PointC2& p, const MapParams& m, double tol, int n_max) {
    const Complex a = m.a();
    const Complex b = m.b();
    const double abs_a = std::abs(a);
    const double abs_b = std::abs(b);
    return green_escape(
        p, m, tol, n_max, Region::Bminus, [&](const PointC2& q) { return henon_apply_raw(q, a, b); },
        [](const PointC2& q) { return q.x; },
        [&](const PointC2& q) { return (abs_a + abs_b * std::abs(q.y)) / std::norm(q.x); }, 0.0);
}

GreenEstimate green_minus(const PointC2& p, const MapParams& m, double tol, int n_max) {
    const Complex a = m.a();
    const Complex b = m.b();
    const double abs_a = std::abs(a);
    return green_escape(
        p, m, tol, n_max, Region::Bplus, [&](const PointC2& q) { return henon_inverse_raw(q, a, b); },
        [](const PointC2& q) { return q.y; },
        [&](const PointC2& q) { return (abs_a + std::abs(q.x)) / std::norm(q.y); }, -std::log(std::abs(b)));
}

// ScalarGrid

ScalarGrid::ScalarGrid(Complex origin, double spacing, int width, int height)
    : origin_(origin), spacing_(spacing), width_(width), height_(height) {
    if (!(spacing > 0.0)) throw ContractError("ScalarGrid: spacing must be positive");
    if (width < 1 || height < 1) throw ContractError("ScalarGrid: dimensions must be >= 1");
    values_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0.0);
    flags_.assign(values_.size(), Ok);
}

ScalarGrid ScalarGrid::sample(Complex origin, double spacing, int width, int height,
                              const std::function<double(Complex)>& g, const ParallelFor& parallel) {
    ScalarGrid grid(origin, spacing, width, height);
    parallel(static_cast<std::size_t>(height), [&](std::size_t row) {
        const int j = static_cast<int>(row);
        for (int i = 0; i < width; ++i) grid.at(i, j) = g(grid.node(i, j));
    });
    return grid;
}

double ScalarGrid::interpolate(Complex z) const {
    const double u = (z.real() - origin_.real()) / spacing_;
    const double v = (z.imag() - origin_.imag()) / spacing_;
    if (u < 0.0 || v < 0.0 || u > width_ - 1 || v > height_ - 1)
        throw ContractError("ScalarGrid::interpolate: point outside the grid");
    const int i = std::min(static_cast<int>(u), std::max(width_ - 2, 0));
    const int j = std::min(static_cast<int>(v), std::max(height_ - 2, 0));
    const double s = u - i;
    const double t = v - j;
    const int i1 = std::min(i + 1, width_ - 1);
    const int j1 = std::min(j + 1, height_ - 1);
    return (1 - s) * (1 - t) * at(i, j) + s * (1 - t) * at(i1, j) + (1 - s) * t * at(i, j1) + s * t * at(i1, j1);
}

namespace {

void put_le(std::ostream& out, double v) {
    static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    unsigned char buf[8];
    for (int k = 0; k < 8; ++k) buf[k] = static_cast<unsigned char>(bits >> (8 * k));
    out.write(reinterpret_cast<const char*>(buf), 8);
}

double get_le(std::istream& in) {
    unsigned char buf[8];
    in.read(reinterpret_cast<char*>(buf), 8);
    std::uint64_t bits = 0;
    for (int k = 0; k < 8; ++k) bits |= static_cast<std::uint64_t>(buf[k]) << (8 * k);
    double v;
    std::memcpy(&v, &bits, sizeof v);
    return v;
}

}  // namespace

void ScalarGrid::write_binary(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(path, "cannot open for writing");
    put_le(out, width_);
    put_le(out, height_);
    put_le(out, origin_.real());
    put_le(out, origin_.imag());
    put_le(out, spacing_);
    for (std::size_t k = 0; k < values_.size(); ++k)
        put_le(out, flags_[k] == Ok ? values_[k] : std::numeric_limits<double>::quiet_NaN());
    if (!out) throw IoError(path, "write failed");
}

ScalarGrid ScalarGrid::read_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path, "cannot open for reading");
    const double w = get_le(in);
    const double h = get_le(in);
    const double ore = get_le(in);
    const double oim = get_le(in);
    const double sp = get_le(in);
    if (!in || w < 1 || h < 1 || w > 1e8 || h > 1e8) throw IoError(path, "malformed grid header");
    ScalarGrid grid({ore, oim}, sp, static_cast<int>(w), static_cast<int>(h));
    for (auto& v : grid.values_) v = get_le(in);
    if (!in) throw IoError(path, "truncated grid data");
    return grid;
}

// Discrete dd^c

double DdcMass::mass_where(const std::function<bool(Complex)>& inside) const {
    double s = 0.0;
    for (int j = 0; j < cells.height(); ++j)
        for (int i = 0; i < cells.width(); ++i)
            if (cells.flag(i, j) == ScalarGrid::Ok && inside(cells.node(i, j))) s += cells.at(i, j);
    for (const auto& l : singular)
        if (inside(l.center)) s += l.mass;
    return s;
}

double DdcMass::total() const {
    return mass_where([](Complex) { return true; });
}

DdcMass discrete_ddc_mass(const ScalarGrid& grid) {
    const int W = grid.width();
    const int H = grid.height();
    if (W < 3 || H < 3) throw ContractError("discrete_ddc_mass: grid must be at least 3x3");

    ScalarGrid cells(grid.origin(), grid.spacing(), W, H);
    auto singular_at = [&](int i, int j) { return !std::isfinite(grid.at(i, j)); };
    bool any_finite = false;
    for (double v : grid.values()) any_finite = any_finite || std::isfinite(v);
    if (!any_finite) throw ContractError("discrete_ddc_mass: degenerate input, every node is singular");

    const int di[4] = {1, -1, 0, 0};
    const int dj[4] = {0, 0, 1, -1};
    auto interior = [&](int i, int j) { return i > 0 && j > 0 && i < W - 1 && j < H - 1; };

    for (int j = 0; j < H; ++j)
        for (int i = 0; i < W; ++i) {
            if (singular_at(i, j)) cells.set_flag(i, j, ScalarGrid::Singular);
            else if (!interior(i, j)) cells.set_flag(i, j, ScalarGrid::Boundary);
        }
    for (int j = 1; j < H - 1; ++j)
        for (int i = 1; i < W - 1; ++i) {
            if (cells.flag(i, j) != ScalarGrid::Ok) continue;
            for (int k = 0; k < 4; ++k)
                if (singular_at(i + di[k], j + dj[k])) cells.set_flag(i, j, ScalarGrid::NearSingular);
        }

    const double inv_two_pi = 1.0 / (2.0 * std::numbers::pi);
    for (int j = 1; j < H - 1; ++j)
        for (int i = 1; i < W - 1; ++i) {
            if (cells.flag(i, j) != ScalarGrid::Ok) continue;
            const double lap = grid.at(i + 1, j) + grid.at(i - 1, j) + grid.at(i, j + 1) + grid.at(i, j - 1) -
                               4.0 * grid.at(i, j);
            cells.at(i, j) = lap * inv_two_pi;
        }

    // Lump each 4-connected block of singular / near-singular nodes and recover
    // its mass from the flux across the block boundary (discrete Green identity).
    DdcMass out{cells, {}};
    std::vector<char> visited(static_cast<std::size_t>(W) * static_cast<std::size_t>(H), 0);
    auto in_block = [&](int i, int j) {
        const auto f = cells.flag(i, j);
        return f == ScalarGrid::Singular || f == ScalarGrid::NearSingular;
    };
    for (int j0 = 0; j0 < H; ++j0)
        for (int i0 = 0; i0 < W; ++i0) {
            const std::size_t k0 = static_cast<std::size_t>(j0) * W + i0;
            if (visited[k0] || !in_block(i0, j0)) continue;
            LumpedMass lump;
            std::vector<std::pair<int, int>> stack{{i0, j0}};
            visited[k0] = 1;
            bool recoverable = true;
            double flux = 0.0;
            Complex center_sum{};
            int n_singular = 0;
            while (!stack.empty()) {
                auto [i, j] = stack.back();
                stack.pop_back();
                lump.cells.emplace_back(i, j);
                if (cells.flag(i, j) == ScalarGrid::Singular) {
                    center_sum += grid.node(i, j);
                    ++n_singular;
                }
                if (!interior(i, j)) recoverable = false;
                for (int k = 0; k < 4; ++k) {
                    const int ni = i + di[k];
                    const int nj = j + dj[k];
                    if (ni < 0 || nj < 0 || ni >= W || nj >= H) continue;
                    const std::size_t nk = static_cast<std::size_t>(nj) * W + ni;
                    if (in_block(ni, nj)) {
                        if (!visited[nk]) {
                            visited[nk] = 1;
                            stack.emplace_back(ni, nj);
                        }
                    } else {
                        flux += grid.at(ni, nj) - grid.at(i, j);
                    }
                }
            }
            if (!recoverable || !std::isfinite(flux)) continue;
            lump.center = center_sum / static_cast<double>(std::max(n_singular, 1));
            lump.mass = flux * inv_two_pi;
            out.singular.push_back(std::move(lump));
        }
    return out;
}

SubaverageResult subaverage_check(const std::function<double(Complex)>& g, Complex center, double radius,
                                  int samples, double tol) {
    if (samples < 8) throw ContractError("subaverage_check: insufficient samples (need >= 8)");
    if (!(radius > 0.0)) throw ContractError("subaverage_check: radius must be positive");
    double sum = 0.0;
    for (int k = 0; k < samples; ++k)
        sum += g(center + std::polar(radius, 2.0 * std::numbers::pi * k / samples));
    SubaverageResult res;
    res.deficit = sum / samples - g(center);
    res.passes = res.deficit >= -tol;
    return res;
}

SubaverageResult subaverage_check(const ScalarGrid& grid, Complex center, double radius, int samples,
                                  double tol) {
    const double lo_re = grid.origin().real();
    const double lo_im = grid.origin().imag();
    const double hi_re = lo_re + grid.spacing() * (grid.width() - 1);
    const double hi_im = lo_im + grid.spacing() * (grid.height() - 1);
    if (center.real() - radius < lo_re || center.real() + radius > hi_re || center.imag() - radius < lo_im ||
        center.imag() + radius > hi_im)
        throw ContractError("subaverage_check: circle does not fit in the sampled domain");
    return subaverage_check([&](Complex z) { return grid.interpolate(z); }, center, radius, samples, tol);
}

void write_pgm(const std::string& path, int width, int height, const std::vector<double>& values, double lo,
               double hi, const std::vector<bool>& black, const std::string& comment) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(path, "cannot open for writing");
    out << "P5\n# " << comment << '\n' << width << ' ' << height << "\n255\n";
    const double span = hi > lo ? hi - lo : 1.0;
    std::vector<unsigned char> row(static_cast<std::size_t>(width));
    for (int j = 0; j < height; ++j) {
        for (int i = 0; i < width; ++i) {
            const std::size_t k = static_cast<std::size_t>(j) * width + i;
            if (black[k] || !std::isfinite(values[k])) {
                row[static_cast<std::size_t>(i)] = 0;
                continue;
            }
            const double t = std::clamp((values[k] - lo) / span, 0.0, 1.0);
            row[static_cast<std::size_t>(i)] = static_cast<unsigned char>(1 + std::lround(t * 254.0));
        }
        out.write(reinterpret_cast<const char*>(row.data()), width);
    }
    if (!out) throw IoError(path, "write failed");
}

}  // namespace henonlab
