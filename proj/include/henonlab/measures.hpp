#pragma once

// Weighted finite point clouds in C or C^2 and the weak-topology probes used
// to compare them.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "henonlab/dynamics.hpp"
#include "henonlab/symbolic.hpp"

namespace henonlab {

struct Atom {
    PointC2 point;  // for one-dimensional measures only point.x is used
    double weight = 0.0;
};

class DiscreteMeasure {
public:
    DiscreteMeasure() = default;
    /// Throws ContractError for ambient_dim outside {1,2}, a nonpositive weight,
    /// or (dim 1) an atom with nonzero y.
    DiscreteMeasure(int ambient_dim, std::vector<Atom> atoms, bool complete = true);

    /// Equal weights 1/denominator on each point, exact weight recorded.
    static DiscreteMeasure uniform(int ambient_dim, std::vector<PointC2> points,
                                   std::uint64_t denominator, bool complete = true);
    static DiscreteMeasure uniform_1d(const std::vector<Complex>& points, std::uint64_t denominator,
                                      bool complete = true);
    static DiscreteMeasure dirac(const PointC2& p, int ambient_dim);

    int ambient_dim() const noexcept { return dim_; }
    const std::vector<Atom>& atoms() const noexcept { return atoms_; }
    std::size_t size() const noexcept { return atoms_.size(); }
    bool complete() const noexcept { return complete_; }
    void set_complete(bool c) noexcept { complete_ = c; }
    /// Exact common weight for measures built by uniform().
    const std::optional<Rational>& exact_weight() const noexcept { return exact_weight_; }

    /// Fixed-order (atom order) sum of weights.
    double total_mass() const;
    /// Exact total mass, available when exact_weight() is set.
    std::optional<Rational> exact_total_mass() const;

    /// Free-form origin note written into serialized sidecars.
    std::string provenance;

    /// Average (mu1 + mu2) / 2 of two measures of equal dimension.
    static DiscreteMeasure mix(const DiscreteMeasure& l, const DiscreteMeasure& r);

    /// Image measure under g; weights are carried unchanged.
    DiscreteMeasure pushforward(const std::function<PointC2(const PointC2&)>& g) const;

private:
    int dim_ = 1;
    std::vector<Atom> atoms_;
    bool complete_ = true;
    std::optional<Rational> exact_weight_;
};

/// Sum w_i log|z - p_i| over a one-dimensional measure; -inf when z hits an atom.
double potential_of_measure(const DiscreteMeasure& mu, Complex z);

double integrate(const DiscreteMeasure& mu, const std::function<double(const PointC2&)>& test);

/// Ten Gaussian-windowed low-order monomials, each scaled to sup norm 1.
class TestBattery {
public:
    explicit TestBattery(double sigma);

    double sigma() const noexcept { return sigma_; }
    std::size_t size() const noexcept { return ids_.size(); }
    const std::vector<std::string>& ids() const noexcept { return ids_; }
    double evaluate(std::size_t k, const PointC2& p) const;

private:
    double sigma_;
    std::vector<std::string> ids_;
    std::vector<double> scale_;
};

struct Discrepancy {
    double value = 0.0;
    /// Set when either measure is flagged incomplete.
    bool advisory = false;
    std::size_t worst_function = 0;
};

/// max_k |int f_k dmu1 - int f_k dmu2|. Throws ContractError on dimension mismatch.
Discrepancy compare(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2, const TestBattery& battery);

/// Kolmogorov distance between the angular distribution of the atoms and the
/// uniform law on the circle, minus the discretization floor max_i w_i, clipped
/// at 0. Exact N-th roots of unity give 0; N coincident atoms give 1 - 1/N.
/// Throws ContractError if an atom is farther than circle_tol from |z| = 1.
double angular_discrepancy(const DiscreteMeasure& mu, double circle_tol = 1e-6);

/// CSV rows "re_x,im_x[,re_y,im_y],weight" with a comment header line.
void write_measure_csv(const std::string& path, const DiscreteMeasure& mu, const std::string& header);
/// JSON sidecar with ambient_dim, complete, atom count and provenance.
void write_measure_sidecar(const std::string& path, const DiscreteMeasure& mu, const std::string& header);

}  // namespace henonlab
