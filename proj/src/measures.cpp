#include "henonlab/measures.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>

#include <json.hpp>

namespace henonlab {

DiscreteMeasure::DiscreteMeasure(int ambient_dim, std::vector<Atom> atoms, bool complete)
    : dim_(ambient_dim), atoms_(std::move(atoms)), complete_(complete) {
    if (dim_ != 1 && dim_ != 2) throw ContractError("DiscreteMeasure: ambient_dim must be 1 or 2");
    for (const auto& a : atoms_) {
        if (!(a.weight > 0.0)) throw ContractError("DiscreteMeasure: weights must be positive");
        if (dim_ == 1 && a.point.y != Complex{})
            throw ContractError("DiscreteMeasure: one-dimensional atoms must have y = 0");
    }
}

DiscreteMeasure DiscreteMeasure::uniform(int ambient_dim, std::vector<PointC2> points,
                                         std::uint64_t denominator, bool complete) {
    if (denominator == 0) throw ContractError("DiscreteMeasure::uniform: zero denominator");
    const double w = 1.0 / static_cast<double>(denominator);
    std::vector<Atom> atoms;
    atoms.reserve(points.size());
    for (auto& p : points) atoms.push_back({p, w});
    DiscreteMeasure mu(ambient_dim, std::move(atoms), complete);
    mu.exact_weight_ = Rational{1, denominator};
    return mu;
}

DiscreteMeasure DiscreteMeasure::uniform_1d(const std::vector<Complex>& points, std::uint64_t denominator,
                                            bool complete) {
    std::vector<PointC2> pts;
    pts.reserve(points.size());
    for (auto z : points) pts.push_back({z, {}});
    return uniform(1, std::move(pts), denominator, complete);
}

DiscreteMeasure DiscreteMeasure::dirac(const PointC2& p, int ambient_dim) {
    DiscreteMeasure mu(ambient_dim, {{p, 1.0}}, true);
    mu.exact_weight_ = Rational{1, 1};
    return mu;
}

double DiscreteMeasure::total_mass() const {
    double s = 0.0;
    for (const auto& a : atoms_) s += a.weight;
    return s;
}

std::optional<Rational> DiscreteMeasure::exact_total_mass() const {
    if (!exact_weight_) return std::nullopt;
    Rational r = *exact_weight_;
    r.num *= atoms_.size();
    return r;
}

DiscreteMeasure DiscreteMeasure::mix(const DiscreteMeasure& l, const DiscreteMeasure& r) {
    if (l.dim_ != r.dim_) throw ContractError("mix: ambient dimensions differ");
    std::vector<Atom> atoms;
    atoms.reserve(l.size() + r.size());
    for (const auto& a : l.atoms_) atoms.push_back({a.point, 0.5 * a.weight});
    for (const auto& a : r.atoms_) atoms.push_back({a.point, 0.5 * a.weight});
    return DiscreteMeasure(l.dim_, std::move(atoms), l.complete_ && r.complete_);
}

DiscreteMeasure DiscreteMeasure::pushforward(const std::function<PointC2(const PointC2&)>& g) const {
    std::vector<Atom> atoms;
    atoms.reserve(atoms_.size());
    for (const auto& a : atoms_) atoms.push_back({g(a.point), a.weight});
    DiscreteMeasure out(dim_, std::move(atoms), complete_);
    out.exact_weight_ = exact_weight_;
    out.provenance = provenance;
    return out;
}

double potential_of_measure(const DiscreteMeasure& mu, Complex z) {
    if (mu.ambient_dim() != 1) throw ContractError("potential_of_measure: measure must be one-dimensional");
    double s = 0.0;
    for (const auto& a : mu.atoms()) {
        const double r = std::abs(z - a.point.x);
        if (r == 0.0) return -std::numeric_limits<double>::infinity();
        s += a.weight * std::log(r);
    }
    return s;
}

double integrate(const DiscreteMeasure& mu, const std::function<double(const PointC2&)>& test) {
    double s = 0.0;
    for (const auto& a : mu.atoms()) s += a.weight * test(a.point);
    return s;
}

TestBattery::TestBattery(double sigma) : sigma_(sigma) {
    if (!(sigma > 0.0)) throw ContractError("TestBattery: sigma must be positive");
    const double s2 = sigma * sigma;
    const double e = std::numbers::e;
    // Sup norms of the unnormalized functions, so every entry is bounded by 1.
    const double deg1 = sigma / std::sqrt(e);
    ids_ = {"w",        "w_re_x",    "w_im_x",    "w_re_y", "w_im_y",
            "w_re_x2",  "w_im_x2",   "w_re_xy",   "w_im_xy", "w_norm2"};
    const std::vector<double> sup = {1.0,         deg1,        deg1,   deg1,   deg1,
                                     2.0 * s2 / e, 2.0 * s2 / e, s2 / e, s2 / e, 2.0 * s2 / e};
    scale_.reserve(sup.size());
    for (double v : sup) scale_.push_back(1.0 / v);
}

double TestBattery::evaluate(std::size_t k, const PointC2& p) const {
    const double r2 = std::norm(p.x) + std::norm(p.y);
    const double w = std::exp(-r2 / (2.0 * sigma_ * sigma_));
    double v = 0.0;
    switch (k) {
        case 0: v = 1.0; break;
        case 1: v = p.x.real(); break;
        case 2: v = p.x.imag(); break;
        case 3: v = p.y.real(); break;
        case 4: v = p.y.imag(); break;
        case 5: v = (p.x * p.x).real(); break;
        case 6: v = (p.x * p.x).imag(); break;
        case 7: v = (p.x * p.y).real(); break;
        case 8: v = (p.x * p.y).imag(); break;
        case 9: v = r2; break;
        default: throw ContractError("TestBattery: index out of range");
    }
    return scale_[k] * v * w;
}

Discrepancy compare(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2, const TestBattery& battery) {
    if (mu1.ambient_dim() != mu2.ambient_dim()) throw ContractError("compare: ambient dimensions differ");
    Discrepancy d;
    d.advisory = !mu1.complete() || !mu2.complete();
    for (std::size_t k = 0; k < battery.size(); ++k) {
        auto f = [&](const PointC2& p) { return battery.evaluate(k, p); };
        const double diff = std::abs(integrate(mu1, f) - integrate(mu2, f));
        if (diff > d.value) {
            d.value = diff;
            d.worst_function = k;
        }
    }
    return d;
}

double angular_discrepancy(const DiscreteMeasure& mu, double circle_tol) {
    if (mu.ambient_dim() != 1) throw ContractError("angular_discrepancy: measure must be one-dimensional");
    if (mu.size() == 0) throw ContractError("angular_discrepancy: empty measure");
    struct Sample {
        double u;
        double w;
    };
    std::vector<Sample> samples;
    samples.reserve(mu.size());
    double total = 0.0;
    double w_max = 0.0;
    for (const auto& a : mu.atoms()) {
        const Complex z = a.point.x;
        if (std::abs(std::abs(z) - 1.0) > circle_tol)
            throw ContractError("angular_discrepancy: atom off the unit circle");
        double u = std::arg(z) / (2.0 * std::numbers::pi);
        if (u < 0.0) u += 1.0;
        if (u >= 1.0) u = 0.0;
        samples.push_back({u, a.weight});
        total += a.weight;
        w_max = std::max(w_max, a.weight);
    }
    std::sort(samples.begin(), samples.end(), [](const Sample& l, const Sample& r) { return l.u < r.u; });

    double ks = 0.0;
    double cum = 0.0;
    for (std::size_t i = 0; i < samples.size();) {
        const double u = samples[i].u;
        ks = std::max(ks, u - cum);  // left limit just below this angle
        while (i < samples.size() && samples[i].u == u) cum += samples[i++].w / total;
        ks = std::max(ks, cum - u);
    }
    return std::clamp(ks - w_max / total, 0.0, 1.0);
}

void write_measure_csv(const std::string& path, const DiscreteMeasure& mu, const std::string& header) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(path, "cannot open for writing");
    out << "# " << header << '\n';
    out << (mu.ambient_dim() == 1 ? "re,im,weight\n" : "re_x,im_x,re_y,im_y,weight\n");
    out << std::setprecision(17);
    for (const auto& a : mu.atoms()) {
        out << a.point.x.real() << ',' << a.point.x.imag() << ',';
        if (mu.ambient_dim() == 2) out << a.point.y.real() << ',' << a.point.y.imag() << ',';
        out << a.weight << '\n';
    }
    if (!out) throw IoError(path, "write failed");
}

void write_measure_sidecar(const std::string& path, const DiscreteMeasure& mu, const std::string& header) {
    nlohmann::json j;
    j["header"] = header;
    j["ambient_dim"] = mu.ambient_dim();
    j["complete"] = mu.complete();
    j["atoms"] = mu.size();
    j["provenance"] = mu.provenance;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(path, "cannot open for writing");
    out << j.dump(2) << '\n';
    if (!out) throw IoError(path, "write failed");
}

}  // namespace henonlab
