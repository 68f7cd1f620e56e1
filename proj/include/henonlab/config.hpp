#pragma once

// Job description shared by every CLI command. Serialized as one JSON
// document; command-line flags override individual fields.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "henonlab/dynamics.hpp"
#include "henonlab/poly.hpp"

namespace henonlab {

inline constexpr const char* kToolVersion = "henonlab/1.0.0";

struct MapSpec {
    enum class Kind { Henon, Poly };
    Kind kind = Kind::Henon;
    Complex a{10.0, 0.0};
    Complex b{0.3, 0.0};
    /// Poly coefficients c_0 .. c_d (monic).
    std::vector<Complex> coeffs{Complex{}, Complex{}, Complex{1.0, 0.0}};

    MapParams henon() const;
    Poly poly() const;
};

struct Window {
    Complex center{};
    double width = 4.0;
    double height = 4.0;
    int pixels_x = 256;
    int pixels_y = 256;

    /// Center of pixel (i, j); row 0 is the top (largest imaginary part).
    Complex pixel(int i, int j) const;
};

struct JobConfig {
    std::string command = "render-green";
    MapSpec map;
    Window window;

    /// Complex line base + z * direction in C^2 sampled by render-green.
    PointC2 slice_base{};
    PointC2 slice_direction{Complex{1.0, 0.0}, Complex{}};
    /// "plus", "minus" (Hénon) or "poly".
    std::string green = "plus";
    double green_tol = 1e-9;
    int green_budget = 100;

    Complex julia_seed{1.0, 0.0};
    int julia_walks = 256;
    int julia_depth = 40;
    int julia_burn_in = 20;

    int periodic_n_max = 6;
    /// Seeds per level; 0 selects default_periodic_budget(n).
    int periodic_budget = 0;

    int entropy_n_max = 10;
    int reality_n_max = 6;

    std::uint64_t rng_seed = 1;
    int threads = 1;
    std::string out = ".";

    /// Throws ContractError for out-of-range fields.
    void validate() const;
};

/// Missing keys take their defaults; unknown keys are a ContractError.
JobConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const JobConfig& c);

/// FNV-1a (64-bit, hex) of the canonical JSON without "threads" and "out".
std::string config_hash(const JobConfig& c);

/// "cfg:<hash> <tool version>", the provenance line written into every output.
std::string provenance_line(const JobConfig& c);

}  // namespace henonlab
