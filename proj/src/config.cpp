#include "henonlab/config.hpp"

#include <cmath>
#include <cstdio>
#include <set>

namespace henonlab {

using nlohmann::json;

MapParams MapSpec::henon() const {
    if (kind != Kind::Henon) throw ContractError("config: command needs a Hénon map (map.kind = \"henon\")");
    return MapParams(a, b);
}

Poly MapSpec::poly() const {
    if (kind != Kind::Poly) throw ContractError("config: command needs a polynomial (map.kind = \"poly\")");
    return Poly(coeffs);
}

Complex Window::pixel(int i, int j) const {
    const double dx = width / pixels_x;
    const double dy = height / pixels_y;
    return {center.real() - 0.5 * width + (i + 0.5) * dx, center.imag() + 0.5 * height - (j + 0.5) * dy};
}

void JobConfig::validate() const {
    static const std::set<std::string> commands{"render-green", "julia-cloud", "periodic-report", "entropy-report",
                                                "validate"};
    if (!commands.count(command)) throw ContractError("config: unknown command '" + command + "'");
    if (window.pixels_x < 1 || window.pixels_y < 1) throw ContractError("config: window pixels must be >= 1");
    if (!(window.width > 0.0) || !(window.height > 0.0)) throw ContractError("config: window size must be positive");
    if (green != "plus" && green != "minus" && green != "poly")
        throw ContractError("config: green must be \"plus\", \"minus\" or \"poly\"");
    if (!(green_tol > 0.0)) throw ContractError("config: green_tol must be positive");
    if (green_budget < 1 || julia_walks < 1 || julia_depth < 1 || periodic_n_max < 1 || entropy_n_max < 1 ||
        reality_n_max < 1)
        throw ContractError("config: budgets must be >= 1");
    if (julia_burn_in < 0 || julia_burn_in >= julia_depth)
        throw ContractError("config: need 0 <= julia.burn_in < julia.depth");
    if (periodic_budget < 0) throw ContractError("config: periodic.budget must be >= 0");
    if (threads < 1) throw ContractError("config: threads must be >= 1");
    if (map.kind == MapSpec::Kind::Henon) (void)map.henon();
    else (void)map.poly();
}

namespace {

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

Complex complex_from(const json& j, const char* what) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    throw ContractError(std::string("config: ") + what + " must be a number or [re, im]");
}

PointC2 point_from(const json& j, const char* what) {
    if (!j.is_array() || j.size() != 2) throw ContractError(std::string("config: ") + what + " must be [x, y]");
    return {complex_from(j[0], what), complex_from(j[1], what)};
}

void check_keys(const json& j, const char* where, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ContractError(std::string("config: ") + where + " must be an object");
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) throw ContractError(std::string("config: unknown key '") + key + "' in " + where);
    }
}

template <typename T>
void read(const json& j, const char* key, T& dst) {
    if (!j.contains(key)) return;
    try {
        dst = j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ContractError(std::string("config: bad value for '") + key + "'");
    }
}

}  // namespace

JobConfig config_from_json(const json& j) {
    JobConfig c;
    check_keys(j, "config",
               {"command", "map", "window", "slice", "green", "julia", "periodic", "entropy", "rng_seed", "threads",
                "out"});
    read(j, "command", c.command);
    if (j.contains("map")) {
        const auto& m = j["map"];
        check_keys(m, "map", {"kind", "a", "b", "c", "coeffs"});
        std::string kind = "henon";
        read(m, "kind", kind);
        if (kind == "henon") {
            c.map.kind = MapSpec::Kind::Henon;
            if (m.contains("a")) c.map.a = complex_from(m["a"], "map.a");
            if (m.contains("b")) c.map.b = complex_from(m["b"], "map.b");
        } else if (kind == "poly") {
            c.map.kind = MapSpec::Kind::Poly;
            if (m.contains("coeffs")) {
                if (!m["coeffs"].is_array()) throw ContractError("config: map.coeffs must be an array");
                c.map.coeffs.clear();
                for (const auto& v : m["coeffs"]) c.map.coeffs.push_back(complex_from(v, "map.coeffs"));
            } else if (m.contains("c")) {
                c.map.coeffs = {complex_from(m["c"], "map.c"), Complex{}, Complex{1.0, 0.0}};
            }
        } else {
            throw ContractError("config: map.kind must be \"henon\" or \"poly\"");
        }
    }
    if (j.contains("window")) {
        const auto& w = j["window"];
        check_keys(w, "window", {"center", "width", "height", "pixels"});
        if (w.contains("center")) c.window.center = complex_from(w["center"], "window.center");
        read(w, "width", c.window.width);
        read(w, "height", c.window.height);
        if (w.contains("pixels")) {
            const auto& p = w["pixels"];
            if (p.is_number_integer()) {
                c.window.pixels_x = c.window.pixels_y = p.get<int>();
            } else if (p.is_array() && p.size() == 2 && p[0].is_number_integer() && p[1].is_number_integer()) {
                c.window.pixels_x = p[0].get<int>();
                c.window.pixels_y = p[1].get<int>();
            } else {
                throw ContractError("config: window.pixels must be an integer or [w, h]");
            }
        }
    }
    if (j.contains("slice")) {
        const auto& s = j["slice"];
        check_keys(s, "slice", {"base", "direction"});
        if (s.contains("base")) c.slice_base = point_from(s["base"], "slice.base");
        if (s.contains("direction")) c.slice_direction = point_from(s["direction"], "slice.direction");
    }
    if (j.contains("green")) {
        const auto& g = j["green"];
        check_keys(g, "green", {"which", "tol", "budget"});
        read(g, "which", c.green);
        read(g, "tol", c.green_tol);
        read(g, "budget", c.green_budget);
    }
    if (j.contains("julia")) {
        const auto& g = j["julia"];
        check_keys(g, "julia", {"seed_point", "walks", "depth", "burn_in"});
        if (g.contains("seed_point")) c.julia_seed = complex_from(g["seed_point"], "julia.seed_point");
        read(g, "walks", c.julia_walks);
        read(g, "depth", c.julia_depth);
        read(g, "burn_in", c.julia_burn_in);
    }
    if (j.contains("periodic")) {
        const auto& g = j["periodic"];
        check_keys(g, "periodic", {"n_max", "budget"});
        read(g, "n_max", c.periodic_n_max);
        read(g, "budget", c.periodic_budget);
    }
    if (j.contains("entropy")) {
        const auto& g = j["entropy"];
        check_keys(g, "entropy", {"n_max", "reality_n_max"});
        read(g, "n_max", c.entropy_n_max);
        read(g, "reality_n_max", c.reality_n_max);
    }
    read(j, "rng_seed", c.rng_seed);
    read(j, "threads", c.threads);
    read(j, "out", c.out);
    c.validate();
    return c;
}

json config_to_json(const JobConfig& c) {
    json j;
    j["command"] = c.command;
    if (c.map.kind == MapSpec::Kind::Henon) {
        j["map"] = {{"kind", "henon"}, {"a", complex_json(c.map.a)}, {"b", complex_json(c.map.b)}};
    } else {
        json coeffs = json::array();
        for (auto z : c.map.coeffs) coeffs.push_back(complex_json(z));
        j["map"] = {{"kind", "poly"}, {"coeffs", coeffs}};
    }
    j["window"] = {{"center", complex_json(c.window.center)},
                   {"width", c.window.width},
                   {"height", c.window.height},
                   {"pixels", json::array({c.window.pixels_x, c.window.pixels_y})}};
    j["slice"] = {{"base", json::array({complex_json(c.slice_base.x), complex_json(c.slice_base.y)})},
                  {"direction", json::array({complex_json(c.slice_direction.x), complex_json(c.slice_direction.y)})}};
    j["green"] = {{"which", c.green}, {"tol", c.green_tol}, {"budget", c.green_budget}};
    j["julia"] = {{"seed_point", complex_json(c.julia_seed)},
                  {"walks", c.julia_walks},
                  {"depth", c.julia_depth},
                  {"burn_in", c.julia_burn_in}};
    j["periodic"] = {{"n_max", c.periodic_n_max}, {"budget", c.periodic_budget}};
    j["entropy"] = {{"n_max", c.entropy_n_max}, {"reality_n_max", c.reality_n_max}};
    j["rng_seed"] = c.rng_seed;
    j["threads"] = c.threads;
    j["out"] = c.out;
    return j;
}

std::string config_hash(const JobConfig& c) {
    json j = config_to_json(c);
    j.erase("threads");
    j.erase("out");
    const std::string text = j.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string provenance_line(const JobConfig& c) { return "cfg:" + config_hash(c) + " " + kToolVersion; }

}  // namespace henonlab
