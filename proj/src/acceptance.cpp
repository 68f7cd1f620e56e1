#include "henonlab/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <numbers>
#include <random>
#include <sstream>

#include <unistd.h>

#include "henonlab/cli.hpp"
#include "henonlab/measures.hpp"
#include "henonlab/periodic.hpp"
#include "henonlab/poly1d.hpp"
#include "henonlab/potential.hpp"
#include "henonlab/symbolic.hpp"

namespace henonlab {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

std::string fmt(const char* pattern, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

// Minimal-period point counts of the full 2-shift: sum over d | n of mobius(d) 2^(n/d).
std::uint64_t necklace_points(int n) {
    auto mobius = [](int d) {
        int result = 1;
        for (int p = 2; p * p <= d; ++p) {
            if (d % p != 0) continue;
            d /= p;
            if (d % p == 0) return 0;
            result = -result;
        }
        return d > 1 ? -result : result;
    };
    std::int64_t s = 0;
    for (int d = 1; d <= n; ++d)
        if (n % d == 0) s += mobius(d) * (std::int64_t{1} << (n / d));
    return static_cast<std::uint64_t>(s);
}

struct Context {
    ParallelFor parallel;
    std::string scratch;
    int threads = 1;
    // Horseshoe enumeration, shared by criteria 6 to 9 and 11.
    std::vector<PeriodicSet> horseshoe;
};

const MapParams& horseshoe_params() {
    static const MapParams m(10.0, 0.3);
    return m;
}

const std::vector<PeriodicSet>& horseshoe_levels(Context& ctx, int n_max) {
    const auto& m = horseshoe_params();
    while (static_cast<int>(ctx.horseshoe.size()) < n_max) {
        const int n = static_cast<int>(ctx.horseshoe.size()) + 1;
        ctx.horseshoe.push_back(periodic_points_2d(m, n, default_periodic_budget(n), 1, ctx.parallel));
    }
    return ctx.horseshoe;
}

CriterionResult exact_green(Context&) {
    CriterionResult r{1, "exact-green-z2", false, "", 0.0};
    const auto t0 = Clock::now();
    const Poly f = Poly::quadratic(0.0);
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const Complex z(u(rng), u(rng));
        const double oracle = std::max(0.0, std::log(std::abs(z)));
        worst = std::max(worst, std::abs(green_poly(z, f).value - oracle));
    }
    r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    r.pass = worst < 1e-9 && r.seconds < 1.0;
    r.detail = "max |G - log+|z|| = " + fmt("%.2e", worst) + " (tol 1e-9) over 1000 points, " +
               fmt("%.3f", r.seconds) + " s (limit 1 s)";
    return r;
}

CriterionResult brolin_preimages(Context&) {
    CriterionResult r{2, "brolin-preimages", false, "", 0.0};
    const auto t0 = Clock::now();
    const Poly f = Poly::quadratic(0.0);
    const double exact = angular_discrepancy(brolin_measure(f, PreimageMeasure{1.0, 12}), 1e-9);
    // Level-14 preimages of 0.5 lie on |z| = 0.5^(2^-14), 4.2e-5 inside the circle.
    const double nontrivial = angular_discrepancy(brolin_measure(f, PreimageMeasure{0.5, 14}), 1e-4);
    r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    r.pass = exact <= 1e-9 && nontrivial < 0.02 && r.seconds < 10.0;
    r.detail = "c=1 depth 12: " + fmt("%.2e", exact) + " (tol 1e-9); c=0.5 depth 14: " + fmt("%.2e", nontrivial) +
               " (tol 0.02); " + fmt("%.2f", r.seconds) + " s (limit 10 s)";
    return r;
}

CriterionResult brolin_periodic(Context&) {
    CriterionResult r{3, "brolin-periodic", false, "", 0.0};
    const auto t0 = Clock::now();
    const auto mu = brolin_measure(Poly::quadratic(0.0), PeriodicMeasure{10});
    double worst = 0.0;
    for (double x : {1.5, 2.0, 3.0}) worst = std::max(worst, std::abs(potential_of_measure(mu, x) - std::log(x)));
    r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    r.pass = mu.size() == 1024 && worst < 0.01;
    r.detail = std::to_string(mu.size()) + " atoms; max |p_mu(z) - log|z|| at z in {1.5,2,3} = " +
               fmt("%.2e", worst) + " (tol 0.01)";
    return r;
}

CriterionResult ddc_mass(Context&) {
    CriterionResult r{4, "ddc-mass-log", false, "", 0.0};
    const auto t0 = Clock::now();
    const ScalarGrid grid = ScalarGrid::sample({-1.0, -1.0}, 0.01, 201, 201, [](Complex z) { return std::log(std::abs(z)); });
    const DdcMass mass = discrete_ddc_mass(grid);
    const double inside = mass.mass_where([](Complex z) { return std::abs(z) < 0.5; });
    r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    r.pass = inside >= 0.99 && inside <= 1.01 && r.seconds < 5.0;
    r.detail = "mass in |z| < 0.5 = " + fmt("%.6f", inside) + " (accept [0.99, 1.01]); " + fmt("%.3f", r.seconds) +
               " s (limit 5 s)";
    return r;
}

CriterionResult functional_equation(Context&) {
    CriterionResult r{5, "henon-functional-equation", false, "", 0.0};
    const auto t0 = Clock::now();
    double worst = 0.0;
    std::string per_set;
    const std::vector<std::pair<Complex, Complex>> params{{10.0, 0.3}, {3.0, -0.5}, {{1.4, 0.2}, 0.3}};
    for (const auto& [a, b] : params) {
        const MapParams m(a, b);
        std::mt19937_64 rng(202);
        std::uniform_real_distribution<double> u(-1.5 * m.radius(), 1.5 * m.radius());
        int tested = 0;
        int drawn = 0;
        double w = 0.0;
        while (tested < 1000 && drawn < 100000) {
            ++drawn;
            const PointC2 p{{u(rng), u(rng)}, {u(rng), u(rng)}};
            const GreenEstimate g = green_plus(p, m);
            if (g.presumed_in_k || !(g.value > 0.0)) continue;
            const GreenEstimate gf = green_plus(henon_apply(p, m), m);
            w = std::max(w, std::abs(gf.value - 2.0 * g.value));
            ++tested;
        }
        if (tested < 1000) w = std::numeric_limits<double>::infinity();
        worst = std::max(worst, w);
        per_set += (per_set.empty() ? "" : ", ") + fmt("%.1e", w);
    }
    r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    r.pass = worst < 1e-6 && r.seconds < 10.0;
    r.detail = "max |G+(f p) - 2 G+(p)| per parameter set = [" + per_set + "] (tol 1e-6); " +
               fmt("%.2f", r.seconds) + " s (limit 10 s)";
    return r;
}

CriterionResult horseshoe_counts(Context& ctx) {
    CriterionResult r{6, "horseshoe-counts", false, "", 0.0};
    const auto t0 = Clock::now();
    const auto& levels = horseshoe_levels(ctx, 6);
    bool ok = true;
    double max_imag = 0.0;
    std::string counts;
    for (int n = 1; n <= 6; ++n) {
        const auto& s = levels[static_cast<std::size_t>(n - 1)];
        std::uint64_t saddles = 0;
        for (const auto& o : s.orbits) {
            if (o.period == n && o.cls == OrbitClass::Saddle) saddles += static_cast<std::uint64_t>(o.period);
            for (const auto& p : o.points) max_imag = std::max({max_imag, std::abs(p.x.imag()), std::abs(p.y.imag())});
        }
        ok = ok && s.complete && s.count == (std::uint64_t{1} << n) && saddles == necklace_points(n);
        counts += (counts.empty() ? "" : ",") + std::to_string(saddles);
    }
    r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    r.pass = ok && max_imag < 1e-7 && r.seconds < 120.0;
    r.detail = "minimal-period saddles n=1..6: " + counts + " (expected 2,2,6,12,30,54), fixed points of f^n = 2^n: " +
               (ok ? "yes" : "no") + ", max |Im| = " + fmt("%.1e", max_imag) + " (tol 1e-7); " +
               fmt("%.2f", r.seconds) + " s";
    return r;
}

CriterionResult saddle_trend(Context& ctx) {
    CriterionResult r{7, "saddle-ratio-trend", false, "", 0.0};
    const auto t0 = Clock::now();
    const SaddleTable t = saddle_count_ratio(horseshoe_levels(ctx, 6));
    std::string ratios;
    for (const auto& row : t.rows) ratios += (ratios.empty() ? "" : ", ") + fmt("%.5f", row.ratio);
    r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    r.pass = t.trend_increasing;
    r.detail = "|P_n|/2^n for n=1..6: " + ratios + " (need nondecreasing from n=3 and >= 0.75 at n=6)";
    return r;
}

CriterionResult mu_convergence(Context& ctx) {
    CriterionResult r{8, "mu-n-convergence", false, "", 0.0};
    const auto t0 = Clock::now();
    const auto& m = horseshoe_params();
    const auto& levels = horseshoe_levels(ctx, 8);
    const TestBattery battery(m.radius());
    const auto mu4 = mu_n_measure(levels[3]);
    const auto mu6 = mu_n_measure(levels[5]);
    const auto mu8 = mu_n_measure(levels[7]);
    const Discrepancy d46 = compare(mu4, mu6, battery);
    const Discrepancy d68 = compare(mu6, mu8, battery);
    const Discrepancy dcyl = compare(mu6, cylinder_pushforward(m, 3), battery);
    r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    r.pass = d46.value > d68.value && dcyl.value < 0.05 && !d46.advisory && !d68.advisory;
    r.detail = "compare(mu4,mu6) = " + fmt("%.3e", d46.value) + " > compare(mu6,mu8) = " + fmt("%.3e", d68.value) +
               "; compare(mu6, cylinder level 3) = " + fmt("%.3e", dcyl.value) + " (tol 0.05)";
    return r;
}

CriterionResult entropy(Context& ctx) {
    CriterionResult r{9, "entropy-log2", false, "", 0.0};
    const auto t0 = Clock::now();
    const auto& m = horseshoe_params();
    const auto& levels = horseshoe_levels(ctx, 10);
    std::vector<PeriodicSequence> codes;
    for (const auto& s : levels)
        for (const auto& o : s.orbits)
            if (o.period == s.n) codes.emplace_back(code_orbit(o.points[0], m, 0, o.period));
    bool full = true;
    for (int n = 1; n <= 8; ++n) full = full && count_admissible_words(codes, n) == (std::uint64_t{1} << n);
    const auto est = entropy_estimate([&](int n) { return count_admissible_words(codes, n); }, 10);
    const double err = std::abs(est.point_estimate - std::numbers::ln2);

    // Golden-mean control: all words of length 20 without "11".
    std::vector<SymbolWord> golden;
    for (std::uint32_t w = 0; w < (1u << 20); ++w) {
        if (w & (w >> 1)) continue;
        std::vector<std::uint8_t> bits(20);
        for (int k = 0; k < 20; ++k) bits[static_cast<std::size_t>(k)] = (w >> k) & 1u;
        golden.emplace_back(std::move(bits));
    }
    const auto gest = entropy_estimate([&](int n) { return count_admissible_words(golden, n); }, 20);
    const double log_phi = std::log((1.0 + std::sqrt(5.0)) / 2.0);
    const double rel = std::abs(gest.point_estimate - log_phi) / log_phi;
    r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    r.pass = full && err < 1e-6 && rel < 0.05;
    r.detail = std::string("all 2^n words for n<=8: ") + (full ? "yes" : "no") + "; |h - log 2| = " +
               fmt("%.2e", err) + " (tol 1e-6); golden mean n=20: " + fmt("%.5f", gest.point_estimate) + " vs " +
               fmt("%.5f", log_phi) + " (rel " + fmt("%.2f%%", 100.0 * rel) + ", tol 5%)";
    return r;
}

CriterionResult filtration(Context&) {
    CriterionResult r{10, "filtration-absorption", false, "", 0.0};
    const auto t0 = Clock::now();
    const std::vector<std::pair<Complex, Complex>> params{
        {10.0, 0.3}, {3.0, -0.5}, {{1.4, 0.2}, 0.3}, {0.1, 0.3}, {{-1.0, 0.5}, {0.0, 0.8}}};
    std::size_t violations = 0;
    std::size_t total = 0;
    for (const auto& [a, b] : params) {
        const MapParams m(a, b);
        const double R = m.radius();
        const double logR = std::log(R);
        std::mt19937_64 rng(303);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int k = 0; k < 10000; ++k) {
            const double rx = R * (1.0 + 9.0 * u(rng));
            const double ry = rx * u(rng);
            WidePoint p{std::polar(rx, 2.0 * std::numbers::pi * u(rng)), std::polar(ry, 2.0 * std::numbers::pi * u(rng))};
            double prev = p.x.log_abs();
            bool ok = true;
            for (int step = 0; step < 20 && ok; ++step) {
                p = henon_apply_wide(p, m);
                const double lx = p.x.log_abs();
                ok = lx >= logR && lx >= p.y.log_abs() && lx > prev;
                prev = lx;
            }
            ++total;
            violations += ok ? 0 : 1;
        }
    }
    r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    r.pass = violations == 0;
    r.detail = std::to_string(violations) + " violations among " + std::to_string(total) +
               " B- points x 20 iterates over 5 parameter sets";
    return r;
}

CriterionResult unstable_density(Context& ctx) {
    CriterionResult r{11, "unstable-manifold-density", false, "", 0.0};
    const auto t0 = Clock::now();
    const auto& m = horseshoe_params();
    const auto& levels = horseshoe_levels(ctx, 6);
    const auto fixed = fixed_points_closed_form(m);
    const PeriodicOrbit& saddle = fixed.front();  // x < 0
    const UnstableCloud cloud = unstable_disk_sample(saddle, m, 12, 200000);
    double worst = 0.0;
    std::size_t targets = 0;
    for (const auto& s : levels)
        for (const auto& o : s.orbits) {
            if (s.n > 6 || o.period != s.n || o.cls != OrbitClass::Saddle) continue;
            for (const auto& q : o.points) {
                double best = std::numeric_limits<double>::infinity();
                for (const auto& p : cloud.points) best = std::min(best, distance(p, q));
                worst = std::max(worst, best);
                ++targets;
            }
        }
    r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    r.pass = targets == 106 && worst < 1e-2 && r.seconds < 60.0;
    r.detail = std::to_string(cloud.points.size()) + " cloud points; max distance to " + std::to_string(targets) +
               " period<=6 saddle points = " + fmt("%.2e", worst) + " (tol 1e-2); " + fmt("%.2f", r.seconds) +
               " s (limit 60 s)";
    return r;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

CriterionResult determinism(Context& ctx) {
    CriterionResult r{12, "cli-determinism", false, "", 0.0};
    const auto t0 = Clock::now();
    fs::path root = ctx.scratch.empty() ? fs::temp_directory_path() / ("henonlab-accept-" + std::to_string(::getpid()))
                                        : fs::path(ctx.scratch);
    fs::create_directories(root);

    struct Job {
        std::string command;
        std::string config;
    };
    const std::vector<Job> jobs{
        {"render-green",
         R"({"map":{"kind":"henon","a":1.4,"b":0.3},"green":{"which":"plus"},"window":{"center":0,"width":4,"height":4,"pixels":[96,80]}})"},
        {"julia-cloud",
         R"({"map":{"kind":"poly","c":[-0.12,0.74]},"julia":{"seed_point":1,"walks":200,"depth":30,"burn_in":10},"window":{"pixels":128}})"},
        {"periodic-report", R"({"map":{"kind":"henon","a":1.4,"b":0.3},"periodic":{"n_max":4}})"},
        {"entropy-report", R"({"map":{"kind":"henon","a":10,"b":0.3},"entropy":{"n_max":6,"reality_n_max":4}})"},
    };
    std::size_t files = 0;
    std::string mismatch;
    for (const auto& job : jobs) {
        const fs::path cfg = root / (job.command + ".json");
        std::ofstream(cfg) << job.config;
        std::vector<fs::path> outs;
        for (int threads : {1, 4}) {
            const fs::path out = root / (job.command + "-t" + std::to_string(threads));
            fs::remove_all(out);
            std::ostringstream sink;
            const int code = run_cli({"henonlab", job.command, "--config", cfg.string(), "--threads",
                                      std::to_string(threads), "--out", out.string()},
                                     sink, sink);
            if (code == kExitContract || code == kExitIo) mismatch += job.command + " failed (exit " + std::to_string(code) + "); ";
            outs.push_back(out);
        }
        std::vector<std::string> names;
        for (const auto& e : fs::directory_iterator(outs[0])) names.push_back(e.path().filename().string());
        std::sort(names.begin(), names.end());
        std::size_t other = 0;
        for ([[maybe_unused]] const auto& e : fs::directory_iterator(outs[1])) ++other;
        if (names.empty() || other != names.size()) mismatch += job.command + " file sets differ; ";
        for (const auto& n : names) {
            ++files;
            if (read_file(outs[0] / n) != read_file(outs[1] / n)) mismatch += job.command + "/" + n + " differs; ";
        }
    }
    if (ctx.scratch.empty()) fs::remove_all(root);
    r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    r.pass = mismatch.empty();
    r.detail = mismatch.empty() ? std::to_string(files) + " output files bit-identical at 1 vs 4 threads across 4 commands"
                                : mismatch;
    return r;
}

}  // namespace

std::string format_result(const CriterionResult& r) {
    char head[64];
    std::snprintf(head, sizeof head, "%s %2d %s: ", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str());
    return head + r.detail;
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options,
                                            const std::function<void(const CriterionResult&)>& on_result) {
    Context ctx;
    ctx.parallel = make_thread_parallel(options.threads);
    ctx.scratch = options.scratch_dir;
    ctx.threads = options.threads;
    using Check = CriterionResult (*)(Context&);
    const Check checks[] = {exact_green,      brolin_preimages, brolin_periodic, ddc_mass,
                            functional_equation, horseshoe_counts, saddle_trend,   mu_convergence,
                            entropy,          filtration,       unstable_density, determinism};
    std::vector<CriterionResult> results;
    for (int id = 1; id <= 12; ++id) {
        if (!options.only.empty() && std::find(options.only.begin(), options.only.end(), id) == options.only.end())
            continue;
        CriterionResult r;
        try {
            r = checks[id - 1](ctx);
        } catch (const std::exception& e) {
            r.id = id;
            r.name = "criterion";
            r.pass = false;
            r.detail = std::string("raised: ") + e.what();
        }
        if (on_result) on_result(r);
        results.push_back(std::move(r));
    }
    return results;
}

}  // namespace henonlab
