#include "henonlab/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <mutex>
#include <numbers>
#include <thread>

#include <CLI11.hpp>

#include "henonlab/acceptance.hpp"
#include "henonlab/measures.hpp"
#include "henonlab/periodic.hpp"
#include "henonlab/poly1d.hpp"
#include "henonlab/potential.hpp"
#include "henonlab/symbolic.hpp"

namespace henonlab {

using nlohmann::json;
namespace fs = std::filesystem;

ParallelFor make_thread_parallel(int threads) {
    if (threads <= 1) return run_serial;
    return [threads](std::size_t count, const std::function<void(std::size_t)>& task) {
        if (count <= 1) {
            run_serial(count, task);
            return;
        }
        std::atomic<std::size_t> next{0};
        std::mutex lock;
        std::size_t failed_index = std::numeric_limits<std::size_t>::max();
        std::exception_ptr failure;
        auto worker = [&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    task(i);
                } catch (...) {
                    std::lock_guard<std::mutex> g(lock);
                    if (i < failed_index) {
                        failed_index = i;
                        failure = std::current_exception();
                    }
                }
            }
        };
        const auto n = std::min<std::size_t>(static_cast<std::size_t>(threads), count);
        std::vector<std::thread> pool;
        pool.reserve(n);
        for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
        if (failure) std::rethrow_exception(failure);
    };
}

namespace {

fs::path prepare_out(const JobConfig& c) {
    const fs::path dir(c.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError(c.out, "cannot create output directory");
    return dir;
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(path.string(), "cannot open for writing");
    out << j.dump(2) << '\n';
    if (!out) throw IoError(path.string(), "write failed");
}

// Execution settings (threads, output directory) are left out so that reruns
// with other settings produce identical files.
json header_json(const JobConfig& c) {
    json cfg = config_to_json(c);
    cfg.erase("threads");
    cfg.erase("out");
    return {{"tool_version", kToolVersion}, {"config_hash", config_hash(c)}, {"config", cfg}};
}

// Tiles of 64x64 pixels, processed in any order but each writing only its own pixels.
void for_each_tile(int width, int height, const ParallelFor& parallel, const std::function<void(int, int)>& pixel) {
    constexpr int kTile = 64;
    const int tx = (width + kTile - 1) / kTile;
    const int ty = (height + kTile - 1) / kTile;
    parallel(static_cast<std::size_t>(tx) * static_cast<std::size_t>(ty), [&](std::size_t t) {
        const int i0 = static_cast<int>(t % static_cast<std::size_t>(tx)) * kTile;
        const int j0 = static_cast<int>(t / static_cast<std::size_t>(tx)) * kTile;
        for (int j = j0; j < std::min(j0 + kTile, height); ++j)
            for (int i = i0; i < std::min(i0 + kTile, width); ++i) pixel(i, j);
    });
}

void write_ppm(const fs::path& path, int width, int height, const std::vector<unsigned char>& rgb,
               const std::string& comment) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(path.string(), "cannot open for writing");
    out << "P6\n# " << comment << '\n' << width << ' ' << height << "\n255\n";
    out.write(reinterpret_cast<const char*>(rgb.data()), static_cast<std::streamsize>(rgb.size()));
    if (!out) throw IoError(path.string(), "write failed");
}

}  // namespace

int cmd_render_green(const JobConfig& c, std::ostream& log) {
    const auto dir = prepare_out(c);
    const int W = c.window.pixels_x;
    const int H = c.window.pixels_y;
    const auto parallel = make_thread_parallel(c.threads);

    std::function<GreenEstimate(Complex)> green;
    if (c.green == "poly") {
        const Poly f = c.map.poly();
        green = [f, &c](Complex z) { return green_poly(z, f, c.green_tol, c.green_budget); };
    } else {
        const MapParams m = c.map.henon();
        const bool plus = c.green == "plus";
        green = [m, plus, &c](Complex z) {
            const PointC2 p = c.slice_base + z * c.slice_direction;
            return plus ? green_plus(p, m, c.green_tol, c.green_budget) : green_minus(p, m, c.green_tol, c.green_budget);
        };
    }

    std::vector<GreenEstimate> est(static_cast<std::size_t>(W) * static_cast<std::size_t>(H));
    for_each_tile(W, H, parallel, [&](int i, int j) {
        est[static_cast<std::size_t>(j) * W + i] = green(c.window.pixel(i, j));
    });

    std::vector<double> shade(est.size());
    std::vector<bool> black(est.size());
    double g_min = std::numeric_limits<double>::infinity();
    double g_max = 0.0;
    std::size_t zero = 0;
    std::size_t unconverged = 0;
    for (std::size_t k = 0; k < est.size(); ++k) {
        const double g = est[k].value;
        shade[k] = std::log1p(g);
        black[k] = est[k].presumed_in_k || g == 0.0;
        g_min = std::min(g_min, g);
        g_max = std::max(g_max, g);
        zero += black[k] ? 1 : 0;
        unconverged += est[k].converged ? 0 : 1;
    }
    const double hi = std::log1p(g_max);
    const std::string prov = provenance_line(c);
    write_pgm((dir / "green.pgm").string(), W, H, shade, 0.0, hi, black, prov);

    {
        const fs::path path = dir / "green.csv";
        std::ofstream out(path, std::ios::binary);
        if (!out) throw IoError(path.string(), "cannot open for writing");
        out << "# " << prov << '\n' << "i,j,re,im,green,converged,presumed_in_k\n" << std::setprecision(17);
        for (int j = 0; j < H; ++j)
            for (int i = 0; i < W; ++i) {
                const auto& e = est[static_cast<std::size_t>(j) * W + i];
                const Complex z = c.window.pixel(i, j);
                out << i << ',' << j << ',' << z.real() << ',' << z.imag() << ',' << e.value << ','
                    << (e.converged ? 1 : 0) << ',' << (e.presumed_in_k ? 1 : 0) << '\n';
            }
        if (!out) throw IoError(path.string(), "write failed");
    }

    constexpr int kBins = 16;
    std::vector<std::size_t> hist(kBins, 0);
    for (double s : shade) {
        const int b = hi > 0.0 ? std::min(kBins - 1, static_cast<int>(s / hi * kBins)) : 0;
        ++hist[static_cast<std::size_t>(b)];
    }
    json stats = header_json(c);
    stats["pixels"] = est.size();
    stats["min"] = g_min;
    stats["max"] = g_max;
    stats["zero_pixels"] = zero;
    stats["unconverged_pixels"] = unconverged;
    stats["histogram"] = {{"quantity", "log(1+G)"}, {"lo", 0.0}, {"hi", hi}, {"counts", hist}};
    write_json(dir / "green_stats.json", stats);

    log << "render-green: " << W << "x" << H << " pixels, G in [" << g_min << ", " << g_max << "], " << zero
        << " in K-proxy, " << unconverged << " unconverged\n";
    return unconverged == 0 ? kExitOk : kExitIncomplete;
}

int cmd_julia_cloud(const JobConfig& c, std::ostream& log) {
    const auto dir = prepare_out(c);
    const Poly f = c.map.poly();
    const auto cloud = julia_render_points(f, c.julia_seed, c.julia_walks, c.julia_depth, c.julia_burn_in,
                                           c.rng_seed, make_thread_parallel(c.threads));
    const std::string prov = provenance_line(c);
    {
        const fs::path path = dir / "julia.csv";
        std::ofstream out(path, std::ios::binary);
        if (!out) throw IoError(path.string(), "cannot open for writing");
        out << "# " << prov << '\n' << "level,re,im\n" << std::setprecision(17);
        for (const auto& p : cloud) out << p.level << ',' << p.z.real() << ',' << p.z.imag() << '\n';
        if (!out) throw IoError(path.string(), "write failed");
    }

    const int W = c.window.pixels_x;
    const int H = c.window.pixels_y;
    std::vector<unsigned char> rgb(static_cast<std::size_t>(W) * static_cast<std::size_t>(H) * 3, 0);
    const double x0 = c.window.center.real() - 0.5 * c.window.width;
    const double y1 = c.window.center.imag() + 0.5 * c.window.height;
    const int span = std::max(1, c.julia_depth - c.julia_burn_in - 1);
    std::size_t plotted = 0;
    for (const auto& p : cloud) {
        const int i = static_cast<int>(std::floor((p.z.real() - x0) / c.window.width * W));
        const int j = static_cast<int>(std::floor((y1 - p.z.imag()) / c.window.height * H));
        if (i < 0 || j < 0 || i >= W || j >= H) continue;
        const double t = static_cast<double>(p.level - c.julia_burn_in - 1) / span;
        unsigned char* px = &rgb[(static_cast<std::size_t>(j) * W + i) * 3];
        px[0] = static_cast<unsigned char>(std::lround(64 + 191 * t));
        px[1] = static_cast<unsigned char>(std::lround(128 + 127 * t));
        px[2] = static_cast<unsigned char>(std::lround(255 - 191 * t));
        ++plotted;
    }
    write_ppm(dir / "julia.ppm", W, H, rgb, prov);
    log << "julia-cloud: " << cloud.size() << " points, " << plotted << " inside the window\n";
    return kExitOk;
}

namespace {

std::vector<PeriodicSet> enumerate_levels(const JobConfig& c, const MapParams& m, int n_max) {
    const auto parallel = make_thread_parallel(c.threads);
    std::vector<PeriodicSet> levels;
    for (int n = 1; n <= n_max; ++n) {
        const int budget = c.periodic_budget > 0 ? c.periodic_budget : default_periodic_budget(n);
        levels.push_back(periodic_points_2d(m, n, budget, c.rng_seed, parallel));
    }
    return levels;
}

json reality_json(const RealityReport& r) {
    json levels = json::array();
    for (const auto& l : r.levels)
        levels.push_back({{"n", l.n},
                          {"count", l.count},
                          {"complete", l.complete},
                          {"max_imag", l.max_imag},
                          {"max_condition", l.max_condition}});
    json j = {{"status", "computed"},
              {"levels", levels},
              {"complete", r.complete},
              {"all_real", r.all_real},
              {"max_imag", r.max_imag},
              {"reality_tol", kRealityTol},
              {"horseshoe_regime", r.horseshoe},
              {"verdict", to_string(r.verdict)}};
    j["kc_equals_kr_consistent"] = r.kc_equals_kr_consistent ? json(*r.kc_equals_kr_consistent) : json(nullptr);
    return j;
}

}  // namespace

int cmd_periodic_report(const JobConfig& c, std::ostream& log) {
    const auto dir = prepare_out(c);
    const MapParams m = c.map.henon();
    const auto levels = enumerate_levels(c, m, c.periodic_n_max);
    const std::string prov = provenance_line(c);
    write_orbits_csv((dir / "orbits.csv").string(), levels, prov);

    const SaddleTable table = saddle_count_ratio(levels);
    {
        const fs::path path = dir / "saddle_ratio.csv";
        std::ofstream out(path, std::ios::binary);
        if (!out) throw IoError(path.string(), "cannot open for writing");
        out << "# " << prov << '\n' << "n,saddles,ratio,complete\n" << std::setprecision(17);
        for (const auto& r : table.rows) out << r.n << ',' << r.saddles << ',' << r.ratio << ',' << (r.complete ? 1 : 0) << '\n';
        if (!out) throw IoError(path.string(), "write failed");
    }

    json report = header_json(c);
    json lv = json::array();
    bool complete = true;
    for (const auto& s : levels) {
        std::size_t minimal = 0;
        for (const auto& o : s.orbits) minimal += o.period == s.n ? 1 : 0;
        lv.push_back({{"n", s.n},
                      {"count", s.count},
                      {"expected", std::uint64_t{1} << s.n},
                      {"complete", s.complete},
                      {"orbits", s.orbits.size()},
                      {"minimal_period_orbits", minimal},
                      {"seeds_used", s.seeds_used}});
        complete = complete && s.complete;
    }
    report["levels"] = lv;
    json rows = json::array();
    for (const auto& r : table.rows)
        rows.push_back({{"n", r.n}, {"saddles", r.saddles}, {"ratio", r.ratio}, {"complete", r.complete}});
    report["saddle_ratio"] = {{"rows", rows}, {"complete", table.complete}, {"trend_increasing", table.trend_increasing}};
    report["reality"] = m.is_real() ? reality_json(reality_conditions_report(m, levels))
                                    : json{{"status", "skipped"}, {"reason", "parameters are not real"}};

    const TestBattery battery(m.radius());
    std::vector<DiscreteMeasure> mus;
    for (const auto& s : levels) mus.push_back(mu_n_measure(s));
    json matrix = json::array();
    bool advisory = false;
    for (std::size_t i = 0; i < mus.size(); ++i) {
        json row = json::array();
        for (std::size_t k = 0; k < mus.size(); ++k) {
            const Discrepancy d = compare(mus[i], mus[k], battery);
            row.push_back(d.value);
            advisory = advisory || d.advisory;
        }
        matrix.push_back(row);
    }
    report["mu_comparison"] = {{"battery_sigma", battery.sigma()}, {"matrix", matrix}, {"advisory", advisory}};
    report["complete"] = complete;
    write_json(dir / "periodic_report.json", report);

    log << "periodic-report: levels 1.." << c.periodic_n_max << (complete ? " complete" : " INCOMPLETE")
        << ", saddle ratio trend " << (table.trend_increasing ? "increasing" : "not increasing") << '\n';
    return complete ? kExitOk : kExitIncomplete;
}

int cmd_entropy_report(const JobConfig& c, std::ostream& log) {
    const auto dir = prepare_out(c);
    const MapParams m = c.map.henon();
    const bool horseshoe = is_horseshoe_regime(m);
    const int need = std::max(m.is_real() ? c.reality_n_max : 0, horseshoe ? c.entropy_n_max : 0);
    const auto levels = enumerate_levels(c, m, need);

    json report = header_json(c);
    bool inconclusive = false;

    if (m.is_real()) {
        const std::vector<PeriodicSet> head(levels.begin(), levels.begin() + c.reality_n_max);
        const RealityReport r = reality_conditions_report(m, head);
        report["reality"] = reality_json(r);
        inconclusive = inconclusive || r.verdict == EntropyVerdict::Inconclusive;
    } else {
        report["reality"] = {{"status", "skipped"}, {"reason", "parameters are not real"}};
    }

    if (!horseshoe) {
        report["entropy"] = {{"status", "skipped"},
                             {"reason", "coding hypothesis violated: not in the horseshoe regime"}};
    } else {
        std::vector<PeriodicSequence> codes;
        bool complete = true;
        for (const auto& s : levels) {
            complete = complete && s.complete;
            for (const auto& o : s.orbits)
                if (o.period == s.n) codes.emplace_back(code_orbit(o.points[0], m, 0, o.period));
        }
        if (codes.empty() || c.entropy_n_max < 3) {
            report["entropy"] = {{"status", "inconclusive"}, {"reason", "not enough coded orbits"}};
            inconclusive = true;
        } else {
            json counts = json::array();
            bool full = true;
            for (int n = 1; n <= c.entropy_n_max; ++n) {
                const std::uint64_t s = count_admissible_words(codes, n);
                counts.push_back({{"n", n}, {"words", s}, {"all_words", std::uint64_t{1} << n}});
                full = full && s == (std::uint64_t{1} << n);
            }
            const auto est = entropy_estimate([&](int n) { return count_admissible_words(codes, n); },
                                              c.entropy_n_max);
            report["entropy"] = {{"status", complete ? "computed" : "incomplete"},
                                 {"coded_orbits", codes.size()},
                                 {"word_counts", counts},
                                 {"full_shift_realized", full},
                                 {"point_estimate", est.point_estimate},
                                 {"slope_estimate", est.slope_estimate},
                                 {"log2", std::numbers::ln2},
                                 {"abs_error_vs_log2", std::abs(est.point_estimate - std::numbers::ln2)}};
            inconclusive = inconclusive || !complete;
        }
    }
    write_json(dir / "entropy_report.json", report);
    log << "entropy-report: reality " << report["reality"].value("verdict", "skipped") << ", entropy "
        << report["entropy"].value("status", "?") << '\n';
    return inconclusive ? kExitIncomplete : kExitOk;
}

int cmd_validate(const JobConfig& c, std::ostream& log) {
    AcceptanceOptions opt;
    opt.threads = c.threads;
    bool all = true;
    run_acceptance(opt, [&](const CriterionResult& r) {
        log << format_result(r) << '\n' << std::flush;
        all = all && r.pass;
    });
    return all ? kExitOk : kExitCriterionFailed;
}

namespace {

JobConfig load_config(const std::string& path) {
    if (path.empty()) return JobConfig{};
    std::ifstream in(path);
    if (!in) throw IoError(path, "cannot open config");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ContractError(path + ": malformed JSON: " + e.what());
    }
    return config_from_json(j);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Hénon map and polynomial dynamics toolkit", "henonlab"};
    app.require_subcommand(1, 1);
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::optional<std::string> out_dir;
    app.add_option("--config", config_path, "JSON job configuration");
    app.add_option("--seed", seed, "RNG seed (overrides rng_seed)");
    app.add_option("--threads", threads, "worker threads (overrides threads)");
    app.add_option("--out", out_dir, "output directory (overrides out)");
    for (const char* name : {"render-green", "julia-cloud", "periodic-report", "entropy-report", "validate"})
        app.add_subcommand(name)->fallthrough();
    app.set_version_flag("--version", kToolVersion);

    std::vector<std::string> rev(args.begin() + (args.empty() ? 0 : 1), args.end());
    std::reverse(rev.begin(), rev.end());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitContract;
    }

    try {
        JobConfig c = load_config(config_path);
        c.command = app.get_subcommands().front()->get_name();
        if (seed) c.rng_seed = *seed;
        if (threads) c.threads = *threads;
        if (out_dir) c.out = *out_dir;
        c.validate();
        if (c.command == "render-green") return cmd_render_green(c, out);
        if (c.command == "julia-cloud") return cmd_julia_cloud(c, out);
        if (c.command == "periodic-report") return cmd_periodic_report(c, out);
        if (c.command == "entropy-report") return cmd_entropy_report(c, out);
        return cmd_validate(c, out);
    } catch (const ContractError& e) {
        err << "error: " << e.what() << '\n';
        return kExitContract;
    } catch (const IoError& e) {
        err << "I/O error: " << e.what() << '\n';
        return kExitIo;
    } catch (const IncompleteError& e) {
        err << "incomplete: " << e.what() << '\n';
        return kExitIncomplete;
    }
}

}  // namespace henonlab
