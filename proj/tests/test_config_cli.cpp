#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "henonlab/cli.hpp"
#include "henonlab/config.hpp"

using namespace henonlab;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

class TempDir {
public:
    TempDir() {
        static int counter = 0;
        path_ = fs::temp_directory_path() / ("henonlab_cli_test_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                             "_" + std::to_string(counter++));
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

int run(const std::vector<std::string>& args, std::string* out_text = nullptr) {
    std::vector<std::string> full{"henonlab"};
    full.insert(full.end(), args.begin(), args.end());
    std::ostringstream out, err;
    const int code = run_cli(full, out, err);
    if (out_text) *out_text = out.str() + err.str();
    return code;
}

std::string write_config(const fs::path& dir, const json& j) {
    const auto path = (dir / "job.json").string();
    std::ofstream(path) << j.dump(2);
    return path;
}

json read_json(const fs::path& path) {
    std::ifstream in(path);
    return json::parse(in);
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// Object keys and value kinds; arrays are represented by their first element.
json skeleton(const json& j) {
    if (j.is_object()) {
        json s = json::object();
        for (const auto& [k, v] : j.items()) s[k] = skeleton(v);
        return s;
    }
    if (j.is_array()) return j.empty() ? json::array() : json::array({skeleton(j.front())});
    if (j.is_number()) return "number";
    return j.type_name();
}

}  // namespace

TEST(Config, DefaultsRoundTrip) {
    JobConfig c;
    c.map.a = Complex(1.4, 0.2);
    c.window.pixels_x = 17;
    c.green = "minus";
    const JobConfig back = config_from_json(config_to_json(c));
    EXPECT_EQ(config_to_json(back), config_to_json(c));
    EXPECT_EQ(config_hash(back), config_hash(c));
}

TEST(Config, HashIgnoresExecutionSettings) {
    JobConfig c;
    const std::string h = config_hash(c);
    c.threads = 8;
    c.out = "/somewhere";
    EXPECT_EQ(config_hash(c), h);
    c.rng_seed = 2;
    EXPECT_NE(config_hash(c), h);
    EXPECT_EQ(provenance_line(c), "cfg:" + config_hash(c) + " " + kToolVersion);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
    EXPECT_THROW(config_from_json(json{{"bogus", 1}}), ContractError);
    EXPECT_THROW(config_from_json(json{{"map", {{"kind", "henon"}, {"a", "ten"}}}}), ContractError);
    JobConfig c;
    c.threads = 0;
    EXPECT_THROW(c.validate(), ContractError);
    c = JobConfig{};
    c.map.b = 0.0;
    EXPECT_THROW(c.validate(), ContractError);
    const auto parsed = config_from_json(json{{"map", {{"kind", "henon"}, {"a", json::array({1.0, 2.0})}}}});
    EXPECT_EQ(parsed.map.a, Complex(1.0, 2.0));
}

TEST(Cli, ExitCodes) {
    TempDir dir;
    EXPECT_EQ(run({}), kExitContract);
    EXPECT_EQ(run({"no-such-command"}), kExitContract);
    EXPECT_EQ(run({"--config", (dir.path() / "missing.json").string(), "render-green"}), kExitIo);
    std::ofstream(dir.path() / "bad.json") << "{ not json";
    EXPECT_EQ(run({"--config", (dir.path() / "bad.json").string(), "render-green"}), kExitContract);
    const auto cfg = write_config(dir.path(), {{"map", {{"kind", "henon"}, {"a", 1.0}, {"b", 0.0}}}});
    EXPECT_EQ(run({"--config", cfg, "render-green", "--out", dir.path().string()}), kExitContract);
    EXPECT_EQ(run({"--config", cfg, "--threads", "0", "periodic-report"}), kExitContract);
}

TEST(Cli, RenderGreenSquareMapIsLogPlus) {
    TempDir dir;
    const auto cfg = write_config(dir.path(), {{"map", {{"kind", "poly"}, {"coeffs", {0.0, 0.0, 1.0}}}},
                                               {"green", {{"which", "poly"}}},
                                               {"window", {{"center", 0.0}, {"width", 4.0}, {"height", 4.0}, {"pixels", {32, 32}}}}});
    ASSERT_EQ(run({"--config", cfg, "--out", dir.path().string(), "render-green"}), kExitOk);
    std::ifstream in(dir.path() / "green.csv");
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line.rfind("# cfg:", 0), 0U);
    std::getline(in, line);
    int rows = 0;
    while (std::getline(in, line)) {
        std::istringstream s(line);
        std::string field;
        std::vector<double> v;
        while (std::getline(s, field, ',')) v.push_back(std::stod(field));
        ASSERT_EQ(v.size(), 7U);
        const double r = std::hypot(v[2], v[3]);
        EXPECT_NEAR(v[4], r > 1.0 ? std::log(r) : 0.0, 1e-9);
        ++rows;
    }
    EXPECT_EQ(rows, 32 * 32);
    const std::string pgm = slurp(dir.path() / "green.pgm");
    EXPECT_EQ(pgm.rfind("P5\n# cfg:", 0), 0U);
    const json stats = read_json(dir.path() / "green_stats.json");
    EXPECT_EQ(stats["config_hash"], config_hash(config_from_json(read_json(cfg))));
}

// K+ meets the line y = 0 in a Cantor set with empty interior, so no pixel
// center is exactly in it; the lowest percentile of G+ stands in for the zero set.
TEST(Cli, HenonSliceNearZeroSetInsideRadius) {
    TempDir dir;
    const auto cfg = write_config(dir.path(), {{"map", {{"kind", "henon"}, {"a", 10.0}, {"b", 0.3}}},
                                               {"window", {{"center", 0.0}, {"width", 12.0}, {"height", 12.0}, {"pixels", {64, 64}}}}});
    ASSERT_EQ(run({"--config", cfg, "--out", dir.path().string(), "render-green"}), kExitOk);
    const double R = MapParams(10.0, 0.3).radius();
    std::ifstream in(dir.path() / "green.csv");
    std::string line;
    std::getline(in, line);
    std::getline(in, line);
    std::vector<std::pair<double, double>> g_and_r;
    while (std::getline(in, line)) {
        std::istringstream s(line);
        std::string field;
        std::vector<double> v;
        while (std::getline(s, field, ',')) v.push_back(std::stod(field));
        g_and_r.emplace_back(v[4], std::hypot(v[2], v[3]));
    }
    ASSERT_EQ(g_and_r.size(), 64U * 64U);
    std::sort(g_and_r.begin(), g_and_r.end());
    for (std::size_t k = 0; k < g_and_r.size() / 100; ++k) EXPECT_LE(g_and_r[k].second, R);
    EXPECT_GT(g_and_r.front().first, 0.0);
}

TEST(Cli, DeterministicAcrossThreadCounts) {
    TempDir a, b;
    const json job = {{"map", {{"kind", "poly"}, {"coeffs", {json::array({-0.12, 0.74}), 0.0, 1.0}}}},
                      {"julia", {{"seed_point", 0.5}, {"walks", 64}, {"depth", 30}, {"burn_in", 10}}},
                      {"window", {{"center", 0.0}, {"width", 3.0}, {"height", 3.0}, {"pixels", {70, 70}}}},
                      {"green", {{"which", "poly"}}}};
    const auto cfg = write_config(a.path(), job);
    for (const char* cmd : {"julia-cloud", "render-green"}) {
        ASSERT_EQ(run({"--config", cfg, "--threads", "1", "--out", a.path().string(), cmd}), kExitOk);
        ASSERT_EQ(run({"--config", cfg, "--threads", "4", "--out", b.path().string(), cmd}), kExitOk);
    }
    for (const char* f : {"julia.csv", "julia.ppm", "green.csv", "green.pgm", "green_stats.json"})
        EXPECT_EQ(slurp(a.path() / f), slurp(b.path() / f)) << f;
}

TEST(Cli, PeriodicReportHorseshoe) {
    TempDir dir;
    const auto cfg = write_config(dir.path(), {{"periodic", {{"n_max", 6}}}});
    ASSERT_EQ(run({"--config", cfg, "--out", dir.path().string(), "periodic-report"}), kExitOk);
    const json report = read_json(dir.path() / "periodic_report.json");
    const auto& rows = report["saddle_ratio"]["rows"];
    ASSERT_EQ(rows.size(), 6U);
    EXPECT_GE(rows.back()["ratio"].get<double>(), 0.75);
    EXPECT_TRUE(report["complete"].get<bool>());
    EXPECT_EQ(report["reality"]["verdict"], "log2");
}

TEST(Cli, PeriodicReportSchemaMatchesGolden) {
    TempDir dir;
    const auto cfg = write_config(dir.path(), {{"periodic", {{"n_max", 3}}}});
    ASSERT_EQ(run({"--config", cfg, "--out", dir.path().string(), "periodic-report"}), kExitOk);
    const json report = read_json(dir.path() / "periodic_report.json");
    const json golden = read_json(fs::path(HENONLAB_GOLDEN_DIR) / "periodic_report.schema.json");
    EXPECT_EQ(skeleton(report), golden) << skeleton(report).dump(2);
}

TEST(Cli, PeriodicReportPeriodOneMatchesClosedForm) {
    TempDir dir;
    const auto cfg = write_config(dir.path(), {{"periodic", {{"n_max", 1}}}});
    ASSERT_EQ(run({"--config", cfg, "--out", dir.path().string(), "periodic-report"}), kExitOk);
    std::ifstream in(dir.path() / "orbits.csv");
    std::string line;
    std::vector<double> xs;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("n,", 0) == 0) continue;
        std::istringstream s(line);
        std::string field;
        for (int k = 0; k < 4 && std::getline(s, field, ','); ++k)
            if (k == 3) xs.push_back(std::stod(field));
    }
    ASSERT_EQ(xs.size(), 2U);
    const double disc = std::sqrt(1.3 * 1.3 + 40.0);
    std::sort(xs.begin(), xs.end());
    EXPECT_NEAR(xs[0], (-1.3 - disc) / 2, 1e-10);
    EXPECT_NEAR(xs[1], (-1.3 + disc) / 2, 1e-10);
}

TEST(Cli, EntropyReportBranches) {
    {
        TempDir dir;
        const auto cfg = write_config(dir.path(), {{"entropy", {{"n_max", 10}, {"reality_n_max", 6}}}});
        ASSERT_EQ(run({"--config", cfg, "--out", dir.path().string(), "entropy-report"}), kExitOk);
        const json r = read_json(dir.path() / "entropy_report.json");
        EXPECT_LT(r["entropy"]["abs_error_vs_log2"].get<double>(), 1e-6);
        EXPECT_TRUE(r["entropy"]["full_shift_realized"].get<bool>());
    }
    {
        TempDir dir;
        const auto cfg = write_config(dir.path(), {{"map", {{"kind", "henon"}, {"a", 0.1}, {"b", 0.3}}},
                                                   {"entropy", {{"n_max", 6}, {"reality_n_max", 6}}}});
        run({"--config", cfg, "--out", dir.path().string(), "entropy-report"});
        const json r = read_json(dir.path() / "entropy_report.json");
        EXPECT_EQ(r["reality"]["verdict"], "below_log2");
        EXPECT_EQ(r["entropy"]["status"], "skipped");
    }
}
