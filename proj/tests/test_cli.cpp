#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "specflow/config.hpp"
#include "specflow/errors.hpp"
#include "specflow/experiments.hpp"
#include "specflow/flow.hpp"
#include "specflow/rng.hpp"
#include "specflow/rotation.hpp"

using namespace specflow;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
    fs::path p = fs::temp_directory_path() / ("specflow_test_" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(bool(in));
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Config base_config(const std::string& kind, const fs::path& out) {
    std::string text = "[experiment]\nkind = " + kind + "\nseed = 5\noutput = " + out.string() +
                       "\n[alpha]\nvalue = golden\ndepth = 40\n";
    return Config::parse(text, "<test>");
}

}  // namespace

TEST_CASE("config: defaults, types, diagnostics") {
    Config cfg = Config::parse("[experiment]\nkind = entropy-scan\n", "a.cfg");
    CHECK(cfg.kind() == "entropy-scan");
    CHECK(cfg.get_int("experiment.seed") == 1);          // default
    CHECK(cfg.get_string("alpha.value") == "golden");    // default
    CHECK(cfg.get_double("cover.epsilon") == 0.1);
    CHECK(cfg.get_bool("assert.monotone_s") == false);
    CHECK(cfg.get_list("grid.r") == std::vector<double>{50, 100, 200, 400, 800});

    // Unknown key: hard error naming file, line and key.
    try {
        Config::parse("[experiment]\nkind = pd-scan\nbogus = 1\n", "bad.cfg");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        std::string msg = e.what();
        CHECK(msg.find("bad.cfg:3") != std::string::npos);
        CHECK(msg.find("experiment.bogus") != std::string::npos);
    }
    CHECK_THROWS_AS(Config::parse("kind = pd-scan\n", "x.cfg"), ConfigError);  // no section
    CHECK_THROWS_AS(Config::parse("[experiment]\nkind pd-scan\n", "x.cfg"), ConfigError);
    CHECK_THROWS_AS(Config::parse("[experiment]\nkind = nope\n", "x.cfg"), ConfigError);

    // Type errors carry the key.
    Config c2 = Config::parse("[experiment]\nkind = pd-scan\n[pd]\npairs = many\n", "t.cfg");
    CHECK_THROWS_AS(c2.get_int("pd.pairs"), ConfigError);
}

TEST_CASE("config: overrides and digest stability") {
    Config cfg = Config::parse("[experiment]\nkind = entropy-scan\n", "a.cfg");
    std::uint64_t d0 = cfg.digest();
    // Cosmetic keys do not perturb the digest.
    cfg.apply_override("experiment.output=/tmp/elsewhere");
    cfg.apply_override("experiment.workers=8");
    CHECK(cfg.digest() == d0);
    // Result-affecting keys do.
    cfg.apply_override("experiment.seed=99");
    CHECK(cfg.digest() != d0);
    CHECK(cfg.get_int("experiment.seed") == 99);
    CHECK_THROWS_AS(cfg.apply_override("no.such=1"), ConfigError);
    CHECK_THROWS_AS(cfg.apply_override("malformed"), ConfigError);

    // Canonical form is deterministic and omits cosmetic keys.
    CHECK(cfg.canonical().find("workers") == std::string::npos);
    CHECK(cfg.canonical().find("experiment.seed=99") != std::string::npos);
}

TEST_CASE("orbit-code cache round-trip: 10^3 random codes") {
    CounterRng rng(2024, 0);
    std::uint64_t counter = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        OrbitCode code;
        code.m = 2 + std::uint32_t(rng.integer(counter++, 64));
        code.delta = rng.uniform(counter++, 0.01, 0.2);
        code.r = rng.uniform(counter++, 1.0, 100.0);
        code.origin.x = CirclePoint::from_double(rng.uniform(counter++));
        code.origin.s = rng.uniform(counter++);
        std::size_t len = 1 + rng.integer(counter++, 50);
        for (std::size_t k = 0; k < len; ++k)
            code.symbols.push_back(std::uint32_t(rng.bits(counter++)));
        std::stringstream buf;
        write_orbit_code(buf, code, 111, 222);
        OrbitCode back = read_orbit_code(buf, 111, 222);
        CHECK(back.m == code.m);
        CHECK(back.delta == code.delta);
        CHECK(back.r == code.r);
        CHECK(back.origin.x.raw() == code.origin.x.raw());
        CHECK(back.origin.s == code.origin.s);
        CHECK(back.symbols == code.symbols);
    }
}

TEST_CASE("entropy-scan experiment: artifacts, cache, worker independence") {
    fs::path out = fresh_dir("scan");
    Config cfg = base_config("entropy-scan", out / "a");
    cfg.apply_override("experiment.cache=" + (out / "cache").string());
    cfg.apply_override("cover.samples=30");
    cfg.apply_override("grid.r=20,40,80");
    cfg.apply_override("roof.kind=power");
    cfg.apply_override("roof.b=1");
    cfg.apply_override("experiment.workers=1");

    RunArtifacts a1 = run_experiment(cfg);
    CHECK(a1.exit_code == 0);
    CHECK(a1.files.size() == 3);
    std::string csv = slurp(out / "a" / "entropy-scan.csv");
    CHECK(csv.rfind("r,S,epsilon,beta,m,N\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);  // header + 3 rows
    std::string summary = slurp(out / "a" / "entropy-scan_summary.json");
    CHECK(summary.find("\"t_hat\"") != std::string::npos);
    CHECK(summary.find("\"residual\"") != std::string::npos);
    CHECK(summary.find("\"scale\"") != std::string::npos);

    // Different worker count, different output dir, same cache: byte-identical
    // CSV and summary, and the second run hits the cache.
    cfg.apply_override("experiment.output=" + (out / "b").string());
    cfg.apply_override("experiment.workers=8");
    RunArtifacts a2 = run_experiment(cfg);
    CHECK(a2.exit_code == 0);
    CHECK(slurp(out / "b" / "entropy-scan.csv") == csv);
    CHECK(slurp(out / "b" / "entropy-scan_summary.json") == summary);
    std::string manifest = slurp(out / "b" / "manifest.json");
    CHECK(manifest.find("\"hits\": 1") != std::string::npos);

    // Corrupt the cover cache: run recovers with a warning, same bytes.
    for (auto& entry : fs::directory_iterator(out / "cache"))
        if (entry.path().filename().string().rfind("cover_", 0) == 0) {
            std::ofstream(entry.path(), std::ios::binary) << "garbage";
        }
    cfg.apply_override("experiment.output=" + (out / "c").string());
    RunArtifacts a3 = run_experiment(cfg);
    CHECK(a3.exit_code == 0);
    CHECK(!a3.warnings.empty());
    CHECK(slurp(out / "c" / "entropy-scan.csv") == csv);
}

TEST_CASE("entropy-scan assertions drive the exit code") {
    fs::path out = fresh_dir("assert");
    Config cfg = base_config("entropy-scan", out);
    cfg.apply_override("cover.samples=20");
    cfg.apply_override("grid.r=20,40");
    cfg.apply_override("roof.kind=power");
    cfg.apply_override("roof.b=1");
    cfg.apply_override("assert.superlinear_s=true");
    RunArtifacts arts = run_experiment(cfg);
    // Saturated S cannot be superlinear: assertion fails, exit code 2.
    CHECK(arts.exit_code == 2);
    std::string summary = slurp(out / "entropy-scan_summary.json");
    CHECK(summary.find("superlinear_s") != std::string::npos);
}

TEST_CASE("cf-classify and birkhoff-growth experiments") {
    fs::path out = fresh_dir("cf");
    Config cfg = base_config("cf-classify", out);
    RunArtifacts arts = run_experiment(cfg);
    CHECK(arts.exit_code == 0);
    std::string csv = slurp(out / "cf-classify.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 42);  // header + k = 0..40
    std::string summary = slurp(out / "cf-classify_summary.json");
    CHECK(summary.find("\"in_D\"") != std::string::npos);

    fs::path out2 = fresh_dir("growth");
    Config g = base_config("birkhoff-growth", out2);
    g.apply_override("growth.q_min=50");
    g.apply_override("growth.q_max=3000");
    g.apply_override("growth.samples=20");
    g.apply_override("roof.kind=power");
    g.apply_override("roof.b=1");
    RunArtifacts ga = run_experiment(g);
    CHECK(ga.exit_code == 0);
    std::string gs = slurp(out2 / "birkhoff-growth_summary.json");
    CHECK(gs.find("\"t_hat\"") != std::string::npos);
    CHECK(gs.find("\"curve\"") != std::string::npos);

    // An impossible exponent band turns into exit code 2.
    g.apply_override("assert.t_band=9,10");
    g.apply_override("experiment.output=" + (out2 / "band").string());
    CHECK(run_experiment(g).exit_code == 2);
}

TEST_CASE("pd-scan, match-scan and occupancy-scan smoke runs") {
    fs::path out = fresh_dir("pd");
    Config pd = base_config("pd-scan", out);
    pd.apply_override("pd.pairs=5");
    pd.apply_override("pd.horizon=200");
    pd.apply_override("pd.r_filter=100");
    CHECK(run_experiment(pd).exit_code == 0);
    std::string ps = slurp(out / "pd-scan_summary.json");
    CHECK(ps.find("\"cocy_rate\"") != std::string::npos);
    std::string pcsv = slurp(out / "pd-scan.csv");
    CHECK(std::count(pcsv.begin(), pcsv.end(), '\n') == 6);

    fs::path out2 = fresh_dir("match");
    Config mt = base_config("match-scan", out2);
    mt.apply_override("match.r=30");
    CHECK(run_experiment(mt).exit_code == 0);
    CHECK(slurp(out2 / "match-scan_summary.json").find("total_close_time") != std::string::npos);

    fs::path out3 = fresh_dir("occ");
    Config oc = base_config("occupancy-scan", out3);
    oc.apply_override("roof.kind=power");
    oc.apply_override("roof.b=1");
    oc.apply_override("occupancy.t=120");
    oc.apply_override("occupancy.samples=3");
    oc.apply_override("occupancy.v_samples=20");
    oc.apply_override("occupancy.n_points=2");
    CHECK(run_experiment(oc).exit_code == 0);
    CHECK(slurp(out3 / "occupancy-scan_summary.json").find("mean_occupied_fraction") !=
          std::string::npos);
    CHECK(slurp(out3 / "v-complement.csv").rfind("n,fraction\n", 0) == 0);
}

TEST_CASE("plot: SVG output, overlays and error paths") {
    fs::path out = fresh_dir("plot");
    // Two summaries with curves at different exponents.
    for (int i = 0; i < 2; ++i) {
        Config cfg = base_config("entropy-scan", out / std::to_string(i));
        cfg.apply_override("cover.samples=" + std::string(i ? "25" : "15"));
        cfg.apply_override("grid.r=20,40,80");
        cfg.apply_override("roof.kind=power");
        cfg.apply_override("roof.b=1");
        run_experiment(cfg);
    }
    std::string s0 = (out / "0" / "entropy-scan_summary.json").string();
    std::string s1 = (out / "1" / "entropy-scan_summary.json").string();

    std::string single = (out / "single.svg").string();
    render_plot({s0}, single);
    std::string svg = slurp(single);
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("t-hat = ") != std::string::npos);
    CHECK(svg.find("polyline") != std::string::npos);

    std::string overlay = (out / "overlay.svg").string();
    render_plot({s0, s1}, overlay);
    std::string ov = slurp(overlay);
    // Two legend entries, two colors.
    CHECK(ov.find("#1f77b4") != std::string::npos);
    CHECK(ov.find("#d62728") != std::string::npos);

    CHECK_THROWS_AS(render_plot({(out / "missing.json").string()}, (out / "x.svg").string()),
                    ConfigError);
    // A summary without curve data (pd-scan style) is rejected, no file.
    std::ofstream(out / "nocurve.json") << "{\"kind\": \"pd-scan\"}";
    CHECK_THROWS_AS(render_plot({(out / "nocurve.json").string()}, (out / "y.svg").string()),
                    ConfigError);
    CHECK(!fs::exists(out / "y.svg"));
    CHECK_THROWS_AS(render_plot({}, (out / "z.svg").string()), ConfigError);
}

TEST_CASE("cf_table formats the expansion") {
    std::string table = cf_table("golden", 12, 2.0);
    CHECK(table.find("  1         1") != std::string::npos);
    CHECK(table.find("144") != std::string::npos);  // q_12
    CHECK(table.find("class D (c = 2): yes") != std::string::npos);
    CHECK_THROWS_AS(cf_table("0.5", 10, 2.0), AlphaRational);
}

TEST_CASE("specflow binary: exit codes") {
    // ctest runs from the build directory where the binary lives.
    if (!fs::exists("specflow")) return;  // manual runs from elsewhere
    fs::path out = fresh_dir("bin");
    std::ofstream(out / "bad.cfg") << "[experiment]\nkind = entropy-scan\nwhat = 1\n";
    std::string cmd = "./specflow run " + (out / "bad.cfg").string() + " 2> " +
                      (out / "err.txt").string();
    int rc = std::system(cmd.c_str());
    CHECK(WEXITSTATUS(rc) == 1);
    CHECK(slurp(out / "err.txt").find("experiment.what") != std::string::npos);

    int rc2 = std::system(("./specflow cf silver --depth 6 > " + (out / "cf.txt").string()).c_str());
    CHECK(WEXITSTATUS(rc2) == 0);
    CHECK(slurp(out / "cf.txt").find("2/5") != std::string::npos);
}
