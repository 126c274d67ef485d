#include "specflow/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "specflow/entropy.hpp"
#include "specflow/errors.hpp"
#include "specflow/flow.hpp"
#include "specflow/parallel.hpp"
#include "specflow/roof.hpp"
#include "specflow/rotation.hpp"

namespace specflow {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ---- Formatting and CSV --------------------------------------------------

std::string fmt(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string fmt(long long v) { return std::to_string(v); }

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    for (std::size_t i = 0; i < header.size(); ++i)
        out << (i ? "," : "") << csv_quote(header[i]);
    out << "\n";
    for (auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_quote(row[i]);
        out << "\n";
    }
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", (unsigned long long)v);
    return buf;
}

// ---- Run context ---------------------------------------------------------

struct RunContext {
    const Config& cfg;
    fs::path out_dir;
    fs::path cache_dir;
    int workers = 1;
    std::uint64_t seed = 1;
    std::vector<std::pair<std::string, double>> stage_seconds;
    int cache_hits = 0, cache_misses = 0;
    std::vector<std::string> warnings;
    std::vector<std::pair<std::string, bool>> assertions;
    RunArtifacts arts;

    explicit RunContext(const Config& c) : cfg(c) {
        out_dir = fs::path(c.get_string("experiment.output"));
        fs::create_directories(out_dir);
        std::string cache = c.get_string("experiment.cache");
        if (cache.empty()) {
            if (const char* env = std::getenv("SPECFLOW_CACHE")) cache = env;
        }
        cache_dir = cache.empty() ? out_dir / "cache" : fs::path(cache);
        fs::create_directories(cache_dir);
        workers = int(c.get_int("experiment.workers"));
        if (workers <= 0) workers = default_workers();
        seed = std::uint64_t(c.get_int("experiment.seed"));
    }

    template <typename F>
    auto stage(const std::string& name, F&& fn) {
        auto t0 = std::chrono::steady_clock::now();
        if constexpr (std::is_void_v<decltype(fn())>) {
            fn();
            std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
            stage_seconds.emplace_back(name, dt.count());
        } else {
            auto out = fn();
            std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
            stage_seconds.emplace_back(name, dt.count());
            return out;
        }
    }

    std::string artifact(const std::string& name) {
        std::string p = (out_dir / name).string();
        arts.files.push_back(p);
        return p;
    }

    void write_summary(json summary) {
        if (!assertions.empty()) {
            json arr = json::array();
            for (auto& [name, pass] : assertions)
                arr.push_back({{"name", name}, {"pass", pass}});
            summary["assertions"] = arr;
        }
        if (!warnings.empty()) summary["warnings"] = warnings;
        summary["config_digest"] = hex64(cfg.digest());
        std::ofstream out(artifact(cfg.kind() + "_summary.json"), std::ios::binary);
        out << summary.dump(2) << "\n";
    }

    void write_manifest() {
        json m;
        m["config_digest"] = hex64(cfg.digest());
        m["tool_version"] = kToolVersion;
        json stages = json::object();
        for (auto& [name, secs] : stage_seconds) stages[name] = secs;
        m["wall_clock_seconds"] = stages;
        m["cache"] = {{"hits", cache_hits}, {"misses", cache_misses}};
        std::ofstream out(artifact("manifest.json"), std::ios::binary);
        out << m.dump(2) << "\n";
    }

    void finish() {
        write_manifest();
        arts.warnings = warnings;
        for (auto& [name, pass] : assertions)
            if (!pass) arts.exit_code = 2;
    }
};

RotationNumber rotation_from(const Config& cfg) {
    return parse_rotation(cfg.get_string("alpha.value"), int(cfg.get_int("alpha.depth")));
}

RoofSpec roof_from(const Config& cfg) {
    RoofSpec spec;
    std::string kind = cfg.get_string("roof.kind");
    if (kind == "log-asym")
        spec.kind = RoofKind::LogAsym;
    else if (kind == "power")
        spec.kind = RoofKind::Power;
    else
        throw ConfigError("roof.kind must be log-asym or power (got '" + kind + "')");
    spec.a = cfg.get_double("roof.a");
    spec.b = cfg.get_double("roof.b");
    spec.gamma = cfg.get_double("roof.gamma");
    spec.background = cfg.get_double("roof.background");
    if (spec.a <= 0 || spec.b <= 0 || spec.background < 0)
        throw ConfigError("roof coefficients must be positive");
    if (spec.kind == RoofKind::Power && (spec.gamma <= 0 || spec.gamma >= 1))
        throw ConfigError("roof.gamma must lie in (0,1)");
    return spec;
}

// ---- cf-classify ---------------------------------------------------------

void run_cf_classify(RunContext& ctx) {
    RotationNumber rot = ctx.stage("expand", [&] { return rotation_from(ctx.cfg); });
    DiophantineReport rep =
        classify_diophantine(rot, ctx.cfg.get_double("alpha.c_const"));

    std::vector<std::vector<std::string>> rows;
    for (int k = 0; k <= rot.depth; ++k) {
        rows.push_back({fmt((long long)k),
                        fmt((long long)(k >= 1 ? rot.quotients[std::size_t(k - 1)] : 0)),
                        fmt((long long)rot.p[std::size_t(k)]), fmt((long long)rot.q[std::size_t(k)]),
                        fmt(rot.signed_err[std::size_t(k)])});
    }
    write_csv(ctx.artifact("cf-classify.csv"), {"k", "a_k", "p_k", "q_k", "err"}, rows);

    json summary = json::parse(rep.to_json());
    summary["alpha"] = ctx.cfg.get_string("alpha.value");
    ctx.write_summary(summary);
}

// ---- birkhoff-growth -----------------------------------------------------

void run_birkhoff_growth(RunContext& ctx) {
    RotationNumber rot = rotation_from(ctx.cfg);
    RoofSpec spec = roof_from(ctx.cfg);
    auto q_min = std::uint64_t(ctx.cfg.get_int("growth.q_min"));
    auto q_max = std::uint64_t(ctx.cfg.get_int("growth.q_max"));
    int samples = int(ctx.cfg.get_int("growth.samples"));

    GrowthReport rep = ctx.stage("growth", [&] {
        return check_log_derivative_growth(spec, rot, samples, q_min, q_max, ctx.seed,
                                           ctx.workers);
    });
    if (rep.points.empty()) throw ConfigError("no denominators q_n inside [q_min, q_max]");

    std::vector<std::vector<std::string>> rows;
    std::vector<std::pair<double, double>> curve;
    for (auto& p : rep.points) {
        double qlogq = double(p.q_n) * std::log(double(p.q_n));
        double med_abs = p.median_ratio * qlogq;
        rows.push_back({fmt((long long)p.q_n), fmt(med_abs), fmt(p.median_ratio),
                        fmt(p.q1_ratio), fmt(p.q3_ratio)});
        curve.emplace_back(double(p.q_n), med_abs);
    }
    write_csv(ctx.artifact("birkhoff-growth.csv"),
              {"q_n", "median_abs_deriv", "median_ratio", "q1_ratio", "q3_ratio"}, rows);

    json summary;
    summary["kind"] = "birkhoff-growth";
    if (curve.size() >= 2) {
        ExponentFit fit = fit_exponent(curve, ScaleFamily::PowerScale);
        summary["t_hat"] = fit.t_hat;
        summary["residual"] = fit.residual;
        summary["intercept"] = fit.intercept;
        summary["scale"] = "power";
        summary["curve"] = {{"r", fit.r_grid}, {"s", fit.s_values}};
        std::string band = ctx.cfg.get_string("assert.t_band");
        if (!band.empty()) {
            auto lims = ctx.cfg.get_list("assert.t_band");
            if (lims.size() != 2) throw ConfigError("assert.t_band needs two numbers");
            ctx.assertions.emplace_back("t_band",
                                        fit.t_hat >= lims[0] && fit.t_hat <= lims[1]);
        }
    }
    ctx.write_summary(summary);
}

// ---- entropy-scan --------------------------------------------------------

struct Fnv {
    std::uint64_t h = 1469598103934665603ull;
    void mix(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h ^= (v >> (8 * i)) & 0xFF;
            h *= 1099511628211ull;
        }
    }
    void mix(double d) {
        std::uint64_t bits;
        std::memcpy(&bits, &d, 8);
        mix(bits);
    }
};

std::uint64_t code_cache_key(RunContext& ctx, const FlowParams& params, const PartitionSpec& part,
                             double delta, double r_max, int n_samples) {
    Fnv f;
    f.mix(alpha_digest(params.rot()));
    f.mix(params.roof().digest());
    f.mix(std::uint64_t(part.m));
    f.mix(delta);
    f.mix(r_max);
    f.mix(ctx.seed);
    f.mix(std::uint64_t(n_samples));
    return f.h;
}

std::vector<OrbitCode> load_or_encode_codes(RunContext& ctx, const FlowParams& params,
                                            const PartitionSpec& part, double delta, double r_max,
                                            int n_samples, std::uint64_t key) {
    std::uint64_t a_dig = alpha_digest(params.rot());
    std::uint64_t r_dig = params.roof().digest();
    fs::path path = ctx.cache_dir / ("codes_" + hex64(key) + ".bin");

    if (fs::exists(path)) {
        try {
            std::ifstream in(path, std::ios::binary);
            std::vector<OrbitCode> codes;
            codes.reserve(std::size_t(n_samples));
            for (int i = 0; i < n_samples; ++i)
                codes.push_back(read_orbit_code(in, a_dig, r_dig));
            ++ctx.cache_hits;
            return codes;
        } catch (const Error& e) {
            ctx.warnings.push_back(std::string("cache corrupt, recomputing: ") + e.what());
        }
    }
    ++ctx.cache_misses;

    FlowSample sample = sample_flow_measure(params, n_samples, ctx.seed, ctx.workers);
    if (sample.truncated_mass >= 1e-4)
        throw ConfigError("sampler truncation exceeds tolerance");
    std::vector<OrbitCode> codes;
    codes.resize(std::size_t(n_samples));
    parallel_for(std::size_t(n_samples), ctx.workers, [&](std::size_t i) {
        codes[i] = encode_orbit(params, sample.points[i], r_max, part, delta);
    });
    std::ofstream out(path, std::ios::binary);
    for (auto& c : codes) write_orbit_code(out, c, a_dig, r_dig);
    return codes;
}

void run_entropy_scan(RunContext& ctx) {
    FlowParams params(roof_from(ctx.cfg), rotation_from(ctx.cfg));
    PartitionSpec part = make_partition(std::uint32_t(ctx.cfg.get_int("partition.m")));
    double epsilon = ctx.cfg.get_double("cover.epsilon");
    double beta = ctx.cfg.get_double("cover.beta");
    int n_samples = int(ctx.cfg.get_int("cover.samples"));
    double delta = ctx.cfg.get_double("cover.delta");
    if (delta == 0.0) delta = params.roof().inf_value() / 10.0;
    std::vector<double> r_grid = ctx.cfg.get_list("grid.r");
    if (r_grid.empty()) throw ConfigError("grid.r must not be empty");
    std::sort(r_grid.begin(), r_grid.end());
    double r_max = r_grid.back();

    std::uint64_t code_key = code_cache_key(ctx, params, part, delta, r_max, n_samples);
    Fnv cover_fnv;
    cover_fnv.mix(code_key);
    cover_fnv.mix(epsilon);
    cover_fnv.mix(beta);
    for (double r : r_grid) cover_fnv.mix(r);
    fs::path cover_path = ctx.cache_dir / ("cover_" + hex64(cover_fnv.h) + ".json");

    // The cover stage dominates the run; cache its (r, S) results keyed by the
    // code-cache key plus (epsilon, beta, r-grid).
    std::vector<double> s_counts;
    bool cover_cached = false;
    if (fs::exists(cover_path)) {
        try {
            std::ifstream in(cover_path);
            json j;
            in >> j;
            auto cached_r = j.at("r").get<std::vector<double>>();
            s_counts = j.at("s").get<std::vector<double>>();
            if (cached_r == r_grid && s_counts.size() == r_grid.size()) {
                cover_cached = true;
                ++ctx.cache_hits;
            } else {
                s_counts.clear();
            }
        } catch (const std::exception& e) {
            ctx.warnings.push_back(std::string("cover cache corrupt, recomputing: ") + e.what());
            s_counts.clear();
        }
    }
    if (!cover_cached) {
        ++ctx.cache_misses;
        std::vector<OrbitCode> codes = ctx.stage("encode", [&] {
            return load_or_encode_codes(ctx, params, part, delta, r_max, n_samples, code_key);
        });
        ctx.stage("cover", [&] {
            for (double r : r_grid) {
                std::size_t len = std::size_t(std::ceil(r / delta));
                std::vector<OrbitCode> sliced = codes;
                for (auto& c : sliced) {
                    c.symbols.resize(std::min(len, c.symbols.size()));
                    c.r = r;
                }
                CoverEstimate est = estimate_cover(sliced, epsilon, beta, ctx.workers);
                s_counts.push_back(double(est.ball_count));
            }
        });
        std::ofstream out(cover_path, std::ios::binary);
        out << json{{"r", r_grid}, {"s", s_counts}}.dump() << "\n";
    }

    std::vector<std::vector<std::string>> rows;
    std::vector<std::pair<double, double>> curve;
    for (std::size_t i = 0; i < r_grid.size(); ++i) {
        rows.push_back({fmt(r_grid[i]), fmt((long long)s_counts[i]), fmt(epsilon), fmt(beta),
                        fmt((long long)part.m), fmt((long long)n_samples)});
        curve.emplace_back(r_grid[i], s_counts[i]);
    }
    write_csv(ctx.artifact("entropy-scan.csv"), {"r", "S", "epsilon", "beta", "m", "N"}, rows);

    std::string scale_name = ctx.cfg.get_string("grid.scale");
    ScaleFamily family;
    if (scale_name == "power")
        family = ScaleFamily::PowerScale;
    else if (scale_name == "log")
        family = ScaleFamily::LogScale;
    else
        throw ConfigError("grid.scale must be power or log");
    ExponentFit fit = fit_exponent(curve, family);

    json summary;
    summary["kind"] = "entropy-scan";
    summary["t_hat"] = fit.t_hat;
    summary["residual"] = fit.residual;
    summary["intercept"] = fit.intercept;
    summary["scale"] = scale_name;
    summary["epsilon"] = epsilon;
    summary["beta"] = beta;
    summary["m"] = part.m;
    summary["delta"] = delta;
    summary["curve"] = {{"r", fit.r_grid}, {"s", fit.s_values}};

    if (ctx.cfg.get_bool("assert.monotone_s")) {
        bool mono = true;
        for (std::size_t i = 1; i < curve.size(); ++i)
            mono &= curve[i].second >= curve[i - 1].second;
        ctx.assertions.emplace_back("monotone_s", mono);
    }
    if (ctx.cfg.get_bool("assert.superlinear_s")) {
        bool super = true;
        for (std::size_t i = 1; i < curve.size(); ++i)
            super &= curve[i].second / curve[i].first >= curve[i - 1].second / curve[i - 1].first;
        ctx.assertions.emplace_back("superlinear_s", super);
    }
    std::string band = ctx.cfg.get_string("assert.t_band");
    if (!band.empty()) {
        auto lims = ctx.cfg.get_list("assert.t_band");
        if (lims.size() != 2) throw ConfigError("assert.t_band needs two numbers");
        bool in_band = fit.t_hat >= lims[0] && fit.t_hat <= lims[1];
        if (!in_band)
            ctx.warnings.push_back("t_hat " + fmt(fit.t_hat) + " outside band [" + fmt(lims[0]) +
                                   ", " + fmt(lims[1]) + "]");
        summary["t_band_ok"] = in_band;  // warning-level, never fails the run
    }
    ctx.write_summary(summary);
}

// ---- pd-scan -------------------------------------------------------------

void run_pd_scan(RunContext& ctx) {
    FlowParams params(roof_from(ctx.cfg), rotation_from(ctx.cfg));
    int n_pairs = int(ctx.cfg.get_int("pd.pairs"));
    auto pairs = ctx.stage("pairs", [&] {
        return sample_transverse_pairs(params, n_pairs, ctx.cfg.get_double("pd.r_filter"),
                                       ctx.cfg.get_double("pd.d_min"),
                                       ctx.cfg.get_double("pd.d_max"), ctx.seed);
    });
    double inf_g = params.roof().inf_value();
    double c0 = 1e-4 * std::min(inf_g, params.rot().alpha.to_double());
    double c1 = 1e-4;
    auto reports = ctx.stage("pd", [&] {
        return pd_statistics(params, pairs, c0, c1, ctx.cfg.get_double("pd.horizon"),
                             ctx.cfg.get_double("pd.delta_i"), ctx.workers);
    });

    std::vector<std::vector<std::string>> rows;
    int resolved = 0, cocy = 0, sep = 0;
    for (auto& r : reports) {
        rows.push_back({fmt((long long)r.pair_id), fmt(r.interval_i.lo), fmt(r.interval_i.hi),
                        fmt((long long)r.interval_i.lo_censored),
                        fmt((long long)r.interval_i.hi_censored), fmt(r.interval_j.lo),
                        fmt(r.interval_j.hi), fmt(r.interval_j.j_size()),
                        fmt(r.interval_j.k_size()), fmt(r.separated_fraction),
                        fmt((long long)r.pd_pass), fmt((long long)r.cocy_pass)});
        if (!r.censored) {
            ++resolved;
            cocy += r.cocy_pass;
            sep += r.pd_pass;
        }
    }
    write_csv(ctx.artifact("pd-scan.csv"),
              {"pair", "i_lo", "i_hi", "i_lo_censored", "i_hi_censored", "j_lo", "j_hi",
               "j_size", "k_size", "separated_fraction", "pd_pass", "cocy_pass"},
              rows);

    json summary;
    summary["kind"] = "pd-scan";
    summary["pairs"] = n_pairs;
    summary["resolved"] = resolved;
    summary["censored"] = n_pairs - resolved;
    summary["c0"] = c0;
    summary["c1"] = c1;
    summary["cocy_rate"] = resolved ? double(cocy) / resolved : 0.0;
    summary["separated_rate"] = resolved ? double(sep) / resolved : 0.0;
    ctx.write_summary(summary);
}

// ---- match-scan ----------------------------------------------------------

void run_match_scan(RunContext& ctx) {
    FlowParams params(roof_from(ctx.cfg), rotation_from(ctx.cfg));
    CirclePoint x = CirclePoint::from_double(ctx.cfg.get_double("match.x"));
    double gap = ctx.cfg.get_double("match.gap");
    if (gap <= 0 || gap >= 0.5) throw ConfigError("match.gap must lie in (0, 0.5)");
    CirclePoint y = CirclePoint::from_raw(x.raw() + (u128(std::llround(gap * 0x1p64)) << 64));
    double s = ctx.cfg.get_double("match.s");
    FlowPoint p{x, s}, q{y, s};
    MatchReport rep = ctx.stage("match", [&] {
        return match_profile(params, p, q, ctx.cfg.get_double("match.r"),
                             std::uint32_t(ctx.cfg.get_int("partition.m")),
                             ctx.cfg.get_double("match.step"));
    });

    std::vector<std::vector<std::string>> rows;
    for (auto& b : rep.buckets)
        rows.push_back({fmt((long long)b.j_index), fmt(b.measure)});
    write_csv(ctx.artifact("match-scan.csv"), {"j", "measure"}, rows);

    json summary;
    summary["kind"] = "match-scan";
    summary["total_close_time"] = rep.total_close_time;
    summary["zero_d1_time"] = rep.zero_d1_time;
    summary["R"] = ctx.cfg.get_double("match.r");
    summary["m"] = ctx.cfg.get_int("partition.m");
    ctx.write_summary(summary);
}

// ---- occupancy-scan ------------------------------------------------------

void run_occupancy_scan(RunContext& ctx) {
    FlowParams params(roof_from(ctx.cfg), rotation_from(ctx.cfg));
    int n_samples = int(ctx.cfg.get_int("occupancy.samples"));
    double big_t = ctx.cfg.get_double("occupancy.t");
    double p_gamma = ctx.cfg.get_double("occupancy.p_gamma");
    double grid_step = ctx.cfg.get_double("occupancy.grid_step");

    FlowSample sample = ctx.stage("sample", [&] {
        return sample_flow_measure(params, n_samples, ctx.seed, ctx.workers);
    });
    std::vector<OccupancyReport> reps(sample.points.size());
    ctx.stage("occupancy", [&] {
        parallel_for(sample.points.size(), ctx.workers, [&](std::size_t i) {
            reps[i] = occupancy_W(params, sample.points[i], big_t, p_gamma, grid_step);
        });
    });

    std::vector<std::vector<std::string>> rows;
    double mean_occ = 0.0;
    int high = 0;
    for (std::size_t i = 0; i < reps.size(); ++i) {
        rows.push_back({fmt((long long)i), fmt(reps[i].occupied_fraction),
                        fmt(reps[i].zero_n_fraction)});
        mean_occ += reps[i].occupied_fraction;
        high += reps[i].occupied_fraction >= 0.9;
    }
    mean_occ /= double(reps.size());
    write_csv(ctx.artifact("occupancy-scan.csv"),
              {"sample", "occupied_fraction", "zero_n_fraction"}, rows);

    // V_n^c Monte-Carlo over a log-spaced n grid.
    long long n_min = ctx.cfg.get_int("occupancy.n_min");
    long long n_max = ctx.cfg.get_int("occupancy.n_max");
    int n_points = int(ctx.cfg.get_int("occupancy.n_points"));
    int v_samples = int(ctx.cfg.get_int("occupancy.v_samples"));
    bool two_minus = ctx.cfg.get_bool("occupancy.two_minus_gamma");
    std::vector<std::vector<std::string>> vrows;
    json v_curve = json::array();
    ctx.stage("v_complement", [&] {
        for (int k = 0; k < n_points; ++k) {
            double t = n_points == 1 ? 0.0 : double(k) / double(n_points - 1);
            auto n = (long long)std::llround(
                std::exp(std::log(double(n_min)) +
                         t * (std::log(double(n_max)) - std::log(double(n_min)))));
            double frac = v_complement_measure(params, n, v_samples, p_gamma, ctx.seed + 1,
                                               two_minus, ctx.workers);
            vrows.push_back({fmt(n), fmt(frac)});
            v_curve.push_back({{"n", n}, {"fraction", frac}});
        }
    });
    write_csv(ctx.artifact("v-complement.csv"), {"n", "fraction"}, vrows);

    json summary;
    summary["kind"] = "occupancy-scan";
    summary["T"] = big_t;
    summary["p_gamma"] = p_gamma;
    summary["mean_occupied_fraction"] = mean_occ;
    summary["fraction_of_samples_above_0.9"] = double(high) / double(reps.size());
    summary["v_complement"] = v_curve;
    ctx.write_summary(summary);
}

}  // namespace

RunArtifacts run_experiment(const Config& cfg) {
    RunContext ctx(cfg);
    const std::string& kind = cfg.kind();
    if (kind == "cf-classify")
        run_cf_classify(ctx);
    else if (kind == "birkhoff-growth")
        run_birkhoff_growth(ctx);
    else if (kind == "entropy-scan")
        run_entropy_scan(ctx);
    else if (kind == "pd-scan")
        run_pd_scan(ctx);
    else if (kind == "match-scan")
        run_match_scan(ctx);
    else if (kind == "occupancy-scan")
        run_occupancy_scan(ctx);
    else
        throw ConfigError("unknown experiment kind: " + kind);
    ctx.finish();
    return ctx.arts;
}

// ---- Plotting ------------------------------------------------------------

namespace {

struct Series {
    std::string label;
    std::vector<double> xs, ys;  // raw coordinates (log-log applied at render)
    double t_hat = 0.0, intercept = 0.0;
    std::string scale;
};

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string svg_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '&') out += "&amp;";
        else if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else out += c;
    }
    return out;
}

}  // namespace

void render_plot(const std::vector<std::string>& summary_paths, const std::string& out_path) {
    if (summary_paths.empty()) throw ConfigError("render_plot: no summaries given");
    std::vector<Series> series;
    for (auto& path : summary_paths) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open summary file: " + path);
        json j;
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw ConfigError(path + ": invalid JSON summary (" + e.what() + ")");
        }
        if (!j.contains("curve"))
            throw ConfigError(path + ": summary has no curve data to plot");
        Series s;
        s.label = fs::path(path).stem().string();
        s.xs = j["curve"]["r"].get<std::vector<double>>();
        s.ys = j["curve"]["s"].get<std::vector<double>>();
        if (s.xs.empty() || s.xs.size() != s.ys.size())
            throw ConfigError(path + ": empty or mismatched curve grid");
        s.t_hat = j.value("t_hat", 0.0);
        s.intercept = j.value("intercept", 0.0);
        s.scale = j.value("scale", "power");
        series.push_back(std::move(s));
    }

    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (auto& s : series)
        for (std::size_t i = 0; i < s.xs.size(); ++i) {
            xmin = std::min(xmin, std::log10(s.xs[i]));
            xmax = std::max(xmax, std::log10(s.xs[i]));
            ymin = std::min(ymin, std::log10(s.ys[i]));
            ymax = std::max(ymax, std::log10(s.ys[i]));
        }
    if (xmax - xmin < 1e-12) { xmin -= 0.5; xmax += 0.5; }
    if (ymax - ymin < 1e-12) { ymin -= 0.5; ymax += 0.5; }
    const double W = 640, H = 480, L = 70, R = 620, T = 40, B = 430;
    auto px = [&](double lx) { return L + (lx - xmin) / (xmax - xmin) * (R - L); };
    auto py = [&](double ly) { return B - (ly - ymin) / (ymax - ymin) * (B - T); };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    svg << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H
        << "\" fill=\"white\"/>\n";
    svg << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << (R - L) << "\" height=\""
        << (B - T) << "\" fill=\"none\" stroke=\"black\"/>\n";
    // Ticks.
    for (int i = 0; i <= 4; ++i) {
        double lx = xmin + (xmax - xmin) * i / 4.0;
        double ly = ymin + (ymax - ymin) * i / 4.0;
        char lab[32];
        svg << "<line x1=\"" << px(lx) << "\" y1=\"" << B << "\" x2=\"" << px(lx) << "\" y2=\""
            << (B + 5) << "\" stroke=\"black\"/>\n";
        std::snprintf(lab, sizeof(lab), "%.3g", std::pow(10.0, lx));
        svg << "<text x=\"" << px(lx) << "\" y=\"" << (B + 20)
            << "\" font-size=\"11\" text-anchor=\"middle\">" << lab << "</text>\n";
        svg << "<line x1=\"" << (L - 5) << "\" y1=\"" << py(ly) << "\" x2=\"" << L << "\" y2=\""
            << py(ly) << "\" stroke=\"black\"/>\n";
        std::snprintf(lab, sizeof(lab), "%.3g", std::pow(10.0, ly));
        svg << "<text x=\"" << (L - 8) << "\" y=\"" << (py(ly) + 4)
            << "\" font-size=\"11\" text-anchor=\"end\">" << lab << "</text>\n";
    }
    int ci = 0;
    for (auto& s : series) {
        const char* color = kPalette[ci % 6];
        // Data polyline + markers.
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.xs.size(); ++i)
            svg << px(std::log10(s.xs[i])) << "," << py(std::log10(s.ys[i])) << " ";
        svg << "\"/>\n";
        for (std::size_t i = 0; i < s.xs.size(); ++i)
            svg << "<circle cx=\"" << px(std::log10(s.xs[i])) << "\" cy=\""
                << py(std::log10(s.ys[i])) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
        // Fitted curve, dashed.
        svg << "<polyline fill=\"none\" stroke=\"" << color
            << "\" stroke-dasharray=\"5,4\" points=\"";
        for (int k = 0; k <= 40; ++k) {
            double lr = std::log(s.xs.front()) +
                        (std::log(s.xs.back()) - std::log(s.xs.front())) * k / 40.0;
            double ls;  // natural-log model value
            if (s.scale == "log")
                ls = lr + s.t_hat * std::log(lr) + s.intercept;
            else
                ls = s.t_hat * lr + s.intercept;
            svg << px(lr / std::log(10.0)) << "," << py(ls / std::log(10.0)) << " ";
        }
        svg << "\"/>\n";
        // Legend entry with the exponent annotation.
        double lx = L + 12, lyy = T + 18 + 18 * ci;
        char anno[64];
        std::snprintf(anno, sizeof(anno), "t-hat = %.3f", s.t_hat);
        svg << "<rect x=\"" << lx << "\" y=\"" << (lyy - 9) << "\" width=\"10\" height=\"10\""
            << " fill=\"" << color << "\"/>\n";
        svg << "<text x=\"" << (lx + 16) << "\" y=\"" << lyy << "\" font-size=\"12\">"
            << svg_escape(s.label) << " (" << anno << ")</text>\n";
        ++ci;
    }
    svg << "</svg>\n";

    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + out_path);
    out << svg.str();
}

// ---- cf table ------------------------------------------------------------

std::string cf_table(const std::string& alpha_spec, int depth, double c_const) {
    RotationNumber rot = parse_rotation(alpha_spec, depth);
    DiophantineReport rep = classify_diophantine(rot, c_const);
    std::ostringstream out;
    out << "alpha = " << alpha_spec << " (depth " << rot.depth << ")\n";
    out << "  k    a_k            p_k/q_k                 q_k*alpha - p_k\n";
    for (int k = 0; k <= rot.depth; ++k) {
        char line[128];
        std::snprintf(line, sizeof(line), "%3d  %8llu  %12llu/%-12llu  %+.6e\n", k,
                      (unsigned long long)(k >= 1 ? rot.quotients[std::size_t(k - 1)] : 0),
                      (unsigned long long)rot.p[std::size_t(k)],
                      (unsigned long long)rot.q[std::size_t(k)], rot.signed_err[std::size_t(k)]);
        out << line;
    }
    out << "class D (c = " << c_const << "): " << (rep.in_D ? "yes" : "no")
        << "   witness c = " << rep.c_witness << "\n";
    out << "K_alpha tail index: "
        << (rep.k_alpha.empty() ? -1 : rep.k_alpha.front()) << "   E partial sum: "
        << rep.e_partial_sum << "\n";
    out << "Liouville-type growth: " << (rep.liouville_flag ? "yes" : "no") << "\n";
    return out.str();
}

}  // namespace specflow
