#include "specflow/entropy.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <vector>

#include "specflow/errors.hpp"
#include "specflow/parallel.hpp"
#include "specflow/rng.hpp"

namespace specflow {

namespace {

struct Kahan {
    double sum = 0.0, comp = 0.0;
    void add(double v) {
        double y = v - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
};

constexpr double kCloseThreshold = 1e-2;   // d^f threshold defining I_{x,y}
constexpr double kJThreshold = 1.0 / 50.0;  // Birkhoff-difference bound on J
constexpr double kKThreshold = 1.0 / 400.0;
constexpr double kKFraction = 1.0 / 300.0;  // |K| >= |J| / 300
constexpr double kTruncTol = 1e-4;
constexpr double kRefineTol = 1e-6;

double safe_roof(const RoofSpec& spec, CirclePoint x, int order) {
    return eval_roof(spec, x, order);
}

// ---- Reverse-time orbit walker ------------------------------------------
//
// Walks T_{-tau}(x0, s0) for monotone tau >= 0.  The backward trajectory
// leaves through the floor into (x0 - alpha, g(x0 - alpha)) and so on; cum_
// accumulates the roofs of the backward base orbit with Kahan compensation.
class ReverseWalker {
public:
    ReverseWalker(const FlowParams& params, FlowPoint origin)
        : params_(params), base_(origin.x), s0_(origin.s) {}

    void advance_to_tau(double tau) {
        const CirclePoint alpha = params_.rot().q_alpha[1];
        while (s0_ + cum_.sum < tau) {
            CirclePoint next = base_ - alpha;
            double g = safe_roof(params_.roof(), next, 0);
            cum_.add(g);
            base_ = next;
            g_cur_ = g;
            ++k_;
        }
        tau_ = tau;
    }

    FlowPoint point() const {
        double s = (k_ == 0) ? s0_ - tau_ : (s0_ + cum_.sum) - tau_;
        if (s < 0.0) s = 0.0;
        if (k_ > 0 && s >= g_cur_) s = std::nextafter(g_cur_, 0.0);
        return {base_, s};
    }

    long long crossings() const { return -k_; }

private:
    const FlowParams& params_;
    CirclePoint base_;
    double s0_ = 0.0;
    double tau_ = 0.0;
    Kahan cum_;
    double g_cur_ = 0.0;
    long long k_ = 0;
};

}  // namespace

// ---- Scales --------------------------------------------------------------

double scale_value(ScaleFamily family, double n, double t) {
    if (n <= 1.0) throw ConfigError("scale_value needs n > 1");
    if (family == ScaleFamily::LogScale) return n * std::pow(std::log(n), t);
    return std::pow(n, t);
}

// ---- Measure sampling ----------------------------------------------------

namespace {

// Mass of mu^g above height `cap`: the region {(x, s): cap < s < g(x)} split
// across the two singular flanks, evaluated from the closed-form cdf.
double truncated_mass_above(const RoofSpec& spec, double cap) {
    double inf_g = spec.inf_value();
    if (cap <= inf_g) return 1.0 - cap;  // crude but only used far below cap
    auto g_at = [&](double x) { return eval_roof_raw(spec, x, 0) / spec.normalizer(); };
    // Interior minimum location: bisect g' = 0.
    double lo = 1e-12, hi = 1.0 - 1e-12;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        if (eval_roof_raw(spec, mid, 1) < 0.0) lo = mid; else hi = mid;
    }
    double x_min = 0.5 * (lo + hi);
    double mass = 0.0;
    // Left flank: g decreasing on (0, x_min); find x_a with g(x_a) = cap.
    {
        double a = 1e-300, b = x_min;
        for (int i = 0; i < 400; ++i) {
            double mid = 0.5 * (a + b);
            if (g_at(mid) > cap) a = mid; else b = mid;
        }
        double xa = 0.5 * (a + b);
        mass += roof_cdf(spec, xa) - cap * xa;
    }
    // Right flank: g increasing on (x_min, 1); find x_b with g(x_b) = cap.
    {
        double a = x_min, b = 1.0 - 1e-16;
        double wlo = 1e-300;  // distance from 1, log-bisected for precision
        double whi = 1.0 - x_min;
        for (int i = 0; i < 400; ++i) {
            double wm = std::sqrt(wlo * whi);
            if (g_at(1.0 - wm) > cap) wlo = wm; else whi = wm;
        }
        double xb = 1.0 - std::sqrt(wlo * whi);
        (void)a; (void)b;
        mass += (1.0 - roof_cdf(spec, xb)) - cap * (1.0 - xb);
    }
    return std::max(mass, 0.0);
}

double choose_cap(const RoofSpec& spec) {
    double cap = spec.inf_value() + 1.0;
    while (truncated_mass_above(spec, cap) > 0.5 * kTruncTol) cap *= 2.0;
    double lo = spec.inf_value(), hi = cap;
    for (int i = 0; i < 80; ++i) {
        double mid = 0.5 * (lo + hi);
        if (truncated_mass_above(spec, mid) > 0.5 * kTruncTol) lo = mid; else hi = mid;
    }
    return hi;
}

}  // namespace

FlowSample sample_flow_measure(const FlowParams& params, int n_samples, std::uint64_t seed,
                               int workers) {
    if (n_samples <= 0) throw ConfigError("sample_flow_measure: n_samples must be positive");
    const RoofSpec& spec = params.roof();
    FlowSample out;
    out.cap = choose_cap(spec);
    out.truncated_mass = truncated_mass_above(spec, out.cap);

    out.points.assign(std::size_t(n_samples), FlowPoint{});
    std::vector<int> attempts(std::size_t(n_samples), 0);
    parallel_for(std::size_t(n_samples), workers, [&](std::size_t i) {
        CounterRng rng(seed, i);
        // Acceptance is ~1/cap, which for power roofs can reach a few
        // thousand; budget generously before declaring failure.
        const std::uint64_t max_attempts = std::uint64_t(out.cap) * 1000 + (1u << 16);
        for (std::uint64_t a = 0; a < max_attempts; ++a) {
            double xr = rng.uniform(2 * a);
            double u = rng.uniform(2 * a + 1);
            CirclePoint x = CirclePoint::from_double(xr);
            if (x.in_clip_window()) continue;
            double g = safe_roof(spec, x, 0);
            double s = u * out.cap;
            if (s < g) {
                out.points[i] = {x, s};
                attempts[i] = int(a) + 1;
                return;
            }
        }
        throw ConfigError("sample_flow_measure: rejection sampler failed to accept");
    });
    long long total_attempts = 0;
    for (int a : attempts) total_attempts += a;
    out.acceptance_rate = double(n_samples) / double(std::max<long long>(total_attempts, 1));
    return out;
}

// ---- Greedy covers -------------------------------------------------------

CoverEstimate estimate_cover(const std::vector<OrbitCode>& codes, double epsilon, double beta,
                             int workers) {
    if (codes.empty()) throw ConfigError("estimate_cover: empty code set");
    if (epsilon <= 0.0 || epsilon >= 1.0 || beta <= 0.0 || beta > 1.0)
        throw ConfigError("estimate_cover: epsilon in (0,1), beta in (0,1] required");
    if (beta - epsilon > 1.0) throw Infeasible("estimate_cover: beta - epsilon > 1");
    const std::size_t n = codes.size();

    CoverEstimate out;
    out.r = codes[0].r;
    out.epsilon = epsilon;
    out.beta = beta;
    out.m = codes[0].m;
    out.sample_size = int(n);

    // Pairwise Hamming adjacency under radius epsilon.
    std::vector<std::vector<std::uint32_t>> covers(n);
    parallel_for(n, workers, [&](std::size_t i) {
        covers[i].reserve(8);
        for (std::size_t j = 0; j < n; ++j) {
            if (hamming(codes[i], codes[j]) <= epsilon) covers[i].push_back(std::uint32_t(j));
        }
    });

    double target = beta - epsilon;
    std::size_t needed =
        target <= 0.0 ? 0 : std::min(n, std::size_t(std::ceil(target * double(n) - 1e-9)));
    std::vector<char> covered(n, 0);
    std::size_t covered_count = 0;
    while (covered_count < needed) {
        std::size_t best = n;
        std::size_t best_gain = 0;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t gain = 0;
            for (std::uint32_t j : covers[i]) gain += !covered[j];
            if (gain > best_gain) {  // strict: ties resolve to the lowest index
                best_gain = gain;
                best = i;
            }
        }
        if (best == n || best_gain == 0) break;  // cannot happen while uncovered remain
        out.center_indices.push_back(int(best));
        for (std::uint32_t j : covers[best]) {
            if (!covered[j]) {
                covered[j] = 1;
                ++covered_count;
            }
        }
    }
    out.ball_count = int(out.center_indices.size());
    out.covered_mass = double(covered_count) / double(n);
    return out;
}

ExponentFit fit_exponent(const std::vector<std::pair<double, double>>& points,
                         ScaleFamily scale) {
    if (points.size() < 2) throw DegenerateGrid("fit_exponent: need at least two points");
    ExponentFit out;
    std::vector<double> us, ys;
    for (auto& [r, s] : points) {
        if (r <= 1.0 || s <= 0.0) throw ConfigError("fit_exponent: need r > 1 and S > 0");
        out.r_grid.push_back(r);
        out.s_values.push_back(s);
        if (scale == ScaleFamily::LogScale) {
            us.push_back(std::log(std::log(r)));
            ys.push_back(std::log(s) - std::log(r));
        } else {
            us.push_back(std::log(r));
            ys.push_back(std::log(s));
        }
    }
    double ubar = 0.0, ybar = 0.0;
    for (std::size_t i = 0; i < us.size(); ++i) { ubar += us[i]; ybar += ys[i]; }
    ubar /= double(us.size());
    ybar /= double(us.size());
    double cov = 0.0, var = 0.0;
    for (std::size_t i = 0; i < us.size(); ++i) {
        cov += (us[i] - ubar) * (ys[i] - ybar);
        var += (us[i] - ubar) * (us[i] - ubar);
    }
    if (var == 0.0) throw DegenerateGrid("fit_exponent: all abscissae coincide");
    out.t_hat = cov / var;
    double c = ybar - out.t_hat * ubar;
    out.intercept = c;
    double sq = 0.0;
    for (std::size_t i = 0; i < us.size(); ++i) {
        double d = ys[i] - (out.t_hat * us[i] + c);
        sq += d * d;
    }
    out.residual = std::sqrt(sq / double(us.size()));
    return out;
}

// ---- Divergence intervals ------------------------------------------------

namespace {

double d_at(const FlowParams& params, FlowPoint p, FlowPoint q, double t) {
    FlowPoint a = flow(params, p, t).point;
    FlowPoint b = flow(params, q, t).point;
    return d_pseudo_metric(params, a, b);
}

// Refine the exit time inside (t_in, t_out) to kRefineTol; returns the inner
// bracket end (last time still within threshold resolution).
double refine_exit(const FlowParams& params, FlowPoint p, FlowPoint q, double t_in,
                   double t_out) {
    while (std::abs(t_out - t_in) > kRefineTol) {
        double mid = 0.5 * (t_in + t_out);
        if (d_at(params, p, q, mid) < kCloseThreshold) t_in = mid; else t_out = mid;
    }
    return t_in;
}

// Forward/backward grid scans; cb(t, d) is invoked at every visited grid
// point, and the scan stops at the first d >= threshold or at the horizon.
struct ScanResult {
    double last_inside = 0.0;
    double first_outside = 0.0;
    bool exited = false;
};

template <typename Cb>
ScanResult scan_forward(const FlowParams& params, FlowPoint p, FlowPoint q, double horizon,
                        double step, Cb&& cb) {
    OrbitWalker wp(params, p), wq(params, q);
    ScanResult res;
    double t = step;
    double prev = 0.0;
    for (; t <= horizon + 0.5 * step; t += step) {
        double tt = std::min(t, horizon);
        wp.advance_to(tt);
        wq.advance_to(tt);
        double d = d_pseudo_metric(params, wp.point(), wq.point());
        cb(tt, d);
        if (d >= kCloseThreshold) {
            res.exited = true;
            res.last_inside = prev;
            res.first_outside = tt;
            return res;
        }
        prev = tt;
        if (tt >= horizon) break;
    }
    res.last_inside = prev;
    return res;
}

template <typename Cb>
ScanResult scan_backward(const FlowParams& params, FlowPoint p, FlowPoint q, double horizon,
                         double step, Cb&& cb) {
    ReverseWalker wp(params, p), wq(params, q);
    ScanResult res;
    double prev = 0.0;
    for (double tau = step; tau <= horizon + 0.5 * step; tau += step) {
        double tt = std::min(tau, horizon);
        wp.advance_to_tau(tt);
        wq.advance_to_tau(tt);
        double d = d_pseudo_metric(params, wp.point(), wq.point());
        cb(-tt, d);
        if (d >= kCloseThreshold) {
            res.exited = true;
            res.last_inside = prev;
            res.first_outside = tt;
            return res;
        }
        prev = tt;
        if (tt >= horizon) break;
    }
    res.last_inside = prev;
    return res;
}

}  // namespace

TimeInterval divergence_interval_I(const FlowParams& params, FlowPoint p, FlowPoint q,
                                   double horizon, double delta_i) {
    if (horizon <= 0.0 || delta_i <= 0.0)
        throw ConfigError("divergence_interval_I: horizon and delta_i must be positive");
    if (d_pseudo_metric(params, p, q) >= kCloseThreshold)
        throw NotClose("divergence_interval_I: pair not d^f-close at t = 0");

    TimeInterval out;
    auto noop = [](double, double) {};
    ScanResult fwd = scan_forward(params, p, q, horizon, delta_i, noop);
    if (fwd.exited) {
        out.hi = refine_exit(params, p, q, fwd.last_inside, fwd.first_outside);
    } else {
        out.hi = horizon;
        out.hi_censored = true;
    }
    ScanResult bwd = scan_backward(params, p, q, horizon, delta_i, noop);
    if (bwd.exited) {
        out.lo = refine_exit(params, p, q, -bwd.last_inside, -bwd.first_outside);
    } else {
        out.lo = -horizon;
        out.lo_censored = true;
    }
    return out;
}

JInterval divergence_interval_J(const FlowParams& params, CirclePoint x, CirclePoint y,
                                long long horizon) {
    if (horizon <= 0) throw ConfigError("divergence_interval_J: horizon must be positive");
    const RoofSpec& spec = params.roof();
    const CirclePoint alpha = params.rot().q_alpha[1];

    // diff(n) for n = lo..hi, diff(0) = 0.
    std::vector<double> fwd_diffs, bwd_diffs;
    {
        Kahan acc;
        CirclePoint xc = x, yc = y;
        for (long long n = 1; n <= horizon; ++n) {
            acc.add(safe_roof(spec, xc, 0) - safe_roof(spec, yc, 0));
            if (std::abs(acc.sum) >= kJThreshold) break;
            fwd_diffs.push_back(acc.sum);
            xc += alpha;
            yc += alpha;
        }
    }
    {
        Kahan acc;
        CirclePoint xc = x, yc = y;
        for (long long n = 1; n <= horizon; ++n) {
            xc -= alpha;
            yc -= alpha;
            acc.add(-(safe_roof(spec, xc, 0) - safe_roof(spec, yc, 0)));
            if (std::abs(acc.sum) >= kJThreshold) break;
            bwd_diffs.push_back(acc.sum);
        }
    }

    JInterval out;
    out.hi = (long long)fwd_diffs.size();
    out.lo = -(long long)bwd_diffs.size();
    out.hi_censored = (long long)fwd_diffs.size() == horizon;
    out.lo_censored = (long long)bwd_diffs.size() == horizon;

    // Longest run of |diff| > kKThreshold inside J (diff(0) = 0 splits runs).
    auto diff_at = [&](long long n) -> double {
        if (n == 0) return 0.0;
        if (n > 0) return fwd_diffs[std::size_t(n - 1)];
        return bwd_diffs[std::size_t(-n - 1)];
    };
    long long run_start = 0;
    bool in_run = false;
    long long best_len = 0;
    for (long long n = out.lo; n <= out.hi; ++n) {
        bool big = std::abs(diff_at(n)) > kKThreshold;
        if (big && !in_run) {
            in_run = true;
            run_start = n;
        }
        if ((!big || n == out.hi) && in_run) {
            long long end = big ? n : n - 1;
            long long len = end - run_start + 1;
            if (len > best_len) {
                best_len = len;
                out.k_lo = run_start;
                out.k_hi = end;
            }
            in_run = false;
        }
    }
    if (best_len == 0) {
        out.k_lo = 0;
        out.k_hi = -1;
    }
    out.cocy_pass = double(out.k_size()) >= kKFraction * double(out.j_size());
    return out;
}

// ---- PD statistics -------------------------------------------------------

std::vector<PDReport> pd_statistics(const FlowParams& params,
                                    const std::vector<std::pair<FlowPoint, FlowPoint>>& pairs,
                                    double c0, double c1, double horizon, double delta_i,
                                    int workers) {
    if (c0 <= 0.0 || c1 <= 0.0) throw ConfigError("pd_statistics: c0 and c1 must be positive");
    std::vector<PDReport> out(pairs.size());
    parallel_for(pairs.size(), workers, [&](std::size_t idx) {
        const auto& [p, q] = pairs[idx];
        PDReport rep;
        rep.pair_id = int(idx);

        long long grid_total = 1;  // t = 0
        long long grid_sep = d_pseudo_metric(params, p, q) > c0 ? 1 : 0;
        auto count = [&](double, double d) {
            if (d < kCloseThreshold) {
                ++grid_total;
                if (d > c0) ++grid_sep;
            }
        };
        ScanResult fwd = scan_forward(params, p, q, horizon, delta_i, count);
        ScanResult bwd = scan_backward(params, p, q, horizon, delta_i, count);
        rep.interval_i.hi = fwd.exited ? fwd.last_inside : horizon;
        rep.interval_i.hi_censored = !fwd.exited;
        rep.interval_i.lo = bwd.exited ? -bwd.last_inside : -horizon;
        rep.interval_i.lo_censored = !bwd.exited;

        rep.separated_fraction = double(grid_sep) / double(grid_total);
        rep.pd_pass = rep.separated_fraction > c1;

        rep.interval_j = divergence_interval_J(params, p.x, q.x, (long long)horizon);
        rep.cocy_pass = rep.interval_j.cocy_pass;
        rep.censored = rep.interval_i.censored();
        out[idx] = rep;
    });
    return out;
}

bool in_cyr_good_set(const FlowParams& params, CirclePoint x, double r) {
    if (r < 16.0) throw ConfigError("in_cyr_good_set: r >= 16 required");
    double omega = omega_seq(r);
    double width = 1.0 / (r * omega);
    double inf_raw = params.roof().inf_value() * params.roof().normalizer();
    auto steps = std::uint64_t(std::floor(2.0 * r / inf_raw)) + 1;
    ClosestVisit cv = closest_visit(x, params.rot(), steps);
    return cv.distance > width;
}

std::vector<std::pair<FlowPoint, FlowPoint>> sample_transverse_pairs(
    const FlowParams& params, int n_pairs, double r_filter, double d_min, double d_max,
    std::uint64_t seed) {
    if (n_pairs <= 0 || d_min <= 0.0 || d_max < d_min || d_max > 1e-2)
        throw ConfigError("sample_transverse_pairs: bad pair parameters");
    std::vector<std::pair<FlowPoint, FlowPoint>> out;
    out.reserve(std::size_t(n_pairs));
    for (int i = 0; i < n_pairs; ++i) {
        CounterRng rng(seed, std::uint64_t(i));
        bool done = false;
        for (std::uint64_t a = 0; a < 4096 && !done; ++a) {
            double xr = rng.uniform(3 * a);
            double d = std::exp(rng.uniform(3 * a + 1, std::log(d_min), std::log(d_max)));
            CirclePoint x = CirclePoint::from_double(xr);
            u128 offset = u128(std::llround(d * 0x1p64)) << 64;
            CirclePoint y = CirclePoint::from_raw(x.raw() + offset);
            if (x.in_clip_window() || y.in_clip_window()) continue;
            if (!in_cyr_good_set(params, x, r_filter)) continue;
            if (!in_cyr_good_set(params, y, r_filter)) continue;
            double gx = safe_roof(params.roof(), x, 0);
            double gy = safe_roof(params.roof(), y, 0);
            double s = rng.uniform(3 * a + 2) * 0.98 * std::min(gx, gy);
            out.emplace_back(FlowPoint{x, s}, FlowPoint{y, s});
            done = true;
        }
        if (!done) throw ConfigError("sample_transverse_pairs: good-set rejection failed");
    }
    return out;
}

// ---- Matching profile ----------------------------------------------------

MatchReport match_profile(const FlowParams& params, FlowPoint p, FlowPoint q, double big_r,
                          std::uint32_t m, double step) {
    if (big_r <= 0.0 || step <= 0.0 || m < 2)
        throw ConfigError("match_profile: need R > 0, step > 0, m >= 2");
    const RoofSpec& spec = params.roof();
    const double thr = 2.0 / double(m);

    std::vector<double> measures;  // indexed by dyadic j
    MatchReport out;
    OrbitWalker wp(params, p), wq(params, q);
    for (double t = 0.0; t <= big_r + 0.5 * step; t += step) {
        double tt = std::min(t, big_r);
        wp.advance_to(tt);
        wq.advance_to(tt);
        FlowPoint a = wp.point(), b = wq.point();
        double ga = safe_roof(spec, a.x, 0);
        double gb = safe_roof(spec, b.x, 0);
        // Three branches of d^f with their base-coordinate parts.
        const CirclePoint alpha = params.rot().q_alpha[1];
        double d1_rho = circle_distance(a.x, b.x);
        double v_rho = d1_rho + std::abs(a.s - b.s);
        double d1_up = circle_distance(a.x + alpha, b.x);
        double v_up = d1_up + std::abs(ga - a.s + b.s);
        double d1_dn = circle_distance(a.x, b.x + alpha);
        double v_dn = d1_dn + std::abs(gb - b.s + a.s);
        double v = v_rho, d1 = d1_rho;
        if (v_up < v) { v = v_up; d1 = d1_up; }
        if (v_dn < v) { v = v_dn; d1 = d1_dn; }
        if (v < thr) {
            out.total_close_time += step;
            if (d1 <= 0.0) {
                out.zero_d1_time += step;
            } else {
                int j = int(std::floor(-std::log2(d1)));
                if (j < 0) j = 0;
                if (std::size_t(j) >= measures.size()) measures.resize(std::size_t(j) + 1, 0.0);
                measures[std::size_t(j)] += step;
            }
        }
        if (tt >= big_r) break;
    }
    for (std::size_t j = 0; j < measures.size(); ++j) {
        if (measures[j] > 0.0) out.buckets.push_back({int(j), measures[j]});
    }
    return out;
}

// ---- Appendix occupancy --------------------------------------------------

OccupancyReport occupancy_W(const FlowParams& params, FlowPoint x, double big_t, double p_gamma,
                            double grid_step) {
    if (big_t < 100.0) throw ConfigError("occupancy_W: T >= 100 required");
    if (grid_step <= 0.0) throw ConfigError("occupancy_W: grid step must be positive");
    if (params.roof().kind != RoofKind::Power)
        throw ConfigError("occupancy_W: power roof required");
    const RoofSpec& spec = params.roof();
    const CirclePoint alpha = params.rot().q_alpha[1];
    const double gamma = spec.gamma;
    const double z = spec.normalizer();

    long long occupied = 0, zero_n = 0, total = 0;
    auto classify = [&](long long n_cross, double dsum) {
        ++total;
        if (n_cross == 0) {
            ++zero_n;
            return;
        }
        double absn = double(std::llabs(n_cross));
        double threshold = std::pow(absn, 1.0 + gamma) / std::pow(std::log(absn), p_gamma);
        if (std::abs(dsum) >= threshold) ++occupied;
    };

    // Forward sweep (t = 0 included here).
    {
        CirclePoint base = x.x;
        Kahan cum, dsum;
        double g_cur = safe_roof(spec, base, 0);
        long long n = 0;
        for (double t = 0.0; t <= big_t + 0.5 * grid_step; t += grid_step) {
            double tt = std::min(t, big_t);
            while (cum.sum + g_cur <= x.s + tt) {
                cum.add(g_cur);
                dsum.add(z * safe_roof(spec, base, 1));
                base += alpha;
                g_cur = safe_roof(spec, base, 0);
                ++n;
            }
            classify(n, dsum.sum);
            if (tt >= big_t) break;
        }
    }
    // Backward sweep (t < 0): f'^(-k)(x_0) = -sum_{j=1..k} g'(x_0 - j alpha).
    {
        CirclePoint base = x.x;
        Kahan cum, dsum;
        long long k = 0;
        for (double tau = grid_step; tau <= big_t + 0.5 * grid_step; tau += grid_step) {
            double tt = std::min(tau, big_t);
            while (x.s + cum.sum < tt) {
                base -= alpha;
                cum.add(safe_roof(spec, base, 0));
                dsum.add(-z * safe_roof(spec, base, 1));
                ++k;
            }
            classify(-k, dsum.sum);
            if (tt >= big_t) break;
        }
    }

    OccupancyReport out;
    out.horizon = big_t;
    out.zero_n_fraction = double(zero_n) / double(total);
    long long informative = total - zero_n;
    out.occupied_fraction = informative > 0 ? double(occupied) / double(informative) : 0.0;
    return out;
}

double v_complement_measure(const FlowParams& params, long long n, int n_samples, double p_gamma,
                            std::uint64_t seed, bool use_two_minus_gamma, int workers) {
    if (n < 10) throw ConfigError("v_complement_measure: n >= 10 required");
    if (n_samples <= 0) throw ConfigError("v_complement_measure: n_samples must be positive");
    if (params.roof().kind != RoofKind::Power)
        throw ConfigError("v_complement_measure: power roof required");
    const RoofSpec& spec = params.roof();
    const double gamma = spec.gamma;
    const double exponent = use_two_minus_gamma ? 2.0 - gamma : 1.0 + gamma;
    const double z = spec.normalizer();
    const double threshold = std::pow(double(n), exponent) / std::pow(std::log(double(n)), p_gamma);

    FlowSample sample = sample_flow_measure(params, n_samples, seed, workers);
    std::vector<char> in_complement(sample.points.size(), 0);
    parallel_for(sample.points.size(), workers, [&](std::size_t i) {
        BirkhoffResult br = birkhoff_sum(spec, params.rot(), sample.points[i].x, n, 1);
        in_complement[i] = std::abs(z * br.value) < threshold ? 1 : 0;
    });
    long long count = 0;
    for (char c : in_complement) count += c;
    return double(count) / double(sample.points.size());
}

}  // namespace specflow
