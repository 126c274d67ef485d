#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "specflow/flow.hpp"

namespace specflow {

// ---- Covering numbers and exponent fits ---------------------------------

enum class ScaleFamily { LogScale, PowerScale };

// a_n(t): n (log n)^t for LogScale, n^t for PowerScale.
double scale_value(ScaleFamily family, double n, double t);

struct CoverEstimate {
    double r = 0.0;
    double epsilon = 0.0;
    double beta = 0.0;
    std::uint32_t m = 0;
    int sample_size = 0;
    int ball_count = 0;
    double covered_mass = 0.0;
    std::vector<int> center_indices;
};

struct ExponentFit {
    double t_hat = 0.0;
    double intercept = 0.0;
    double residual = 0.0;  // RMS of log-deviations
    std::vector<double> r_grid;
    std::vector<double> s_values;
};

// i.i.d. draws from the normalized measure mu^g (dx x Lebesgue under the
// graph) by rejection under a cap; the mass truncated above the cap is < 1e-4
// and reported.  Deterministic in (seed), independent of worker count.
struct FlowSample {
    std::vector<FlowPoint> points;
    double cap = 0.0;
    double truncated_mass = 0.0;
    double acceptance_rate = 0.0;
};

FlowSample sample_flow_measure(const FlowParams& params, int n_samples, std::uint64_t seed,
                               int workers = 1);

// Greedy set cover of the empirical sample by Hamming balls of radius epsilon
// until covered mass >= beta - epsilon.  Upper estimate of the sample covering
// number; deterministic tie-break by lowest index.
CoverEstimate estimate_cover(const std::vector<OrbitCode>& codes, double epsilon, double beta,
                             int workers = 1);

// Least squares for log S = log r + t log log r + c (LogScale) or
// log S = t log r + c (PowerScale).
ExponentFit fit_exponent(const std::vector<std::pair<double, double>>& points, ScaleFamily scale);

// ---- Parabolic-divergence diagnostics -----------------------------------

struct TimeInterval {
    double lo = 0.0, hi = 0.0;
    bool lo_censored = false, hi_censored = false;
    bool censored() const { return lo_censored || hi_censored; }
    double length() const { return hi - lo; }
};

// Maximal interval [t-, t+] around 0 with d^f(T_t p, T_t q) < 1e-2, scanned at
// step delta_i and refined by bisection to 1e-6; horizon-capped ends are
// marked censored.
TimeInterval divergence_interval_I(const FlowParams& params, FlowPoint p, FlowPoint q,
                                   double horizon, double delta_i = 1e-2);

struct JInterval {
    long long lo = 0, hi = 0;  // J = [lo, hi], contains 0
    bool lo_censored = false, hi_censored = false;
    long long k_lo = 0, k_hi = -1;  // longest K run, empty if k_hi < k_lo
    bool cocy_pass = false;
    bool censored() const { return lo_censored || hi_censored; }
    long long j_size() const { return hi - lo + 1; }
    long long k_size() const { return k_hi < k_lo ? 0 : k_hi - k_lo + 1; }
};

// J_{x,y}: maximal integer interval around 0 with |f^{(n)}(x)-f^{(n)}(y)| <
// 1/50, plus the longest sub-run K with difference > 1/400 and the
// |K| >= |J|/300 verdict.
JInterval divergence_interval_J(const FlowParams& params, CirclePoint x, CirclePoint y,
                                long long horizon);

struct PDReport {
    int pair_id = 0;
    TimeInterval interval_i;
    JInterval interval_j;
    double separated_fraction = 0.0;
    bool pd_pass = false;    // separated_fraction > c1
    bool cocy_pass = false;  // |K| >= |J|/300
    bool censored = false;
};

std::vector<PDReport> pd_statistics(const FlowParams& params,
                                    const std::vector<std::pair<FlowPoint, FlowPoint>>& pairs,
                                    double c0, double c1, double horizon, double delta_i = 1e-2,
                                    int workers = 1);

// The singular-window filter C_r: rejects x whose first ~2r/inf f rotation
// steps come within 1/(r omega_r) of 0.
bool in_cyr_good_set(const FlowParams& params, CirclePoint x, double r);

// Transverse pair generator for PD/J statistics: x uniform in C_r, y = x + d
// with d log-uniform in [d_min, d_max], shared height under both roofs.
std::vector<std::pair<FlowPoint, FlowPoint>> sample_transverse_pairs(
    const FlowParams& params, int n_pairs, double r_filter, double d_min, double d_max,
    std::uint64_t seed);

// ---- Matching profile ----------------------------------------------------

struct MatchProfile {
    int j_index = 0;
    double measure = 0.0;
};

struct MatchReport {
    std::vector<MatchProfile> buckets;   // dyadic buckets with nonzero mass
    double total_close_time = 0.0;       // |{t: d^f < 2/m}| grid measure
    double zero_d1_time = 0.0;           // portion with d_1 = 0 (no bucket)
};

MatchReport match_profile(const FlowParams& params, FlowPoint p, FlowPoint q, double big_r,
                          std::uint32_t m, double step);

// ---- Appendix occupancy --------------------------------------------------

struct OccupancyReport {
    double horizon = 0.0;
    double occupied_fraction = 0.0;   // among grid times with N != 0
    double zero_n_fraction = 0.0;     // grid times with N = 0 (excluded)
};

// Fraction of grid times t in [-T, T] with |f'^{(N(x,t))}(x_0)| >=
// |N|^{1+gamma} / log^{p_gamma} |N| (raw-coefficient scale).
OccupancyReport occupancy_W(const FlowParams& params, FlowPoint x, double big_t, double p_gamma,
                            double grid_step = 1.0);

// Monte-Carlo mu-fraction of V_n^c.  Default exponent 1+gamma (matching W_t);
// the 2-gamma variant sits behind the flag.
double v_complement_measure(const FlowParams& params, long long n, int n_samples, double p_gamma,
                            std::uint64_t seed, bool use_two_minus_gamma = false,
                            int workers = 1);

}  // namespace specflow
