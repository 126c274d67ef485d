#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "specflow/circle.hpp"
#include "specflow/rotation.hpp"

namespace specflow {

enum class RoofKind { LogAsym, Power };

// Singular roof f_raw(x) = background + a*h(x) + b*h(1-x) with h = -log or
// h = x^-gamma; the minimal C^2(T \ {0}) family with the required asymptotics.
// All evaluations return the normalized roof g = f_raw / Z with integral 1.
struct RoofSpec {
    RoofKind kind = RoofKind::LogAsym;
    double a = 1.0;
    double b = 2.0;
    double gamma = 0.5;  // Power kind only
    double background = 1.0;

    // Z = integral of f_raw: closed form (c + a + b for log, c + (a+b)/(1-gamma)
    // for power).
    double normalizer() const;

    // Minimum of g over the circle (interior minimum found by Newton on g').
    double inf_value() const;

    std::string canonical() const;
    std::uint64_t digest() const;
};

// Raw (unnormalized) roof and derivatives at x in (0,1); order in {0,1,2}.
double eval_roof_raw(const RoofSpec& spec, double x, int order);

// Normalized g (and g', g'') with an exact fixed-point argument; throws
// AtSingularity inside the clip window.  Both one-sided gaps are computed in
// fixed point before conversion, so points near 1 keep full precision.
double eval_roof(const RoofSpec& spec, CirclePoint x, int order);

// Antiderivative of g on [0,1] (F(0)=0, F(1)=1), used by the sampler cap.
double roof_cdf(const RoofSpec& spec, double x);

struct BirkhoffResult {
    double value = 0.0;
    long long n_terms = 0;
    double min_visit_distance = 0.0;
    int singular_clip_count = 0;  // always 0: a clipped term aborts instead
};

// Cocycle sums of g (order 0), g' (1), g'' (2) over the rotation orbit;
// f^(0)=0 and f^(-k)(x) = -f^(k)(x - k*alpha).  Kahan-compensated.
BirkhoffResult birkhoff_sum(const RoofSpec& spec, const RotationNumber& rot, CirclePoint x,
                            long long n, int order);

// ---- Denjoy-Koksma empirical checks -------------------------------------

// Lemma-style bounds for the power roof at q_s <= M < q_{s+1}; the slack
// multiplier K absorbs the deviation of the normalized roof from the
// unit-coefficient normalization the bounds are stated for.
struct DkBoundReport {
    std::uint64_t m_steps = 0;
    int s_index = 0;
    bool below_asymptotic_range = false;
    bool lower_qs_pass = false;      // q_s - K q_s^{1-gamma} <= f^(q_s)
    double lower_qs_margin = 0.0;
    bool sum_dev_pass = false;       // |f^(M) - M| <= K(...)
    double sum_dev_ratio = 0.0;
    bool deriv_band_pass = false;    // |f'^(M)| within |g'(x_min)| +- K q_{s+1}^{1+gamma}
    double deriv_band_ratio = 0.0;
    bool second_lower_pass = false;  // g''(x_min) <= f''^(M)
    bool second_upper_pass = false;  // f''^(M) <= g''(x_min) + K q_{s+1}^{2+gamma}
};

DkBoundReport check_dk_bounds(const RoofSpec& spec, const RotationNumber& rot, CirclePoint x,
                              std::uint64_t m_steps, double slack = 8.0);

// Median/quartile growth of |f'^(q_n)| against q_n log q_n.  Ratios are quoted
// on the unit-coefficient scale (multiplied by the normalizer Z) so that the
// asymmetric log roof with a=1,b=2 stabilizes near |b-a| = 1.
struct GrowthPoint {
    std::uint64_t q_n = 0;
    double median_ratio = 0.0;
    double q1_ratio = 0.0;
    double q3_ratio = 0.0;
};

struct GrowthReport {
    std::vector<GrowthPoint> points;
};

GrowthReport check_log_derivative_growth(const RoofSpec& spec, const RotationNumber& rot,
                                         int samples, std::uint64_t q_min, std::uint64_t q_max,
                                         std::uint64_t seed, int workers = 1);

// Two-regime Birkhoff-difference continuity check (the |r| log|r| ||x-y||
// band for large r, the q_n log q_n ||x-y|| cap for small r).  Verifies the
// window hypothesis along the orbit first; throws HypothesisViolated.
struct GoodconReport {
    double ratio = 0.0;       // |f^(r)(x)-f^(r)(y)| / (|r| log|r| ||x-y||), raw scale
    bool large_regime = false;
    bool in_band = false;     // [9/10, 11/10] when large_regime
    double small_cap = 0.0;   // (1/500) q_n log q_n ||x-y||, raw scale
    bool under_cap = false;
};

GoodconReport check_goodcon_ratio(const RoofSpec& spec, const RotationNumber& rot, CirclePoint x,
                                  CirclePoint y, long long r, int n_scale);

// Upper bound |f^(R)(x)-f^(R)(y)| < slack * |R| log|R| omega_R^4 ||x-y|| under
// the half-window hypothesis; returns the realized ratio to the bound.
double wniosek_ratio(const RoofSpec& spec, const RotationNumber& rot, CirclePoint x, CirclePoint y,
                     long long big_r);

// Slow auxiliary sequences.
inline double omega_seq(double n) { return std::log(std::log(n)); }
inline double kappa_seq(double n) { return std::log(n); }

}  // namespace specflow
