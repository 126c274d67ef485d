#include "specflow/roof.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "specflow/errors.hpp"
#include "specflow/parallel.hpp"
#include "specflow/rng.hpp"

namespace specflow {

double RoofSpec::normalizer() const {
    if (kind == RoofKind::LogAsym) return background + a + b;
    return background + (a + b) / (1.0 - gamma);
}

double RoofSpec::inf_value() const {
    double x_min;
    if (kind == RoofKind::LogAsym) {
        x_min = a / (a + b);
    } else {
        double t = std::pow(a / b, 1.0 / (gamma + 1.0));
        x_min = t / (1.0 + t);
    }
    return eval_roof_raw(*this, x_min, 0) / normalizer();
}

std::string RoofSpec::canonical() const {
    char buf[160];
    if (kind == RoofKind::LogAsym) {
        std::snprintf(buf, sizeof buf, "log;a=%.17g;b=%.17g;c=%.17g", a, b, background);
    } else {
        std::snprintf(buf, sizeof buf, "pow;a=%.17g;b=%.17g;g=%.17g;c=%.17g", a, b, gamma,
                      background);
    }
    return buf;
}

std::uint64_t RoofSpec::digest() const {
    std::uint64_t h = 14695981039346656037ull;  // FNV-1a
    for (char c : canonical()) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    return h;
}

namespace {

// Shared kernel on the two one-sided gaps xr = d(x,0^+) and xl = d(x,1^-).
double raw_from_gaps(const RoofSpec& spec, double xr, double xl, int order) {
    if (spec.kind == RoofKind::LogAsym) {
        switch (order) {
            case 0: return spec.background - spec.a * std::log(xr) - spec.b * std::log(xl);
            case 1: return -spec.a / xr + spec.b / xl;
            default: return spec.a / (xr * xr) + spec.b / (xl * xl);
        }
    }
    double g = spec.gamma;
    switch (order) {
        case 0:
            return spec.background + spec.a * std::pow(xr, -g) + spec.b * std::pow(xl, -g);
        case 1:
            return -spec.a * g * std::pow(xr, -g - 1.0) + spec.b * g * std::pow(xl, -g - 1.0);
        default:
            return spec.a * g * (g + 1.0) * std::pow(xr, -g - 2.0) +
                   spec.b * g * (g + 1.0) * std::pow(xl, -g - 2.0);
    }
}

struct Kahan {
    double sum = 0.0, comp = 0.0;
    void add(double v) {
        double y = v - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
};

}  // namespace

double eval_roof_raw(const RoofSpec& spec, double x, int order) {
    return raw_from_gaps(spec, x, 1.0 - x, order);
}

double eval_roof(const RoofSpec& spec, CirclePoint x, int order) {
    if (x.in_clip_window()) throw AtSingularity("eval_roof inside the singularity clip window");
    return raw_from_gaps(spec, x.gap_right(), x.gap_left(), order) / spec.normalizer();
}

double roof_cdf(const RoofSpec& spec, double x) {
    double f;
    if (spec.kind == RoofKind::LogAsym) {
        double left = x > 0.0 ? x * (1.0 - std::log(x)) : 0.0;
        double right = x < 1.0 ? x + (1.0 - x) * std::log(1.0 - x) : 1.0;
        f = spec.background * x + spec.a * left + spec.b * right;
    } else {
        double g = spec.gamma;
        f = spec.background * x + spec.a * std::pow(x, 1.0 - g) / (1.0 - g) +
            spec.b * (1.0 - std::pow(1.0 - x, 1.0 - g)) / (1.0 - g);
    }
    return f / spec.normalizer();
}

BirkhoffResult birkhoff_sum(const RoofSpec& spec, const RotationNumber& rot, CirclePoint x,
                            long long n, int order) {
    BirkhoffResult out;
    out.n_terms = n;
    if (n == 0) return out;

    long long count = n > 0 ? n : -n;
    // Summation range: j in [0, n) for n > 0; j in [n, 0) for n < 0.
    CirclePoint p = n > 0 ? x : x - rot.alpha;
    u128 min_raw = ~u128(0);
    double z = spec.normalizer();
    Kahan acc;
    for (long long k = 0; k < count; ++k) {
        if (p.in_clip_window()) throw OrbitHitsSingularity(n > 0 ? k : -(k + 1));
        u128 d = p.raw_dist_to_zero();
        if (d < min_raw) min_raw = d;
        acc.add(raw_from_gaps(spec, p.gap_right(), p.gap_left(), order));
        if (n > 0)
            p += rot.alpha;
        else
            p -= rot.alpha;
    }
    out.value = (n > 0 ? acc.sum : -acc.sum) / z;
    out.min_visit_distance = u128_to_unit(min_raw);
    return out;
}

DkBoundReport check_dk_bounds(const RoofSpec& spec, const RotationNumber& rot, CirclePoint x,
                              std::uint64_t m_steps, double slack) {
    DkBoundReport rep;
    rep.m_steps = m_steps;
    if (m_steps == 0 || m_steps >= rot.largest_q())
        throw ROutOfRange("check_dk_bounds: m_steps outside [1, q_D)");
    int s = 0;
    while (s + 1 < int(rot.q.size()) && rot.q[s + 1] <= m_steps) ++s;
    rep.s_index = s;
    rep.below_asymptotic_range = (int(rot.q.size()) > 3 && m_steps < rot.q[3]);

    double g = spec.gamma;
    double qs = double(rot.q[s]);
    double qs1 = double(rot.q[s + 1]);
    double m = double(m_steps);
    double lg = std::log(std::max(m, 2.0));

    ClosestVisit cv = closest_visit(x, rot, m_steps);
    CirclePoint pmin = x.advanced(cv.index, rot.alpha);

    BirkhoffResult b0 = birkhoff_sum(spec, rot, x, (long long)m_steps, 0);
    BirkhoffResult b1 = birkhoff_sum(spec, rot, x, (long long)m_steps, 1);
    BirkhoffResult b2 = birkhoff_sum(spec, rot, x, (long long)m_steps, 2);

    // (koks3) lower bound at M = q_s.
    double f_qs = (m_steps == rot.q[s])
                      ? b0.value
                      : birkhoff_sum(spec, rot, x, (long long)rot.q[s], 0).value;
    rep.lower_qs_margin = f_qs - (qs - slack * std::pow(qs, 1.0 - g));
    rep.lower_qs_pass = rep.lower_qs_margin >= 0.0;

    // (koks3) two-term deviation bound at M.
    double dev_rhs = slack * (std::pow(m, 1.0 - g) * std::pow(lg, 4.0) +
                              std::pow(lg, 3.0) * eval_roof(spec, pmin, 0));
    rep.sum_dev_ratio = std::abs(b0.value - m) / dev_rhs;
    rep.sum_dev_pass = rep.sum_dev_ratio <= 1.0;

    // (koks4) band around the closest-visit derivative.
    double center = std::abs(eval_roof(spec, pmin, 1));
    double halfwidth = slack * std::pow(qs1, 1.0 + g);
    rep.deriv_band_ratio = std::abs(std::abs(b1.value) - center) / halfwidth;
    rep.deriv_band_pass = rep.deriv_band_ratio <= 1.0;

    // (koks5): all f'' terms are positive, so the closest-visit term alone is
    // a true lower bound; the upper bound carries the slack.
    double c2 = eval_roof(spec, pmin, 2);
    rep.second_lower_pass = c2 <= b2.value * (1.0 + 1e-12) + 1e-9;
    rep.second_upper_pass = b2.value <= c2 + slack * std::pow(qs1, 2.0 + g);
    return rep;
}

GrowthReport check_log_derivative_growth(const RoofSpec& spec, const RotationNumber& rot,
                                         int samples, std::uint64_t q_min, std::uint64_t q_max,
                                         std::uint64_t seed, int workers) {
    GrowthReport rep;
    double z = spec.normalizer();
    for (std::size_t k = 0; k < rot.q.size(); ++k) {
        std::uint64_t qn = rot.q[k];
        if (qn < q_min || qn > q_max || qn < 2) continue;
        std::vector<double> ratios(samples);
        double denom = double(qn) * std::log(double(qn));
        CounterRng rng(seed, qn);
        parallel_for(samples, workers, [&](std::size_t i) {
            // Deterministic retry counters: 64 attempt slots per sample.
            for (std::uint64_t att = 0;; ++att) {
                CirclePoint x = CirclePoint::from_double(rng.uniform(i * 64 + att));
                try {
                    double d = birkhoff_sum(spec, rot, x, (long long)qn, 1).value;
                    ratios[i] = z * std::abs(d) / denom;
                    return;
                } catch (const OrbitHitsSingularity&) {
                    if (att >= 63) throw;
                }
            }
        });
        std::sort(ratios.begin(), ratios.end());
        auto at = [&](double pr) { return ratios[std::size_t(pr * double(samples - 1))]; };
        rep.points.push_back({qn, at(0.5), at(0.25), at(0.75)});
    }
    return rep;
}

namespace {

// Verify the orbit-window hypothesis: the segments T^i[x,y], i = 0..|r| with
// the sign of r, keep distance > halfwidth from 0.  Throws on violation.
void verify_window_hypothesis(const RotationNumber& rot, CirclePoint x, CirclePoint y,
                              long long r, double halfwidth) {
    double seg = circle_distance(x, y);
    CirclePoint px = x, py = y;
    long long count = (r >= 0 ? r : -r);
    for (long long i = 0; i <= count; ++i) {
        double su = px.signed_to_zero();
        double sv = py.signed_to_zero();
        double dist;
        if ((su > 0.0) != (sv > 0.0) && std::abs(su) + std::abs(sv) <= seg * (1.0 + 1e-12))
            dist = 0.0;  // the short arc from px to py crosses 0
        else
            dist = std::min(std::abs(su), std::abs(sv));
        if (dist <= halfwidth) throw HypothesisViolated(r >= 0 ? i : -i);
        if (r >= 0) {
            px += rot.alpha;
            py += rot.alpha;
        } else {
            px -= rot.alpha;
            py -= rot.alpha;
        }
    }
}

}  // namespace

GoodconReport check_goodcon_ratio(const RoofSpec& spec, const RotationNumber& rot, CirclePoint x,
                                  CirclePoint y, long long r, int n_scale) {
    GoodconReport rep;
    if (n_scale < 0 || n_scale >= int(rot.q.size()))
        throw ROutOfRange("check_goodcon_ratio: n_scale outside expanded depth");
    double qn = double(rot.q[n_scale]);
    double halfwidth = kappa_seq(double(std::max(n_scale, 3))) / (qn * std::log(qn));
    verify_window_hypothesis(rot, x, y, r, halfwidth);

    double seg = circle_distance(x, y);
    double absr = double(r >= 0 ? r : -r);
    rep.large_regime = absr * 1000.0 >= qn;
    rep.small_cap = qn * std::log(qn) * seg / 500.0;
    if (seg == 0.0 || r == 0) {
        rep.in_band = true;
        rep.under_cap = true;
        return rep;
    }
    double diff = spec.normalizer() * std::abs(birkhoff_sum(spec, rot, x, r, 0).value -
                                               birkhoff_sum(spec, rot, y, r, 0).value);
    rep.ratio = diff / (absr * std::log(absr) * seg);
    rep.in_band = rep.ratio >= 0.9 && rep.ratio <= 1.1;
    rep.under_cap = diff <= rep.small_cap;
    return rep;
}

double wniosek_ratio(const RoofSpec& spec, const RotationNumber& rot, CirclePoint x, CirclePoint y,
                     long long big_r) {
    double absr = double(big_r >= 0 ? big_r : -big_r);
    if (absr < 16.0) throw ROutOfRange("wniosek_ratio: |R| must be at least 16");
    double omega = omega_seq(absr);
    verify_window_hypothesis(rot, x, y, big_r, 1.0 / (2.0 * absr * omega));
    double seg = circle_distance(x, y);
    if (seg == 0.0) return 0.0;
    double diff = spec.normalizer() * std::abs(birkhoff_sum(spec, rot, x, big_r, 0).value -
                                               birkhoff_sum(spec, rot, y, big_r, 0).value);
    return diff / (absr * std::log(absr) * omega * omega * omega * omega * seg);
}

}  // namespace specflow
