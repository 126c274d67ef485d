#include "specflow/rotation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/multiprecision/cpp_int.hpp>

#include "specflow/errors.hpp"

namespace specflow {

namespace mp = boost::multiprecision;

namespace {

constexpr std::uint64_t kResolutionQ = std::uint64_t(1) << 60;

void push_convergent(RotationNumber& rot, std::uint64_t a) {
    std::size_t k = rot.p.size() - 1;  // index of the last stored convergent
    // overflow-checked q_{k+1} = a q_k + q_{k-1}
    std::uint64_t qk = rot.q[k], qk1 = rot.q[k - 1];
    std::uint64_t pk = rot.p[k], pk1 = rot.p[k - 1];
    if (a != 0 && (qk > (std::numeric_limits<std::uint64_t>::max() - qk1) / a ||
                   pk > (std::numeric_limits<std::uint64_t>::max() - pk1) / a))
        return;
    rot.quotients.push_back(a);
    rot.p.push_back(a * pk + pk1);
    rot.q.push_back(a * qk + qk1);
}

void finish(RotationNumber& rot) {
    rot.depth = int(rot.quotients.size());
    rot.q_alpha.clear();
    rot.signed_err.clear();
    for (std::size_t k = 0; k < rot.q.size(); ++k) {
        CirclePoint qa = CirclePoint().advanced(rot.q[k], rot.alpha);
        rot.q_alpha.push_back(qa);
        rot.signed_err.push_back(qa.signed_to_zero());
    }
}

}  // namespace

RotationNumber expand_continued_fraction(CirclePoint alpha, int depth, bool strict) {
    if (depth < 1 || depth > 64) throw ConfigError("CF depth must be in [1, 64]");
    u128 v = alpha.raw();
    if (v == 0) throw AlphaRational("alpha = 0 has no continued fraction");

    RotationNumber rot;
    rot.alpha = alpha;
    rot.p = {0};
    rot.q = {1};

    // First step divides 2^128 (not representable) by v: 2^128 = (2^128-1) + 1.
    u128 all_ones = ~u128(0);
    u128 a = all_ones / v;
    u128 r = all_ones % v;
    if (++r == v) {
        ++a;
        r = 0;
    }
    u128 num = v, rem = r;
    bool terminated = false;
    // Seed p_1/q_1 = 1/a_1 by hand (the recursion needs two predecessors).
    if (a > std::numeric_limits<std::uint64_t>::max())
        throw AlphaRational("alpha indistinguishable from 0 at fixed-point resolution");
    rot.quotients.push_back(std::uint64_t(a));
    rot.p.push_back(1);
    rot.q.push_back(std::uint64_t(a));

    while (int(rot.quotients.size()) < depth) {
        if (rem == 0) {
            terminated = true;
            break;
        }
        u128 ak = num / rem;
        u128 next = num % rem;
        num = rem;
        rem = next;
        if (ak > std::numeric_limits<std::uint64_t>::max()) {
            terminated = true;
            break;
        }
        std::size_t before = rot.quotients.size();
        push_convergent(rot, std::uint64_t(ak));
        if (rot.quotients.size() == before) break;  // uint64 convergent overflow
        if (rot.q.back() > kResolutionQ) break;     // below fixed-point resolution
    }

    finish(rot);
    if (terminated && rot.depth < 3)
        throw AlphaRational("continued fraction terminated before depth 3");
    if (strict && rot.depth < depth) throw DepthUnreachable(rot.depth);
    return rot;
}

RotationNumber rotation_from_quotients(const std::vector<std::uint64_t>& quotients) {
    if (quotients.size() < 3) throw AlphaRational("need at least 3 partial quotients");
    mp::cpp_int p0 = 0, q0 = 1, p1 = 1, q1 = quotients[0];
    for (std::size_t k = 1; k < quotients.size(); ++k) {
        mp::cpp_int p2 = quotients[k] * p1 + p0;
        mp::cpp_int q2 = quotients[k] * q1 + q0;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        if (mp::msb(q1) > 200) break;  // value already pinned far below 2^-128
    }
    mp::cpp_int value = (mp::cpp_int(p1) << 128) / q1;
    u128 v = 0;
    for (int limb = 1; limb >= 0; --limb)
        v = (v << 64) | std::uint64_t((value >> (64 * limb)) & 0xFFFFFFFFFFFFFFFFull);

    RotationNumber rot;
    rot.alpha = CirclePoint::from_raw(v);
    rot.p = {0};
    rot.q = {1};
    rot.quotients.clear();
    rot.p.push_back(1);
    rot.q.push_back(quotients[0]);
    rot.quotients.push_back(quotients[0]);
    for (std::size_t k = 1; k < quotients.size(); ++k) {
        std::size_t before = rot.quotients.size();
        push_convergent(rot, quotients[k]);
        if (rot.quotients.size() == before) break;
    }
    finish(rot);
    return rot;
}

RotationNumber golden_rotation(int depth) {
    std::vector<std::uint64_t> a(92, 1);
    RotationNumber rot = rotation_from_quotients(a);
    if (depth < rot.depth) {
        rot.quotients.resize(depth);
        rot.p.resize(depth + 1);
        rot.q.resize(depth + 1);
        rot.q_alpha.resize(depth + 1);
        rot.signed_err.resize(depth + 1);
        rot.depth = depth;
    }
    return rot;
}

RotationNumber silver_rotation(int depth) {
    std::vector<std::uint64_t> a(72, 2);
    RotationNumber rot = rotation_from_quotients(a);
    if (depth < rot.depth) {
        rot.quotients.resize(depth);
        rot.p.resize(depth + 1);
        rot.q.resize(depth + 1);
        rot.q_alpha.resize(depth + 1);
        rot.signed_err.resize(depth + 1);
        rot.depth = depth;
    }
    return rot;
}

CirclePoint circle_from_decimal(const std::string& text) {
    std::string t = text;
    if (!t.empty() && t[0] == '+') t = t.substr(1);
    std::size_t dot = t.find('.');
    std::string frac = dot == std::string::npos ? "" : t.substr(dot + 1);
    std::string whole = dot == std::string::npos ? t : t.substr(0, dot);
    for (char c : whole + frac)
        if (!std::isdigit(static_cast<unsigned char>(c)))
            throw ConfigError("invalid decimal: " + text);
    mp::cpp_int num = 0, den = 1;
    for (char c : frac) {
        num = num * 10 + (c - '0');
        den *= 10;
    }
    mp::cpp_int value = (num << 128) / den;
    u128 v = 0;
    for (int limb = 1; limb >= 0; --limb)
        v = (v << 64) | std::uint64_t((value >> (64 * limb)) & 0xFFFFFFFFFFFFFFFFull);
    return CirclePoint::from_raw(v);
}

std::string to_decimal_string(CirclePoint x, int digits) {
    mp::cpp_int v = 0;
    v = std::uint64_t(x.raw() >> 64);
    v = (v << 64) | std::uint64_t(x.raw());
    std::string out = "0.";
    for (int i = 0; i < digits; ++i) {
        v *= 10;
        out += char('0' + int(v >> 128));
        v &= (mp::cpp_int(1) << 128) - 1;
    }
    return out;
}

RotationNumber parse_rotation(const std::string& spec, int depth) {
    if (spec == "golden") return golden_rotation(depth);
    if (spec == "silver") return silver_rotation(depth);
    if (spec.rfind("cf:", 0) == 0) {
        std::vector<std::uint64_t> a;
        std::stringstream ss(spec.substr(3));
        std::string tok;
        while (std::getline(ss, tok, ',')) a.push_back(std::stoull(tok));
        return rotation_from_quotients(a);
    }
    return expand_continued_fraction(circle_from_decimal(spec), depth);
}

DiophantineReport classify_diophantine(const RotationNumber& rot, double c_const) {
    if (rot.depth < 5) throw ConfigError("classify_diophantine needs depth >= 5");
    DiophantineReport rep;
    rep.depth = rot.depth;
    rep.in_D = true;
    int first = 0;
    for (int n = 1; n < rot.depth; ++n) {
        double qn = double(rot.q[n]);
        double qn1 = double(rot.q[n + 1]);
        if (qn < 3.0) continue;  // log q_n degenerate below 3
        if (first == 0) first = n;
        double logq = std::log(qn);
        // class D test starts at n >= 3 where (log n)^2 is non-degenerate
        if (n >= 3) {
            double ratio = qn1 / (qn * logq * std::pow(std::log(double(n)), 2.0));
            rep.c_witness = std::max(rep.c_witness, ratio);
        }
        if (qn1 <= qn * std::pow(logq, 7.0 / 8.0))
            rep.k_alpha.push_back(n);
        else
            rep.e_partial_sum += std::pow(logq, -7.0 / 8.0);
        if (std::log(qn1) >= qn) rep.liouville_flag = true;
    }
    // Liouville test over the full stored range (small q_n included).
    for (int n = 1; n < rot.depth; ++n)
        if (std::log(double(rot.q[n + 1])) >= double(rot.q[n])) rep.liouville_flag = true;
    rep.first_tested_index = first;
    rep.in_D = rep.c_witness <= c_const;
    return rep;
}

std::string DiophantineReport::to_json() const {
    std::ostringstream os;
    os << "{\"in_D\":" << (in_D ? "true" : "false") << ",\"C\":" << c_witness << ",\"k_alpha\":[";
    for (std::size_t i = 0; i < k_alpha.size(); ++i) os << (i ? "," : "") << k_alpha[i];
    os << "],\"e_partial_sum\":" << e_partial_sum
       << ",\"liouville_flag\":" << (liouville_flag ? "true" : "false") << ",\"depth\":" << depth
       << "}";
    return os.str();
}

namespace {

struct VisitState {
    std::uint64_t j;
    CirclePoint pos;
    double abs_err;
};

}  // namespace

ClosestVisit closest_visit(CirclePoint x, const RotationNumber& rot, std::uint64_t m_steps,
                           bool force_fast) {
    if (m_steps == 0) throw ConfigError("closest_visit needs m_steps >= 1");
    if (m_steps <= 1000000 && !force_fast) {
        CirclePoint pos = x;
        std::uint64_t best_j = 0;
        u128 best = pos.raw_dist_to_zero();
        for (std::uint64_t j = 1; j < m_steps; ++j) {
            pos += rot.alpha;
            u128 d = pos.raw_dist_to_zero();
            if (d < best) {
                best = d;
                best_j = j;
            }
        }
        return {best_j, u128_to_unit(best)};
    }

    // Beam search over Ostrowski-style digits: adding b*q_k steps moves the
    // point by b*(q_k*alpha - p_k).  The error magnitudes ||q_k alpha|| shrink
    // with k, so the expansion of the displacement to 0 runs k = 0, 1, 2, ...
    // (largest correction first) under the step budget j < M.
    constexpr std::size_t kBeam = 24;
    std::vector<VisitState> beam{{0, x, std::abs(x.signed_to_zero())}};
    std::uint64_t best_j = 0;
    u128 best = x.raw_dist_to_zero();
    auto consider = [&](const VisitState& s) {
        u128 d = s.pos.raw_dist_to_zero();
        if (d < best || (d == best && s.j < best_j)) {
            best = d;
            best_j = s.j;
        }
    };
    for (int k = 0; k <= rot.depth; ++k) {
        std::uint64_t qk = rot.q[k];
        double dk = rot.signed_err[k];
        if (dk == 0.0) break;  // exact hit at a smaller level
        std::vector<VisitState> next;
        for (const VisitState& s : beam) {
            next.push_back(s);
            if (qk > m_steps - 1 - s.j) continue;
            std::uint64_t budget = (m_steps - 1 - s.j) / qk;
            std::uint64_t cap = k < rot.depth ? rot.quotients[k] + 1 : budget;
            cap = std::min(cap, budget);
            double e = s.pos.signed_to_zero();
            // Digits that move toward 0: sign of b*dk opposite to e.
            std::uint64_t want =
                (e > 0) == (dk > 0) ? 0 : std::uint64_t(std::floor(std::abs(e) / std::abs(dk)));
            want = std::min(want, cap);
            for (std::uint64_t b = want > 2 ? want - 2 : 1; b <= want + 2; ++b) {
                if (b == 0 || b > cap) continue;
                VisitState t;
                t.j = s.j + b * qk;
                t.pos = s.pos.advanced(b, rot.q_alpha[k]);
                t.abs_err = std::abs(t.pos.signed_to_zero());
                consider(t);
                next.push_back(t);
            }
        }
        std::sort(next.begin(), next.end(), [](const VisitState& a, const VisitState& b) {
            if (a.abs_err != b.abs_err) return a.abs_err < b.abs_err;
            return a.j < b.j;
        });
        next.erase(std::unique(next.begin(), next.end(),
                               [](const VisitState& a, const VisitState& b) { return a.j == b.j; }),
                   next.end());
        if (next.size() > kBeam) next.resize(kBeam);
        beam = std::move(next);
    }
    for (const VisitState& s : beam) consider(s);
    return {best_j, u128_to_unit(best)};
}

std::vector<std::uint64_t> ostrowski_decompose(std::uint64_t r, const RotationNumber& rot) {
    if (r > rot.largest_q()) throw ROutOfRange("r exceeds the largest stored q");
    std::vector<std::uint64_t> digits(rot.q.size(), 0);
    for (int k = int(rot.q.size()) - 1; k >= 0 && r > 0; --k) {
        if (rot.q[k] > r) continue;
        digits[k] = r / rot.q[k];
        r %= rot.q[k];
    }
    return digits;
}

std::uint64_t ostrowski_reconstruct(const std::vector<std::uint64_t>& digits,
                                    const RotationNumber& rot) {
    std::uint64_t r = 0;
    for (std::size_t k = 0; k < digits.size() && k < rot.q.size(); ++k) r += digits[k] * rot.q[k];
    return r;
}

}  // namespace specflow
