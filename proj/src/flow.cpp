#include "specflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "specflow/errors.hpp"

namespace specflow {

namespace {

struct RawKey {
    std::uint64_t hi, lo;
    bool operator==(const RawKey& o) const { return hi == o.hi && lo == o.lo; }
};

struct RawKeyHash {
    std::size_t operator()(const RawKey& k) const {
        std::uint64_t z = k.hi ^ (k.lo * 0x9E3779B97F4A7C15ull);
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ull;
        z ^= z >> 27;
        return std::size_t(z);
    }
};

}  // namespace

// Cumulative sums cum[k] = f^{(k)}(origin), Kahan-compensated in forward
// order; the trailing compensation term is stored so the array can be
// extended later with bit-identical values.
class CumSumCache {
public:
    struct Entry {
        std::vector<double> cum{0.0};
        double comp = 0.0;
        CirclePoint x_end;
    };

    // Extends the entry for `origin` until cum.back() > target and returns a
    // snapshot reference (entries are never shrunk or rewritten).
    const Entry& extended(const RoofSpec& roof, const RotationNumber& rot, CirclePoint origin,
                          double target) {
        std::lock_guard<std::mutex> lock(mu_);
        auto [it, fresh] = entries_.try_emplace(
            RawKey{std::uint64_t(origin.raw() >> 64), std::uint64_t(origin.raw())});
        Entry& e = it->second;
        if (fresh) e.x_end = origin;
        while (e.cum.back() <= target) {
            if (e.x_end.in_clip_window())
                throw OrbitHitsSingularity((long long)e.cum.size() - 1);
            double y = eval_roof(roof, e.x_end, 0) - e.comp;
            double t = e.cum.back() + y;
            e.comp = (t - e.cum.back()) - y;
            e.cum.push_back(t);
            e.x_end += rot.alpha;
        }
        return e;
    }

private:
    std::mutex mu_;
    std::unordered_map<RawKey, Entry, RawKeyHash> entries_;
};

FlowParams::FlowParams(RoofSpec roof, RotationNumber rot)
    : roof_(std::move(roof)), rot_(std::move(rot)), cache_(std::make_shared<CumSumCache>()) {}

OrbitWalker::OrbitWalker(const FlowParams& params, FlowPoint origin)
    : params_(params), x_(origin.x), s0_(origin.s), target_(origin.s) {
    if (x_.in_clip_window()) throw OrbitHitsSingularity(0);
    g_cur_ = eval_roof(params_.roof(), x_, 0);
}

void OrbitWalker::advance_to(double t) {
    target_ = s0_ + t;
    for (;;) {
        double y = g_cur_ - comp_;
        double next = cum_ + y;
        if (next > target_) break;
        comp_ = (next - cum_) - y;
        cum_ = next;
        x_ += params_.rot().alpha;
        ++n_;
        if (x_.in_clip_window()) throw OrbitHitsSingularity(n_);
        g_cur_ = eval_roof(params_.roof(), x_, 0);
    }
}

FlowResult flow(const FlowParams& params, FlowPoint p, double t) {
    double target = p.s + t;
    if (target >= 0.0) {
        // Large t: binary search over the shared cumulative-sum cache.  The
        // cached values are bit-identical to a fresh walk, so both paths agree.
        if (t > 64.0) {
            const CumSumCache::Entry& e =
                params.cache().extended(params.roof(), params.rot(), p.x, target);
            auto it = std::upper_bound(e.cum.begin(), e.cum.end(), target);
            long long n = (long long)(it - e.cum.begin()) - 1;
            CirclePoint x = p.x.advanced(std::uint64_t(n), params.rot().alpha);
            double s = target - e.cum[std::size_t(n)];
            double g = eval_roof(params.roof(), x, 0);
            if (s >= g) s = std::nextafter(g, 0.0);
            return {{x, s}, n};
        }
        OrbitWalker w(params, p);
        w.advance_to(t);
        FlowPoint q = w.point();
        double g = eval_roof(params.roof(), q.x, 0);
        if (q.s >= g) q.s = std::nextafter(g, 0.0);
        return {q, w.crossings()};
    }

    // Backward: find the smallest k with -sum_k <= target.
    CirclePoint x = p.x;
    double sum = 0.0, comp = 0.0;
    long long k = 0;
    while (-sum > target) {
        x -= params.rot().alpha;
        ++k;
        if (x.in_clip_window()) throw OrbitHitsSingularity(-k);
        double y = eval_roof(params.roof(), x, 0) - comp;
        double nxt = sum + y;
        comp = (nxt - sum) - y;
        sum = nxt;
    }
    double s = target + sum;
    double g = eval_roof(params.roof(), x, 0);
    if (s >= g) s = std::nextafter(g, 0.0);
    if (s < 0.0) s = 0.0;
    return {{x, s}, -k};
}

double rho_metric(FlowPoint p, FlowPoint q) {
    return circle_distance(p.x, q.x) + std::abs(p.s - q.s);
}

double d_pseudo_metric(const FlowParams& params, FlowPoint p, FlowPoint q) {
    double base = rho_metric(p, q);
    double gx = eval_roof(params.roof(), p.x, 0);
    double gy = eval_roof(params.roof(), q.x, 0);
    double over_p = circle_distance(p.x + params.rot().alpha, q.x) + std::abs(gx - p.s + q.s);
    double over_q = circle_distance(p.x, q.x + params.rot().alpha) + std::abs(gy - q.s + p.s);
    return std::min({base, over_p, over_q});
}

double PartitionSpec::threshold() const { return std::log(double(m)); }

std::uint32_t PartitionSpec::rows() const {
    return std::uint32_t(std::ceil(double(m) * std::log(double(m))));
}

PartitionSpec make_partition(std::uint32_t m) {
    PartitionSpec spec{m};
    if (m < 2) throw DegenerateGrid("partition needs m >= 2");
    if (m > 4096 || spec.rows() > 0xFFFF)
        throw DegenerateGrid("partition m too large for 16-bit atom indexing");
    return spec;
}

AtomId atom_of(const FlowParams& params, const PartitionSpec& spec, FlowPoint p) {
    if (p.x.in_clip_window()) return AtomId::ceiling();
    if (eval_roof(params.roof(), p.x, 0) >= spec.threshold()) return AtomId::ceiling();
    // Exact column: floor(x*m) from the 128x32 product's high limb.
    u128 raw = p.x.raw();
    u128 top = u128(std::uint64_t(raw >> 64)) * spec.m + ((u128(std::uint64_t(raw)) * spec.m) >> 64);
    std::uint32_t col = std::uint32_t(std::uint64_t(top >> 64));
    double srow = p.s * double(spec.m);
    std::uint32_t row = srow <= 0.0 ? 0 : std::uint32_t(srow);
    return AtomId::grid(col, std::min(row, spec.rows() - 1));
}

OrbitCode encode_orbit(const FlowParams& params, FlowPoint p, double r, const PartitionSpec& spec,
                       double delta) {
    double inf_g = params.roof().inf_value();
    if (!(delta > 0.0) || delta > std::min(1.0, inf_g) / 4.0)
        throw ConfigError("encode_orbit: delta must lie in (0, min(1, inf g)/4]");
    if (!(r > 0.0)) throw ConfigError("encode_orbit: duration must be positive");
    double len = std::ceil(r / delta);
    if (len > 1e7) throw ConfigError("encode_orbit: more than 10^7 samples requested");

    OrbitCode code;
    code.r = r;
    code.delta = delta;
    code.m = spec.m;
    code.origin = p;
    std::size_t n = std::size_t(len);
    code.symbols.reserve(n);
    OrbitWalker w(params, p);
    for (std::size_t k = 0; k < n; ++k) {
        w.advance_to(double(k) * delta);
        code.symbols.push_back(atom_of(params, spec, w.point()).value);
    }
    return code;
}

double hamming(const OrbitCode& c1, const OrbitCode& c2) {
    if (c1.m != c2.m || c1.delta != c2.delta || c1.r != c2.r ||
        c1.symbols.size() != c2.symbols.size())
        throw CodeMismatch("hamming: codes sampled with different (r, delta, m)");
    if (c1.symbols.empty()) return 0.0;
    std::size_t diff = 0;
    for (std::size_t i = 0; i < c1.symbols.size(); ++i) diff += c1.symbols[i] != c2.symbols[i];
    return double(diff) / double(c1.symbols.size());
}

std::uint64_t alpha_digest(const RotationNumber& rot) {
    std::uint64_t h = 14695981039346656037ull;
    u128 raw = rot.alpha.raw();
    for (int i = 0; i < 16; ++i) {
        h ^= std::uint64_t(raw >> (8 * i)) & 0xFF;
        h *= 1099511628211ull;
    }
    return h;
}

namespace {

template <typename T>
void put(std::ostream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
}

}  // namespace

void write_orbit_code(std::ostream& os, const OrbitCode& code, std::uint64_t a_digest,
                      std::uint64_t r_digest) {
    put(os, a_digest);
    put(os, r_digest);
    put(os, code.m);
    put(os, code.delta);
    put(os, code.r);
    put(os, std::uint64_t(code.origin.x.raw()));
    put(os, std::uint64_t(code.origin.x.raw() >> 64));
    put(os, code.origin.s);
    put(os, std::uint32_t(code.symbols.size()));
    for (std::uint32_t sym : code.symbols) put(os, sym);
}

OrbitCode read_orbit_code(std::istream& is, std::uint64_t a_digest, std::uint64_t r_digest) {
    if (get<std::uint64_t>(is) != a_digest || get<std::uint64_t>(is) != r_digest)
        throw CodeMismatch("cached orbit code belongs to a different (alpha, roof)");
    OrbitCode code;
    code.m = get<std::uint32_t>(is);
    code.delta = get<double>(is);
    code.r = get<double>(is);
    std::uint64_t lo = get<std::uint64_t>(is);
    std::uint64_t hi = get<std::uint64_t>(is);
    code.origin.x = CirclePoint::from_raw((u128(hi) << 64) | lo);
    code.origin.s = get<double>(is);
    std::size_t n = get<std::uint32_t>(is);
    code.symbols.resize(n);
    for (std::size_t i = 0; i < n; ++i) code.symbols[i] = get<std::uint32_t>(is);
    if (!is) throw CodeMismatch("cached orbit code truncated");
    return code;
}

}  // namespace specflow
