#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "specflow/circle.hpp"
#include "specflow/roof.hpp"
#include "specflow/rotation.hpp"

namespace specflow {

// A point (x, s) of the suspension space X^g = {(x,s): 0 <= s < g(x)}.
struct FlowPoint {
    CirclePoint x;
    double s = 0.0;
};

// Per-(alpha, roof) cache of cumulative roof sums along base orbits, used by
// flow() to binary-search the crossing count for large t.  Append-only per
// origin; all accumulation is Kahan-compensated in a fixed order, so cached
// and from-scratch walks produce bit-identical partial sums.
class CumSumCache;

class FlowParams {
public:
    FlowParams(RoofSpec roof, RotationNumber rot);

    const RoofSpec& roof() const { return roof_; }
    const RotationNumber& rot() const { return rot_; }
    CumSumCache& cache() const { return *cache_; }

private:
    RoofSpec roof_;
    RotationNumber rot_;
    std::shared_ptr<CumSumCache> cache_;
};

struct FlowResult {
    FlowPoint point;
    long long n_steps = 0;  // N(x, t): roof crossings, signed
};

// T_t^g(x, s) with N determined by f^{(N)}(x) <= s+t < f^{(N+1)}(x).
FlowResult flow(const FlowParams& params, FlowPoint p, double t);

// rho^f((x,s),(y,s')) = ||x-y|| + |s-s'|.
double rho_metric(FlowPoint p, FlowPoint q);

// d^f = min(rho^f, ||x+a-y|| + |g(x)-s+s'|, ||x-(y+a)|| + |g(y)-s'+s|).
double d_pseudo_metric(const FlowParams& params, FlowPoint p, FlowPoint q);

// Partition P_m: the ceiling atom {(x,s): g(x) >= log m} plus half-open grid
// squares of side 1/m below the threshold.
struct PartitionSpec {
    std::uint32_t m = 2;

    double side() const { return 1.0 / double(m); }
    double threshold() const;  // log m
    std::uint32_t rows() const;
};

PartitionSpec make_partition(std::uint32_t m);

struct AtomId {
    std::uint32_t value = 0;

    static constexpr std::uint32_t kCeiling = 0xFFFFFFFFu;
    static AtomId ceiling() { return {kCeiling}; }
    static AtomId grid(std::uint32_t col, std::uint32_t row) {
        return {col * 0x10000u + row};
    }
    bool is_ceiling() const { return value == kCeiling; }
    std::uint32_t col() const { return value >> 16; }
    std::uint32_t row() const { return value & 0xFFFFu; }
    friend bool operator==(AtomId a, AtomId b) { return a.value == b.value; }
};

AtomId atom_of(const FlowParams& params, const PartitionSpec& spec, FlowPoint p);

struct OrbitCode {
    std::vector<std::uint32_t> symbols;
    double r = 0.0;
    double delta = 0.0;
    std::uint32_t m = 0;
    FlowPoint origin;
};

// Sampled P_m-name of the orbit of p over [0, r] at step delta, computed by a
// single incremental pass (bit-identical to from-scratch flow() samples).
OrbitCode encode_orbit(const FlowParams& params, FlowPoint p, double r, const PartitionSpec& spec,
                       double delta);

// Fraction of sample indices whose symbols differ.
double hamming(const OrbitCode& c1, const OrbitCode& c2);

// Binary cache record: header {alpha-digest, roof-digest, m, delta, r,
// origin x (16 bytes), origin s}, then one little-endian u32 atom per symbol.
void write_orbit_code(std::ostream& os, const OrbitCode& code, std::uint64_t alpha_digest,
                      std::uint64_t roof_digest);
OrbitCode read_orbit_code(std::istream& is, std::uint64_t alpha_digest, std::uint64_t roof_digest);

std::uint64_t alpha_digest(const RotationNumber& rot);

// Incremental walker along one flow orbit: monotone advance_to(t) with the
// same Kahan accumulation order as flow() from the same origin.
class OrbitWalker {
public:
    OrbitWalker(const FlowParams& params, FlowPoint origin);

    void advance_to(double t);  // t must be non-decreasing across calls
    FlowPoint point() const { return {x_, target_ - cum_}; }
    long long crossings() const { return n_; }

private:
    const FlowParams& params_;
    CirclePoint x_;
    double s0_;
    double target_ = 0.0;
    double cum_ = 0.0, comp_ = 0.0;
    double g_cur_ = 0.0;
    long long n_ = 0;
};

}  // namespace specflow
