#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "specflow/circle.hpp"

namespace specflow {

// An irrational rotation number together with its continued-fraction data.
// Convergent convention: p_0/q_0 = 0/1, p_1/q_1 = 1/a_1,
// p_{k+1} = a_{k+1} p_k + p_{k-1}, q_{k+1} = a_{k+1} q_k + q_{k-1}.
struct RotationNumber {
    CirclePoint alpha;
    std::vector<std::uint64_t> quotients;  // a_1 .. a_D
    std::vector<std::uint64_t> p;          // p_0 .. p_D
    std::vector<std::uint64_t> q;          // q_0 .. q_D
    int depth = 0;                         // D = quotients.size()

    // Cached per-convergent data: q_k * alpha mod 1 (exact) and the signed
    // displacement q_k*alpha - p_k as a double.
    std::vector<CirclePoint> q_alpha;
    std::vector<double> signed_err;

    std::uint64_t largest_q() const { return q.back(); }
};

// Finite-range verdict on the Diophantine classes.  Membership in
// the asymptotic classes cannot be decided numerically; the report carries the
// tested index range and the witness constant.  Natural logarithms throughout;
// indices with q_n < 3 are skipped (log q_n degenerate there).
struct DiophantineReport {
    bool in_D = false;
    double c_witness = 0.0;  // max over tested n of q_{n+1}/(q_n log q_n (log n)^2)
    std::vector<int> k_alpha;
    double e_partial_sum = 0.0;
    bool liouville_flag = false;
    int depth = 0;
    int first_tested_index = 0;

    std::string to_json() const;
};

// Continued-fraction expansion of a fixed-point circle value.  Truncates when
// the convergents exhaust the 2^-128 resolution; `depth` on the result is the
// achieved depth.  With strict=true an early truncation raises DepthUnreachable.
RotationNumber expand_continued_fraction(CirclePoint alpha, int depth, bool strict = false);

// Build alpha = [0; a_1, a_2, ...] from an explicit partial-quotient list.
RotationNumber rotation_from_quotients(const std::vector<std::uint64_t>& quotients);

RotationNumber golden_rotation(int depth = 48);
RotationNumber silver_rotation(int depth = 48);

// Parse "golden", "silver", a decimal like "0.3183098861...", or "cf:1,2,2,2".
RotationNumber parse_rotation(const std::string& spec, int depth = 48);

CirclePoint circle_from_decimal(const std::string& text);

DiophantineReport classify_diophantine(const RotationNumber& rot, double c_const);

struct ClosestVisit {
    std::uint64_t index = 0;
    double distance = 0.0;
};

// argmin over j in [0, m_steps) of ||x + j*alpha||.  Direct scan up to 10^6
// steps; above that a convergent-structure search (beam over Ostrowski-style
// steps by q_k) takes over.  force_fast exposes the fast path for testing.
ClosestVisit closest_visit(CirclePoint x, const RotationNumber& rot, std::uint64_t m_steps,
                           bool force_fast = false);

// Greedy Ostrowski decomposition r = sum b_i q_i with 0 <= b_i <= a_{i+1}.
std::vector<std::uint64_t> ostrowski_decompose(std::uint64_t r, const RotationNumber& rot);

std::uint64_t ostrowski_reconstruct(const std::vector<std::uint64_t>& digits,
                                    const RotationNumber& rot);

}  // namespace specflow
