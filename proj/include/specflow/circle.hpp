#pragma once

#include <cmath>
#include <cstdint>
#include <string>

namespace specflow {

using u128 = unsigned __int128;

// Points stay below ~2^-100 of the singularity never: orbit evaluation clips there.
inline constexpr u128 kSingularClip = u128(1) << 28;  // 2^28 / 2^128 = 2^-100

inline double u128_to_unit(u128 v) {
    return std::ldexp(double(std::uint64_t(v >> 64)), -64) +
           std::ldexp(double(std::uint64_t(v)), -128);
}

// A point of the circle T = [0,1) as an unsigned fixed-point fraction,
// x = raw / 2^128.  Addition wraps mod 1 exactly; x + n*alpha is drift-free
// for any number of rotation steps.
class CirclePoint {
public:
    constexpr CirclePoint() = default;

    static constexpr CirclePoint from_raw(u128 v) {
        CirclePoint p;
        p.v_ = v;
        return p;
    }

    static CirclePoint from_double(double x) {
        double f = x - std::floor(x);
        if (f >= 1.0) f = 0.0;
        double hi = std::ldexp(f, 64);
        std::uint64_t h = std::uint64_t(hi);
        double rem = std::ldexp(hi - double(h), 64);
        std::uint64_t l = rem >= 18446744073709551616.0 ? ~std::uint64_t(0) : std::uint64_t(rem);
        return from_raw((u128(h) << 64) | l);
    }

    constexpr u128 raw() const { return v_; }

    double to_double() const { return u128_to_unit(v_); }

    // Distance to 0 in [0, 1/2]; exact comparison form available via raw_dist_to_zero.
    double dist_to_zero() const { return u128_to_unit(raw_dist_to_zero()); }

    constexpr u128 raw_dist_to_zero() const {
        u128 neg = u128(0) - v_;
        return v_ < neg ? v_ : neg;
    }

    // Signed displacement from 0 in (-1/2, 1/2].
    double signed_to_zero() const {
        u128 neg = u128(0) - v_;
        if (v_ <= neg) return u128_to_unit(v_);
        return -u128_to_unit(neg);
    }

    constexpr bool in_clip_window() const { return raw_dist_to_zero() < kSingularClip; }

    // Exact distance to 0 from the right (x itself) and from the left (1-x),
    // converted to double only after the fixed-point subtraction.
    double gap_right() const { return u128_to_unit(v_); }
    double gap_left() const { return u128_to_unit(u128(0) - v_); }

    friend constexpr CirclePoint operator+(CirclePoint a, CirclePoint b) {
        return from_raw(a.v_ + b.v_);
    }
    friend constexpr CirclePoint operator-(CirclePoint a, CirclePoint b) {
        return from_raw(a.v_ - b.v_);
    }
    constexpr CirclePoint& operator+=(CirclePoint o) {
        v_ += o.v_;
        return *this;
    }
    constexpr CirclePoint& operator-=(CirclePoint o) {
        v_ -= o.v_;
        return *this;
    }

    // this + steps*alpha, exact mod 1 (the 192-bit product is reduced mod 2^128).
    constexpr CirclePoint advanced(std::uint64_t steps, CirclePoint alpha) const {
        u128 lo = u128(steps) * std::uint64_t(alpha.v_);
        u128 hi = u128(steps) * std::uint64_t(alpha.v_ >> 64);
        return from_raw(v_ + lo + (hi << 64));
    }

    friend constexpr bool operator==(CirclePoint a, CirclePoint b) { return a.v_ == b.v_; }
    friend constexpr bool operator!=(CirclePoint a, CirclePoint b) { return a.v_ != b.v_; }

private:
    u128 v_ = 0;
};

inline double circle_distance(CirclePoint x, CirclePoint y) {
    return (x - y).dist_to_zero();
}

std::string to_decimal_string(CirclePoint x, int digits = 40);

}  // namespace specflow
