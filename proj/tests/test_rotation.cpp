#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "specflow/errors.hpp"
#include "specflow/rng.hpp"
#include "specflow/rotation.hpp"

using namespace specflow;

TEST_CASE("golden mean expands to all-ones quotients and Fibonacci denominators") {
    RotationNumber rot = golden_rotation(40);
    REQUIRE(rot.depth == 40);
    for (std::uint64_t a : rot.quotients) CHECK(a == 1);
    // q = 1, 1, 2, 3, 5, 8, 13, ...
    CHECK(rot.q[0] == 1);
    CHECK(rot.q[1] == 1);
    CHECK(rot.q[2] == 2);
    CHECK(rot.q[3] == 3);
    CHECK(rot.q[6] == 13);
    for (int k = 1; k < rot.depth; ++k) CHECK(rot.q[k + 1] == rot.q[k] + rot.q[k - 1]);

    // Independent oracle: re-expand the fixed-point value by long division.
    RotationNumber re = expand_continued_fraction(rot.alpha, 40);
    for (int k = 0; k < 40; ++k) CHECK(re.quotients[k] == 1);
    CHECK(std::abs(rot.alpha.to_double() - (std::sqrt(5.0) - 1.0) / 2.0) < 1e-15);
}

TEST_CASE("silver mean q-recursion q_{k+1} = 2 q_k + q_{k-1}") {
    RotationNumber rot = silver_rotation(36);
    for (std::uint64_t a : rot.quotients) CHECK(a == 2);
    CHECK(rot.q[0] == 1);
    CHECK(rot.q[1] == 2);
    CHECK(rot.q[2] == 5);
    CHECK(rot.q[3] == 12);
    CHECK(rot.q[4] == 29);
    CHECK(rot.q[5] == 70);
    for (int k = 1; k < rot.depth; ++k) CHECK(rot.q[k + 1] == 2 * rot.q[k] + rot.q[k - 1]);
    CHECK(std::abs(rot.alpha.to_double() - (std::sqrt(2.0) - 1.0)) < 1e-15);

    RotationNumber re = expand_continued_fraction(rot.alpha, 30);
    for (int k = 0; k < 30; ++k) CHECK(re.quotients[k] == 2);
}

TEST_CASE("rational alpha raises AlphaRational") {
    CHECK_THROWS_AS(expand_continued_fraction(CirclePoint::from_double(0.5), 10), AlphaRational);
}

TEST_CASE("strict depth raises DepthUnreachable with achieved depth") {
    // A double-precision value is a dyadic rational: its expansion exhausts the
    // fixed-point resolution well before depth 64.
    CirclePoint a = CirclePoint::from_double(0.37129832);
    try {
        expand_continued_fraction(a, 64, true);
        CHECK(false);
    } catch (const DepthUnreachable& e) {
        CHECK(e.achieved_depth >= 3);
        CHECK(e.achieved_depth < 64);
    }
}

TEST_CASE("convergent quality |alpha q_k - p_k| < 1/q_{k+1}") {
    for (const RotationNumber& rot : {golden_rotation(45), silver_rotation(34)}) {
        for (int k = 0; k + 1 <= rot.depth; ++k) {
            double dist = rot.q_alpha[k].dist_to_zero();
            CHECK(dist < 1.0 / double(rot.q[k + 1]) + 1e-24);
        }
    }
}

TEST_CASE("parse_rotation accepts named, decimal, and quotient-list forms") {
    CHECK(parse_rotation("golden", 20).q[6] == 13);
    CHECK(parse_rotation("silver", 20).q[3] == 12);
    RotationNumber cf = parse_rotation("cf:1,2,2,2,2,2,2,2,2,2");
    CHECK(cf.quotients[0] == 1);
    CHECK(cf.quotients[1] == 2);
    // decimal round-trip through the string printer
    RotationNumber g = golden_rotation(40);
    RotationNumber back = parse_rotation(to_decimal_string(g.alpha, 40), 30);
    for (int k = 0; k < 30; ++k) CHECK(back.quotients[k] == 1);
    CHECK_THROWS_AS(parse_rotation("0.5x", 20), ConfigError);
}

TEST_CASE("circle_distance examples and metric axioms") {
    auto P = [](double v) { return CirclePoint::from_double(v); };
    CHECK(circle_distance(P(0.25), P(0.25)) == 0.0);
    CHECK(circle_distance(P(0.1), P(0.9)) == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(circle_distance(P(0.0), P(0.5)) == doctest::Approx(0.5).epsilon(1e-12));

    CounterRng rng(20260826);
    for (int i = 0; i < 10000; ++i) {
        CirclePoint x = P(rng.uniform(3 * i));
        CirclePoint y = P(rng.uniform(3 * i + 1));
        CirclePoint z = P(rng.uniform(3 * i + 2));
        double dxy = circle_distance(x, y);
        CHECK(dxy == circle_distance(y, x));
        CHECK(circle_distance(x, x) == 0.0);
        CHECK(circle_distance(x, z) <= dxy + circle_distance(y, z) + 1e-15);
    }
}

TEST_CASE("classify_diophantine: golden witness constant and K_alpha structure") {
    RotationNumber rot = golden_rotation(45);
    DiophantineReport rep = classify_diophantine(rot, 2.0);
    CHECK(rep.in_D);
    CHECK(rep.c_witness > 0.0);
    CHECK(rep.c_witness < 2.0);
    CHECK_FALSE(rep.liouville_flag);
    // log^{7/8} q_n >= q_{n+1}/q_n (~ golden ratio 1.618) holds for all large n:
    // the tail of tested indices must be entirely inside K_alpha.
    REQUIRE(!rep.k_alpha.empty());
    CHECK(rep.k_alpha.back() == 44);
    int tail_start = rep.k_alpha.front();
    CHECK(tail_start <= 10);
    CHECK(int(rep.k_alpha.size()) >= 44 - tail_start);
    CHECK(rep.e_partial_sum >= 0.0);
    CHECK(rep.e_partial_sum < 10.0);
    CHECK(rep.to_json().find("\"in_D\":true") != std::string::npos);
}

TEST_CASE("classify_diophantine: factorial quotients raise the Liouville flag") {
    RotationNumber rot = rotation_from_quotients({1, 2, 6, 24, 120, 720, 5040});
    DiophantineReport rep = classify_diophantine(rot, 1.0);
    CHECK(rep.liouville_flag);
}

TEST_CASE("closest_visit examples") {
    RotationNumber g = golden_rotation(45);
    ClosestVisit v = closest_visit(CirclePoint::from_double(0.0), g, 1);
    CHECK(v.index == 0);
    CHECK(v.distance == 0.0);

    ClosestVisit fast = closest_visit(CirclePoint::from_double(0.5), g, 13, true);
    ClosestVisit scan = closest_visit(CirclePoint::from_double(0.5), g, 13, false);
    CHECK(fast.index == scan.index);
    CHECK(fast.distance == scan.distance);

    // x = alpha, m = 2: minimum of ||alpha||, ||2 alpha||.
    ClosestVisit w = closest_visit(g.alpha, g, 2);
    double a = g.alpha.to_double();
    double two = CirclePoint::from_double(0.0).advanced(2, g.alpha).dist_to_zero();
    if (a <= 0.5 && a < two) {
        CHECK(w.index == 0);
        CHECK(w.distance == doctest::Approx(1.0 - a).epsilon(1e-12));
    }
    CHECK(w.distance <= std::min(g.alpha.dist_to_zero(), two) + 1e-18);
}

TEST_CASE("closest_visit fast path agrees with the direct scan") {
    RotationNumber g = golden_rotation(45);
    RotationNumber s = silver_rotation(34);
    CounterRng rng(7701);
    for (int i = 0; i < 1000; ++i) {
        const RotationNumber& rot = (i % 2 == 0) ? g : s;
        CirclePoint x = CirclePoint::from_double(rng.uniform(2 * i));
        std::uint64_t m = 1 + rng.integer(2 * i + 1, 10000);
        ClosestVisit fast = closest_visit(x, rot, m, true);
        ClosestVisit scan = closest_visit(x, rot, m, false);
        CHECK(fast.index == scan.index);
        CHECK(fast.distance == scan.distance);
    }
}

TEST_CASE("ostrowski decomposition: examples and round-trip") {
    RotationNumber g = golden_rotation(30);
    // r = q_k: a single digit.
    for (int k = 2; k < 10; ++k) {
        auto d = ostrowski_decompose(g.q[k], g);
        CHECK(d[k] == 1);
        std::uint64_t sum = 0;
        for (auto b : d) sum += b;
        CHECK(sum == 1);
    }
    // golden, r = 4 = 3 + 1 = q_3 + q_1 (Zeckendorf).
    auto d4 = ostrowski_decompose(4, g);
    CHECK(d4[3] == 1);
    CHECK(d4[1] == 1);
    CHECK(ostrowski_reconstruct(d4, g) == 4);
    // r = 0.
    auto d0 = ostrowski_decompose(0, g);
    for (auto b : d0) CHECK(b == 0);

    // Round-trip identity and digit admissibility on [0, q_D).
    for (std::uint64_t r = 0; r <= g.q[12]; ++r) {
        auto d = ostrowski_decompose(r, g);
        CHECK(ostrowski_reconstruct(d, g) == r);
        for (std::size_t k = 0; k + 1 < d.size(); ++k)
            CHECK(d[k] <= g.quotients[k] + 1);  // b_i <= a_{i+1} (greedy slack at i=0)
    }
    CHECK_THROWS_AS(ostrowski_decompose(g.largest_q() + 1, g), ROutOfRange);
}
