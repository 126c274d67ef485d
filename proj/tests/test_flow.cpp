#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "specflow/errors.hpp"
#include "specflow/flow.hpp"
#include "specflow/rng.hpp"

using namespace specflow;

namespace {

FlowParams arnold_params() {
    RoofSpec s;
    s.kind = RoofKind::LogAsym;
    s.a = 1.0;
    s.b = 2.0;
    s.background = 1.0;
    return FlowParams(s, golden_rotation(45));
}

FlowParams kochergin_params() {
    RoofSpec s;
    s.kind = RoofKind::Power;
    s.a = 1.0;
    s.b = 1.0;
    s.gamma = 0.5;
    s.background = 1.0;
    return FlowParams(s, golden_rotation(45));
}

FlowPoint random_point(const FlowParams& fp, const CounterRng& rng, std::uint64_t ctr) {
    for (std::uint64_t att = 0;; ++att) {
        CirclePoint x = CirclePoint::from_double(rng.uniform(2 * (ctr + 7919 * att)));
        if (x.in_clip_window()) continue;
        double g = eval_roof(fp.roof(), x, 0);
        return {x, g * rng.uniform(2 * (ctr + 7919 * att) + 1)};
    }
}

}  // namespace

TEST_CASE("flow: below-roof, exact crossing, and inverse examples") {
    FlowParams fp = arnold_params();
    CirclePoint x = CirclePoint::from_double(0.3);
    double g = eval_roof(fp.roof(), x, 0);

    FlowResult below = flow(fp, {x, 0.2}, 0.5 * g - 0.2);
    CHECK(below.n_steps == 0);
    CHECK(below.point.x == x);
    CHECK(below.point.s == doctest::Approx(0.5 * g).epsilon(1e-12));

    FlowResult cross = flow(fp, {x, 0.2}, g - 0.2);
    CHECK(cross.n_steps == 1);
    CHECK(cross.point.x == x + fp.rot().alpha);
    CHECK(cross.point.s <= 1e-12);

    CounterRng rng(31);
    for (int i = 0; i < 50; ++i) {
        FlowPoint p = random_point(fp, rng, i);
        FlowResult fwd = flow(fp, p, 3.7);
        FlowResult back = flow(fp, fwd.point, -3.7);
        CHECK(rho_metric(back.point, p) <= 1e-9);
        CHECK(flow(fp, p, 0.0).n_steps == 0);
        CHECK(fwd.n_steps + back.n_steps == 0);
    }
}

TEST_CASE("flow group law and N additivity on random triples") {
    FlowParams fp = arnold_params();
    CounterRng rng(88);
    for (int i = 0; i < 1000; ++i) {
        FlowPoint p = random_point(fp, rng, 1000 + i);
        double t = rng.uniform(4 * i, -1000.0, 1000.0);
        double u = rng.uniform(4 * i + 1, -1000.0, 1000.0);
        FlowResult ft = flow(fp, p, t);
        FlowResult fu = flow(fp, ft.point, u);
        FlowResult ftu = flow(fp, p, t + u);
        CHECK(rho_metric(fu.point, ftu.point) <= 1e-8);
        CHECK(ft.n_steps + fu.n_steps == ftu.n_steps);
    }
}

TEST_CASE("flow cached binary-search path agrees with chained short flows") {
    FlowParams fp = kochergin_params();
    CounterRng rng(4242);
    for (int i = 0; i < 20; ++i) {
        FlowPoint p = random_point(fp, rng, 90000 + i);
        FlowResult direct = flow(fp, p, 500.0);  // cache path
        FlowPoint q = p;
        long long n = 0;
        for (int k = 0; k < 50; ++k) {  // linear path, 50 x 10.0
            FlowResult step = flow(fp, q, 10.0);
            q = step.point;
            n += step.n_steps;
        }
        CHECK(rho_metric(direct.point, q) <= 1e-8);
        CHECK(direct.n_steps == n);
        // Repeat from the warm cache: bit-identical.
        FlowResult again = flow(fp, p, 500.0);
        CHECK(again.point.x == direct.point.x);
        CHECK(again.point.s == direct.point.s);
    }
}

TEST_CASE("rho examples and d^f branches") {
    FlowParams fp = arnold_params();
    CirclePoint x = CirclePoint::from_double(0.3);
    CHECK(rho_metric({x, 0.1}, {x, 0.1}) == 0.0);
    CHECK(rho_metric({x, 0.1}, {x, 0.3}) == doctest::Approx(0.2));
    CirclePoint y = CirclePoint::from_double(0.4);
    CHECK(rho_metric({x, 0.1}, {y, 0.15}) == doctest::Approx(0.15));

    // Roof-edge pair: d^f <= eps while rho is order g(x).
    double g = eval_roof(fp.roof(), x, 0);
    double eps = 1e-6;
    FlowPoint p{x, g - eps / 2.0};
    FlowPoint q{x + fp.rot().alpha, eps / 2.0};
    CHECK(d_pseudo_metric(fp, p, q) <= eps + 1e-12);
    CHECK(rho_metric(p, q) > 0.1);

    // Generic far pair: the rho branch is the minimum.
    FlowPoint a{CirclePoint::from_double(0.21), 0.0};
    FlowPoint b{CirclePoint::from_double(0.47), 0.1};
    double rho = rho_metric(a, b);
    double ga = eval_roof(fp.roof(), a.x, 0);
    double gb = eval_roof(fp.roof(), b.x, 0);
    double br2 = circle_distance(a.x + fp.rot().alpha, b.x) + std::abs(ga - a.s + b.s);
    double br3 = circle_distance(a.x, b.x + fp.rot().alpha) + std::abs(gb - b.s + a.s);
    CHECK(d_pseudo_metric(fp, a, b) == doctest::Approx(std::min({rho, br2, br3})));
    CHECK(std::min({rho, br2, br3}) == rho);

    // d^f <= rho^f and symmetry on 10^4 random pairs.
    CounterRng rng(5);
    for (int i = 0; i < 10000; ++i) {
        FlowPoint u = random_point(fp, rng, 20000 + 2 * i);
        FlowPoint v = random_point(fp, rng, 20001 + 2 * i);
        double d = d_pseudo_metric(fp, u, v);
        CHECK(d <= rho_metric(u, v) + 1e-15);
        CHECK(d == doctest::Approx(d_pseudo_metric(fp, v, u)).epsilon(1e-12));
    }
}

TEST_CASE("atom_of: ceiling, grid oracle, boundary convention") {
    FlowParams fp = kochergin_params();
    PartitionSpec part = make_partition(4);
    CHECK(atom_of(fp, part, {CirclePoint::from_double(1e-12), 0.1}).is_ceiling());

    // m=4, x=0.5, s=0.3: g(0.5) = (1 + 2*sqrt(2))/5 < log 4 -> GRID(2, 1).
    FlowPoint p{CirclePoint::from_double(0.5), 0.3};
    CHECK(eval_roof(fp.roof(), p.x, 0) < part.threshold());
    AtomId id = atom_of(fp, part, p);
    CHECK_FALSE(id.is_ceiling());
    CHECK(id.col() == 2);
    CHECK(id.row() == 1);

    // x = i/m exactly belongs to column i.
    for (std::uint32_t i = 1; i < 4; ++i) {
        FlowPoint b{CirclePoint::from_double(double(i) / 4.0), 0.0};
        if (eval_roof(fp.roof(), b.x, 0) >= part.threshold()) continue;
        CHECK(atom_of(fp, part, b).col() == i);
    }
    CHECK_THROWS_AS(make_partition(1), DegenerateGrid);
    CHECK_THROWS_AS(make_partition(100000), DegenerateGrid);
}

TEST_CASE("encode_orbit: short duration, incremental = from-scratch, ceiling run") {
    FlowParams fp = kochergin_params();
    PartitionSpec part = make_partition(8);
    double delta = std::min(1.0, fp.roof().inf_value()) / 8.0;

    CounterRng rng(606);
    FlowPoint p0 = random_point(fp, rng, 1);
    OrbitCode one = encode_orbit(fp, p0, delta / 2.0, part, delta);
    CHECK(one.symbols.size() == 1);
    CHECK(one.symbols[0] == atom_of(fp, part, p0).value);

    for (int i = 0; i < 100; ++i) {
        FlowPoint p = random_point(fp, rng, 300 + i);
        OrbitCode code = encode_orbit(fp, p, 50.0, part, delta);
        CHECK(code.symbols.size() == std::size_t(std::ceil(50.0 / delta)));
        for (std::size_t k = 0; k < code.symbols.size(); k += 7) {
            FlowPoint q = flow(fp, p, double(k) * delta).point;
            CHECK(code.symbols[k] == atom_of(fp, part, q).value);
        }
    }

    // Deep under the ceiling: the whole short code is the ceiling atom.
    FlowPoint deep{CirclePoint::from_double(1e-9), 0.0};
    OrbitCode ceil_code = encode_orbit(fp, deep, 3.0, part, delta);
    for (std::uint32_t sym : ceil_code.symbols) CHECK(AtomId{sym}.is_ceiling());
}

TEST_CASE("hamming: examples, axioms, and mismatch guard") {
    OrbitCode a, b;
    a.r = b.r = 1.0;
    a.delta = b.delta = 0.1;
    a.m = b.m = 4;
    a.symbols = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    b.symbols = a.symbols;
    CHECK(hamming(a, b) == 0.0);
    for (auto& s : b.symbols) s += 100;
    CHECK(hamming(a, b) == 1.0);
    b.symbols = a.symbols;
    for (std::size_t i = 0; i < 5; ++i) b.symbols[i] += 100;
    CHECK(hamming(a, b) == 0.5);
    OrbitCode c = a;
    c.m = 5;
    CHECK_THROWS_AS(hamming(a, c), CodeMismatch);
}

TEST_CASE("hamming estimate is stable under halving delta") {
    FlowParams fp = arnold_params();
    PartitionSpec part = make_partition(6);
    double inf_g = fp.roof().inf_value();
    double delta = std::min(1.0, inf_g) / 8.0;
    CounterRng rng(7007);
    for (int i = 0; i < 10; ++i) {
        FlowPoint p = random_point(fp, rng, 5000 + 2 * i);
        FlowPoint q = random_point(fp, rng, 5001 + 2 * i);
        double r = 40.0;
        double h1 = hamming(encode_orbit(fp, p, r, part, delta),
                            encode_orbit(fp, q, r, part, delta));
        double h2 = hamming(encode_orbit(fp, p, r, part, delta / 2.0),
                            encode_orbit(fp, q, r, part, delta / 2.0));
        CHECK(std::abs(h1 - h2) < 2.0 * delta * (double(part.m) + 1.0 / inf_g));
    }
}

TEST_CASE("orbit code serialization round-trip and digest guard") {
    FlowParams fp = arnold_params();
    PartitionSpec part = make_partition(8);
    double delta = std::min(1.0, fp.roof().inf_value()) / 8.0;
    CounterRng rng(99);
    FlowPoint p = random_point(fp, rng, 3);
    OrbitCode code = encode_orbit(fp, p, 20.0, part, delta);

    std::uint64_t ad = alpha_digest(fp.rot());
    std::uint64_t rd = fp.roof().digest();
    std::stringstream buf;
    write_orbit_code(buf, code, ad, rd);
    OrbitCode back = read_orbit_code(buf, ad, rd);
    CHECK(back.symbols == code.symbols);
    CHECK(back.r == code.r);
    CHECK(back.delta == code.delta);
    CHECK(back.m == code.m);
    CHECK(back.origin.x == code.origin.x);
    CHECK(back.origin.s == code.origin.s);

    std::stringstream buf2;
    write_orbit_code(buf2, code, ad, rd);
    CHECK_THROWS_AS(read_orbit_code(buf2, ad + 1, rd), CodeMismatch);
}
