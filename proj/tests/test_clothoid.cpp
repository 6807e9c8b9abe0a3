#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "trajadv/clothoid/clothoid.hpp"
#include "trajadv/core/rng.hpp"
#include "trajadv/core/types.hpp"

using namespace trajadv;
using clothoid::propagate;
using clothoid::propagate_chain;
using clothoid::sample_arc;
using core::ClothoidArc;
using core::Configuration;
using core::Vec2;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Independent position oracle: midpoint-rule integration of the analytic
// heading, `steps` sub-intervals. Order-2 accurate in the step size.
Vec2 midpoint_position(const Configuration& start, const ClothoidArc& arc, int steps) {
    const double h = arc.length / steps;
    Vec2 p{start.x, start.y};
    for (int i = 0; i < steps; ++i) {
        const double s = (i + 0.5) * h;
        const double psi = start.psi + start.c0 * s + 0.5 * arc.c1 * s * s;
        p += Vec2{std::cos(psi), std::sin(psi)} * h;
    }
    return p;
}

Configuration random_start(std::mt19937_64& rng, double c0_max) {
    Configuration c;
    c.x = core::uniform(rng, -10, 10);
    c.y = core::uniform(rng, -10, 10);
    c.psi = core::uniform(rng, -kPi + 1e-9, kPi);
    c.c0 = core::uniform(rng, -c0_max, c0_max);
    return c;
}

}  // namespace

TEST_CASE("curvature_at is linear in arc length") {
    Configuration start;
    start.c0 = 0.0;
    const ClothoidArc arc{0.1, 2.0};
    CHECK_EQ(clothoid::curvature_at(start, arc, 2.0), doctest::Approx(0.2));
    CHECK_EQ(clothoid::curvature_at(start, arc, 0.0), doctest::Approx(0.0));
    start.c0 = 0.07;
    const ClothoidArc flat{0.0, 5.0};
    CHECK_EQ(clothoid::curvature_at(start, flat, 3.3), doctest::Approx(0.07));
    CHECK_THROWS_AS(clothoid::curvature_at(start, arc, -0.1), core::ValidationError);
    CHECK_THROWS_AS(clothoid::curvature_at(start, arc, 2.1), core::ValidationError);
}

TEST_CASE("heading_at follows the quadratic closed form") {
    Configuration start;
    SUBCASE("circular arc") {
        start.c0 = 1.0;
        CHECK_EQ(clothoid::heading_at(start, {0.0, kPi / 2}, kPi / 2), doctest::Approx(kPi / 2));
    }
    SUBCASE("straight line keeps heading") {
        start.psi = 0.3;
        CHECK_EQ(clothoid::heading_at(start, {0.0, 7.0}, 5.0), doctest::Approx(0.3));
    }
    SUBCASE("pure curvature ramp") {
        // psi + c0*l + c1*l^2/2 = 0 + 0 + 0.2*9/2 = 0.9
        CHECK_EQ(clothoid::heading_at(start, {0.2, 3.0}, 3.0), doctest::Approx(0.9));
    }
    SUBCASE("result is normalized to (-pi, pi]") {
        start.psi = 3.0;
        start.c0 = 1.0;
        const double h = clothoid::heading_at(start, {0.0, 1.0}, 1.0);  // raw 4.0 rad
        CHECK_EQ(h, doctest::Approx(4.0 - 2 * kPi));
    }
    CHECK_THROWS_AS(clothoid::heading_at(start, {0.0, 1.0}, 2.0), core::ValidationError);
}

TEST_CASE("propagate: straight segment") {
    const Configuration end = propagate({}, {0.0, 1.0});
    CHECK_EQ(end.x, doctest::Approx(1.0).epsilon(1e-12));
    CHECK_EQ(end.y, doctest::Approx(0.0).epsilon(1e-12));
    CHECK_EQ(end.psi, doctest::Approx(0.0));
    CHECK_EQ(end.c0, doctest::Approx(0.0));
}

TEST_CASE("propagate: quarter circle of unit curvature") {
    Configuration start;
    start.c0 = 1.0;
    const Configuration end = propagate(start, {0.0, kPi / 2});
    // closed form for constant curvature: x = sin(c0*l)/c0, y = (1-cos(c0*l))/c0
    CHECK_EQ(end.x, doctest::Approx(1.0).epsilon(1e-10));
    CHECK_EQ(end.y, doctest::Approx(1.0).epsilon(1e-10));
    CHECK_EQ(end.psi, doctest::Approx(kPi / 2));
    CHECK_EQ(end.c0, doctest::Approx(1.0));
}

TEST_CASE("propagate: zero-length arc is the identity") {
    Configuration start;
    start.x = 2;
    start.y = -3;
    start.psi = 0.4;
    start.c0 = 0.1;
    const Configuration end = propagate(start, {0.5, 0.0});
    CHECK_EQ(end.x, 2.0);
    CHECK_EQ(end.y, -3.0);
    CHECK_EQ(end.psi, doctest::Approx(0.4));
    CHECK_EQ(end.c0, doctest::Approx(0.1));
}

TEST_CASE("propagate rejects malformed arcs") {
    CHECK_THROWS_AS(propagate({}, {0.0, -1.0}), core::ValidationError);
    CHECK_THROWS_AS(propagate({}, {std::nan(""), 1.0}), core::ValidationError);
    CHECK_THROWS_AS(propagate({}, {0.0, std::nan("")}), core::ValidationError);
}

TEST_CASE("propagate matches constant-curvature closed form") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 200; ++i) {
        Configuration start = random_start(rng, 0.2);
        if (std::abs(start.c0) < 1e-3) start.c0 = 0.05;
        const double l = core::uniform(rng, 0.01, 5.0);
        const Configuration end = propagate(start, {0.0, l});
        const double c = start.c0;
        // rotate the canonical circle solution into the start frame
        const double dx = std::sin(c * l) / c;
        const double dy = (1.0 - std::cos(c * l)) / c;
        const double ex = start.x + dx * std::cos(start.psi) - dy * std::sin(start.psi);
        const double ey = start.y + dx * std::sin(start.psi) + dy * std::cos(start.psi);
        CHECK_EQ(end.x, doctest::Approx(ex).epsilon(0).scale(1).epsilon(1e-9));
        CHECK_EQ(end.y, doctest::Approx(ey).epsilon(1e-9));
        CHECK_EQ(end.psi, doctest::Approx(core::normalize_angle(start.psi + c * l)));
    }
}

TEST_CASE("propagate matches brute-force integration on random clothoids") {
    std::mt19937_64 rng(23);
    for (int i = 0; i < 50; ++i) {
        const Configuration start = random_start(rng, 0.2);
        const ClothoidArc arc{core::uniform(rng, -0.5, 0.5), core::uniform(rng, 0.05, 5.0)};
        const Configuration end = propagate(start, arc);
        const Vec2 oracle = midpoint_position(start, arc, 200000);
        CHECK_EQ(end.x, doctest::Approx(oracle.x).epsilon(1e-8));
        CHECK_EQ(end.y, doctest::Approx(oracle.y).epsilon(1e-8));
        CHECK(core::distance({end.x, end.y}, oracle) < 1e-8);
    }
}

TEST_CASE("oracle step halving converges toward propagate at order 2") {
    // The midpoint oracle has order 2: halving its step must cut its
    // disagreement with propagate by ~4x, which shows propagate is the limit
    // the refinement converges to.
    std::mt19937_64 rng(31);
    int checked = 0;
    for (int i = 0; i < 40; ++i) {
        const Configuration start = random_start(rng, 0.2);
        const ClothoidArc arc{core::uniform(rng, -0.5, 0.5), core::uniform(rng, 1.0, 5.0)};
        const Configuration end = propagate(start, arc);
        const double e1 = core::distance({end.x, end.y}, midpoint_position(start, arc, 64));
        const double e2 = core::distance({end.x, end.y}, midpoint_position(start, arc, 128));
        if (e1 < 1e-9) continue;  // too close to the float noise floor to rate
        CHECK(e1 / e2 > 3.5);
        ++checked;
    }
    CHECK(checked > 10);
}

TEST_CASE("propagate_chain composes translations and matches single-arc base case") {
    const auto chain = propagate_chain({}, {{0.0, 1.0}, {0.0, 1.0}});
    REQUIRE_EQ(chain.size(), 3);
    CHECK_EQ(chain[1].x, doctest::Approx(1.0));
    CHECK_EQ(chain[2].x, doctest::Approx(2.0));
    CHECK_EQ(chain[2].y, doctest::Approx(0.0));

    Configuration start;
    start.psi = 0.7;
    start.c0 = 0.1;
    const ClothoidArc arc{0.2, 1.5};
    const auto single = propagate_chain(start, {arc});
    REQUIRE_EQ(single.size(), 2);
    const Configuration direct = propagate(start, arc);
    CHECK_EQ(single[1].x, direct.x);
    CHECK_EQ(single[1].y, direct.y);
    CHECK_EQ(single[1].psi, direct.psi);
    CHECK_EQ(single[1].c0, direct.c0);
}

TEST_CASE("splitting an arc reproduces the unsplit endpoint") {
    std::mt19937_64 rng(47);
    for (int i = 0; i < 100; ++i) {
        const Configuration start = random_start(rng, 0.2);
        const double c1 = core::uniform(rng, -0.5, 0.5);
        const double l = core::uniform(rng, 0.1, 5.0);
        const Configuration whole = propagate(start, {c1, l});
        const auto split = propagate_chain(start, {{c1, l / 2}, {c1, l / 2}});
        CHECK(core::distance({whole.x, whole.y}, {split[2].x, split[2].y}) < 1e-9);
        CHECK_EQ(whole.psi, doctest::Approx(split[2].psi).epsilon(1e-12));
        CHECK_EQ(whole.c0, doctest::Approx(split[2].c0).epsilon(1e-12));
    }
}

TEST_CASE("curvature is continuous across chain joints") {
    std::mt19937_64 rng(53);
    Configuration pose = random_start(rng, 0.1);
    std::vector<ClothoidArc> arcs;
    for (int i = 0; i < 20; ++i) arcs.push_back({core::uniform(rng, -0.5, 0.5), 0.2});
    const auto chain = propagate_chain(pose, arcs);
    for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
        const double end_c = chain[i].c0 + arcs[i].c1 * arcs[i].length;
        CHECK_EQ(chain[i + 1].c0, doctest::Approx(end_c).epsilon(1e-12));
    }
}

TEST_CASE("zero-curvature chain moves collinearly and keeps heading") {
    Configuration start;
    start.psi = 0.6;
    const auto chain = propagate_chain(start, {{0.0, 1.0}, {0.0, 2.0}, {0.0, 0.5}});
    const Vec2 dir{std::cos(0.6), std::sin(0.6)};
    double s = 0.0;
    const double lens[] = {0.0, 1.0, 3.0, 3.5};
    for (std::size_t i = 0; i < chain.size(); ++i) {
        CHECK_EQ(chain[i].psi, doctest::Approx(0.6));
        CHECK_EQ(chain[i].c0, 0.0);
        s = lens[i];
        CHECK(core::distance({chain[i].x, chain[i].y}, dir * s) < 1e-12);
    }
}

TEST_CASE("sample_arc spacing and endpoint rules") {
    Configuration start;
    const auto s1 = sample_arc(start, {0.0, 1.0}, 0.5);
    REQUIRE_EQ(s1.size(), 3);
    CHECK_EQ(s1[0].s, 0.0);
    CHECK_EQ(s1[1].s, doctest::Approx(0.5));
    CHECK_EQ(s1[2].s, doctest::Approx(1.0));

    const auto s2 = sample_arc(start, {0.0, 1.0}, 5.0);
    REQUIRE_EQ(s2.size(), 2);
    CHECK_EQ(s2[0].s, 0.0);
    CHECK_EQ(s2[1].s, doctest::Approx(1.0));

    // exact multiple: the endpoint appears once
    const auto s3 = sample_arc(start, {0.0, 1.0}, 0.25);
    REQUIRE_EQ(s3.size(), 5);
    CHECK_EQ(s3.back().s, doctest::Approx(1.0));
    CHECK(s3[3].s < s3[4].s);

    CHECK_THROWS_AS(sample_arc(start, {0.0, 1.0}, 0.0), core::ValidationError);
    CHECK_THROWS_AS(sample_arc(start, {0.0, 1.0}, -0.5), core::ValidationError);
}

TEST_CASE("sample_arc agrees with truncated-arc propagation") {
    std::mt19937_64 rng(61);
    for (int i = 0; i < 30; ++i) {
        const Configuration start = random_start(rng, 0.2);
        const ClothoidArc arc{core::uniform(rng, -0.5, 0.5), core::uniform(rng, 0.5, 4.0)};
        const auto samples = sample_arc(start, arc, 0.3);
        for (const auto& smp : samples) {
            const Configuration direct = propagate(start, {arc.c1, smp.s});
            CHECK(core::distance({smp.config.x, smp.config.y}, {direct.x, direct.y}) < 1e-9);
            CHECK_EQ(smp.config.psi, doctest::Approx(direct.psi).epsilon(1e-12));
            CHECK_EQ(smp.config.c0, doctest::Approx(direct.c0).epsilon(1e-12));
        }
    }
}

TEST_CASE("dense sample polyline length converges to arc length") {
    Configuration start;
    start.c0 = 0.2;
    const ClothoidArc arc{-0.1, 2.0};
    double prev_gap = 1e9;
    for (double spacing : {0.1, 0.01, 0.001}) {
        const auto samples = sample_arc(start, arc, spacing);
        double len = 0.0;
        for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
            len += core::distance({samples[i].config.x, samples[i].config.y},
                                  {samples[i + 1].config.x, samples[i + 1].config.y});
        }
        const double gap = std::abs(len - arc.length);
        CHECK(gap < prev_gap + 1e-12);
        prev_gap = gap;
    }
    CHECK(prev_gap < 1e-6);
}
