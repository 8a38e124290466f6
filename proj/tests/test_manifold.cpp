#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <map>

#include "lozitree/manifold.hpp"

using namespace lozitree;

namespace {

const Rational A(7, 4), B(9, 20);

LoziParams params() { return make_lozi_params(A, B); }

// Independent double-precision re-implementation of the stable pullback,
// used as a vertex-count oracle.
std::vector<std::array<double, 2>> grow_stable_floats(double a, double b, int n) {
    double s = 1 + a - b;
    double D = a * a + 4 * b;
    std::vector<std::array<double, 2>> v = {{1 / s, b / s}, {0.0, (2 * b - a - std::sqrt(D)) / (2 * s)}};
    for (int step = 1; step <= n; ++step) {
        std::vector<std::array<double, 2>> sp;
        sp.push_back(v[0]);
        for (size_t i = 0; i + 1 < v.size(); ++i) {
            auto& P = v[i];
            auto& Q = v[i + 1];
            if (P[1] * Q[1] < 0) {
                double t = P[1] / (P[1] - Q[1]);
                sp.push_back({P[0] + t * (Q[0] - P[0]), 0.0});
            }
            sp.push_back(Q);
        }
        std::vector<std::array<double, 2>> nv;
        for (auto& p : sp) nv.push_back({p[1] / b, a / b * std::fabs(p[1]) + p[0] - 1});
        v = std::move(nv);
    }
    return v;
}

}  // namespace

TEST_CASE("stable segment endpoints") {
    auto P = params();
    auto [x, v0] = stable_segment0(P);
    CHECK(x == P.X);
    CHECK(v0 == P.V0);
    // closed form for (7/4, 9/20): V0 = (0, -17/92 - (5/23) sqrt(389/80))
    CHECK(P.V0.y == QScalar(Rational(-17, 92), Rational(-5, 23), Rational(389, 80)));
    CHECK(P.V0.y.to_double() == Catch::Approx(-0.664).margin(5e-4));
    // the segment lies in the closed half-plane x >= 0
    CHECK(P.X.x.sign() > 0);
    CHECK(P.V0.x.sign() == 0);
    // forward image of the segment is contained in the segment
    QPoint v01 = lozi_forward(P, P.V0);
    CHECK(point_on_segment(v01, P.X, P.V0));
    CHECK(point_on_segment(lozi_forward(P, v01), P.X, v01));
}

TEST_CASE("grow_stable small depths") {
    auto P = params();
    auto s0 = grow_stable(P, 0);
    REQUIRE(s0.line.v.size() == 2);
    CHECK(s0.line.v[0] == P.X);
    CHECK(s0.line.v[1] == P.V0);

    auto s1 = grow_stable(P, 1);
    REQUIRE(s1.line.v.size() == 3);
    CHECK(s1.line.v[0] == P.X);
    CHECK(s1.line.v[1] == P.V0);
    CHECK(s1.line.v[2] == lozi_inverse(P, P.V0));
    CHECK(s1.line.v[1].x.sign() == 0);  // the split vertex lies on the y-axis

    auto s2 = grow_stable(P, 2);
    REQUIRE(s2.line.v.size() == 5);
    // prefix property: s1 is the vertex prefix of s2
    for (size_t i = 0; i < s1.line.v.size(); ++i) CHECK(s2.line.v[i] == s1.line.v[i]);
    CHECK(s2.line.v[4] == lozi_inverse(P, lozi_inverse(P, P.V0)));
    CHECK(s2.info[3].depth_created == 2);
    CHECK(s2.info[3].first_hit == 0);
}

TEST_CASE("stable polyline edges lie in closed half-planes and map affinely") {
    auto P = params();
    auto s = grow_stable(P, 6);
    Rational half(1, 2);
    for (size_t i = 0; i + 1 < s.line.v.size(); ++i) {
        const QPoint& u = s.line.v[i];
        const QPoint& w = s.line.v[i + 1];
        CHECK(u.x.sign() * w.x.sign() >= 0);
        // forward image of the midpoint equals the midpoint of the images
        QPoint mid = lerp(u, w, QScalar::from_rational(half, P.D));
        QPoint lm = lozi_forward(P, mid);
        QPoint ml = lerp(lozi_forward(P, u), lozi_forward(P, w), QScalar::from_rational(half, P.D));
        CHECK(lm == ml);
    }
}

TEST_CASE("vertex count matches the float re-implementation at depth 8") {
    auto P = params();
    auto s = grow_stable(P, 8);
    auto f = grow_stable_floats(1.75, 0.45, 8);
    CHECK(s.line.v.size() == f.size());
    // spot geometric agreement at a few vertices
    for (size_t i : {size_t(0), f.size() / 3, f.size() - 1}) {
        CHECK(s.line.v[i].fx() == Catch::Approx(f[i][0]).margin(1e-9));
        CHECK(s.line.v[i].fy() == Catch::Approx(f[i][1]).margin(1e-9));
    }
}

TEST_CASE("v-points: basic examples") {
    auto P = params();
    auto s = grow_stable(P, 4);
    auto vps = find_v_points(s);
    REQUIRE(!vps.empty());
    // V0 is vertex 1: k = 0, level 1, certified basic
    CHECK(vps[0].vertex == 1);
    CHECK(vps[0].first_axis_hit == 0);
    CHECK(vps[0].level == 1);
    CHECK(vps[0].status == BasicStatus::certified_basic);
    // V^{-3} = L^{-3}(V0) has level 4
    QPoint vm3 = P.V0;
    for (int i = 0; i < 3; ++i) vm3 = lozi_inverse(P, vm3);
    bool found = false;
    for (auto& r : vps) {
        if (r.point == vm3) {
            found = true;
            CHECK(r.level == 4);
            CHECK(r.first_axis_hit == 3);
        }
    }
    CHECK(found);
    // every vertex except X is reported
    CHECK(vps.size() == s.line.v.size() - 1);
}

TEST_CASE("v-point bookkeeping agrees with brute-force orbits at depth 5") {
    auto P = params();
    auto s = grow_stable(P, 5);
    QPoint v01 = lozi_forward(P, P.V0);
    auto brute = [&](QPoint p) {
        // forward-iterate exactly; stop once provably trapped on [X, L(V0)]
        int first = -1, last = -1;
        for (int k = 0; k <= 200; ++k) {
            if (p.x.sign() == 0) {
                if (first < 0) first = k;
                last = k;
            }
            if (point_on_segment(p, P.X, v01)) break;
            p = lozi_forward(P, p);
        }
        return std::pair<int, int>(first, last);
    };
    auto vps = find_v_points(s);
    std::map<size_t, VPointRec> by_vertex;
    for (auto& r : vps) by_vertex[r.vertex] = r;
    size_t level_le5 = 0, brute_le5 = 0;
    for (size_t i = 0; i < s.line.v.size(); ++i) {
        auto [bf, bl] = brute(s.line.v[i]);
        if (i == 0) {
            CHECK(bf == -1);
            continue;
        }
        REQUIRE(by_vertex.count(i));
        const auto& r = by_vertex[i];
        CHECK(r.first_axis_hit == bf);
        CHECK(r.level == bl + 1);
        if (r.level <= 5) ++level_le5;
        if (bl >= 0 && bl + 1 <= 5) ++brute_le5;
    }
    CHECK(level_le5 == brute_le5);
}

TEST_CASE("v-point parameters strictly increase and are distinct") {
    auto P = params();
    auto s = grow_stable(P, 7);
    CHECK(vpoints_distinct(s));
    auto vps = find_v_points(s);
    for (size_t i = 0; i + 1 < vps.size(); ++i) CHECK(vps[i].vertex < vps[i + 1].vertex);
}

TEST_CASE("between consecutive v-points one pullback inserts at most one new one") {
    auto P = params();
    auto s5 = grow_stable(P, 5);
    auto s6 = grow_stable(P, 6);
    // count new vertices of s6 strictly between consecutive vertices of s5
    size_t j = 0;
    for (size_t i = 0; i + 1 < s5.line.v.size(); ++i) {
        while (!(s6.line.v[j] == s5.line.v[i])) ++j;
        size_t k = j + 1;
        size_t inserted = 0;
        while (!(s6.line.v[k] == s5.line.v[i + 1])) {
            ++inserted;
            ++k;
        }
        CHECK(inserted <= 1);
    }
}

TEST_CASE("grow_unstable basics") {
    auto P = params();
    auto u0 = grow_unstable(P, 0);
    REQUIRE(u0.line.v.size() == 2);
    CHECK(u0.line.v[0] == P.X);
    CHECK(u0.line.v[1] == P.Z);

    auto u1 = grow_unstable(P, 1);
    REQUIRE(u1.line.v.size() == 3);
    CHECK(u1.line.v[u1.x_index] == P.X);
    CHECK(u1.line.v[0] == lozi_forward(P, P.Z));

    // vertices of U_m lie in delta (trapping), m <= 10
    auto u10 = grow_unstable(P, 10);
    for (auto& p : u10.line.v) CHECK(point_in_polygon(p, P.delta) != Location::outside);

    // monotone growth: vertices of U_m appear among vertices of U_{m+1}
    auto u5 = grow_unstable(P, 5);
    auto u6 = grow_unstable(P, 6);
    size_t matched = 0;
    for (auto& p : u5.line.v)
        for (auto& q : u6.line.v)
            if (p == q) {
                ++matched;
                break;
            }
    CHECK(matched == u5.line.v.size());
}

TEST_CASE("forward image of U_m covers U_m for m >= 1") {
    auto P = params();
    for (int m : {1, 2, 3, 4}) {
        auto u = grow_unstable(P, m);
        for (auto& v : u.line.v) {
            QPoint pre = lozi_inverse(P, v);
            bool on = false;
            for (size_t k = 0; k + 1 < u.line.v.size() && !on; ++k)
                on = point_on_segment(pre, u.line.v[k], u.line.v[k + 1]);
            CHECK(on);
        }
    }
}

TEST_CASE("basin anchors") {
    auto P = params();
    auto ba = basin_anchors(P, 3);
    CHECK(ba.N.x.sign() == 0);
    CHECK(ba.N.y.sign() < 0);
    CHECK(ba.M.y.sign() == 0);
    CHECK(ba.M.x > P.Z.x);
    REQUIRE(ba.M_pullbacks.size() == 3);
    // M^{-1} = (0, M_x - 1) on the positive y-axis here
    CHECK(ba.M_pullbacks[0].x.sign() == 0);
    CHECK(ba.M_pullbacks[0].y == ba.M.x - Rational(1));
    CHECK(ba.M_pullbacks[0].y.sign() > 0);
    CHECK(ba.N_pullbacks[0] == lozi_inverse(P, ba.N));
    CHECK(ba.N.y.to_double() == Catch::Approx(-2.023).margin(2e-3));
    CHECK(ba.M.x.to_double() == Catch::Approx(1.329).margin(2e-3));
}

TEST_CASE("level-1 v-points lie strictly between M^-1 and N on the y-axis") {
    auto P = params();
    auto ba = basin_anchors(P, 1);
    auto s = grow_stable(P, 8);
    auto vps = find_v_points(s);
    size_t basics = 0;
    for (auto& r : vps) {
        if (r.level != 1) continue;
        ++basics;
        CHECK(r.point.x.sign() == 0);
        CHECK(r.point.y > ba.N.y);
        CHECK(r.point.y < ba.M_pullbacks[0].y);
    }
    CHECK(basics > 0);
}

TEST_CASE("orbit density diagnostic") {
    auto P = params();
    auto r0 = orbit_density_diagnostic(P, P.X, P.Z, 0, 0.05, 20000);
    CHECK(r0.cells_visited <= 1);
    auto r1 = orbit_density_diagnostic(P, P.X, P.Z, 2000, 0.05, 20000);
    auto r2 = orbit_density_diagnostic(P, P.X, P.Z, 10000, 0.05, 20000);
    CHECK(r1.coverage <= r2.coverage);  // non-decreasing in iterations
    CHECK(r2.coverage <= 1.0);
    CHECK_THROWS_AS(orbit_density_diagnostic(P, P.X, P.Z, 10, -1.0, 100), UsageError);
}

TEST_CASE("budget exhaustion raises a resource error with achieved depth") {
    auto P = params();
    try {
        grow_stable(P, 12, 50);
        FAIL("expected ResourceError");
    } catch (const ResourceError& e) {
        CHECK(e.achieved_depth() >= 1);
        CHECK(e.achieved_depth() < 12);
    }
}
