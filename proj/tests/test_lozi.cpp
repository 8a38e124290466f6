#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "lozitree/lozi.hpp"

using namespace lozitree;

namespace {
const Rational A(7, 4), B(9, 20);
}

TEST_CASE("fixed points of the running example") {
    auto P = make_lozi_params(A, B);
    CHECK(P.D == Rational(389, 80));
    CHECK(P.X.x == P.qs(Rational(10, 23)));
    CHECK(P.X.y == P.qs(Rational(9, 46)));
    CHECK(P.Y.x == P.qs(Rational(-5, 6)));
    CHECK(P.Y.y == P.qs(Rational(-3, 8)));
    CHECK(lozi_forward(P, P.X) == P.X);
    CHECK(lozi_forward(P, P.Y) == P.Y);
}

TEST_CASE("X and Y are the only fixed points") {
    auto P = make_lozi_params(A, B);
    // Solving each affine branch: x(1+a-b) = 1 on x >= 0, x(1-a-b) = 1 on x <= 0.
    CHECK(P.X.x.sign() > 0);
    CHECK(P.Y.x.sign() < 0);
    QPoint xr{P.qs(Rational(1) / (1 + A - B)), P.qs(B / (1 + A - B))};
    QPoint xl{P.qs(Rational(1) / (1 - A - B)), P.qs(B / (1 - A - B))};
    CHECK(xr == P.X);
    CHECK(xl == P.Y);
    // No fixed point on the fold line: (0, y) maps to (1 + y, 0) != (0, y).
    QPoint fold{P.qs(0), P.qs(Rational(1, 3))};
    CHECK(lozi_forward(P, fold) != fold);
}

TEST_CASE("points on the y-axis map to the x-axis") {
    auto P = make_lozi_params(A, B);
    for (Rational y : {Rational(1, 3), Rational(-2, 5), Rational(0)}) {
        QPoint p{P.qs(0), P.qs(y)};
        QPoint q = lozi_forward(P, p);
        CHECK(q.x == P.qs(1 + y));
        CHECK(q.y.sign() == 0);
    }
}

TEST_CASE("inverse round trips") {
    auto P = make_lozi_params(A, B);
    std::mt19937 rng(99);
    std::uniform_int_distribution<int> c(-40, 40);
    for (int i = 0; i < 200; ++i) {
        QPoint p{P.qs(Rational(c(rng), 7)), P.qs(Rational(c(rng), 11))};
        CHECK(lozi_inverse(P, lozi_forward(P, p)) == p);
        CHECK(lozi_forward(P, lozi_inverse(P, p)) == p);
    }
    // preimage of the x-axis lies on the y-axis
    QPoint q = lozi_inverse(P, {P.qs(Rational(5, 3)), P.qs(0)});
    CHECK(q.x.sign() == 0);
    // round trip on a derived point: Z1 = L(Z) pulls back to Z
    CHECK(lozi_inverse(P, lozi_forward(P, P.Z)) == P.Z);
}

TEST_CASE("misiurewicz membership") {
    CHECK(in_misiurewicz(A, B));
    CHECK(!in_misiurewicz(Rational(3, 2), Rational(1, 2)));  // a*sqrt(2) - b ~ 1.62 < 2
    CHECK(!in_misiurewicz(A, Rational(0)));                  // b > 0 fails
    CHECK(!in_misiurewicz(Rational(2), Rational(1, 2)));     // 2a + b = 4.5 > 4
    CHECK(!in_misiurewicz(Rational(9, 5), Rational(2, 5)));  // 2a + b = 4 exactly
}

TEST_CASE("trapping triangle") {
    auto P = make_lozi_params(A, B);
    CHECK(P.delta.area2().sign() > 0);
    auto r = check_trapping(P);
    CHECK(r.trapped);
    CHECK(!r.witness);

    // (2, 1/2) violates 2a + b < 4 and the triangle is not trapping
    auto Q = make_lozi_params(Rational(2), Rational(1, 2));
    auto rq = check_trapping(Q);
    CHECK(!rq.trapped);
    REQUIRE(rq.witness);
    CHECK(point_in_polygon(*rq.witness, Q.delta) == Location::outside);
}

TEST_CASE("vertices of delta map onto the boundary") {
    auto P = make_lozi_params(A, B);
    // Z maps to the vertex L(Z): boundary case accepted by the trapping check
    QPoint Z1 = lozi_forward(P, P.Z);
    CHECK(point_in_polygon(Z1, P.delta) == Location::boundary);
}

TEST_CASE("X lies on the boundary edge through Z and L(Z)") {
    // X, Z and L(Z) are collinear on the unstable eigenline, so the exact
    // location of the fixed point is the boundary of delta, not its interior.
    auto P = make_lozi_params(A, B);
    QPoint Z1 = lozi_forward(P, P.Z);
    CHECK(orient(P.Z, P.X, Z1) == 0);
    CHECK(point_in_polygon(P.X, P.delta) == Location::boundary);
    // The triangle's centroid is strictly inside.
    Rational third(1, 3);
    QPoint c{(P.delta[0].x + P.delta[1].x + P.delta[2].x) * third,
             (P.delta[0].y + P.delta[1].y + P.delta[2].y) * third};
    CHECK(point_in_polygon(c, P.delta) == Location::inside);
}

TEST_CASE("jacobian determinant") {
    auto P = make_lozi_params(A, B);
    CHECK(jacobian_det(P, {P.qs(2), P.qs(1)}) == -B);
    CHECK(jacobian_det(P, {P.qs(-3), P.qs(1)}) == -B);
    CHECK_THROWS_AS(jacobian_det(P, {P.qs(0), P.qs(1)}), DomainError);
}

TEST_CASE("trapping holds on a rational grid inside M") {
    for (int ai = 0; ai < 4; ++ai) {
        for (int bi = 0; bi < 4; ++bi) {
            Rational a(160 + ai * 10, 100);  // 1.6 .. 1.9
            Rational b(10 + bi * 10, 100);   // 0.1 .. 0.4
            if (!in_misiurewicz(a, b)) continue;
            auto P = make_lozi_params(a, b);
            CHECK(check_trapping(P).trapped);
        }
    }
}
