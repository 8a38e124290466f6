#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "lozitree/qscalar.hpp"

using namespace lozitree;

namespace {

Rational rnd_rational(std::mt19937& rng) {
    std::uniform_int_distribution<int> num(-50, 50);
    std::uniform_int_distribution<int> den(1, 30);
    return Rational(num(rng), den(rng));
}

QScalar rnd_qscalar(std::mt19937& rng, const Rational& d) {
    return QScalar(rnd_rational(rng), rnd_rational(rng), d);
}

}  // namespace

TEST_CASE("rational parsing and formatting") {
    CHECK(parse_rational("7/4") == Rational(7, 4));
    CHECK(parse_rational("-9/20") == Rational(-9, 20));
    CHECK(parse_rational("3") == Rational(3));
    CHECK(to_string(Rational(7, 4)) == "7/4");
    CHECK(to_string(Rational(-3)) == "-3");
    CHECK(to_string(Rational(6, 4)) == "3/2");
    CHECK(!try_parse_rational("1/0"));
    CHECK(!try_parse_rational("a/b"));
    CHECK_THROWS_AS(parse_rational("1.5"), UsageError);
}

TEST_CASE("difference of squares identity") {
    // (1 + sqrt(D)) * (1 - sqrt(D)) = 1 - D for any rational D
    for (Rational d : {Rational(2), Rational(389, 80), Rational(5, 7)}) {
        QScalar u(1, 1, d);
        QScalar v(1, -1, d);
        QScalar prod = u * v;
        CHECK(prod.is_rational());
        CHECK(prod.p() == 1 - d);
    }
}

TEST_CASE("inverse of sqrt(D) is sqrt(D)/D") {
    Rational d(389, 80);
    QScalar s = QScalar::sqrt_d(d);
    QScalar inv = s.inverse();
    CHECK(inv.p() == 0);
    CHECK(inv.q() == Rational(1) / d);
    CHECK((s * inv).p() == 1);
    CHECK((s * inv).q() == 0);
}

TEST_CASE("sign via square comparison") {
    Rational d(389, 80);
    // 49/20 - sqrt(389/80) > 0 because (49/20)^2 = 2401/400 > 389/80
    CHECK(QScalar(Rational(49, 20), Rational(-1), d).sign() == 1);
    // -17/20 - sqrt(389/80) < 0, both terms negative
    CHECK(QScalar(Rational(-17, 20), Rational(-1), d).sign() == -1);
    CHECK(QScalar(0, 0, d).sign() == 0);
    CHECK(QScalar(-1, 0, d).sign() == -1);
    CHECK(QScalar(0, 1, d).sign() == 1);
    CHECK(QScalar(0, -1, d).sign() == -1);
}

TEST_CASE("cmp_rational_vs_sqrt") {
    // a = 7/4, b = 9/20: a*sqrt(2) > 2 + b since 2*(7/4)^2 = 49/8 > (49/20)^2
    CHECK(cmp_rational_vs_sqrt(Rational(49, 20), Rational(7, 4), 2) == -1);
    CHECK(cmp_rational_vs_sqrt(0, 0, 5) == 0);
    CHECK(cmp_rational_vs_sqrt(3, 1, 9) == 0);  // sqrt(9) = 3
    CHECK(cmp_rational_vs_sqrt(2, 1, 2) == 1);
    CHECK_THROWS_AS(cmp_rational_vs_sqrt(1, 1, -1), DomainError);
}

TEST_CASE("perfect square radicand is normalized away") {
    QScalar x(Rational(1, 2), Rational(3), Rational(9, 4));  // 1/2 + 3*sqrt(9/4) = 5
    CHECK(x.is_rational());
    CHECK(x.p() == 5);
    // normalizing twice equals normalizing once
    QScalar y(x.p(), x.q(), x.d());
    CHECK(x == y);
}

TEST_CASE("field laws on random triples") {
    std::mt19937 rng(12345);
    Rational d(389, 80);
    for (int iter = 0; iter < 200; ++iter) {
        QScalar x = rnd_qscalar(rng, d);
        QScalar y = rnd_qscalar(rng, d);
        QScalar z = rnd_qscalar(rng, d);
        CHECK((x + y) + z == x + (y + z));
        CHECK((x * y) * z == x * (y * z));
        CHECK(x * (y + z) == x * y + x * z);
        CHECK(x + (-x) == QScalar(0, 0, d));
        if (!x.is_zero()) {
            CHECK(x * x.inverse() == QScalar(1, 0, d));
        }
    }
}

TEST_CASE("sign agrees with high-precision float evaluation") {
    std::mt19937 rng(777);
    Rational d(389, 80);
    long double sq = sqrtl(389.0L / 80.0L);
    int checked = 0;
    for (int iter = 0; iter < 1000; ++iter) {
        QScalar x = rnd_qscalar(rng, d);
        long double approx =
            static_cast<long double>(to_double(x.p())) + static_cast<long double>(to_double(x.q())) * sq;
        if (fabsl(approx) <= 1e-20L) continue;
        ++checked;
        CHECK(x.sign() == (approx > 0 ? 1 : -1));
    }
    CHECK(checked > 900);
}

TEST_CASE("cross-field arithmetic is rejected") {
    QScalar x(1, 1, Rational(2));
    QScalar y(1, 1, Rational(3));
    CHECK_THROWS_AS(x + y, UsageError);
    CHECK_THROWS_AS(x * y, UsageError);
    // untagged rationals combine with anything
    QScalar r;  // 0, field-free
    CHECK((x + r) == x);
}

TEST_CASE("inversion of zero is a domain error") {
    QScalar z(0, 0, Rational(2));
    CHECK_THROWS_AS(z.inverse(), DomainError);
}

TEST_CASE("qscalar string round trip") {
    Rational d(389, 80);
    QScalar x(Rational(-17, 20), Rational(-1), d);
    auto back = try_parse_qscalar(x.str());
    REQUIRE(back);
    CHECK(*back == x);
    CHECK(x.str() == "-17/20 + -1*sqrt(389/80)");
}

TEST_CASE("to_double sanity") {
    Rational d(389, 80);
    QScalar x(Rational(-17, 20), Rational(-1), d);
    CHECK(x.to_double() == Catch::Approx(-0.85 - std::sqrt(389.0 / 80.0)).epsilon(1e-14));
}
