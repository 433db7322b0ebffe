#include <doctest.h>

#include <cmath>

#include "reslab/interval.hpp"

using namespace reslab;

TEST_CASE("interval arithmetic is exact on endpoints") {
    RationalInterval a(ExactRational(1, 2), ExactRational(3, 2));
    RationalInterval b(ExactRational(-1), ExactRational(2));
    CHECK((a + b).lo() == ExactRational(-1, 2));
    CHECK((a + b).hi() == ExactRational(7, 2));
    CHECK((a - b).lo() == ExactRational(-3, 2));
    CHECK((a - b).hi() == ExactRational(5, 2));
    CHECK((a * b).lo() == ExactRational(-3, 2));
    CHECK((a * b).hi() == ExactRational(3));
    CHECK(b.square().lo() == 0);
    CHECK(b.square().hi() == 4);
    CHECK(a.square().lo() == ExactRational(1, 4));
    CHECK((a / a).hi() == 3);
    CHECK_THROWS_AS(a / b, PrecisionError);
    CHECK(b.mignitude() == 0);
    CHECK(a.mignitude() == ExactRational(1, 2));
    CHECK(b.magnitude() == 2);
    CHECK_FALSE(b.sign().has_value());
    CHECK(*a.sign() == 1);
    CHECK_THROWS_AS(RationalInterval(ExactRational(1), ExactRational(0)), DomainError);
}

TEST_CASE("enclosures contain the preset and meet the width") {
    for (unsigned bits : {8u, 64u, 300u}) {
        const ExactRational w(BigInt(1), BigInt(1) << bits);
        auto s2 = enclose(GammaPreset::square_root(2), bits);
        CHECK(s2.width() <= w);
        CHECK(compare(GammaPreset::square_root(2), s2.lo()) >= 0);
        CHECK(compare(GammaPreset::square_root(2), s2.hi()) <= 0);
        auto e = enclose(GammaPreset::e(), bits);
        CHECK(e.width() <= w);
        CHECK(compare(GammaPreset::e(), e.lo()) >= 0);
        CHECK(compare(GammaPreset::e(), e.hi()) <= 0);
    }
    auto r = enclose(GammaPreset::rational(ExactRational(7, 3)), 10);
    CHECK(r.is_point());
    CHECK(to_double(enclose(GammaPreset::e(), 80).midpoint()) == doctest::Approx(std::exp(1.0)).epsilon(1e-15));
    CHECK(to_double(enclose(GammaPreset::square_root(2), 80).lo()) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
}
