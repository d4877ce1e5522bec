#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "tetra3d/json_io.hpp"
#include "tetra3d/laurent.hpp"

using namespace tetra3d;

namespace {

LaurentPoly random_poly(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> nterms(0, 6), expo(-8, 8), num(-9, 9);
    std::uniform_int_distribution<int> den(1, 5);
    LaurentPoly p;
    const int n = nterms(rng);
    for (int t = 0; t < n; ++t)
        p += LaurentPoly::monomial(expo(rng), Rational(num(rng), den(rng)));
    return p;
}

} // namespace

TEST_CASE("addition basics") {
    const LaurentPoly qm2 = LaurentPoly::monomial(-2, 1);
    // (q^-2 - 1) + 1 = q^-2
    CHECK(qm2 - LaurentPoly::one() + LaurentPoly::one() == qm2);
    // p + 0 = p
    const LaurentPoly p = LaurentPoly::monomial(3, Rational(2, 7));
    CHECK(p + LaurentPoly::zero() == p);
    // q^-7 + q^-5 - q^-1 assembled from pieces
    const LaurentPoly r121 = LaurentPoly::monomial(-7, 1) +
                             LaurentPoly::monomial(-5, 1) +
                             LaurentPoly::monomial(-1, -1);
    CHECK((LaurentPoly::monomial(-7, 1) + LaurentPoly::monomial(-5, 1)) +
              LaurentPoly::monomial(-1, -1) ==
          r121);
}

TEST_CASE("multiplication basics") {
    // (q^-6 - 1)(q^-4 - 1) = q^-10 - q^-6 - q^-4 + 1
    const LaurentPoly a = LaurentPoly::monomial(-6, 1) - LaurentPoly::one();
    const LaurentPoly b = LaurentPoly::monomial(-4, 1) - LaurentPoly::one();
    const LaurentPoly expect = LaurentPoly::monomial(-10, 1) -
                               LaurentPoly::monomial(-6, 1) -
                               LaurentPoly::monomial(-4, 1) + LaurentPoly::one();
    CHECK(a * b == expect);
    CHECK(a * LaurentPoly::one() == a);
    CHECK((a * LaurentPoly::zero()).is_zero());
}

TEST_CASE("ring axioms on random triples") {
    std::mt19937_64 rng(20240817);
    for (int t = 0; t < 200; ++t) {
        const LaurentPoly a = random_poly(rng), b = random_poly(rng),
                          c = random_poly(rng);
        CHECK((a * b) * c == a * (b * c));
        CHECK(a * (b + c) == a * b + a * c);
        CHECK(a + b == b + a);
        CHECK(a * b == b * a);
    }
}

TEST_CASE("q-pochhammer") {
    CHECK(q_pochhammer(2, 0) == LaurentPoly::one());
    CHECK(q_pochhammer(-2, 1) == LaurentPoly::one() - LaurentPoly::monomial(-2, 1));
    const LaurentPoly two = (LaurentPoly::one() - LaurentPoly::monomial(-4, 1)) *
                            (LaurentPoly::one() - LaurentPoly::monomial(-2, 1));
    CHECK(q_pochhammer(-4, 2) == two);
}

TEST_CASE("pochhammer concatenation") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> ms(-6, 6), ns(0, 5);
    for (int t = 0; t < 100; ++t) {
        const int m = ms(rng), n = ns(rng), k = ns(rng);
        CHECK(q_pochhammer(m, n) * q_pochhammer(m + 2 * n, k) ==
              q_pochhammer(m, n + k));
    }
}

TEST_CASE("evaluation") {
    const QValue half(0.5);
    const LaurentPoly p = LaurentPoly::monomial(-2, 1) - LaurentPoly::one();
    CHECK(p.eval(half) == Catch::Approx(3.0));
    CHECK(LaurentPoly::one().eval(QValue(0.123)) == Catch::Approx(1.0));
    // R_121^121 at q = 1/2: 2^7 + 2^5 - 2 = 158
    const LaurentPoly r121 = LaurentPoly::monomial(-7, 1) +
                             LaurentPoly::monomial(-5, 1) +
                             LaurentPoly::monomial(-1, -1);
    CHECK(r121.eval(half) == Catch::Approx(158.0));
}

TEST_CASE("evaluation overflow signal") {
    const LaurentPoly huge = LaurentPoly::monomial(-3000, 1);
    CHECK_THROWS_AS(huge.eval(QValue(0.5)), OverflowError);
    // log evaluation still works out there
    CHECK(huge.eval_log_abs(QValue(0.5)) ==
          Catch::Approx(-3000.0 * std::log(0.5)));
}

TEST_CASE("exact division") {
    std::mt19937_64 rng(99);
    for (int t = 0; t < 100; ++t) {
        LaurentPoly a = random_poly(rng), b = random_poly(rng);
        if (b.is_zero()) b = LaurentPoly::one();
        CHECK(divide_exact(a * b, b) == a);
    }
    CHECK_THROWS_AS(divide_exact(LaurentPoly::monomial(0, 1),
                                 LaurentPoly::one() - LaurentPoly::monomial(1, 1)),
                    Error);
}

TEST_CASE("json round trip is bit-exact") {
    std::mt19937_64 rng(4242);
    for (int t = 0; t < 50; ++t) {
        const LaurentPoly p = random_poly(rng);
        CHECK(laurent_from_json(laurent_to_json(p)) == p);
    }
    const LaurentPoly sample = LaurentPoly::monomial(-2, 1) - LaurentPoly::one();
    CHECK(laurent_to_json(sample).dump() == R"({"-2":"1","0":"-1"})");
}
