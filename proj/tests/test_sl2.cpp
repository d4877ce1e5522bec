#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "tetra3d/sl2.hpp"

using namespace tetra3d;

TEST_CASE("six-vertex weights") {
    const QValue q(0.5);
    const double lam = 0.8;
    CHECK(six_vertex(0, 0, 0, 0, lam, q) ==
          Catch::Approx(q.q * lam - 1.0 / (q.q * lam)));
    CHECK(six_vertex(1, 0, 0, 1, lam, q) == Catch::Approx(q.q - 1.0 / q.q));
    CHECK(six_vertex(0, 0, 1, 1, lam, q) == 0.0);
}

TEST_CASE("higher-spin R-matrix reduces to six-vertex at I=J=1") {
    const QValue q(0.5);
    for (double lam : {0.4, 0.77, 1.9}) {
        // single overall scalar between the two normalizations
        double scalar = 0.0;
        for (int i1 : {0, 1})
            for (int j1 : {0, 1})
                for (int i1p : {0, 1})
                    for (int j1p : {0, 1}) {
                        const double rv = r_sl2({1, 1, i1, j1, i1p, j1p, lam}, q);
                        const double sv = six_vertex(i1, j1, i1p, j1p, lam, q);
                        if (sv == 0.0) {
                            CHECK(std::abs(rv) < 1e-12);
                            continue;
                        }
                        if (scalar == 0.0) scalar = rv / sv;
                        CHECK(rv == Catch::Approx(scalar * sv).margin(1e-10));
                    }
        CHECK(std::abs(std::abs(scalar) - 1.0) < 1e-9);
    }
}

TEST_CASE("delta support of the double-sum form") {
    const QValue q(0.4);
    CHECK(r_sl2({2, 1, 1, 1, 0, 1, 0.5}, q) == 0.0); // i1+j1 != i1p+j1p
    CHECK_THROWS_AS(r_sl2({1, 1, 2, 0, 1, 1, 0.5}, q), Error);
}

TEST_CASE("pole proximity is signalled") {
    const QValue q(0.5);
    // lambda^2 = q^{I-J} pole at k=l=0
    CHECK_THROWS_AS(r_sl2({1, 1, 1, 0, 1, 0, 1.0 + 1e-14}, q),
                    PoleProximityError);
}

TEST_CASE("Yang-Baxter for the six-vertex point of the double-sum form") {
    const QValue q(0.5);
    // R12(l1) R13(l1 l2) R23(l2) = R23(l2) R13(l1 l2) R12(l1) on (C^2)^3
    auto entry = [&](int a, int b, double lam) {
        return [=, &q](int s1, int s2, int s1p, int s2p) {
            (void)a;
            (void)b;
            return r_sl2({1, 1, s1, s2, s1p, s2p, lam}, q);
        };
    };
    const double l1 = 0.7, l2 = 1.31;
    auto build = [&](int sp1, int sp2, double lam) {
        std::vector<double> m(64, 0.0);
        for (int a = 0; a < 8; ++a)
            for (int b = 0; b < 8; ++b) {
                const int s[3] = {(a >> 2) & 1, (a >> 1) & 1, a & 1};
                const int t[3] = {(b >> 2) & 1, (b >> 1) & 1, b & 1};
                bool spectator_ok = true;
                for (int f = 0; f < 3; ++f)
                    if (f != sp1 && f != sp2 && s[f] != t[f]) spectator_ok = false;
                if (!spectator_ok) continue;
                m[a * 8 + b] =
                    entry(0, 0, lam)(s[sp1], s[sp2], t[sp1], t[sp2]);
            }
        return m;
    };
    auto mul = [](const std::vector<double>& x, const std::vector<double>& y) {
        std::vector<double> r(64, 0.0);
        for (int i = 0; i < 8; ++i)
            for (int k = 0; k < 8; ++k)
                for (int j = 0; j < 8; ++j)
                    r[i * 8 + j] += x[i * 8 + k] * y[k * 8 + j];
        return r;
    };
    const auto lhs = mul(mul(build(0, 1, l1), build(0, 2, l1 * l2)), build(1, 2, l2));
    const auto rhs = mul(mul(build(1, 2, l2), build(0, 2, l1 * l2)), build(0, 1, l1));
    double scale = 0.0, dev = 0.0;
    for (int t = 0; t < 64; ++t) {
        scale = std::max(scale, std::abs(lhs[t]));
        dev = std::max(dev, std::abs(lhs[t] - rhs[t]));
    }
    CHECK(dev <= 1e-9 * scale);
}

TEST_CASE("composite N=2 blocks are proportional to the sl2 oracle") {
    const QValue q(0.5);
    SECTION("scalar block") {
        const CompareReport r = compare_composite_sl2(0, 0, 0.4, q, 1e-8);
        CHECK(r.ok);
    }
    SECTION("core blocks") {
        const CompareReport r11 =
            compare_composite_sl2(1, 1, 0.3 * 0.25, q, 1e-8);
        CHECK(r11.ok);
        const QValue q2(0.4);
        const CompareReport r21 =
            compare_composite_sl2(2, 1, 0.2 * std::pow(0.4, 3), q2, 1e-8);
        CHECK(r21.ok);
    }
}

TEST_CASE("support agreement between composite block and sl2") {
    const QValue q(0.5);
    const double w = 0.2 * std::pow(q.q, 3);
    const CompositeBlock b = composite_block(2, 2, 1, w, q, 1e-13);
    const double lam = std::sqrt(w);
    for (std::size_t row = 0; row < b.dim(); ++row) {
        const auto& i = b.basis_i[row / b.basis_j.size()];
        const auto& j = b.basis_j[row % b.basis_j.size()];
        for (std::size_t col = 0; col < b.dim(); ++col) {
            const auto& ip = b.basis_i[col / b.basis_j.size()];
            const auto& jp = b.basis_j[col % b.basis_j.size()];
            const double rv = r_sl2({2, 1, i[0], j[0], ip[0], jp[0], lam}, q);
            const bool bz = std::abs(b.at(row, col)) < 1e-13;
            const bool rz = std::abs(rv) < 1e-13;
            CHECK(bz == rz);
        }
    }
}

TEST_CASE("composite I=J=1 block matches the six-vertex weights") {
    const QValue q(0.5);
    const CompareReport r = compare_composite_six_vertex(0.3 * 0.25, q, 1e-8);
    CHECK(r.ok);
}
