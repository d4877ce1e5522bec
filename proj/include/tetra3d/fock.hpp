#pragma once

// Truncated q-oscillator Fock representations and the intertwining check
// that characterizes the R-matrix. Operator matrices are kept exact; since
// k acts as q^{-N-1/2} (or q^{N+1/2}), entries live in Laurent polynomials
// in s = q^{1/2}, so all exponents here are measured in half-units of q.
//
// The verified identities, with M(word) the truncated matrix of a product
// of generators and R the matrix of the pole-free solution:
//
//   M(k2 a1^pm) R = R M(k3 a1^pm + k1 a2^pm a3^mp)
//   M(a2^pm)    R = R M(k1 k3 a2^pm - a1^pm a3^pm)
//   M(k2 a3^pm) R = R M(k1 a3^pm + k3 a1^mp a2^pm)
//   M(k2^2)     R = R M(k1^2 k2^2 k3^2
//                       + k1 k3 (q^{-1} a1^+ a2^- a3^+ + q a1^- a2^+ a3^-)
//                       + k1^2 + k3^2 - (q^{-1}+q) k1^2 k3^2)
//   M(k1 k2)    R = R M(k1 k2),   M(k2 k3) R = R M(k2 k3)
//
// The sign of the a2-image and the last power in the k2^2 relation are fixed
// by the check itself; the k3-cubed reading is kept as a negative control.
// Matrix elements agree exactly whenever the row and the column stay at
// least two states below the cutoff in every factor, because then no
// intermediate state leaves the retained cube.

#include <array>
#include <initializer_list>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "tetra3d/laurent.hpp"
#include "tetra3d/rmatrix.hpp"

namespace tetra3d {

using FockState = std::array<int, 3>;

// Sparse operator on the truncated three-fold Fock space; polynomial
// exponents are in units of q^{1/2}.
using FockOperator = std::map<std::pair<FockState, FockState>, LaurentPoly>;

enum class FockSign { Plus, Minus }; // F_q^+ or F_q^-

enum class Gen { K, APlus, AMinus };

struct FockCube {
    int cutoff;                       // states |0..cutoff> per factor
    FockSign sign = FockSign::Minus;

    template <typename Fn>
    void for_each_state(Fn&& fn) const {
        FockState s;
        for (s[0] = 0; s[0] <= cutoff; ++s[0])
            for (s[1] = 0; s[1] <= cutoff; ++s[1])
                for (s[2] = 0; s[2] <= cutoff; ++s[2]) fn(s);
    }

    FockOperator identity() const {
        FockOperator op;
        for_each_state([&](const FockState& s) { op[{s, s}] = LaurentPoly::one(); });
        return op;
    }

    // Single generator acting in one factor.
    FockOperator generator(int factor, Gen g) const {
        FockOperator op;
        for_each_state([&](const FockState& s) {
            const int n = s[factor];
            switch (g) {
                case Gen::K: {
                    // F-: q^{-n-1/2}; F+: q^{n+1/2}
                    const int half_exp =
                        sign == FockSign::Minus ? -2 * n - 1 : 2 * n + 1;
                    op[{s, s}] = LaurentPoly::monomial(half_exp, 1);
                    break;
                }
                case Gen::AMinus: {
                    if (sign == FockSign::Minus) {
                        // a^-|n> = |n+1>
                        if (n + 1 <= cutoff) {
                            FockState r = s;
                            r[factor] = n + 1;
                            op[{r, s}] = LaurentPoly::one();
                        }
                    } else {
                        // a^-|n> = |n-1>
                        if (n - 1 >= 0) {
                            FockState r = s;
                            r[factor] = n - 1;
                            op[{r, s}] = LaurentPoly::one();
                        }
                    }
                    break;
                }
                case Gen::APlus: {
                    if (sign == FockSign::Minus) {
                        // a^+|n> = (1-q^{-2n})|n-1>
                        if (n - 1 >= 0) {
                            FockState r = s;
                            r[factor] = n - 1;
                            op[{r, s}] = LaurentPoly::one() -
                                         LaurentPoly::monomial(-4 * n, 1);
                        }
                    } else {
                        // a^+|n> = (1-q^{2+2n})|n+1>
                        if (n + 1 <= cutoff) {
                            FockState r = s;
                            r[factor] = n + 1;
                            op[{r, s}] = LaurentPoly::one() -
                                         LaurentPoly::monomial(4 + 4 * n, 1);
                        }
                    }
                    break;
                }
            }
        });
        return op;
    }

    // Ordered product of generators, e.g. word({{1,K},{0,APlus}}) = k2 a1^+.
    FockOperator word(std::initializer_list<std::pair<int, Gen>> gens) const {
        FockOperator r = identity();
        for (const auto& [factor, g] : gens) r = multiply(r, generator(factor, g));
        return r;
    }

    // R as an operator on the cube, exponents doubled into half-units.
    FockOperator r_matrix() const {
        FockOperator op;
        for_each_state([&](const FockState& row) {
            for_each_state([&](const FockState& col) {
                const SpinTuple6 t{row[0], row[1], row[2], col[0], col[1], col[2]};
                const LaurentPoly& p = r_element(t);
                if (p.is_zero()) return;
                LaurentPoly doubled;
                for (const auto& [e, c] : p.coeffs())
                    doubled += LaurentPoly::monomial(2 * e, c);
                op[{row, col}] = std::move(doubled);
            });
        });
        return op;
    }

    static FockOperator multiply(const FockOperator& a, const FockOperator& b) {
        std::map<FockState, std::vector<std::pair<FockState, const LaurentPoly*>>>
            b_by_row;
        for (const auto& [key, v] : b)
            b_by_row[key.first].emplace_back(key.second, &v);
        FockOperator r;
        for (const auto& [key, va] : a) {
            auto it = b_by_row.find(key.second);
            if (it == b_by_row.end()) continue;
            for (const auto& [col, vb] : it->second) {
                LaurentPoly& slot = r[{key.first, col}];
                slot += va * (*vb);
                if (slot.is_zero()) r.erase({key.first, col});
            }
        }
        return r;
    }

    static FockOperator add(FockOperator a, const FockOperator& b) {
        for (const auto& [key, v] : b) {
            LaurentPoly& slot = a[key];
            slot += v;
            if (slot.is_zero()) a.erase(key);
        }
        return a;
    }

    static FockOperator scale(FockOperator a, const LaurentPoly& s) {
        for (auto& [key, v] : a) v *= s;
        return a;
    }
};

namespace detail {

inline bool in_window(const FockState& s, int window) {
    return s[0] <= window && s[1] <= window && s[2] <= window;
}

inline bool window_equal(const FockOperator& a, const FockOperator& b, int window,
                         std::string* witness) {
    auto check = [&](const FockOperator& x, const FockOperator& y) {
        for (const auto& [key, v] : x) {
            if (!in_window(key.first, window) || !in_window(key.second, window))
                continue;
            auto it = y.find(key);
            if (it == y.end() ? !v.is_zero() : v != it->second) {
                if (witness) {
                    *witness = "(" + std::to_string(key.first[0]) + "," +
                               std::to_string(key.first[1]) + "," +
                               std::to_string(key.first[2]) + ")->(" +
                               std::to_string(key.second[0]) + "," +
                               std::to_string(key.second[1]) + "," +
                               std::to_string(key.second[2]) + ")";
                }
                return false;
            }
        }
        return true;
    };
    return check(a, b) && check(b, a);
}

} // namespace detail

enum class MapEq2Reading { KSquared, KCubedLiteral };

// Runs all intertwining identities on the truncation-safe window. With
// reading=KCubedLiteral the last term of the k2^2 relation uses k1^2 k3^3,
// which must fail.
inline VerifyReport verify_oscillator_map(
    int cutoff, MapEq2Reading reading = MapEq2Reading::KSquared) {
    if (cutoff < 2)
        throw CutoffTooSmallError("oscillator map needs cutoff >= 2");
    const int window = cutoff - 2;
    const FockCube cube{cutoff, FockSign::Minus};
    const FockOperator R = cube.r_matrix();
    VerifyReport report;

    auto check = [&](const std::string& name, const FockOperator& x,
                     const FockOperator& image) {
        ++report.checked;
        std::string witness;
        const FockOperator lhs = FockCube::multiply(x, R);
        const FockOperator rhs = FockCube::multiply(R, image);
        if (!detail::window_equal(lhs, rhs, window, &witness))
            report.failures.push_back(name + " violated at " + witness);
    };

    const LaurentPoly q = LaurentPoly::monomial(2, 1);    // q in half-units
    const LaurentPoly qinv = LaurentPoly::monomial(-2, 1);
    const LaurentPoly minus_one = LaurentPoly::monomial(0, -1);

    for (const bool plus : {true, false}) {
        const Gen up = plus ? Gen::APlus : Gen::AMinus;
        const Gen dn = plus ? Gen::AMinus : Gen::APlus;
        const std::string tag = plus ? "+" : "-";
        check("map-eq1 line1 (" + tag + ")", cube.word({{1, Gen::K}, {0, up}}),
              FockCube::add(cube.word({{2, Gen::K}, {0, up}}),
                            cube.word({{0, Gen::K}, {1, up}, {2, dn}})));
        check("map-eq1 line2 (" + tag + ")", cube.word({{1, up}}),
              FockCube::add(cube.word({{0, Gen::K}, {2, Gen::K}, {1, up}}),
                            FockCube::scale(cube.word({{0, up}, {2, up}}),
                                            minus_one)));
        check("map-eq1 line3 (" + tag + ")", cube.word({{1, Gen::K}, {2, up}}),
              FockCube::add(cube.word({{0, Gen::K}, {2, up}}),
                            cube.word({{2, Gen::K}, {0, dn}, {1, up}})));
    }

    {
        FockOperator image = cube.word({{0, Gen::K}, {0, Gen::K}, {1, Gen::K},
                                        {1, Gen::K}, {2, Gen::K}, {2, Gen::K}});
        image = FockCube::add(
            image, FockCube::scale(cube.word({{0, Gen::K}, {2, Gen::K},
                                              {0, Gen::APlus}, {1, Gen::AMinus},
                                              {2, Gen::APlus}}),
                                   qinv));
        image = FockCube::add(
            image, FockCube::scale(cube.word({{0, Gen::K}, {2, Gen::K},
                                              {0, Gen::AMinus}, {1, Gen::APlus},
                                              {2, Gen::AMinus}}),
                                   q));
        image = FockCube::add(image, cube.word({{0, Gen::K}, {0, Gen::K}}));
        image = FockCube::add(image, cube.word({{2, Gen::K}, {2, Gen::K}}));
        FockOperator last =
            reading == MapEq2Reading::KSquared
                ? cube.word({{0, Gen::K}, {0, Gen::K}, {2, Gen::K}, {2, Gen::K}})
                : cube.word({{0, Gen::K}, {0, Gen::K}, {2, Gen::K}, {2, Gen::K},
                             {2, Gen::K}});
        image = FockCube::add(image,
                              FockCube::scale(last, (q + qinv).scaled(-1)));
        check("map-eq2", cube.word({{1, Gen::K}, {1, Gen::K}}), image);
    }

    check("map-eq3 k1k2", cube.word({{0, Gen::K}, {1, Gen::K}}),
          cube.word({{0, Gen::K}, {1, Gen::K}}));
    check("map-eq3 k2k3", cube.word({{1, Gen::K}, {2, Gen::K}}),
          cube.word({{1, Gen::K}, {2, Gen::K}}));

    return report;
}

// Algebra relations k a^pm = q^{pm1} a^pm k, q a+a- - q^{-1} a-a+ = q-q^{-1},
// k^2 = q (1 - a+a-), checked for either representation on the safe window.
inline VerifyReport verify_oscillator_algebra(int cutoff, FockSign sign) {
    if (cutoff < 2)
        throw CutoffTooSmallError("algebra check needs cutoff >= 2");
    const int window = cutoff - 2;
    const FockCube cube{cutoff, sign};
    VerifyReport report;
    auto check = [&](const std::string& name, const FockOperator& a,
                     const FockOperator& b) {
        ++report.checked;
        std::string witness;
        if (!detail::window_equal(a, b, window, &witness))
            report.failures.push_back(name + " violated at " + witness);
    };
    const LaurentPoly q = LaurentPoly::monomial(2, 1);
    const LaurentPoly qinv = LaurentPoly::monomial(-2, 1);
    check("k a+ = q a+ k", cube.word({{0, Gen::K}, {0, Gen::APlus}}),
          FockCube::scale(cube.word({{0, Gen::APlus}, {0, Gen::K}}), q));
    check("k a- = q^{-1} a- k", cube.word({{0, Gen::K}, {0, Gen::AMinus}}),
          FockCube::scale(cube.word({{0, Gen::AMinus}, {0, Gen::K}}), qinv));
    check("q a+a- - q^{-1} a-a+ = q - q^{-1}",
          FockCube::add(
              FockCube::scale(cube.word({{0, Gen::APlus}, {0, Gen::AMinus}}), q),
              FockCube::scale(cube.word({{0, Gen::AMinus}, {0, Gen::APlus}}),
                              qinv.scaled(-1))),
          FockCube::scale(cube.identity(), q - qinv));
    check("k^2 = q (1 - a+a-)",
          cube.word({{0, Gen::K}, {0, Gen::K}}),
          FockCube::scale(
              FockCube::add(cube.identity(),
                            FockCube::scale(cube.word({{0, Gen::APlus},
                                                       {0, Gen::AMinus}}),
                                            LaurentPoly::monomial(0, -1))),
              q));
    return report;
}

} // namespace tetra3d
