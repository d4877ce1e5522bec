#pragma once

// Hand-entered closed forms used as oracles by the unit and acceptance
// suites, independent of the recurrence implementation.

#include "tetra3d/laurent.hpp"

namespace tetra3d::oracles {

inline LaurentPoly mono(int e, int c = 1) { return LaurentPoly::monomial(e, c); }

// Q_1 = 1 - (x+z) + x y z at x=q^{-2a1}, y=q^{-2a2}, z=q^{-2a3}
inline LaurentPoly q1_closed(int a1, int a2, int a3) {
    const LaurentPoly x = mono(-2 * a1), y = mono(-2 * a2), z = mono(-2 * a3);
    return LaurentPoly::one() - x - z + x * y * z;
}

// Q_2 = (1-x)(1-x q^2)(1-z)(1-z q^2) - x^2 z^2 q^4 (1-y^2)
//       - x z q^2 (1+q^2)(1-y)(1-x-z)
inline LaurentPoly q2_closed(int a1, int a2, int a3) {
    const LaurentPoly one = LaurentPoly::one();
    const LaurentPoly x = mono(-2 * a1), y = mono(-2 * a2), z = mono(-2 * a3);
    LaurentPoly r = (one - x) * (one - x.shifted(2)) * (one - z) *
                    (one - z.shifted(2));
    r -= (x * x * z * z).shifted(4) * (one - y * y);
    r -= (x * z).shifted(2) * (one + mono(2)) * (one - y) * (one - x - z);
    return r;
}

} // namespace tetra3d::oracles
