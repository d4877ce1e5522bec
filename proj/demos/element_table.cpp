// Prints the small-index element table together with numeric values.

#include <cstdio>

#include "tetra3d/rmatrix.hpp"

using namespace tetra3d;

int main() {
    const QValue q(0.5);
    const SpinTuple6 table[] = {
        {0, 0, 0, 0, 0, 0}, {0, 1, 0, 0, 1, 0}, {1, 1, 0, 1, 1, 0},
        {0, 1, 0, 1, 0, 1}, {1, 2, 1, 1, 2, 1}, {0, 2, 1, 2, 0, 3},
        {2, 3, 1, 2, 3, 1},
    };
    for (const auto& t : table) {
        const LaurentPoly& p = r_element(t);
        std::printf("%-18s  %-40s  %.10g\n", t.to_string().c_str(),
                    p.to_string().c_str(), p.eval(q));
    }
    return 0;
}
