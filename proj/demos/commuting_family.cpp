// Builds two transfer matrices on the same sector and prints how the
// commutator residual falls as the spin sums are truncated less.

#include <cstdio>

#include "tetra3d/lattice.hpp"

using namespace tetra3d;

int main() {
    LatticeSpec spec;
    spec.M = 2;
    spec.N = 2;
    spec.q = 0.5;
    spec.cutoff = 3;
    const CommutativityReport r =
        verify_commutativity(spec, 3, {0.3, 0.2}, {0.1, 0.4}, {1, 2, 3, 4, 5, 6});
    std::printf("%6s  %12s  %12s\n", "cap", "residual", "tail bound");
    for (const auto& s : r.steps)
        std::printf("%6d  %12.3e  %12.3e\n", s.jk_cap, s.residual, s.tail_bound);
    return r.below_bound ? 0 : 1;
}
