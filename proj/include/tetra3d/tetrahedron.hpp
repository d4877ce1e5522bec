#pragma once

// Exact verification of the tetrahedron equation
//
//   R_123 R_145 R_246 R_356 = R_356 R_246 R_145 R_123
//
// in matrix form. Writing unprimed externals n, double-primed externals m
// and internals a, the two sides are
//
//   LHS = sum_a R_{n1 n2 n3}^{a1 a2 a3} R_{a1 n4 n5}^{m1 a4 a5}
//               R_{a2 a4 n6}^{m2 m4 a6} R_{a3 a5 a6}^{m3 m5 m6}
//   RHS = sum_a R_{n3 n5 n6}^{a3 a5 a6} R_{n2 n4 a6}^{a2 a4 m6}
//               R_{n1 a4 a5}^{a1 m4 m5} R_{a1 a2 a3}^{m1 m2 m3}
//
// The eight delta constraints of the four factors leave a single free
// internal summation per side, bounded by non-negativity, plus three
// consistency conditions on the externals.

#include <algorithm>
#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "tetra3d/laurent.hpp"
#include "tetra3d/parallel.hpp"
#include "tetra3d/rmatrix.hpp"

namespace tetra3d {

struct TetraExternal {
    std::array<int, 6> n{};   // unprimed
    std::array<int, 6> npp{}; // double-primed
};

enum class TetraSide { Lhs, Rhs };

using Internal6 = std::array<int, 6>;

namespace detail {

inline std::array<SpinTuple6, 4> lhs_factors(const TetraExternal& e,
                                             const Internal6& a) {
    const auto& n = e.n;
    const auto& m = e.npp;
    return {SpinTuple6{n[0], n[1], n[2], a[0], a[1], a[2]},
            SpinTuple6{a[0], n[3], n[4], m[0], a[3], a[4]},
            SpinTuple6{a[1], a[3], n[5], m[1], m[3], a[5]},
            SpinTuple6{a[2], a[4], a[5], m[2], m[4], m[5]}};
}

inline std::array<SpinTuple6, 4> rhs_factors(const TetraExternal& e,
                                             const Internal6& a) {
    const auto& n = e.n;
    const auto& m = e.npp;
    return {SpinTuple6{n[2], n[4], n[5], a[2], a[4], a[5]},
            SpinTuple6{n[1], n[3], a[5], a[1], a[3], m[5]},
            SpinTuple6{n[0], a[3], a[4], a[0], m[3], m[4]},
            SpinTuple6{a[0], a[1], a[2], m[0], m[1], m[2]}};
}

inline bool factors_admissible(const std::array<SpinTuple6, 4>& fs) {
    for (const auto& f : fs)
        if (!f.non_negative() || !f.satisfies_deltas()) return false;
    return true;
}

} // namespace detail

// All internal assignments compatible with every delta constraint on the
// given side. The deltas determine five internals from one free parameter;
// the remaining constraints involve only externals.
inline std::vector<Internal6> enumerate_internal(const TetraExternal& e,
                                                 TetraSide side) {
    std::vector<Internal6> out;
    const auto& n = e.n;
    const auto& m = e.npp;
    if (side == TetraSide::Lhs) {
        // free parameter t = a1
        const int lo = std::max({0, n[0] - n[2], m[0] - n[3],
                                 m[0] + m[3] - n[3] - n[5]});
        const int hi = std::min(n[0] + n[1], n[4] + m[0]);
        for (int t = lo; t <= hi; ++t) {
            const Internal6 a{t,
                              n[0] + n[1] - t,
                              n[2] - n[0] + t,
                              t + n[3] - m[0],
                              n[4] - t + m[0],
                              t + n[3] - m[0] + n[5] - m[3]};
            if (detail::factors_admissible(detail::lhs_factors(e, a)))
                out.push_back(a);
        }
    } else {
        // free parameter s = a5; remaining sign constraints are filtered below
        const int hi = std::min(n[2] + n[4], n[4] + n[5]);
        for (int s = 0; s <= hi; ++s) {
            const int a3 = n[2] + n[4] - s;
            const int a6 = n[4] + n[5] - s;
            const int a4 = n[3] + a6 - m[5];
            const int a2 = n[1] + n[3] - a4;
            const int a1 = n[0] + a4 - m[3];
            const Internal6 a{a1, a2, a3, a4, s, a6};
            bool nonneg = true;
            for (int v : a)
                if (v < 0) nonneg = false;
            if (!nonneg) continue;
            if (detail::factors_admissible(detail::rhs_factors(e, a)))
                out.push_back(a);
        }
    }
    return out;
}

struct TetraReport {
    LaurentPoly lhs;
    LaurentPoly rhs;
    std::size_t internal_count_lhs = 0;
    std::size_t internal_count_rhs = 0;
    bool equal = false;
};

inline TetraReport verify_tetrahedron(const TetraExternal& e) {
    TetraReport report;
    for (const auto& a : enumerate_internal(e, TetraSide::Lhs)) {
        ++report.internal_count_lhs;
        LaurentPoly term = LaurentPoly::one();
        for (const auto& f : detail::lhs_factors(e, a)) term *= r_element(f);
        report.lhs += term;
    }
    for (const auto& a : enumerate_internal(e, TetraSide::Rhs)) {
        ++report.internal_count_rhs;
        LaurentPoly term = LaurentPoly::one();
        for (const auto& f : detail::rhs_factors(e, a)) term *= r_element(f);
        report.rhs += term;
    }
    report.equal = report.lhs == report.rhs;
    return report;
}

// Twelve edge-weight parameters, one lambda/mu pair per Fock space.
struct DressParams6 {
    std::array<double, 6> lambda{1, 1, 1, 1, 1, 1};
    std::array<double, 6> mu{1, 1, 1, 1, 1, 1};

    DressParams per_factor(int i, int j, int k) const {
        return DressParams{{lambda[i - 1], lambda[j - 1], lambda[k - 1]},
                           {mu[i - 1], mu[j - 1], mu[k - 1]}};
    }
};

struct TetraNumericReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double rel_dev = 0.0;
    bool equal = false;
};

// Dressed variant; space triples per factor as they appear in the equation.
inline TetraNumericReport verify_tetrahedron_dressed(const TetraExternal& e,
                                                     const DressParams6& d,
                                                     const QValue& qv,
                                                     double tol = 1e-10) {
    static constexpr std::array<std::array<int, 3>, 4> kLhsSpaces{
        {{1, 2, 3}, {1, 4, 5}, {2, 4, 6}, {3, 5, 6}}};
    static constexpr std::array<std::array<int, 3>, 4> kRhsSpaces{
        {{3, 5, 6}, {2, 4, 6}, {1, 4, 5}, {1, 2, 3}}};
    TetraNumericReport report;
    for (const auto& a : enumerate_internal(e, TetraSide::Lhs)) {
        const auto fs = detail::lhs_factors(e, a);
        double term = 1.0;
        for (int f = 0; f < 4; ++f) {
            const auto& s = kLhsSpaces[f];
            term *= r_element_dressed(fs[f], d.per_factor(s[0], s[1], s[2]), qv);
        }
        report.lhs += term;
    }
    for (const auto& a : enumerate_internal(e, TetraSide::Rhs)) {
        const auto fs = detail::rhs_factors(e, a);
        double term = 1.0;
        for (int f = 0; f < 4; ++f) {
            const auto& s = kRhsSpaces[f];
            term *= r_element_dressed(fs[f], d.per_factor(s[0], s[1], s[2]), qv);
        }
        report.rhs += term;
    }
    const double scale = std::max({std::abs(report.lhs), std::abs(report.rhs), 1.0});
    report.rel_dev = std::abs(report.lhs - report.rhs) / scale;
    report.equal = report.rel_dev <= tol;
    return report;
}

// The external conservation laws implied by the four factors' deltas,
// derived mechanically: a combination sum_i c_i N_i is conserved by factor
// (i,j,k) iff c_j = c_i + c_k. Gaussian elimination over the rationals on
// the four resulting equations yields the solution basis.
inline std::vector<std::array<int, 6>> derive_external_conservation() {
    static constexpr std::array<std::array<int, 3>, 4> kFactors{
        {{1, 2, 3}, {1, 4, 5}, {2, 4, 6}, {3, 5, 6}}};
    std::vector<std::array<Rational, 6>> rows;
    for (const auto& f : kFactors) {
        std::array<Rational, 6> row{};
        row[f[0] - 1] += 1;
        row[f[1] - 1] -= 1;
        row[f[2] - 1] += 1;
        rows.push_back(row);
    }
    // reduced row echelon form
    std::size_t rank = 0;
    std::array<int, 6> pivot_col{};
    for (int col = 0; col < 6 && rank < rows.size(); ++col) {
        std::size_t pivot = rank;
        while (pivot < rows.size() && rows[pivot][col] == 0) ++pivot;
        if (pivot == rows.size()) continue;
        std::swap(rows[rank], rows[pivot]);
        const Rational inv = Rational(1) / rows[rank][col];
        for (auto& v : rows[rank]) v *= inv;
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (r == rank || rows[r][col] == 0) continue;
            const Rational f = rows[r][col];
            for (int c = 0; c < 6; ++c) rows[r][c] -= f * rows[rank][c];
        }
        pivot_col[rank] = col;
        ++rank;
    }
    // nullspace basis: one vector per free column
    std::vector<std::array<int, 6>> basis;
    std::array<bool, 6> is_pivot{};
    for (std::size_t r = 0; r < rank; ++r) is_pivot[pivot_col[r]] = true;
    for (int col = 0; col < 6; ++col) {
        if (is_pivot[col]) continue;
        std::array<Rational, 6> v{};
        v[col] = 1;
        for (std::size_t r = 0; r < rank; ++r) v[pivot_col[r]] = -rows[r][col];
        // entries are integers here by construction of the system
        std::array<int, 6> iv{};
        for (int c = 0; c < 6; ++c) {
            if (boost::multiprecision::denominator(v[c]) != 1)
                throw Error("conservation basis is unexpectedly non-integer");
            iv[c] = static_cast<int>(boost::multiprecision::numerator(v[c]));
        }
        basis.push_back(iv);
    }
    return basis;
}

inline bool external_conservation_holds(const TetraExternal& e) {
    static const std::vector<std::array<int, 6>> basis =
        derive_external_conservation();
    for (const auto& c : basis) {
        long lhs = 0, rhs = 0;
        for (int i = 0; i < 6; ++i) {
            lhs += static_cast<long>(c[i]) * e.n[i];
            rhs += static_cast<long>(c[i]) * e.npp[i];
        }
        if (lhs != rhs) return false;
    }
    return true;
}

struct TetraSweepReport {
    std::size_t checked = 0;
    std::size_t nonzero = 0;
    std::vector<std::string> failures;

    bool ok() const { return failures.empty(); }
};

// Exhaustive exact sweep over all externals with entries <= max_index.
inline TetraSweepReport sweep_tetrahedron(int max_index,
                                          unsigned threads = default_thread_count()) {
    const int base = max_index + 1;
    std::uint64_t total = 1;
    for (int i = 0; i < 12; ++i) total *= base;
    TetraSweepReport report;
    report.checked = total;
    std::mutex m;
    std::atomic<std::uint64_t> nonzero{0};
    parallel_for(
        total,
        [&](std::size_t flat) {
            TetraExternal e;
            std::uint64_t rest = flat;
            for (int i = 0; i < 6; ++i) {
                e.n[i] = static_cast<int>(rest % base);
                rest /= base;
            }
            for (int i = 0; i < 6; ++i) {
                e.npp[i] = static_cast<int>(rest % base);
                rest /= base;
            }
            if (!external_conservation_holds(e)) {
                // both sides must vanish identically
                if (!enumerate_internal(e, TetraSide::Lhs).empty() ||
                    !enumerate_internal(e, TetraSide::Rhs).empty()) {
                    std::lock_guard<std::mutex> lock(m);
                    report.failures.push_back(
                        "conservation filter disagrees with enumeration");
                }
                return;
            }
            const TetraReport r = verify_tetrahedron(e);
            if (!r.lhs.is_zero()) nonzero.fetch_add(1);
            if (!r.equal) {
                std::lock_guard<std::mutex> lock(m);
                report.failures.push_back("tetrahedron violated");
            }
        },
        threads);
    report.nonzero = nonzero.load();
    return report;
}

// Random externals with entries <= max_index, exact check each.
inline TetraSweepReport sample_tetrahedron(int max_index, std::size_t count,
                                           std::uint64_t seed,
                                           unsigned threads = default_thread_count()) {
    std::vector<TetraExternal> externals(count);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> dist(0, max_index);
    for (auto& e : externals) {
        for (auto& v : e.n) v = dist(rng);
        // bias the double-primed side towards the conserved sector so a
        // useful fraction of samples has nonzero sides
        e.npp = e.n;
        if (rng() % 2 == 0) std::shuffle(e.npp.begin(), e.npp.end(), rng);
    }
    TetraSweepReport report;
    report.checked = count;
    std::mutex m;
    std::atomic<std::uint64_t> nonzero{0};
    parallel_for(
        count,
        [&](std::size_t i) {
            const TetraReport r = verify_tetrahedron(externals[i]);
            if (!r.lhs.is_zero()) nonzero.fetch_add(1);
            if (!r.equal) {
                std::lock_guard<std::mutex> lock(m);
                report.failures.push_back("tetrahedron violated (sample)");
            }
        },
        threads);
    report.nonzero = nonzero.load();
    return report;
}

} // namespace tetra3d
