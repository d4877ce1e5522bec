#pragma once

// Composite 2D weights built from a front-to-back chain of R-elements with
// periodic internal spins,
//
//   S_{i,j}^{i',j'}(w) = sum_{k1} w^{k1} prod_{n=1..N}
//                        R_{i_n, j_n, k_n}^{i'_n, j'_n, k_{n+1}},
//
// their finite conserved-charge blocks, the Yang-Baxter equation for them
// and the horizontal-field covariance. The k1 sum is controlled by a ratio
// test; empirically it converges for w < q^{I+J}.

#include <algorithm>
#include <cmath>
#include <functional>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "tetra3d/laurent.hpp"
#include "tetra3d/parallel.hpp"
#include "tetra3d/rmatrix.hpp"

namespace tetra3d {

using MultiSpin = std::vector<int>;

inline int charge(const MultiSpin& s) {
    int c = 0;
    for (int v : s) c += v;
    return c;
}

// All multi-spins of length n with the given charge, lexicographic. This
// order is frozen: block layouts and duality checks depend on it.
inline std::vector<MultiSpin> multispin_basis(int n, int charge_value) {
    std::vector<MultiSpin> out;
    MultiSpin cur(n, 0);
    // lexicographic enumeration by recursion on the first site
    std::function<void(int, int)> rec = [&](int pos, int rest) {
        if (pos == n - 1) {
            cur[pos] = rest;
            out.push_back(cur);
            return;
        }
        for (int v = 0; v <= rest; ++v) {
            cur[pos] = v;
            rec(pos + 1, rest - v);
        }
    };
    if (n <= 0) throw Error("multispin basis needs n >= 1");
    rec(0, charge_value);
    return out;
}

inline std::size_t block_dimension(int n, int charge_value) {
    // C(charge+n-1, n-1)
    std::size_t r = 1;
    for (int k = 1; k <= n - 1; ++k)
        r = r * (charge_value + k) / k;
    return r;
}

struct ChainSum {
    double value = 0.0;
    double tail_bound = 0.0;
    int terms = 0;
};

namespace detail {

// k_{n+1} - k_1 offsets from the chain deltas; empty when J != J'.
inline bool chain_shifts(const MultiSpin& j, const MultiSpin& jp,
                         std::vector<int>& shifts) {
    const int n = static_cast<int>(j.size());
    shifts.assign(n + 1, 0);
    for (int t = 0; t < n; ++t) shifts[t + 1] = shifts[t] + j[t] - jp[t];
    return shifts[n] == 0;
}

} // namespace detail

// One composite weight, adaptive tail. Returns 0 immediately unless the
// charges match. kcap >= 0 truncates the k1 sum exactly at kcap instead
// (used by the lattice cross-checks); tail_bound is 0 in that mode.
inline ChainSum s_weight(const MultiSpin& i, const MultiSpin& j,
                         const MultiSpin& ip, const MultiSpin& jp, double w,
                         const QValue& qv, double tol = 1e-12, int kcap = -1) {
    const int n = static_cast<int>(i.size());
    if (static_cast<int>(j.size()) != n || static_cast<int>(ip.size()) != n ||
        static_cast<int>(jp.size()) != n)
        throw Error("s_weight: mismatched chain lengths");
    if (!(w > 0)) throw Error("s_weight needs w > 0");
    ChainSum out;
    if (charge(i) != charge(ip) || charge(j) != charge(jp)) return out;
    std::vector<int> shifts;
    if (!detail::chain_shifts(j, jp, shifts)) return out;
    int kmin = 0;
    for (int v : shifts) kmin = std::max(kmin, -v);

    auto term_at = [&](int k1) {
        double term = std::pow(w, k1);
        for (int t = 0; t < n && term != 0.0; ++t) {
            const SpinTuple6 idx{i[t], j[t], k1 + shifts[t],
                                 ip[t], jp[t], k1 + shifts[t + 1]};
            term *= r_element_value(idx, qv);
        }
        return term;
    };

    if (kcap >= 0) {
        // capped mode caps every k value along the chain, matching the
        // capped lattice sums term for term
        for (int k1 = kmin; k1 <= kcap; ++k1) {
            bool inside = true;
            for (int v : shifts)
                if (k1 + v > kcap) inside = false;
            if (!inside) continue;
            out.value += term_at(k1);
            ++out.terms;
        }
        return out;
    }

    double prev = 0.0;
    double ratio = 0.0;
    constexpr int kMaxTerms = 4000;
    for (int k1 = kmin;; ++k1) {
        const double term = term_at(k1);
        out.value += term;
        ++out.terms;
        if (k1 > kmin) {
            ratio = prev > 0 ? term / prev : 0.0;
            if (k1 >= kmin + 4 && ratio < 1.0) {
                const double bound = term * ratio / (1.0 - ratio);
                if (bound < tol * std::max(out.value, 1e-300)) {
                    out.tail_bound = bound;
                    return out;
                }
            }
            if (k1 >= kmin + 24 && ratio >= 1.0)
                throw DivergenceError(
                    "chain sum does not decay (w too large for this block), "
                    "ratio " + std::to_string(ratio));
        }
        prev = term;
        if (out.terms > kMaxTerms)
            throw DivergenceError("chain sum exceeded term budget");
    }
}

// Dense block of composite weights over the frozen multi-spin bases.
struct CompositeBlock {
    int n = 0;
    int charge_i = 0;
    int charge_j = 0;
    double w = 0.0;
    double q = 0.0;
    std::vector<MultiSpin> basis_i;
    std::vector<MultiSpin> basis_j;
    std::vector<double> entries; // row-major over (i,j) x (i',j')
    double max_tail_bound = 0.0;

    std::size_t dim() const { return basis_i.size() * basis_j.size(); }

    double& at(std::size_t row, std::size_t col) { return entries[row * dim() + col]; }

    double at(std::size_t row, std::size_t col) const {
        return entries[row * dim() + col];
    }

    std::size_t row_index(std::size_t ii, std::size_t jj) const {
        return ii * basis_j.size() + jj;
    }
};

inline CompositeBlock composite_block(int n, int charge_i, int charge_j, double w,
                                      const QValue& qv, double tol = 1e-12,
                                      int kcap = -1) {
    CompositeBlock block;
    block.n = n;
    block.charge_i = charge_i;
    block.charge_j = charge_j;
    block.w = w;
    block.q = qv.q;
    block.basis_i = multispin_basis(n, charge_i);
    block.basis_j = multispin_basis(n, charge_j);
    const std::size_t dim = block.dim();
    block.entries.assign(dim * dim, 0.0);
    std::vector<double> tails(dim * dim, 0.0);
    parallel_for(dim * dim, [&](std::size_t flat) {
        const std::size_t row = flat / dim, col = flat % dim;
        const auto& i = block.basis_i[row / block.basis_j.size()];
        const auto& j = block.basis_j[row % block.basis_j.size()];
        const auto& ip = block.basis_i[col / block.basis_j.size()];
        const auto& jp = block.basis_j[col % block.basis_j.size()];
        const ChainSum s = s_weight(i, j, ip, jp, w, qv, tol, kcap);
        block.entries[flat] = s.value;
        tails[flat] = s.tail_bound;
    });
    block.max_tail_bound =
        tails.empty() ? 0.0 : *std::max_element(tails.begin(), tails.end());
    return block;
}

// Largest w (on a geometric probe grid) for which the (I,J) chain sum still
// passes the ratio test; the convergence domain is detected, not derived.
inline double detect_convergence_radius(int n, int charge_i, int charge_j,
                                        const QValue& qv) {
    const auto bi = multispin_basis(n, charge_i);
    const auto bj = multispin_basis(n, charge_j);
    double last_good = 0.0;
    for (double w = 1.0; w > 1e-8; w *= 0.8) {
        bool good = true;
        try {
            for (const auto& i : bi)
                for (const auto& j : bj) s_weight(i, j, i, j, w, qv, 1e-8);
        } catch (const DivergenceError&) {
            good = false;
        } catch (const OverflowError&) {
            good = false;
        }
        if (good) {
            last_good = w;
            break;
        }
    }
    return last_good;
}

// Horizontal-field transformation: each entry is multiplied by
// (q^{mu I} v / v_n)^{j_1}, with j_1 the first component of the incoming
// j multi-spin and I the conserved i-charge of the block.
inline CompositeBlock apply_horizontal_field(CompositeBlock block, double v,
                                             double vn, double mu_exponent) {
    if (!(v > 0 && vn > 0))
        throw Error("horizontal field needs positive parameters");
    const QValue qv(block.q);
    const double base =
        std::pow(qv.q, mu_exponent * block.charge_i) * v / vn;
    const std::size_t dim = block.dim();
    for (std::size_t row = 0; row < dim; ++row) {
        const auto& j = block.basis_j[row % block.basis_j.size()];
        const double f = std::pow(base, j[0]);
        for (std::size_t col = 0; col < dim; ++col) block.at(row, col) *= f;
    }
    return block;
}

struct YbeReport {
    double max_rel_dev = 0.0;
    double scale = 0.0;
    bool ok = false;
};

namespace detail {

// Dense operator on the triple sector space (I, J, Jbar); pair blocks act
// on two of the three slots.
struct TripleSpace {
    std::vector<MultiSpin> bi, bj, bjb;

    std::size_t dim() const { return bi.size() * bj.size() * bjb.size(); }

    std::size_t index(std::size_t a, std::size_t b, std::size_t c) const {
        return (a * bj.size() + b) * bjb.size() + c;
    }
};

enum class Slot { IJ, IJbar, JJbar };

inline std::vector<double> slot_operator(const TripleSpace& sp, Slot slot,
                                         double w, const QValue& qv, double tol) {
    const std::size_t d = sp.dim();
    std::vector<double> M(d * d, 0.0);
    for (std::size_t a = 0; a < sp.bi.size(); ++a)
        for (std::size_t b = 0; b < sp.bj.size(); ++b)
            for (std::size_t c = 0; c < sp.bjb.size(); ++c)
                for (std::size_t ap = 0; ap < sp.bi.size(); ++ap)
                    for (std::size_t bp = 0; bp < sp.bj.size(); ++bp)
                        for (std::size_t cp = 0; cp < sp.bjb.size(); ++cp) {
                            double v = 0.0;
                            switch (slot) {
                                case Slot::IJ:
                                    if (c != cp) continue;
                                    v = s_weight(sp.bi[a], sp.bj[b], sp.bi[ap],
                                                 sp.bj[bp], w, qv, tol)
                                            .value;
                                    break;
                                case Slot::IJbar:
                                    if (b != bp) continue;
                                    v = s_weight(sp.bi[a], sp.bjb[c], sp.bi[ap],
                                                 sp.bjb[cp], w, qv, tol)
                                            .value;
                                    break;
                                case Slot::JJbar:
                                    if (a != ap) continue;
                                    v = s_weight(sp.bj[b], sp.bjb[c], sp.bj[bp],
                                                 sp.bjb[cp], w, qv, tol)
                                            .value;
                                    break;
                            }
                            M[sp.index(a, b, c) * d + sp.index(ap, bp, cp)] = v;
                        }
    return M;
}

inline std::vector<double> mat_mul(const std::vector<double>& a,
                                   const std::vector<double>& b, std::size_t d) {
    std::vector<double> r(d * d, 0.0);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t k = 0; k < d; ++k) {
            const double v = a[i * d + k];
            if (v == 0.0) continue;
            for (std::size_t j = 0; j < d; ++j) r[i * d + j] += v * b[k * d + j];
        }
    return r;
}

} // namespace detail

struct YbeOptions {
    // optional horizontal field applied to the (I,J) and (I,Jbar) factors
    bool with_field = false;
    double field_v = 1.0;
    double field_vn = 1.0;
    double field_mu = 0.0;
};

// Both sides of the Yang-Baxter equation on the (I, J, Jbar) sector:
//   S_{12}(w) S_{13}(w') S_{23}(w'/w) = S_{23}(w'/w) S_{13}(w') S_{12}(w).
inline YbeReport verify_ybe_block(int n, int charge_i, int charge_j,
                                  int charge_jbar, double w, double wp,
                                  const QValue& qv, double tol = 1e-9,
                                  const YbeOptions& opts = {}) {
    detail::TripleSpace sp{multispin_basis(n, charge_i),
                           multispin_basis(n, charge_j),
                           multispin_basis(n, charge_jbar)};
    const std::size_t d = sp.dim();
    const double sum_tol = std::min(tol * 1e-3, 1e-12);
    std::vector<double> s12 =
        detail::slot_operator(sp, detail::Slot::IJ, w, qv, sum_tol);
    std::vector<double> s13 =
        detail::slot_operator(sp, detail::Slot::IJbar, wp, qv, sum_tol);
    const std::vector<double> s23 =
        detail::slot_operator(sp, detail::Slot::JJbar, wp / w, qv, sum_tol);

    if (opts.with_field) {
        // multiply the (I,J) factor by (q^{mu I} v/v_n)^{j_1} on the in-state
        // of its j slot, and the (I,Jbar) factor likewise on its jbar slot
        const double base =
            std::pow(qv.q, opts.field_mu * charge_i) * opts.field_v / opts.field_vn;
        for (std::size_t a = 0; a < sp.bi.size(); ++a)
            for (std::size_t b = 0; b < sp.bj.size(); ++b)
                for (std::size_t c = 0; c < sp.bjb.size(); ++c) {
                    const std::size_t row = sp.index(a, b, c);
                    const double fj = std::pow(base, sp.bj[b][0]);
                    const double fjb = std::pow(base, sp.bjb[c][0]);
                    for (std::size_t col = 0; col < d; ++col) {
                        s12[row * d + col] *= fj;
                        s13[row * d + col] *= fjb;
                    }
                }
    }

    const std::vector<double> lhs =
        detail::mat_mul(detail::mat_mul(s12, s13, d), s23, d);
    const std::vector<double> rhs =
        detail::mat_mul(detail::mat_mul(s23, s13, d), s12, d);
    YbeReport report;
    for (double v : lhs) report.scale = std::max(report.scale, std::abs(v));
    for (double v : rhs) report.scale = std::max(report.scale, std::abs(v));
    double max_abs = 0.0;
    for (std::size_t t = 0; t < lhs.size(); ++t)
        max_abs = std::max(max_abs, std::abs(lhs[t] - rhs[t]));
    report.max_rel_dev = max_abs / std::max(report.scale, 1e-300);
    report.ok = report.max_rel_dev <= tol;
    return report;
}

} // namespace tetra3d
