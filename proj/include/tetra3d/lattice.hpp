#pragma once

// The L x M x N periodic lattice: admissible spin fields, conserved sums,
// the U and S functionals, restricted/full partition functions, and the
// layer-to-layer transfer matrices (homogeneous and inhomogeneous) with
// commutativity and rank-size duality checks.
//
// Index conventions: vertices (l,m,n) with l the height, m left-to-right,
// n front-to-back. The vertex weight is
//   R_{i(l,m,n), j(l,m,n), k(l,m,n)}^{i(l+1,m,n), j(l,m+1,n), k(l,m,n+1)}
// with periodic wrap in all three directions. A layer state is the M x N
// grid of vertical spins i(m,n), flattened as m*N + n; the layer bases are
// enumerated in ascending lexicographic order of that flat vector and the
// order is frozen (duality relabelings depend on it).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "tetra3d/composite.hpp"
#include "tetra3d/laurent.hpp"
#include "tetra3d/parallel.hpp"
#include "tetra3d/rmatrix.hpp"

namespace tetra3d {

struct LatticeSpec {
    int L = 1, M = 1, N = 1;
    double q = 0.5;
    double u = 0.3, v = 0.3, w = 0.3;
    double mu = 1.0;
    double mu1 = 1.0, mu2 = 1.0, mu3 = 1.0;   // inhomogeneous exponents
    std::vector<double> v_inh, w_inh;          // sizes N and M, products 1
    int cutoff = 2;
    double tol = 1e-12;

    void validate() const {
        if (L < 1 || M < 1 || N < 1) throw Error("lattice sizes must be >= 1");
        QValue check_q(q);
        if (!(u > 0 && v > 0 && w > 0)) throw Error("u, v, w must be positive");
        if (cutoff < 0) throw Error("cutoff must be >= 0");
        if (!v_inh.empty()) {
            if (static_cast<int>(v_inh.size()) != N)
                throw Error("v inhomogeneities must have one entry per depth site");
            double p = 1.0;
            for (double x : v_inh) {
                if (!(x > 0)) throw Error("inhomogeneities must be positive");
                p *= x;
            }
            if (std::abs(p - 1.0) > 1e-9)
                throw Error("product of v inhomogeneities must be 1");
        }
        if (!w_inh.empty()) {
            if (static_cast<int>(w_inh.size()) != M)
                throw Error("w inhomogeneities must have one entry per width site");
            double p = 1.0;
            for (double x : w_inh) {
                if (!(x > 0)) throw Error("inhomogeneities must be positive");
                p *= x;
            }
            if (std::abs(p - 1.0) > 1e-9)
                throw Error("product of w inhomogeneities must be 1");
        }
    }
};

// Spin assignment on one fundamental domain; periodicity is implicit.
struct SpinField3D {
    int L = 0, M = 0, N = 0;
    std::vector<int> i, j, k; // size L*M*N each, index (l*M + m)*N + n

    int idx(int l, int m, int n) const {
        return ((l % L) * M + (m % M)) * N + (n % N);
    }

    int iv(int l, int m, int n) const { return i[idx(l, m, n)]; }
    int jv(int l, int m, int n) const { return j[idx(l, m, n)]; }
    int kv(int l, int m, int n) const { return k[idx(l, m, n)]; }

    bool admissible() const {
        for (int l = 0; l < L; ++l)
            for (int m = 0; m < M; ++m)
                for (int n = 0; n < N; ++n) {
                    if (iv(l, m, n) + jv(l, m, n) !=
                        iv(l + 1, m, n) + jv(l, m + 1, n))
                        return false;
                    if (jv(l, m, n) + kv(l, m, n) !=
                        jv(l, m + 1, n) + kv(l, m, n + 1))
                        return false;
                }
        return true;
    }

    // i(l+1,m,n) - i(l,m,n); equals the j- and k-type differences on
    // admissible fields.
    int d(int l, int m, int n) const { return iv(l + 1, m, n) - iv(l, m, n); }
};

struct ConservedSums {
    long I = 0, J = 0, K = 0;
    std::vector<long> IM; // I^(M)_n, size N
    std::vector<long> IN; // I^(N)_m, size M
    std::vector<long> JL; // J^(L)_n, size N
    std::vector<long> JN; // J^(N)_l, size L
    std::vector<long> KL; // K^(L)_m, size M
    std::vector<long> KM; // K^(M)_l, size L
};

// The 1D spin sums; throws InadmissibleError when the local conservation
// laws fail, and checks that each sum is independent of its spectator
// coordinate as the conservation laws imply.
inline ConservedSums conserved_sums(const SpinField3D& f) {
    if (!f.admissible())
        throw InadmissibleError("field violates local conservation laws");
    ConservedSums s;
    s.IM.assign(f.N, 0);
    s.IN.assign(f.M, 0);
    s.JL.assign(f.N, 0);
    s.JN.assign(f.L, 0);
    s.KL.assign(f.M, 0);
    s.KM.assign(f.L, 0);
    auto column_sum = [&](auto&& value, int fixed_a, int fixed_b, int range,
                          int which) {
        long r = 0;
        for (int t = 0; t < range; ++t)
            r += which == 0 ? value(t, fixed_a, fixed_b)
                            : (which == 1 ? value(fixed_a, t, fixed_b)
                                          : value(fixed_a, fixed_b, t));
        return r;
    };
    auto ival = [&](int l, int m, int n) { return f.iv(l, m, n); };
    auto jval = [&](int l, int m, int n) { return f.jv(l, m, n); };
    auto kval = [&](int l, int m, int n) { return f.kv(l, m, n); };
    auto spectator_independent = [&](auto&& compute, int spectators) {
        const long ref = compute(0);
        for (int s2 = 1; s2 < spectators; ++s2)
            if (compute(s2) != ref)
                throw InadmissibleError("1D sum depends on spectator coordinate");
        return ref;
    };
    for (int n = 0; n < f.N; ++n)
        s.IM[n] = spectator_independent(
            [&](int l) { return column_sum(ival, l, n, f.M, 1); }, f.L);
    for (int m = 0; m < f.M; ++m)
        s.IN[m] = spectator_independent(
            [&](int l) { return column_sum(ival, l, m, f.N, 2); }, f.L);
    for (int n = 0; n < f.N; ++n)
        s.JL[n] = spectator_independent(
            [&](int m) { return column_sum(jval, m, n, f.L, 0); }, f.M);
    for (int l = 0; l < f.L; ++l)
        s.JN[l] = spectator_independent(
            [&](int m) { return column_sum(jval, l, m, f.N, 2); }, f.M);
    for (int m = 0; m < f.M; ++m)
        s.KL[m] = spectator_independent(
            [&](int n) { return column_sum(kval, m, n, f.L, 0); }, f.N);
    for (int l = 0; l < f.L; ++l)
        s.KM[l] = spectator_independent(
            [&](int n) { return column_sum(kval, l, n, f.M, 1); }, f.N);
    s.I = std::accumulate(s.IM.begin(), s.IM.end(), 0L);
    s.J = std::accumulate(s.JL.begin(), s.JL.end(), 0L);
    s.K = std::accumulate(s.KL.begin(), s.KL.end(), 0L);
    return s;
}

// U = sum_l J^(N)_l K^(M)_l + sum_m I^(N)_m K^(L)_m + sum_n I^(M)_n J^(L)_n.
inline long u_functional(const SpinField3D& f) {
    const ConservedSums s = conserved_sums(f);
    long u = 0;
    for (int l = 0; l < f.L; ++l) u += s.JN[l] * s.KM[l];
    for (int m = 0; m < f.M; ++m) u += s.IN[m] * s.KL[m];
    for (int n = 0; n < f.N; ++n) u += s.IM[n] * s.JL[n];
    return u;
}

struct SFunctionalForms {
    long triple_sum = 0;  // the per-vertex triple-sum expression
    long pair_sum = 0;    // 2 * sum over the ordered coordinate set
};

// Both closed forms of the S functional of the spin differences d(l,m,n);
// coordinates below are 1-based as in the defining sums.
inline SFunctionalForms s_functional_forms(const SpinField3D& f) {
    if (!f.admissible())
        throw InadmissibleError("field violates local conservation laws");
    SFunctionalForms out;
    for (int l = 1; l <= f.L; ++l)
        for (int m = 1; m <= f.M; ++m)
            for (int n = 1; n <= f.N; ++n) {
                long t1 = 0, t2 = 0, t3 = 0, t4 = 0, t5 = 0;
                for (int s = 1; s <= m - 1; ++s) t1 += f.d(l - 1, s - 1, n - 1);
                for (int r = 1; r <= l - 1; ++r) t2 += f.d(r - 1, m - 1, n - 1);
                for (int t = 1; t <= n - 1; ++t) t3 += f.d(l - 1, m - 1, t - 1);
                for (int r = 1; r <= l; ++r) t4 += f.d(r - 1, m - 1, n - 1);
                for (int t = 1; t <= n; ++t) t5 += f.d(l - 1, m - 1, t - 1);
                out.triple_sum += t1 * (t2 + t3) - t4 * t5;
            }
    for (int l1 = 1; l1 <= f.L - 1; ++l1)
        for (int l2 = l1; l2 <= f.L - 1; ++l2)
            for (int m2 = 1; m2 <= f.M - 1; ++m2)
                for (int m1 = m2; m1 <= f.M - 1; ++m1)
                    for (int n1 = 1; n1 <= f.N - 1; ++n1)
                        for (int n2 = n1; n2 <= f.N - 1; ++n2)
                            out.pair_sum += 2L *
                                            f.d(l1 - 1, m1 - 1, n1 - 1) *
                                            f.d(l2 - 1, m2 - 1, n2 - 1);
    return out;
}

inline long s_functional(const SpinField3D& f) {
    const SFunctionalForms forms = s_functional_forms(f);
    if (forms.triple_sum != forms.pair_sum)
        throw Error("S functional forms disagree on an admissible field");
    return forms.triple_sum;
}

// Visits every admissible field with all spins <= cap, by propagating the
// local conservation laws from the i-field and the j/k boundary values.
template <typename Fn>
void for_each_admissible_field(int L, int M, int N, int cap, Fn&& visit) {
    const int nv = L * M * N;
    SpinField3D f;
    f.L = L;
    f.M = M;
    f.N = N;
    f.i.assign(nv, 0);
    f.j.assign(nv, 0);
    f.k.assign(nv, 0);

    std::function<void(int)> fill_k = [&](int pos) {
        // pos over (l,m) pairs for k(l,m,0)
        if (pos == L * M) {
            visit(static_cast<const SpinField3D&>(f));
            return;
        }
        const int l = pos / M, m = pos % M;
        for (int val = 0; val <= cap; ++val) {
            f.k[f.idx(l, m, 0)] = val;
            bool ok = true;
            for (int n = 0; n < N; ++n) {
                const int cur = f.kv(l, m, n);
                const int nxt = f.jv(l, m, n) + cur - f.jv(l, m + 1, n);
                if (n + 1 < N) {
                    if (nxt < 0 || nxt > cap) {
                        ok = false;
                        break;
                    }
                    f.k[f.idx(l, m, n + 1)] = nxt;
                } else if (nxt != f.kv(l, m, 0)) {
                    ok = false;
                    break;
                }
            }
            if (ok) fill_k(pos + 1);
        }
    };

    std::function<void(int)> fill_j = [&](int pos) {
        // pos over (l,n) pairs for j(l,0,n)
        if (pos == L * N) {
            fill_k(0);
            return;
        }
        const int l = pos / N, n = pos % N;
        for (int val = 0; val <= cap; ++val) {
            f.j[f.idx(l, 0, n)] = val;
            bool ok = true;
            for (int m = 0; m < M; ++m) {
                const int cur = f.jv(l, m, n);
                const int nxt = f.iv(l, m, n) + cur - f.iv(l + 1, m, n);
                if (m + 1 < M) {
                    if (nxt < 0 || nxt > cap) {
                        ok = false;
                        break;
                    }
                    f.j[f.idx(l, m + 1, n)] = nxt;
                } else if (nxt != f.jv(l, 0, n)) {
                    ok = false;
                    break;
                }
            }
            if (ok) fill_j(pos + 1);
        }
    };

    std::function<void(int)> fill_i = [&](int pos) {
        if (pos == nv) {
            fill_j(0);
            return;
        }
        for (int val = 0; val <= cap; ++val) {
            f.i[pos] = val;
            fill_i(pos + 1);
        }
    };
    fill_i(0);
}

inline std::vector<SpinField3D> enumerate_admissible_fields(int L, int M, int N,
                                                            int cap) {
    std::vector<SpinField3D> out;
    for_each_admissible_field(L, M, N, cap,
                              [&](const SpinField3D& f) { out.push_back(f); });
    return out;
}

// ---------------------------------------------------------------------------
// Layer-to-layer transfer matrices
// ---------------------------------------------------------------------------

using LayerGrid = std::vector<int>; // M*N vertical spins, index m*N + n

inline std::vector<LayerGrid> layer_basis(int M, int N, int sector, int cap) {
    std::vector<LayerGrid> out;
    LayerGrid g(M * N, 0);
    std::function<void(int, int)> rec = [&](int pos, int rest) {
        if (pos == M * N) {
            if (rest == 0) out.push_back(g);
            return;
        }
        const int top = std::min(cap, rest);
        for (int v = 0; v <= top; ++v) {
            g[pos] = v;
            rec(pos + 1, rest - v);
        }
    };
    rec(0, sector);
    return out;
}

struct TransferMatrix {
    int M = 0, N = 0, sector = 0;
    std::vector<LayerGrid> basis;
    std::vector<double> entries; // row-major, dense
    double max_tail_bound = 0.0;

    std::size_t dim() const { return basis.size(); }

    double at(std::size_t r, std::size_t c) const { return entries[r * dim() + c]; }
};

namespace detail {

// Valid layer j-grids for a fixed (in, out) pair: boundary values jb plus
// the propagated interior, all within [0, cap] when capped.
struct JConfig {
    std::vector<int> jb;   // size N
    std::vector<int> grid; // M*N
    long total = 0;        // J = sum of jb
    long q_exp = 0;        // sum of all j entries (the q^j factors)
};

inline bool propagate_j(const LayerGrid& in, const LayerGrid& out, int M, int N,
                        const std::vector<int>& jb, int cap, JConfig& cfg) {
    cfg.jb = jb;
    cfg.grid.assign(M * N, 0);
    cfg.total = 0;
    cfg.q_exp = 0;
    for (int n = 0; n < N; ++n) {
        cfg.grid[0 * N + n] = jb[n];
        cfg.total += jb[n];
    }
    for (int n = 0; n < N; ++n) {
        for (int m = 0; m < M; ++m) {
            const int cur = cfg.grid[m * N + n];
            cfg.q_exp += cur;
            const int nxt = in[m * N + n] + cur - out[m * N + n];
            if (m + 1 < M) {
                if (nxt < 0 || (cap >= 0 && nxt > cap)) return false;
                cfg.grid[(m + 1) * N + n] = nxt;
            } else if (nxt != jb[n]) {
                return false;
            }
        }
    }
    return true;
}

inline bool propagate_k(const std::vector<int>& jgrid, int M, int N,
                        const std::vector<int>& kb, int cap,
                        std::vector<int>& kgrid) {
    kgrid.assign(M * N, 0);
    for (int m = 0; m < M; ++m) kgrid[m * N + 0] = kb[m];
    for (int m = 0; m < M; ++m) {
        for (int n = 0; n < N; ++n) {
            const int cur = kgrid[m * N + n];
            const int jnext = jgrid[((m + 1) % M) * N + n];
            const int nxt = jgrid[m * N + n] + cur - jnext;
            if (n + 1 < N) {
                if (nxt < 0 || (cap >= 0 && nxt > cap)) return false;
                kgrid[m * N + n + 1] = nxt;
            } else if (nxt != kb[m]) {
                return false;
            }
        }
    }
    return true;
}

template <typename Fn>
void for_each_vector(int len, int cap, Fn&& fn) {
    std::vector<int> v(len, 0);
    std::function<void(int)> rec = [&](int pos) {
        if (pos == len) {
            fn(v);
            return;
        }
        for (int x = 0; x <= cap; ++x) {
            v[pos] = x;
            rec(pos + 1);
        }
    };
    rec(0);
}

// One transfer-matrix entry with every j,k value capped at jk_cap (exact
// finite sum).
inline double t_entry_capped(const LayerGrid& in, const LayerGrid& out, int M,
                             int N, double v, double w, const QValue& qv,
                             double mu, int jk_cap) {
    std::vector<long> IN(M, 0), IM(N, 0);
    for (int m = 0; m < M; ++m)
        for (int n = 0; n < N; ++n) {
            IN[m] += in[m * N + n];
            IM[n] += in[m * N + n];
        }
    double total = 0.0;
    JConfig jc;
    std::vector<int> kgrid;
    for_each_vector(N, jk_cap, [&](const std::vector<int>& jb) {
        if (!propagate_j(in, out, M, N, jb, jk_cap, jc)) return;
        double jfactor = std::pow(v, static_cast<double>(jc.total)) *
                         std::pow(qv.q, static_cast<double>(jc.q_exp));
        for (int n = 0; n < N; ++n)
            jfactor *= std::pow(qv.q, mu * IM[n] * jb[n]);
        for_each_vector(M, jk_cap, [&](const std::vector<int>& kb) {
            if (!propagate_k(jc.grid, M, N, kb, jk_cap, kgrid)) return;
            long K = 0;
            for (int m = 0; m < M; ++m) K += kb[m];
            double term = jfactor * std::pow(w, static_cast<double>(K)) *
                          std::pow(qv.q, mu * static_cast<double>(jc.total) * K);
            for (int m = 0; m < M; ++m)
                term *= std::pow(qv.q, mu * IN[m] * kb[m]);
            for (int m = 0; m < M && term != 0.0; ++m)
                for (int n = 0; n < N && term != 0.0; ++n) {
                    const SpinTuple6 t{in[m * N + n],
                                       jc.grid[m * N + n],
                                       kgrid[m * N + n],
                                       out[m * N + n],
                                       jc.grid[((m + 1) % M) * N + n],
                                       kgrid[m * N + ((n + 1) % N)]};
                    term *= r_element_value(t, qv);
                }
            total += term;
        });
    });
    return total;
}

} // namespace detail

struct TransferOptions {
    // jk_cap >= 0: hard cap on every j,k value (exact finite sums).
    // jk_cap < 0: adaptive; caps grow until the entry changes by < tol.
    int jk_cap = -1;
    double tol = 1e-12;
    int max_cap = 40;
};

// Homogeneous layer-to-layer transfer matrix on one charge sector.
inline TransferMatrix transfer_matrix(const LatticeSpec& spec, int sector,
                                      const TransferOptions& opts = {}) {
    spec.validate();
    const QValue qv(spec.q);
    TransferMatrix tm;
    tm.M = spec.M;
    tm.N = spec.N;
    tm.sector = sector;
    tm.basis = layer_basis(spec.M, spec.N, sector, spec.cutoff);
    const std::size_t dim = tm.basis.size();
    tm.entries.assign(dim * dim, 0.0);
    std::vector<double> tails(dim * dim, 0.0);
    parallel_for(dim * dim, [&](std::size_t flat) {
        const auto& in = tm.basis[flat / dim];
        const auto& out = tm.basis[flat % dim];
        if (opts.jk_cap >= 0) {
            tm.entries[flat] = detail::t_entry_capped(in, out, spec.M, spec.N,
                                                      spec.v, spec.w, qv, spec.mu,
                                                      opts.jk_cap);
            return;
        }
        // adaptive: raise the cap until the entry stabilizes
        double prev = detail::t_entry_capped(in, out, spec.M, spec.N, spec.v,
                                             spec.w, qv, spec.mu, 1);
        double prev_delta = -1.0;
        for (int cap = 2; cap <= opts.max_cap; ++cap) {
            const double cur = detail::t_entry_capped(in, out, spec.M, spec.N,
                                                      spec.v, spec.w, qv,
                                                      spec.mu, cap);
            const double delta = std::abs(cur - prev);
            if (delta < opts.tol * std::max(std::abs(cur), 1e-300)) {
                // geometric remainder estimate from the last two increments
                double bound = delta;
                if (prev_delta > 0 && delta < prev_delta) {
                    const double r = delta / prev_delta;
                    bound = delta * r / (1.0 - r);
                }
                tm.entries[flat] = cur;
                tails[flat] = bound;
                return;
            }
            if (prev_delta > 0 && delta > prev_delta && cap > 6)
                throw DivergenceError("transfer entry sums do not decay");
            prev = cur;
            prev_delta = delta;
        }
        throw DivergenceError("transfer entry did not stabilize within cap budget");
    });
    tm.max_tail_bound =
        tails.empty() ? 0.0 : *std::max_element(tails.begin(), tails.end());
    return tm;
}

namespace detail {

inline double frobenius(const std::vector<double>& a) {
    double s = 0.0;
    for (double v : a) s += v * v;
    return std::sqrt(s);
}

} // namespace detail

struct PartitionResult {
    double value = 0.0;
    double tail_bound = 0.0;
    bool truncation_warning = false;
    std::string note;
};

// Restricted partition function as the sector trace of T^L. With periodic
// vertical boundaries the trace is the correct contraction; the uniform
// superposition sandwich only coincides with it where the sector block is
// diagonal.
inline PartitionResult partition_restricted(const LatticeSpec& spec, int sector,
                                            const TransferOptions& opts = {}) {
    const TransferMatrix tm = transfer_matrix(spec, sector, opts);
    const std::size_t d = tm.dim();
    PartitionResult out;
    if (d == 0) return out;
    std::vector<double> power(tm.entries);
    for (int l = 1; l < spec.L; ++l)
        power = detail::mat_mul(power, tm.entries, d);
    for (std::size_t t = 0; t < d; ++t) out.value += power[t * d + t];
    // first-order error propagation of the per-entry tails through the power
    const double tnorm = detail::frobenius(tm.entries);
    const double dnorm = tm.max_tail_bound * static_cast<double>(d);
    out.tail_bound = spec.L * std::pow(tnorm, spec.L - 1) * dnorm;
    out.truncation_warning = out.tail_bound > spec.tol * std::max(out.value, 1.0);
    if (out.truncation_warning)
        out.note = "truncation tail exceeds requested tolerance";
    return out;
}

// Direct evaluation of the restricted partition function by enumerating
// admissible fields with all spins capped; the independent route.
inline double partition_enumerate(const LatticeSpec& spec, int sector, int cap) {
    spec.validate();
    const QValue qv(spec.q);
    double total = 0.0;
    for_each_admissible_field(spec.L, spec.M, spec.N, cap, [&](const SpinField3D& f) {
        const ConservedSums s = conserved_sums(f);
        if (s.I != sector) return;
        const long U = u_functional(f);
        double term = std::pow(qv.q, spec.mu * U) *
                      std::pow(spec.v, static_cast<double>(s.J)) *
                      std::pow(spec.w, static_cast<double>(s.K));
        long jexp = 0;
        for (int v : f.j) jexp += v;
        term *= std::pow(qv.q, static_cast<double>(jexp));
        for (int l = 0; l < spec.L && term != 0.0; ++l)
            for (int m = 0; m < spec.M && term != 0.0; ++m)
                for (int n = 0; n < spec.N && term != 0.0; ++n) {
                    const SpinTuple6 t{f.iv(l, m, n), f.jv(l, m, n), f.kv(l, m, n),
                                       f.iv(l + 1, m, n), f.jv(l, m + 1, n),
                                       f.kv(l, m, n + 1)};
                    term *= r_element_value(t, qv);
                }
        total += term;
    });
    return total;
}

// Z = sum_I u^I Z_I up to max_sector, with a geometric tail estimate. The
// estimate is heuristic: the convergence of the full sum is an open point
// and may need an extra sector-dependent damping factor.
inline PartitionResult partition_full(const LatticeSpec& spec, int max_sector,
                                      const TransferOptions& opts = {}) {
    if (!(spec.u < 1.0)) throw Error("full partition function needs u < 1");
    PartitionResult out;
    double prev_z = -1.0, last_z = 0.0;
    for (int sector = 0; sector <= max_sector; ++sector) {
        const PartitionResult zi = partition_restricted(spec, sector, opts);
        out.value += std::pow(spec.u, sector) * zi.value;
        out.tail_bound += std::pow(spec.u, sector) * zi.tail_bound;
        out.truncation_warning |= zi.truncation_warning;
        prev_z = sector == 0 ? -1.0 : last_z;
        last_z = zi.value;
    }
    double growth = prev_z > 0 ? last_z / prev_z : 1.0;
    if (spec.u * growth < 1.0) {
        out.tail_bound += std::pow(spec.u, max_sector + 1) * last_z * growth /
                          (1.0 - spec.u * growth);
        out.note =
            "sector tail estimated geometrically; convergence of the full sum "
            "is heuristic and may need sector-dependent damping";
    } else {
        out.truncation_warning = true;
        out.note = "sector terms not yet decaying at max_sector; estimate "
                   "unreliable (full-sum convergence is an open point)";
    }
    return out;
}

struct CommutativityStep {
    int jk_cap = 0;
    double residual = 0.0;
    double tail_bound = 0.0;
};

struct CommutativityReport {
    std::vector<CommutativityStep> steps;
    bool below_bound = true;
    bool non_increasing = true;

    bool ok() const { return below_bound && non_increasing; }
};

// Relative commutator residual of T(v,w) and T(v',w') on one sector at a
// sequence of j,k caps. The bound is a first-order estimate of the
// truncation error of the products, from the cap -> cap+1 increments.
inline CommutativityReport verify_commutativity(
    const LatticeSpec& spec, int sector, std::pair<double, double> p1,
    std::pair<double, double> p2, const std::vector<int>& caps) {
    CommutativityReport report;
    const std::size_t dim = layer_basis(spec.M, spec.N, sector, spec.cutoff).size();
    if (dim == 0) throw Error("empty sector basis");
    auto build = [&](std::pair<double, double> p, int cap) {
        LatticeSpec s = spec;
        s.v = p.first;
        s.w = p.second;
        TransferOptions opts;
        opts.jk_cap = cap;
        return transfer_matrix(s, sector, opts);
    };
    for (int cap : caps) {
        const TransferMatrix a = build(p1, cap);
        const TransferMatrix b = build(p2, cap);
        const TransferMatrix a1 = build(p1, cap + 1);
        const TransferMatrix b1 = build(p2, cap + 1);
        const std::size_t d = a.dim();
        const auto ab = detail::mat_mul(a.entries, b.entries, d);
        const auto ba = detail::mat_mul(b.entries, a.entries, d);
        double num = 0.0;
        for (std::size_t t = 0; t < ab.size(); ++t)
            num = std::max(num, std::abs(ab[t] - ba[t]));
        const double na = detail::frobenius(a.entries);
        const double nb = detail::frobenius(b.entries);
        CommutativityStep step;
        step.jk_cap = cap;
        step.residual = num / std::max(na * nb, 1e-300);
        // ||dT|| from one extra cap level, extrapolated by its own decay
        std::vector<double> da(a.entries.size()), db(b.entries.size());
        for (std::size_t t = 0; t < da.size(); ++t) {
            da[t] = a1.entries[t] - a.entries[t];
            db[t] = b1.entries[t] - b.entries[t];
        }
        const double nda = detail::frobenius(da);
        const double ndb = detail::frobenius(db);
        step.tail_bound = 4.0 * (nda * nb + na * ndb) / std::max(na * nb, 1e-300);
        report.steps.push_back(step);
    }
    for (std::size_t t = 0; t < report.steps.size(); ++t) {
        if (report.steps[t].residual > report.steps[t].tail_bound)
            report.below_bound = false;
        if (t > 0 && report.steps[t].residual >
                         report.steps[t - 1].residual + 1e-13)
            report.non_increasing = false;
    }
    return report;
}

// Inhomogeneous transfer matrix assembled from composite weights:
//   T_{i}^{i'} = sum_{j1} q^{J M} prod_n (q^{mu3 I^(M)_n} v/v_n)^{j_{1,n}}
//                prod_m S_{i_m, j_m}^{i'_m, j_{m+1}} (q^{mu2 I^(N)_m + mu1 J} w/w_m)
inline TransferMatrix transfer_matrix_inhom(const LatticeSpec& spec, int sector,
                                            const TransferOptions& opts = {}) {
    spec.validate();
    const QValue qv(spec.q);
    const std::vector<double> vn =
        spec.v_inh.empty() ? std::vector<double>(spec.N, 1.0) : spec.v_inh;
    const std::vector<double> wm =
        spec.w_inh.empty() ? std::vector<double>(spec.M, 1.0) : spec.w_inh;
    TransferMatrix tm;
    tm.M = spec.M;
    tm.N = spec.N;
    tm.sector = sector;
    tm.basis = layer_basis(spec.M, spec.N, sector, spec.cutoff);
    const std::size_t dim = tm.basis.size();
    tm.entries.assign(dim * dim, 0.0);
    const int jcap = opts.jk_cap >= 0 ? opts.jk_cap : opts.max_cap;

    parallel_for(dim * dim, [&](std::size_t flat) {
        const auto& in = tm.basis[flat / dim];
        const auto& out = tm.basis[flat % dim];
        const int M = spec.M, N = spec.N;
        std::vector<long> IN(M, 0), IM(N, 0);
        for (int m = 0; m < M; ++m)
            for (int n = 0; n < N; ++n) {
                IN[m] += in[m * N + n];
                IM[n] += in[m * N + n];
            }
        double total = 0.0;
        detail::JConfig jc;
        detail::for_each_vector(N, jcap, [&](const std::vector<int>& jb) {
            if (!detail::propagate_j(in, out, M, N, jb, jcap, jc)) return;
            const long J = jc.total;
            double term = std::pow(qv.q, static_cast<double>(J) * M);
            for (int n = 0; n < N; ++n)
                term *= std::pow(
                    std::pow(qv.q, spec.mu3 * IM[n]) * spec.v / vn[n], jb[n]);
            for (int m = 0; m < M && term != 0.0; ++m) {
                const double wspec =
                    std::pow(qv.q, spec.mu2 * IN[m] + spec.mu1 * J) * spec.w /
                    wm[m];
                MultiSpin im(N), imp(N), jm(N), jmp(N);
                for (int n = 0; n < N; ++n) {
                    im[n] = in[m * N + n];
                    imp[n] = out[m * N + n];
                    jm[n] = jc.grid[m * N + n];
                    jmp[n] = jc.grid[((m + 1) % M) * N + n];
                }
                term *= s_weight(im, jm, imp, jmp, wspec, qv, opts.tol,
                                 opts.jk_cap >= 0 ? opts.jk_cap : -1)
                            .value;
            }
            total += term;
        });
        tm.entries[flat] = total;
    });
    return tm;
}

// ---------------------------------------------------------------------------
// Rank-size duality
// ---------------------------------------------------------------------------

namespace detail {

// Solve the (D+1)-point Vandermonde system for series coefficients 0..D of
// samples y_t = F(h*(t+1)).
inline std::vector<std::vector<double>> fd_coefficients(
    const std::function<std::vector<double>(double)>& fn, std::size_t dim2,
    int degree, double h) {
    const int nodes = degree + 1;
    std::vector<std::vector<double>> samples;
    samples.reserve(nodes);
    for (int t = 0; t < nodes; ++t) samples.push_back(fn(h * (t + 1)));
    // Vandermonde in long double
    std::vector<std::vector<long double>> a(nodes,
                                            std::vector<long double>(nodes));
    for (int r = 0; r < nodes; ++r) {
        const long double x = static_cast<long double>(h) * (r + 1);
        long double p = 1.0L;
        for (int c = 0; c < nodes; ++c) {
            a[r][c] = p;
            p *= x;
        }
    }
    // LU with partial pivoting, shared for all right-hand sides
    std::vector<int> perm(nodes);
    for (int t = 0; t < nodes; ++t) perm[t] = t;
    for (int col = 0; col < nodes; ++col) {
        int piv = col;
        for (int r = col + 1; r < nodes; ++r)
            if (std::abs((double)a[r][col]) > std::abs((double)a[piv][col]))
                piv = r;
        std::swap(a[col], a[piv]);
        std::swap(perm[col], perm[piv]);
        for (int r = col + 1; r < nodes; ++r) {
            const long double f = a[r][col] / a[col][col];
            a[r][col] = f;
            for (int c = col + 1; c < nodes; ++c) a[r][c] -= f * a[col][c];
        }
    }
    std::vector<std::vector<double>> coeffs(
        nodes, std::vector<double>(dim2, 0.0));
    std::vector<long double> y(nodes);
    for (std::size_t e = 0; e < dim2; ++e) {
        for (int r = 0; r < nodes; ++r) y[r] = samples[perm[r]][e];
        for (int r = 0; r < nodes; ++r)
            for (int c = 0; c < r; ++c) y[r] -= a[r][c] * y[c];
        for (int r = nodes - 1; r >= 0; --r) {
            for (int c = r + 1; c < nodes; ++c) y[r] -= a[r][c] * y[c];
            y[r] /= a[r][r];
        }
        for (int r = 0; r < nodes; ++r) coeffs[r][e] = static_cast<double>(y[r]);
    }
    return coeffs;
}

} // namespace detail

struct DualityBlockResult {
    int sector = 0;
    int power = 0;
    char variable = 'v';
    double scalar = 0.0;
    double max_rel_dev = 0.0;
};

struct DualityReport {
    std::vector<DualityBlockResult> blocks;
    bool ok = true;
};

// Compares the fugacity expansions of T on the (M,N) lattice against the
// transposed, grid-relabelled expansions of T on the (N,M) lattice with
// spectral parameter and fugacity exchanged (and the inhomogeneity sets
// exchanged). Coefficient blocks are extracted by finite differencing; a
// halved step must reproduce them or the extraction is rejected.
inline DualityReport verify_rank_size_duality(const LatticeSpec& spec,
                                              int max_sector, int max_power,
                                              double tol = 1e-6,
                                              TransferOptions opts = {}) {
    spec.validate();
    // matching hard caps on both lattices make the capped identity exact,
    // leaving finite differencing as the only error source
    if (opts.jk_cap < 0) opts.jk_cap = 10;
    DualityReport report;
    LatticeSpec dual = spec;
    dual.M = spec.N;
    dual.N = spec.M;
    dual.v_inh = spec.w_inh;
    dual.w_inh = spec.v_inh;

    for (int sector = 0; sector <= max_sector; ++sector) {
        const auto basis_a = layer_basis(spec.M, spec.N, sector, spec.cutoff);
        const auto basis_b = layer_basis(dual.M, dual.N, sector, dual.cutoff);
        const std::size_t d = basis_a.size();
        if (basis_b.size() != d) throw Error("duality bases of unequal size");
        std::map<LayerGrid, std::size_t> index_b;
        for (std::size_t t = 0; t < basis_b.size(); ++t) index_b[basis_b[t]] = t;
        // permutation: A grid (m,n) -> B grid (n,m), transposed in/out
        std::vector<std::size_t> relabel(d);
        for (std::size_t t = 0; t < d; ++t) {
            LayerGrid g(spec.N * spec.M, 0);
            for (int m = 0; m < spec.M; ++m)
                for (int n = 0; n < spec.N; ++n)
                    g[n * spec.M + m] = basis_a[t][m * spec.N + n];
            relabel[t] = index_b.at(g);
        }

        // entry arrays as functions of the differencing variable
        auto a_of_v = [&](double x) {
            LatticeSpec s = spec;
            s.v = x;
            return transfer_matrix_inhom(s, sector, opts).entries;
        };
        auto b_of_v = [&](double x) {
            // dual transfer with fugacity w and spectral x
            LatticeSpec s = dual;
            s.v = spec.w;
            s.w = x;
            return transfer_matrix_inhom(s, sector, opts).entries;
        };
        auto a_of_w = [&](double x) {
            LatticeSpec s = spec;
            s.w = x;
            return transfer_matrix_inhom(s, sector, opts).entries;
        };
        auto b_of_w = [&](double x) {
            LatticeSpec s = dual;
            s.v = x;
            s.w = spec.v;
            return transfer_matrix_inhom(s, sector, opts).entries;
        };

        auto run_variable = [&](char var,
                                const std::function<std::vector<double>(double)>& fa,
                                const std::function<std::vector<double>(double)>& fb) {
            // high-order fit with a halved-step repeat; the repeat is the
            // reported value and the drift its error estimate
            const double h = 0.005;
            const int degree = max_power + 6;
            const auto ca1 = detail::fd_coefficients(fa, d * d, degree, h);
            const auto ca = detail::fd_coefficients(fa, d * d, degree, h / 2);
            const auto cb1 = detail::fd_coefficients(fb, d * d, degree, h);
            const auto cb = detail::fd_coefficients(fb, d * d, degree, h / 2);
            for (int p = 0; p <= max_power; ++p) {
                double norm = 0.0, drift = 0.0;
                for (std::size_t e = 0; e < d * d; ++e) {
                    norm = std::max({norm, std::abs(ca[p][e]), std::abs(cb[p][e])});
                    drift = std::max({drift, std::abs(ca[p][e] - ca1[p][e]),
                                      std::abs(cb[p][e] - cb1[p][e])});
                }
                // more than half the working digits gone: reject
                if (norm > 0 && drift > 1e-8 * norm)
                    throw ExtractionUnstableError(
                        "finite differencing unstable at power " +
                        std::to_string(p));
                // relabelled transpose of the dual block
                std::vector<double> dual_block(d * d, 0.0);
                for (std::size_t r = 0; r < d; ++r)
                    for (std::size_t c = 0; c < d; ++c)
                        dual_block[r * d + c] =
                            cb[p][relabel[c] * d + relabel[r]];
                DualityBlockResult res;
                res.sector = sector;
                res.power = p;
                res.variable = var;
                if (norm == 0.0) {
                    res.scalar = 1.0;
                    report.blocks.push_back(res);
                    continue;
                }
                // scalar fixed on the first entry above the floor
                std::size_t ref = d * d;
                for (std::size_t e = 0; e < d * d; ++e)
                    if (std::abs(ca[p][e]) > 1e-10 * norm &&
                        std::abs(dual_block[e]) > 1e-10 * norm) {
                        ref = e;
                        break;
                    }
                if (ref == d * d)
                    throw DegenerateBlockError("no usable reference entry");
                res.scalar = ca[p][ref] / dual_block[ref];
                for (std::size_t e = 0; e < d * d; ++e)
                    res.max_rel_dev = std::max(
                        res.max_rel_dev,
                        std::abs(ca[p][e] - res.scalar * dual_block[e]) / norm);
                if (res.max_rel_dev > tol) report.ok = false;
                report.blocks.push_back(res);
            }
        };
        run_variable('v', a_of_v, b_of_v);
        run_variable('w', a_of_w, b_of_w);
    }
    return report;
}

} // namespace tetra3d
