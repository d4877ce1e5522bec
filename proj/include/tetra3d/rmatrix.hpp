#pragma once

// Matrix elements of the 3D R-matrix. The defining form is the pole-free
// double-Pochhammer sum
//
//   R_{n1,n2,n3}^{n1',n2',n3'} =
//     d(n1+n2, n1'+n2') d(n2+n3, n2'+n3') q^{n2(n2+1)-(n2-n1')(n2-n3')}
//     * sum_{r=0..n2} [(q^{-2 n1'};q^2)_{n2-r} / (q^2;q^2)_{n2-r}]
//                     [(q^{2+2 n1};q^2)_r   / (q^2;q^2)_r] q^{-2r(n3+n1'+1)}
//
// every element is an exact Laurent polynomial in q, non-negative for
// 0<q<1. The assembly through the Q_n polynomials is kept as an independent
// second route.

#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <mutex>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "tetra3d/laurent.hpp"
#include "tetra3d/parallel.hpp"
#include "tetra3d/qpolynomial.hpp"

namespace tetra3d {

// Edge spins of one vertex: (n1,n2,n3) in, (n1p,n2p,n3p) out.
struct SpinTuple6 {
    int n1 = 0, n2 = 0, n3 = 0;
    int n1p = 0, n2p = 0, n3p = 0;

    bool satisfies_deltas() const {
        return n1 + n2 == n1p + n2p && n2 + n3 == n2p + n3p;
    }

    bool non_negative() const {
        return n1 >= 0 && n2 >= 0 && n3 >= 0 && n1p >= 0 && n2p >= 0 && n3p >= 0;
    }

    friend bool operator==(const SpinTuple6&, const SpinTuple6&) = default;

    std::string to_string() const {
        std::ostringstream os;
        os << "(" << n1 << "," << n2 << "," << n3 << "|" << n1p << "," << n2p
           << "," << n3p << ")";
        return os.str();
    }
};

struct SpinTuple6Hash {
    std::size_t operator()(const SpinTuple6& t) const {
        std::uint64_t h = 1469598103934665603ull;
        for (int v : {t.n1, t.n2, t.n3, t.n1p, t.n2p, t.n3p}) {
            h ^= static_cast<std::uint64_t>(v + 1);
            h *= 1099511628211ull;
        }
        return static_cast<std::size_t>(h);
    }
};

// Pole-free sum, uncached.
inline LaurentPoly r_element_direct(const SpinTuple6& t) {
    if (!t.non_negative() || !t.satisfies_deltas()) return LaurentPoly::zero();
    const int prefactor = t.n2 * (t.n2 + 1) - (t.n2 - t.n1p) * (t.n2 - t.n3p);
    LaurentPoly sum;
    for (int r = 0; r <= t.n2; ++r) {
        LaurentPoly term = divide_exact(q_pochhammer(-2 * t.n1p, t.n2 - r),
                                        q_pochhammer(2, t.n2 - r));
        term *= divide_exact(q_pochhammer(2 + 2 * t.n1, r), q_pochhammer(2, r));
        sum += term.shifted(-2 * r * (t.n3 + t.n1p + 1));
    }
    return sum.shifted(prefactor);
}

class RElementCache {
  public:
    const LaurentPoly& get(const SpinTuple6& t) {
        {
            std::lock_guard<std::mutex> lock(mutex_);
            auto it = table_.find(t);
            if (it != table_.end()) return it->second;
        }
        LaurentPoly value = r_element_direct(t);
        std::lock_guard<std::mutex> lock(mutex_);
        return table_.emplace(t, std::move(value)).first->second;
    }

  private:
    std::mutex mutex_;
    std::unordered_map<SpinTuple6, LaurentPoly, SpinTuple6Hash> table_;
};

inline RElementCache& r_element_cache() {
    static RElementCache cache;
    return cache;
}

inline const LaurentPoly& r_element(const SpinTuple6& t) {
    return r_element_cache().get(t);
}

// Assembly through the Q_n polynomials: the independent route used to
// cross-check the pole-free sum.
inline LaurentPoly r_element_via_qpoly(const SpinTuple6& t) {
    if (!t.non_negative() || !t.satisfies_deltas()) return LaurentPoly::zero();
    const int prefactor = t.n2 * (t.n2 + 1) - (t.n2 - t.n1p) * (t.n2 - t.n3p);
    const LaurentPoly& qn = q_poly_recursive(t.n2, t.n1p, t.n2p, t.n3p);
    return divide_exact(qn.shifted(prefactor), q_pochhammer(2, t.n2));
}

// Numeric element value with a per-q cache; lattice sums hit the same
// elements many times.
class RValueCache {
  public:
    double get(const SpinTuple6& t, const QValue& qv) {
        if (!t.non_negative() || !t.satisfies_deltas()) return 0.0;
        const Key key{t, qv.q};
        {
            std::lock_guard<std::mutex> lock(mutex_);
            auto it = table_.find(key);
            if (it != table_.end()) return it->second;
        }
        const double value = r_element(t).eval(qv);
        std::lock_guard<std::mutex> lock(mutex_);
        return table_.emplace(key, value).first->second;
    }

  private:
    struct Key {
        SpinTuple6 t;
        double q;
        friend bool operator==(const Key&, const Key&) = default;
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const {
            std::uint64_t h = SpinTuple6Hash{}(k.t);
            std::uint64_t bits;
            static_assert(sizeof(bits) == sizeof(k.q));
            std::memcpy(&bits, &k.q, sizeof(bits));
            h ^= bits + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
            return static_cast<std::size_t>(h);
        }
    };

    std::mutex mutex_;
    std::unordered_map<Key, double, KeyHash> table_;
};

inline RValueCache& r_value_cache() {
    static RValueCache cache;
    return cache;
}

inline double r_element_value(const SpinTuple6& t, const QValue& qv) {
    return r_value_cache().get(t, qv);
}

// Edge-weight parameters of the dressed solution; one lambda/mu pair per
// Fock space the R factor touches.
struct DressParams {
    std::array<double, 3> lambda{1.0, 1.0, 1.0};
    std::array<double, 3> mu{1.0, 1.0, 1.0};

    void validate() const {
        for (double v : lambda)
            if (!(v > 0)) throw Error("dressing lambda must be positive");
        for (double v : mu)
            if (!(v > 0)) throw Error("dressing mu must be positive");
    }
};

// Dressed element (mu_k/lambda_i)^{n_j} R (lambda_j/lambda_k)^{n_i'}
// (mu_i/mu_j)^{n_k'}: the left factor reads the in-state of the middle
// space, the right factors read the out-states of the outer spaces. This
// placement is the one that preserves the tetrahedron equation.
inline double r_element_dressed(const SpinTuple6& t, const DressParams& d,
                                const QValue& qv) {
    d.validate();
    const double f = std::pow(d.mu[2] / d.lambda[0], t.n2) *
                     std::pow(d.lambda[1] / d.lambda[2], t.n1p) *
                     std::pow(d.mu[0] / d.mu[1], t.n3p);
    return f * r_element_value(t, qv);
}

// Diagonal similarity transform c1^{n1-n1'} c2^{n2-n2'} c3^{n3-n3'} R.
inline double similarity_transform(const SpinTuple6& t, double c1, double c2,
                                   double c3, const QValue& qv) {
    if (!(c1 > 0 && c2 > 0 && c3 > 0))
        throw Error("similarity constants must be positive");
    return std::pow(c1, t.n1 - t.n1p) * std::pow(c2, t.n2 - t.n2p) *
           std::pow(c3, t.n3 - t.n3p) * r_element_value(t, qv);
}

struct VerifyReport {
    std::size_t checked = 0;
    std::vector<std::string> failures;

    bool ok() const { return failures.empty(); }
};

namespace detail {

template <typename Fn>
void for_each_tuple(int maxn, Fn&& fn) {
    SpinTuple6 t;
    for (t.n1 = 0; t.n1 <= maxn; ++t.n1)
        for (t.n2 = 0; t.n2 <= maxn; ++t.n2)
            for (t.n3 = 0; t.n3 <= maxn; ++t.n3)
                for (t.n1p = 0; t.n1p <= maxn; ++t.n1p)
                    for (t.n2p = 0; t.n2p <= maxn; ++t.n2p)
                        for (t.n3p = 0; t.n3p <= maxn; ++t.n3p) fn(t);
}

} // namespace detail

// P13 symmetry: R_{n1,n2,n3}^{n1',n2',n3'} = R_{n3,n2,n1}^{n3',n2',n1'},
// exact, for all tuples with entries <= maxn.
inline VerifyReport verify_symmetry_p13(int maxn) {
    VerifyReport report;
    std::mutex m;
    std::vector<SpinTuple6> tuples;
    detail::for_each_tuple(maxn, [&](const SpinTuple6& t) { tuples.push_back(t); });
    parallel_for(tuples.size(), [&](std::size_t idx) {
        const SpinTuple6& t = tuples[idx];
        const SpinTuple6 swapped{t.n3, t.n2, t.n1, t.n3p, t.n2p, t.n1p};
        if (r_element(t) != r_element(swapped)) {
            std::lock_guard<std::mutex> lock(m);
            report.failures.push_back("P13 violated at " + t.to_string());
        }
    });
    report.checked = tuples.size();
    return report;
}

// Transpose symmetry: with S3|n> = q^{-n3^2} (q^2;q^2)_{n3} |n>, the identity
//   P12 (R)^{t3} P12 = q^{N2-N1} S3 R S3^{-1}
// is checked elementwise after clearing the diagonal factors:
//   q^{n3^2 - n3'^2} (q^2;q^2)_{n3'} R_{n2,n1,n3'}^{n2',n1',n3}
//     = q^{n2-n1} (q^2;q^2)_{n3} R_{n1,n2,n3}^{n1',n2',n3'}.
inline VerifyReport verify_symmetry_transpose(int maxn) {
    VerifyReport report;
    std::mutex m;
    std::vector<SpinTuple6> tuples;
    detail::for_each_tuple(maxn, [&](const SpinTuple6& t) { tuples.push_back(t); });
    parallel_for(tuples.size(), [&](std::size_t idx) {
        const SpinTuple6& t = tuples[idx];
        const SpinTuple6 lhs_idx{t.n2, t.n1, t.n3p, t.n2p, t.n1p, t.n3};
        const LaurentPoly lhs = (q_pochhammer(2, t.n3p) * r_element(lhs_idx))
                                    .shifted(t.n3 * t.n3 - t.n3p * t.n3p);
        const LaurentPoly rhs =
            (q_pochhammer(2, t.n3) * r_element(t)).shifted(t.n2 - t.n1);
        if (lhs != rhs) {
            std::lock_guard<std::mutex> lock(m);
            report.failures.push_back("transpose symmetry violated at " +
                                      t.to_string());
        }
    });
    report.checked = tuples.size();
    return report;
}

// Asymptotics: log R / log q along the scaled tuple Lambda*base approaches
// -(n1 n2 + n1' n3' + n2 n3); the residual must grow at most linearly. The
// returned report carries residual/Lambda for each scale.
struct AsymptoticReport {
    std::vector<double> residual_over_scale;
    bool linear_bound_ok = false;
};

inline AsymptoticReport asymptotic_exponent_check(const SpinTuple6& base,
                                                  int max_scale, const QValue& qv) {
    if (!base.satisfies_deltas() || !base.non_negative())
        throw Error("asymptotic check needs an admissible base tuple");
    AsymptoticReport report;
    const double logq = std::log(qv.q);
    for (int s = 1; s <= max_scale; ++s) {
        const SpinTuple6 t{s * base.n1, s * base.n2, s * base.n3,
                           s * base.n1p, s * base.n2p, s * base.n3p};
        const LaurentPoly& p = r_element(t);
        if (p.is_zero()) throw Error("scaled tuple has zero element");
        const double e = p.eval_log_abs(qv) / logq;
        const double predicted =
            -(double(t.n1) * t.n2 + double(t.n1p) * t.n3p + double(t.n2) * t.n3);
        report.residual_over_scale.push_back((e - predicted) / s);
    }
    // Linear growth of the residual means residual/Lambda stays bounded by
    // a constant calibrated on the small scales.
    double calib = 0.0;
    const std::size_t half = report.residual_over_scale.size() / 2;
    for (std::size_t i = 0; i < half; ++i)
        calib = std::max(calib, std::abs(report.residual_over_scale[i]));
    report.linear_bound_ok = true;
    for (std::size_t i = half; i < report.residual_over_scale.size(); ++i)
        if (std::abs(report.residual_over_scale[i]) > 1.25 * calib + 0.5)
            report.linear_bound_ok = false;
    return report;
}

} // namespace tetra3d
