#pragma once

// The Q_n(x,y,z) polynomials evaluated on the q-power lattice
// x = q^{-2 a1}, y = q^{-2 a2}, z = q^{-2 a3}. Two independent routes are
// provided: the defining recurrence
//
//   Q_0 = 1,
//   Q_{n+1}(x,y,z) = (x-1)(z-1) Q_n(x q^2, y, z q^2)
//                    + x z (y-1) q^{2n} Q_n(x, y q^2, z)
//
// which shifts the a's by integers and is memoized, and a truncated
// 2phi1 basic-hypergeometric form restricted to its pole-free domain.

#include <array>
#include <map>
#include <mutex>
#include <tuple>

#include "tetra3d/json_io.hpp"
#include "tetra3d/laurent.hpp"

namespace tetra3d {

class QPolyCache {
  public:
    using Key = std::array<int, 4>; // n, a1, a2, a3

    const LaurentPoly& get(int n, int a1, int a2, int a3) {
        const Key key{n, a1, a2, a3};
        {
            std::lock_guard<std::mutex> lock(mutex_);
            auto it = table_.find(key);
            if (it != table_.end()) return it->second;
        }
        LaurentPoly value = compute(n, a1, a2, a3);
        std::lock_guard<std::mutex> lock(mutex_);
        return table_.emplace(key, std::move(value)).first->second;
    }

    std::size_t size() const {
        std::lock_guard<std::mutex> lock(mutex_);
        return table_.size();
    }

    json to_json() const {
        std::lock_guard<std::mutex> lock(mutex_);
        json j = json::array();
        for (const auto& [k, v] : table_) {
            j.push_back(json{{"key", {k[0], k[1], k[2], k[3]}},
                             {"poly", laurent_to_json(v)}});
        }
        return j;
    }

    void merge_json(const json& j) {
        std::lock_guard<std::mutex> lock(mutex_);
        for (const auto& entry : j) {
            Key k{entry["key"][0], entry["key"][1], entry["key"][2], entry["key"][3]};
            table_.emplace(k, laurent_from_json(entry["poly"]));
        }
    }

  private:
    LaurentPoly compute(int n, int a1, int a2, int a3) {
        if (n < 0) throw Error("Q_n needs n >= 0");
        if (n == 0) return LaurentPoly::one();
        // x q^2 corresponds to a1-1, y q^2 to a2-1, z q^2 to a3-1.
        const LaurentPoly x = LaurentPoly::monomial(-2 * a1, 1);
        const LaurentPoly z = LaurentPoly::monomial(-2 * a3, 1);
        const LaurentPoly one = LaurentPoly::one();
        LaurentPoly first = (x - one) * (z - one) * get(n - 1, a1 - 1, a2, a3 - 1);
        LaurentPoly second = (x * z).shifted(2 * (n - 1)) *
                             (LaurentPoly::monomial(-2 * a2, 1) - one) *
                             get(n - 1, a1, a2 - 1, a3);
        return first + second;
    }

    mutable std::mutex mutex_;
    std::map<Key, LaurentPoly> table_;
};

inline QPolyCache& q_poly_cache() {
    static QPolyCache cache;
    return cache;
}

// Q_n at (a1,a2,a3) via the recurrence.
inline const LaurentPoly& q_poly_recursive(int n, int a1, int a2, int a3) {
    return q_poly_cache().get(n, a1, a2, a3);
}

namespace detail {

// Laurent fraction accumulated without reduction; small denominators only.
struct Fraction {
    LaurentPoly num = LaurentPoly::zero();
    LaurentPoly den = LaurentPoly::one();

    void add(const LaurentPoly& n2, const LaurentPoly& d2) {
        num = num * d2 + n2 * den;
        den = den * d2;
    }
};

} // namespace detail

// Q_n via the truncated 2phi1 form, written with the lower parameter tied to
// the third argument (the polynomials are symmetric under x <-> z):
//
//   Q_n = (z;q^2)_n * sum_{k=0..n} [(q^{-2n};q^2)_k (b;q^2)_k]
//                      / [(q^2;q^2)_k (c;q^2)_k] * (x y q^{2n})^k
//   with b = q^{2-2n}/(z y), c = q^{2-2n}/z.
//
// Throws PoleDomainError when a (c;q^2)_k factor vanishes inside the sum,
// which happens exactly when n > a3.
inline LaurentPoly q_poly_hypergeometric(int n, int a1, int a2, int a3) {
    if (n < 0) throw Error("Q_n needs n >= 0");
    const int b_exp = 2 - 2 * n + 2 * a3 + 2 * a2; // b = q^{2-2n+2a3+2a2}
    const int c_exp = 2 - 2 * n + 2 * a3;          // c = q^{2-2n+2a3}
    const int arg_exp = 2 * n - 2 * a1 - 2 * a2;   // x y q^{2n}
    detail::Fraction sum;
    LaurentPoly num_k = LaurentPoly::one();
    LaurentPoly den_k = LaurentPoly::one();
    for (int k = 0; k <= n; ++k) {
        if (k > 0) {
            const LaurentPoly one = LaurentPoly::one();
            num_k *= (one - LaurentPoly::monomial(-2 * n + 2 * (k - 1), 1)) *
                     (one - LaurentPoly::monomial(b_exp + 2 * (k - 1), 1));
            const LaurentPoly c_factor =
                one - LaurentPoly::monomial(c_exp + 2 * (k - 1), 1);
            if (c_factor.is_zero())
                throw PoleDomainError("2phi1 lower parameter hits q^0 at k=" +
                                      std::to_string(k) + " (n > a3)");
            den_k *= (one - LaurentPoly::monomial(2 * k, 1)) * c_factor;
        }
        sum.add(num_k.shifted(arg_exp * k), den_k);
    }
    const LaurentPoly prefactor = q_pochhammer(-2 * a3, n);
    return divide_exact(prefactor * sum.num, sum.den);
}

} // namespace tetra3d
