#pragma once

// Exact Laurent polynomials in q with rational coefficients. This is the
// scalar type of every exact identity check in the library: values are kept
// in canonical form (no zero coefficients) so that equality is plain
// coefficient-map equality.

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <utility>

#include "tetra3d/errors.hpp"

namespace tetra3d {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// q in (0,1), the single free parameter of the model.
struct QValue {
    double q;

    explicit QValue(double value) : q(value) {
        if (!(q > 0.0 && q < 1.0))
            throw Error("QValue must lie in (0,1), got " + std::to_string(value));
    }
};

class LaurentPoly {
  public:
    using Map = std::map<int, Rational>;

    LaurentPoly() = default;

    static LaurentPoly zero() { return LaurentPoly(); }

    static LaurentPoly one() { return monomial(0, 1); }

    static LaurentPoly monomial(int exponent, Rational coeff) {
        LaurentPoly p;
        if (coeff != 0) p.coeffs_[exponent] = std::move(coeff);
        return p;
    }

    const Map& coeffs() const { return coeffs_; }

    bool is_zero() const { return coeffs_.empty(); }

    bool is_one() const {
        return coeffs_.size() == 1 && coeffs_.begin()->first == 0 &&
               coeffs_.begin()->second == 1;
    }

    // True when every coefficient is an integer.
    bool has_integer_coeffs() const {
        for (const auto& [e, c] : coeffs_)
            if (boost::multiprecision::denominator(c) != 1) return false;
        return true;
    }

    int min_exponent() const {
        if (is_zero()) throw Error("min_exponent of zero polynomial");
        return coeffs_.begin()->first;
    }

    int max_exponent() const {
        if (is_zero()) throw Error("max_exponent of zero polynomial");
        return coeffs_.rbegin()->first;
    }

    Rational coeff(int exponent) const {
        auto it = coeffs_.find(exponent);
        return it == coeffs_.end() ? Rational(0) : it->second;
    }

    LaurentPoly& operator+=(const LaurentPoly& other) {
        for (const auto& [e, c] : other.coeffs_) add_term(e, c);
        return *this;
    }

    LaurentPoly& operator-=(const LaurentPoly& other) {
        for (const auto& [e, c] : other.coeffs_) add_term(e, -c);
        return *this;
    }

    friend LaurentPoly operator+(LaurentPoly a, const LaurentPoly& b) { return a += b; }

    friend LaurentPoly operator-(LaurentPoly a, const LaurentPoly& b) { return a -= b; }

    friend LaurentPoly operator-(const LaurentPoly& a) {
        LaurentPoly r;
        for (const auto& [e, c] : a.coeffs_) r.coeffs_[e] = -c;
        return r;
    }

    friend LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b) {
        LaurentPoly r;
        for (const auto& [ea, ca] : a.coeffs_)
            for (const auto& [eb, cb] : b.coeffs_) r.add_term(ea + eb, ca * cb);
        return r;
    }

    LaurentPoly& operator*=(const LaurentPoly& other) { return *this = *this * other; }

    // Multiply by q^k.
    LaurentPoly shifted(int k) const {
        LaurentPoly r;
        for (const auto& [e, c] : coeffs_) r.coeffs_[e + k] = c;
        return r;
    }

    LaurentPoly scaled(const Rational& s) const {
        LaurentPoly r;
        if (s == 0) return r;
        for (const auto& [e, c] : coeffs_) r.coeffs_[e] = c * s;
        return r;
    }

    friend bool operator==(const LaurentPoly& a, const LaurentPoly& b) {
        return a.coeffs_ == b.coeffs_;
    }

    friend bool operator!=(const LaurentPoly& a, const LaurentPoly& b) { return !(a == b); }

    // Numeric value at 0<q<1. Terms are accumulated in exponent order with
    // Neumaier compensation so cancellations between the huge low-exponent
    // terms do not silently eat the small ones.
    double eval(const QValue& qv) const {
        if (is_zero()) return 0.0;
        const double logq = std::log(qv.q);
        const double max_abs_exp = std::max(std::abs((double)min_exponent()),
                                            std::abs((double)max_exponent()));
        if (max_abs_exp * std::abs(logq) > 700.0)
            throw OverflowError("exponent range exceeds double at q=" +
                                std::to_string(qv.q));
        double sum = 0.0, comp = 0.0;
        for (const auto& [e, c] : coeffs_) {
            const double term = static_cast<double>(c) * int_pow(qv.q, e);
            const double t = sum + term;
            if (std::abs(sum) >= std::abs(term))
                comp += (sum - t) + term;
            else
                comp += (term - t) + sum;
            sum = t;
        }
        return sum + comp;
    }

    // log|p(q)| for positive-valued polynomials far outside double range:
    // factors out q^{min_exponent} before summing.
    double eval_log_abs(const QValue& qv) const {
        if (is_zero()) throw Error("eval_log_abs of zero polynomial");
        const double logq = std::log(qv.q);
        const int e0 = min_exponent();
        double sum = 0.0;
        for (const auto& [e, c] : coeffs_)
            sum += static_cast<double>(c) * std::exp((e - e0) * logq);
        if (sum <= 0.0)
            throw Error("eval_log_abs: leading-normalized sum is not positive");
        return e0 * logq + std::log(sum);
    }

    std::string to_string() const {
        if (is_zero()) return "0";
        std::ostringstream os;
        bool first = true;
        for (const auto& [e, c] : coeffs_) {
            if (!first) os << (c > 0 ? " + " : " - ");
            else if (c < 0) os << "-";
            first = false;
            Rational a = boost::multiprecision::abs(c);
            if (a != 1 || e == 0) os << a;
            if (e != 0) {
                if (a != 1) os << "*";
                os << "q^" << e;
            }
        }
        return os.str();
    }

  private:
    // q^e by repeated squaring; exact when q is a power of two
    static double int_pow(double q, int e) {
        const bool neg = e < 0;
        unsigned long long k = neg ? -(long long)e : (long long)e;
        double base = q, r = 1.0;
        while (k) {
            if (k & 1) r *= base;
            base *= base;
            k >>= 1;
        }
        return neg ? 1.0 / r : r;
    }

    void add_term(int e, const Rational& c) {
        auto it = coeffs_.find(e);
        if (it == coeffs_.end()) {
            if (c != 0) coeffs_.emplace(e, c);
        } else {
            it->second += c;
            if (it->second == 0) coeffs_.erase(it);
        }
    }

    Map coeffs_;
};

// (q^m; q^2)_n = prod_{k=0..n-1} (1 - q^{m+2k}); m may be negative.
inline LaurentPoly q_pochhammer(int m, int n) {
    if (n < 0) throw Error("q_pochhammer needs n >= 0");
    LaurentPoly r = LaurentPoly::one();
    for (int k = 0; k < n; ++k)
        r *= LaurentPoly::one() - LaurentPoly::monomial(m + 2 * k, 1);
    return r;
}

// Exact Laurent division; throws if the remainder is nonzero.
inline LaurentPoly divide_exact(const LaurentPoly& num, const LaurentPoly& den) {
    if (den.is_zero()) throw Error("divide_exact by zero polynomial");
    if (num.is_zero()) return LaurentPoly::zero();
    const int dmin = den.min_exponent();
    const Rational dlead = den.coeff(dmin);
    std::map<int, Rational> cur(num.coeffs().begin(), num.coeffs().end());
    LaurentPoly q;
    while (!cur.empty()) {
        const int cmin = cur.begin()->first;
        const Rational f = cur.begin()->second / dlead;
        const int qe = cmin - dmin;
        q += LaurentPoly::monomial(qe, f);
        for (const auto& [e, c] : den.coeffs()) {
            const int ne = e + qe;
            auto it = cur.find(ne);
            Rational v = (it == cur.end() ? Rational(0) : it->second) - f * c;
            if (v == 0) {
                if (it != cur.end()) cur.erase(it);
            } else {
                cur[ne] = v;
            }
        }
        if (!cur.empty() && cur.rbegin()->first > num.max_exponent() + 1)
            throw Error("divide_exact: division does not terminate");
    }
    return q;
}

} // namespace tetra3d
