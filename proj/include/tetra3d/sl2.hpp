#pragma once

// The explicit higher-spin sl2 R-matrix (the N=2 oracle for the composite
// construction) and the six-vertex R-matrix it degenerates to at I=J=1.
// Comparisons against composite blocks are always modulo one scalar per
// block; the chain construction additionally carries the diagonal gauge
// lambda^{i1 - i1'} relative to this normalization, with lambda = sqrt(w).

#include <cmath>
#include <string>
#include <vector>

#include "tetra3d/composite.hpp"
#include "tetra3d/laurent.hpp"

namespace tetra3d {

struct Sl2Element {
    int I = 0, J = 0;
    int i1 = 0, j1 = 0, i1p = 0, j1p = 0;
    double lambda = 1.0; // w = lambda^2
};

namespace detail {

inline double poch_num(double x, double p, int n) {
    double r = 1.0;
    for (int t = 0; t < n; ++t) r *= 1.0 - x * std::pow(p, t);
    return r;
}

} // namespace detail

// Double-sum form of the higher-spin R-matrix; m(I,J) = min(I,J).
inline double r_sl2(const Sl2Element& e, const QValue& qv) {
    const double q = qv.q;
    if (!(e.lambda > 0)) throw Error("r_sl2 needs lambda > 0");
    if (e.i1 < 0 || e.i1 > e.I || e.i1p < 0 || e.i1p > e.I || e.j1 < 0 ||
        e.j1 > e.J || e.j1p < 0 || e.j1p > e.J)
        throw Error("r_sl2 index out of range");
    if (e.i1 + e.j1 != e.i1p + e.j1p) return 0.0;
    const int m = std::min(e.I, e.J);
    const double w = e.lambda * e.lambda;
    for (int k = 0; k <= e.i1; ++k)
        for (int l = 0; l <= e.I - e.i1; ++l)
            if (std::abs(1.0 - w * std::pow(q, e.I - e.J - 2 * k - 2 * l)) < 1e-12)
                throw PoleProximityError("lambda^2 too close to q^{I-J-2k-2l}");

    double pref = std::pow(q, e.i1 * e.i1 + (e.I - e.i1) * (e.J - e.j1p) -
                                  e.i1p * (e.i1p - e.j1) + 2 * e.I +
                                  0.5 * e.I * e.J - 0.5 * m);
    pref /= detail::poch_num(q * q, q * q, e.i1) *
            detail::poch_num(q * q, q * q, e.I - e.i1);
    pref *= std::pow(e.lambda, e.i1 - e.i1p - m) *
            detail::poch_num(w * std::pow(q, -e.I - e.J), q * q, m + 1);

    double sum = 0.0;
    for (int k = 0; k <= e.i1; ++k) {
        for (int l = 0; l <= e.I - e.i1; ++l) {
            double t = ((k + l) % 2 == 0 ? 1.0 : -1.0) *
                       std::pow(q, 2 * k * (e.i1p - e.j1) -
                                       2 * l * (e.J - e.I - e.j1 + e.i1));
            t /= std::pow(q, k * (k + 1) + l * (l + 1)) *
                 (1.0 - w * std::pow(q, e.I - e.J - 2 * k - 2 * l));
            t *= detail::poch_num(std::pow(q, -2 * e.i1), q * q, k) *
                 detail::poch_num(std::pow(q, 2 + 2 * e.j1), q * q, k) *
                 detail::poch_num(std::pow(q, -2 * e.j1p), q * q, e.i1 - k) /
                 detail::poch_num(q * q, q * q, k);
            t *= detail::poch_num(std::pow(q, -2 * (e.I - e.i1)), q * q, l) *
                 detail::poch_num(std::pow(q, 2 * (1 + e.J - e.j1)), q * q, l) *
                 detail::poch_num(std::pow(q, -2 * (e.J - e.j1p)), q * q,
                                  e.I - e.i1 - l) /
                 detail::poch_num(q * q, q * q, l);
            sum += t;
        }
    }
    return pref * sum;
}

// The six nonzero weights of the six-vertex R-matrix.
inline double six_vertex(int i1, int j1, int i1p, int j1p, double lambda,
                         const QValue& qv) {
    if (!(lambda > 0)) throw Error("six_vertex needs lambda > 0");
    const double q = qv.q;
    if (i1 == j1 && i1 == i1p && i1 == j1p) return q * lambda - 1.0 / (q * lambda);
    if (i1 == i1p && j1 == j1p && i1 != j1) return lambda - 1.0 / lambda;
    if (i1 == j1p && j1 == i1p && i1 != j1) return q - 1.0 / q;
    return 0.0;
}

struct CompareReport {
    double scalar = 0.0;
    double max_rel_dev = 0.0;
    std::size_t compared = 0;
    bool ok = false;
};

namespace detail {

// Proportionality of two equally-shaped matrices up to one scalar fixed on
// the first entry above the magnitude floor, in frozen basis order.
inline CompareReport proportional(const std::vector<double>& a,
                                  const std::vector<double>& b, double tol,
                                  double floor = 1e-10) {
    CompareReport report;
    double scale_a = 0.0, scale_b = 0.0;
    for (double v : a) scale_a = std::max(scale_a, std::abs(v));
    for (double v : b) scale_b = std::max(scale_b, std::abs(v));
    if (scale_a == 0.0 || scale_b == 0.0)
        throw DegenerateBlockError("block is identically zero");
    std::size_t ref = a.size();
    for (std::size_t t = 0; t < a.size(); ++t) {
        if (std::abs(a[t]) > floor * scale_a && std::abs(b[t]) > floor * scale_b) {
            ref = t;
            break;
        }
    }
    if (ref == a.size())
        throw DegenerateBlockError("no reference entry above magnitude floor");
    report.scalar = a[ref] / b[ref];
    for (std::size_t t = 0; t < a.size(); ++t) {
        const double dev = std::abs(a[t] - report.scalar * b[t]);
        report.max_rel_dev =
            std::max(report.max_rel_dev, dev / (scale_a > 0 ? scale_a : 1.0));
        ++report.compared;
    }
    report.ok = report.max_rel_dev <= tol;
    return report;
}

} // namespace detail

// Extracts the N=2 composite block (I,J) and checks it is proportional to
// the sl2 R-matrix at lambda = sqrt(w), after the lambda^{i1-i1'} gauge.
inline CompareReport compare_composite_sl2(int I, int J, double w,
                                           const QValue& qv, double tol = 1e-8) {
    const CompositeBlock block = composite_block(2, I, J, w, qv, 1e-13);
    const double lambda = std::sqrt(w);
    const std::size_t dim = block.dim();
    std::vector<double> oracle(dim * dim, 0.0);
    for (std::size_t row = 0; row < dim; ++row) {
        const auto& i = block.basis_i[row / block.basis_j.size()];
        const auto& j = block.basis_j[row % block.basis_j.size()];
        for (std::size_t col = 0; col < dim; ++col) {
            const auto& ip = block.basis_i[col / block.basis_j.size()];
            const auto& jp = block.basis_j[col % block.basis_j.size()];
            const Sl2Element e{I, J, i[0], j[0], ip[0], jp[0], lambda};
            oracle[row * dim + col] =
                std::pow(lambda, i[0] - ip[0]) * r_sl2(e, qv);
        }
    }
    return detail::proportional(block.entries, oracle, tol);
}

// I=J=1 block against the bare six-vertex weights, same gauge.
inline CompareReport compare_composite_six_vertex(double w, const QValue& qv,
                                                  double tol = 1e-8) {
    const CompositeBlock block = composite_block(2, 1, 1, w, qv, 1e-13);
    const double lambda = std::sqrt(w);
    const std::size_t dim = block.dim();
    std::vector<double> oracle(dim * dim, 0.0);
    for (std::size_t row = 0; row < dim; ++row) {
        const auto& i = block.basis_i[row / block.basis_j.size()];
        const auto& j = block.basis_j[row % block.basis_j.size()];
        for (std::size_t col = 0; col < dim; ++col) {
            const auto& ip = block.basis_i[col / block.basis_j.size()];
            const auto& jp = block.basis_j[col % block.basis_j.size()];
            oracle[row * dim + col] =
                std::pow(lambda, i[0] - ip[0]) *
                six_vertex(i[0], j[0], ip[0], jp[0], lambda, qv);
        }
    }
    return detail::proportional(block.entries, oracle, tol);
}

} // namespace tetra3d
