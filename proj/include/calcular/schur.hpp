#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "calcular/errors.hpp"
#include "calcular/matrix.hpp"

namespace calcular {

// Unitary triangularization A = Q T Q* (complex Schur form) via Householder
// Hessenberg reduction followed by implicit single-shift QR with Wilkinson
// shifts.  Used to read joint eigenvalues off commuting families.
struct SchurResult {
    ComplexMatrix q;  // unitary
    ComplexMatrix t;  // upper triangular
};

namespace detail {

struct Givens {
    double c;  // real
    cpx s;
};

// G = [[c, s], [-conj(s), c]] with G (a, b)^T = (r, 0)^T.
inline Givens make_givens(cpx a, cpx b) {
    const double aa = std::abs(a), ab = std::abs(b);
    if (ab == 0.0) return {1.0, cpx(0.0)};
    const double rho = std::hypot(aa, ab);
    if (aa == 0.0) return {0.0, std::conj(b) / ab};
    const cpx phase = a / aa;
    return {aa / rho, phase * std::conj(b) / rho};
}

inline void apply_givens_rows(ComplexMatrix& m, const Givens& g, std::size_t i,
                              std::size_t col_lo, std::size_t col_hi) {
    for (std::size_t j = col_lo; j < col_hi; ++j) {
        const cpx x = m(i, j), y = m(i + 1, j);
        m(i, j) = g.c * x + g.s * y;
        m(i + 1, j) = -std::conj(g.s) * x + g.c * y;
    }
}

inline void apply_givens_cols(ComplexMatrix& m, const Givens& g, std::size_t j,
                              std::size_t row_lo, std::size_t row_hi) {
    for (std::size_t i = row_lo; i < row_hi; ++i) {
        const cpx x = m(i, j), y = m(i, j + 1);
        m(i, j) = g.c * x + std::conj(g.s) * y;
        m(i, j + 1) = -g.s * x + g.c * y;
    }
}

inline void hessenberg_reduce(ComplexMatrix& h, ComplexMatrix& q) {
    const std::size_t n = h.rows;
    if (n < 3) return;
    std::vector<cpx> u(n);
    for (std::size_t k = 0; k + 2 < n; ++k) {
        double norm_sq = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) norm_sq += std::norm(h(i, k));
        const double beta = std::sqrt(norm_sq);
        if (beta <= 1e-300) continue;
        const cpx x0 = h(k + 1, k);
        const cpx phase = (std::abs(x0) == 0.0) ? cpx(1.0) : x0 / std::abs(x0);
        double vnorm_sq = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) {
            cpx vi = h(i, k);
            if (i == k + 1) vi += phase * beta;
            u[i] = vi;
            vnorm_sq += std::norm(vi);
        }
        if (vnorm_sq <= 1e-300) continue;
        const double inv = 1.0 / std::sqrt(vnorm_sq);
        for (std::size_t i = k + 1; i < n; ++i) u[i] *= inv;

        // H <- P H, P = I - 2 u u*
        for (std::size_t j = k; j < n; ++j) {
            cpx dot = 0.0;
            for (std::size_t i = k + 1; i < n; ++i) dot += std::conj(u[i]) * h(i, j);
            dot *= 2.0;
            for (std::size_t i = k + 1; i < n; ++i) h(i, j) -= dot * u[i];
        }
        // H <- H P
        for (std::size_t i = 0; i < n; ++i) {
            cpx dot = 0.0;
            for (std::size_t j = k + 1; j < n; ++j) dot += h(i, j) * u[j];
            dot *= 2.0;
            for (std::size_t j = k + 1; j < n; ++j) h(i, j) -= dot * std::conj(u[j]);
        }
        // Q <- Q P
        for (std::size_t i = 0; i < n; ++i) {
            cpx dot = 0.0;
            for (std::size_t j = k + 1; j < n; ++j) dot += q(i, j) * u[j];
            dot *= 2.0;
            for (std::size_t j = k + 1; j < n; ++j) q(i, j) -= dot * std::conj(u[j]);
        }
        for (std::size_t i = k + 2; i < n; ++i) h(i, k) = 0.0;
    }
}

// Eigenvalue of [[a, b], [c, d]] closer to d.
inline cpx wilkinson_shift(cpx a, cpx b, cpx c, cpx d) {
    const cpx tr = a + d;
    const cpx disc = std::sqrt(tr * tr - 4.0 * (a * d - b * c));
    const cpx l1 = 0.5 * (tr + disc);
    const cpx l2 = 0.5 * (tr - disc);
    return (std::abs(l1 - d) <= std::abs(l2 - d)) ? l1 : l2;
}

}  // namespace detail

inline SchurResult schur_decompose(const ComplexMatrix& a) {
    require(a.square(), Err::DimensionMismatch, "schur_decompose needs a square matrix");
    require(a.all_finite(), Err::InvalidMatrix, "schur_decompose: non-finite entries");
    const std::size_t n = a.rows;
    SchurResult res{ComplexMatrix::identity(n), a};
    if (n <= 1) return res;

    ComplexMatrix& h = res.t;
    ComplexMatrix& q = res.q;
    detail::hessenberg_reduce(h, q);

    const double eps = std::numeric_limits<double>::epsilon();
    const double floor = 1e-30 * (1.0 + a.frobenius_norm());
    const std::size_t iter_cap = 60 * n + 100;
    std::size_t total_iters = 0;

    std::size_t hi = n - 1;
    std::size_t stall = 0;
    while (true) {
        // Zero negligible subdiagonals, then shrink the active window.
        for (std::size_t k = 1; k <= hi; ++k) {
            const double bound = eps * (std::abs(h(k - 1, k - 1)) + std::abs(h(k, k))) + floor;
            if (std::abs(h(k, k - 1)) <= bound) h(k, k - 1) = 0.0;
        }
        while (hi > 0 && h(hi, hi - 1) == cpx(0.0)) {
            --hi;
            stall = 0;
        }
        if (hi == 0) break;
        std::size_t lo = hi;
        while (lo > 0 && h(lo, lo - 1) != cpx(0.0)) --lo;

        if (++total_iters > iter_cap)
            fail(Err::NoConvergence, "schur_decompose: QR iteration cap reached");

        cpx mu = detail::wilkinson_shift(h(hi - 1, hi - 1), h(hi - 1, hi), h(hi, hi - 1),
                                         h(hi, hi));
        if (++stall % 16 == 0)  // deterministic exceptional shift
            mu = h(hi, hi) + cpx(0.75 * std::abs(h(hi, hi - 1)), 0.0);

        // Implicit single-shift bulge chase on [lo, hi].  The first rotation
        // is taken from the shifted leading column; each later one zeroes the
        // bulge entry h(k+1, k-1) created by the previous column update.
        for (std::size_t k = lo; k < hi; ++k) {
            const auto g = (k == lo)
                               ? detail::make_givens(h(lo, lo) - mu, h(lo + 1, lo))
                               : detail::make_givens(h(k, k - 1), h(k + 1, k - 1));
            const std::size_t row_from = (k == lo) ? lo : k - 1;
            detail::apply_givens_rows(h, g, k, row_from, n);
            if (k > lo) h(k + 1, k - 1) = 0.0;
            detail::apply_givens_cols(h, g, k, 0, std::min(hi, k + 2) + 1);
            detail::apply_givens_cols(q, g, k, 0, n);
        }
    }

    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) h(i, j) = 0.0;
    return res;
}

}  // namespace calcular
