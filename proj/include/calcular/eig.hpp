#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "calcular/errors.hpp"
#include "calcular/matrix.hpp"

namespace calcular {

struct HermitianEigResult {
    std::vector<double> eigenvalues;  // descending
    ComplexMatrix eigenvectors;       // unitary, columns
};

namespace detail {

// One complex Jacobi rotation eliminating H(p,q).  The 2x2 pivot block is
// phase-rotated to a real symmetric block, which the classic (c, t) formulas
// then diagonalize.
inline void jacobi_rotate(ComplexMatrix& h, ComplexMatrix& v, std::size_t p, std::size_t q) {
    const cpx apq = h(p, q);
    const double abs_apq = std::abs(apq);
    if (abs_apq == 0.0) return;
    const cpx phase = apq / abs_apq;
    const double app = h(p, p).real();
    const double aqq = h(q, q).real();
    const double tau = (aqq - app) / (2.0 * abs_apq);
    const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
    const double c = 1.0 / std::sqrt(1.0 + t * t);
    const double s = t * c;

    // Unitary G acts on columns (p, q):
    //   G(p,p) = c*phase, G(p,q) = s*phase, G(q,p) = -s, G(q,q) = c.
    const cpx gpp = c * phase, gpq = s * phase;
    const cpx gqp = -s, gqq = c;

    const std::size_t n = h.rows;
    for (std::size_t i = 0; i < n; ++i) {  // H <- H G
        const cpx hip = h(i, p), hiq = h(i, q);
        h(i, p) = hip * gpp + hiq * gqp;
        h(i, q) = hip * gpq + hiq * gqq;
    }
    for (std::size_t j = 0; j < n; ++j) {  // H <- G* H
        const cpx hpj = h(p, j), hqj = h(q, j);
        h(p, j) = std::conj(gpp) * hpj + std::conj(gqp) * hqj;
        h(q, j) = std::conj(gpq) * hpj + std::conj(gqq) * hqj;
    }
    h(p, q) = 0.0;
    h(q, p) = 0.0;
    h(p, p) = cpx(h(p, p).real(), 0.0);
    h(q, q) = cpx(h(q, q).real(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {  // V <- V G
        const cpx vip = v(i, p), viq = v(i, q);
        v(i, p) = vip * gpp + viq * gqp;
        v(i, q) = vip * gpq + viq * gqq;
    }
}

inline double off_diagonal_norm(const ComplexMatrix& h) {
    double s = 0.0;
    for (std::size_t i = 0; i < h.rows; ++i)
        for (std::size_t j = 0; j < h.cols; ++j)
            if (i != j) s += std::norm(h(i, j));
    return std::sqrt(s);
}

}  // namespace detail

// Cyclic complex Jacobi diagonalization of a Hermitian matrix.  Accurate and
// ample for the sizes in play here (n <= 64); capped at 100 sweeps.
inline HermitianEigResult hermitian_eig(const ComplexMatrix& h_in, double tol = 1e-10) {
    require(h_in.square(), Err::DimensionMismatch, "hermitian_eig needs a square matrix");
    require(h_in.all_finite(), Err::InvalidMatrix, "hermitian_eig: non-finite entries");
    const std::size_t n = h_in.rows;
    const double scale = h_in.frobenius_norm();
    require(hermitian_defect(h_in) <= tol * (1.0 + scale), Err::NotHermitian,
            "hermitian_eig: symmetry defect above tolerance");

    ComplexMatrix h = hermitize(h_in);
    ComplexMatrix v = ComplexMatrix::identity(n);

    if (n > 1) {
        const double stop = 1e-14 * (1.0 + scale);
        const double pivot_floor = 1e-18 * (1.0 + scale);
        bool converged = false;
        for (int sweep = 0; sweep < 100; ++sweep) {
            if (detail::off_diagonal_norm(h) <= stop) {
                converged = true;
                break;
            }
            for (std::size_t p = 0; p + 1 < n; ++p)
                for (std::size_t q = p + 1; q < n; ++q)
                    if (std::abs(h(p, q)) > pivot_floor) detail::jacobi_rotate(h, v, p, q);
        }
        if (!converged && detail::off_diagonal_norm(h) > 1e-11 * (1.0 + scale))
            fail(Err::NoConvergence, "hermitian_eig: sweep cap reached");
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return h(i, i).real() > h(j, j).real(); });

    HermitianEigResult res;
    res.eigenvalues.resize(n);
    res.eigenvectors = ComplexMatrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        res.eigenvalues[k] = h(order[k], order[k]).real();
        for (std::size_t i = 0; i < n; ++i) res.eigenvectors(i, k) = v(i, order[k]);
    }
    return res;
}

// Largest singular value, computed as sqrt(lambda_max(M* M)); only the top
// value is ever needed and matrices are small, so no full SVD.
inline double operator_norm(const ComplexMatrix& m) {
    require(m.all_finite(), Err::InvalidMatrix, "operator_norm: non-finite entries");
    if (m.rows == 0 || m.cols == 0) return 0.0;
    const ComplexMatrix gram =
        (m.rows >= m.cols) ? m.adjoint() * m : m * m.adjoint();
    const auto eig = hermitian_eig(hermitize(gram), 1e-8);
    return std::sqrt(std::max(0.0, eig.eigenvalues.front()));
}

// Rank-revealing factor L with L L* = G for Hermitian PSD G.  Eigenvalues in
// [-clip, clip] are treated as zero; anything below -clip is a hard failure.
inline ComplexMatrix psd_factor(const ComplexMatrix& g, double clip) {
    const auto eig = hermitian_eig(g, 1e-9);
    const std::size_t n = g.rows;
    if (n == 0) return ComplexMatrix(0, 0);
    require(eig.eigenvalues.back() >= -clip, Err::NotPSD,
            "psd_factor: eigenvalue below -clip");
    std::size_t rank = 0;
    while (rank < n && eig.eigenvalues[rank] > clip) ++rank;
    ComplexMatrix l(n, rank);
    for (std::size_t k = 0; k < rank; ++k) {
        const double w = std::sqrt(eig.eigenvalues[k]);
        for (std::size_t i = 0; i < n; ++i) l(i, k) = w * eig.eigenvectors(i, k);
    }
    return l;
}

inline double min_eigenvalue(const ComplexMatrix& h, double herm_tol = 1e-9) {
    const auto eig = hermitian_eig(h, herm_tol);
    return h.rows == 0 ? 0.0 : eig.eigenvalues.back();
}

}  // namespace calcular
