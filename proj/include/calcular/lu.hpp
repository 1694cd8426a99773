#pragma once

#include <cmath>
#include <vector>

#include "calcular/errors.hpp"
#include "calcular/matrix.hpp"

namespace calcular {

// Partial-pivot LU of a square complex matrix; the workhorse behind every
// resolvent and inverse in the library.
struct LuFactors {
    ComplexMatrix lu;        // L strictly below diagonal (unit), U on/above
    std::vector<std::size_t> piv;
    std::size_t n = 0;
};

inline LuFactors lu_factor(const ComplexMatrix& a_in) {
    require(a_in.square(), Err::DimensionMismatch, "lu_factor needs a square matrix");
    LuFactors f;
    f.n = a_in.rows;
    f.lu = a_in;
    f.piv.resize(f.n);
    const double tiny = 1e-300 + 1e-16 * a_in.max_abs();
    for (std::size_t k = 0; k < f.n; ++k) {
        std::size_t p = k;
        double best = std::abs(f.lu(k, k));
        for (std::size_t i = k + 1; i < f.n; ++i) {
            const double v = std::abs(f.lu(i, k));
            if (v > best) {
                best = v;
                p = i;
            }
        }
        require(best > tiny, Err::SingularMatrix, "lu_factor: vanishing pivot");
        f.piv[k] = p;
        if (p != k)
            for (std::size_t j = 0; j < f.n; ++j) std::swap(f.lu(k, j), f.lu(p, j));
        const cpx inv_pivot = 1.0 / f.lu(k, k);
        for (std::size_t i = k + 1; i < f.n; ++i) {
            const cpx m = f.lu(i, k) * inv_pivot;
            f.lu(i, k) = m;
            if (m == cpx(0.0)) continue;
            for (std::size_t j = k + 1; j < f.n; ++j) f.lu(i, j) -= m * f.lu(k, j);
        }
    }
    return f;
}

inline ComplexMatrix lu_solve(const LuFactors& f, const ComplexMatrix& b) {
    require(b.rows == f.n, Err::DimensionMismatch, "lu_solve: rhs row count");
    ComplexMatrix x = b;
    for (std::size_t k = 0; k < f.n; ++k)
        if (f.piv[k] != k)
            for (std::size_t j = 0; j < x.cols; ++j) std::swap(x(k, j), x(f.piv[k], j));
    for (std::size_t k = 0; k < f.n; ++k)
        for (std::size_t i = k + 1; i < f.n; ++i) {
            const cpx m = f.lu(i, k);
            if (m == cpx(0.0)) continue;
            for (std::size_t j = 0; j < x.cols; ++j) x(i, j) -= m * x(k, j);
        }
    for (std::size_t kk = f.n; kk-- > 0;) {
        const cpx inv_diag = 1.0 / f.lu(kk, kk);
        for (std::size_t j = 0; j < x.cols; ++j) {
            cpx s = x(kk, j);
            for (std::size_t i = kk + 1; i < f.n; ++i) s -= f.lu(kk, i) * x(i, j);
            x(kk, j) = s * inv_diag;
        }
    }
    return x;
}

inline ComplexMatrix solve(const ComplexMatrix& a, const ComplexMatrix& b) {
    return lu_solve(lu_factor(a), b);
}

inline ComplexMatrix inverse(const ComplexMatrix& a) {
    return lu_solve(lu_factor(a), ComplexMatrix::identity(a.rows));
}

inline double one_norm(const ComplexMatrix& a) {
    double best = 0.0;
    for (std::size_t j = 0; j < a.cols; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.rows; ++i) s += std::abs(a(i, j));
        best = std::max(best, s);
    }
    return best;
}

// 1-norm condition number via the explicit inverse; exact and cheap at these
// sizes.  Returns +inf when the factorization breaks down.
inline double condition_estimate(const ComplexMatrix& a) {
    if (a.rows == 0) return 1.0;
    try {
        return one_norm(a) * one_norm(inverse(a));
    } catch (const Error&) {
        return std::numeric_limits<double>::infinity();
    }
}

}  // namespace calcular
