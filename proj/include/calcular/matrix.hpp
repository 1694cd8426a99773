#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include "calcular/errors.hpp"

namespace calcular {

using cpx = std::complex<double>;

// Dense complex matrix, row-major.  Everything in the library is small
// (n <= ~256), so there is no blocking or sparsity here; operations are
// plain loops and values are immutable by convention once built.
struct ComplexMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<cpx> a;

    ComplexMatrix() = default;
    ComplexMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c) {}

    static ComplexMatrix zeros(std::size_t r, std::size_t c) { return ComplexMatrix(r, c); }

    static ComplexMatrix identity(std::size_t n) {
        ComplexMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static ComplexMatrix diagonal(const std::vector<cpx>& d) {
        ComplexMatrix m(d.size(), d.size());
        for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
        return m;
    }

    static ComplexMatrix from_rows(std::initializer_list<std::initializer_list<cpx>> data) {
        const std::size_t r = data.size();
        const std::size_t c = r == 0 ? 0 : data.begin()->size();
        ComplexMatrix m(r, c);
        std::size_t i = 0;
        for (const auto& row : data) {
            require(row.size() == c, Err::DimensionMismatch, "ragged row in matrix literal");
            std::size_t j = 0;
            for (const cpx& v : row) m(i, j++) = v;
            ++i;
        }
        require(m.all_finite(), Err::InvalidMatrix, "non-finite entry in matrix literal");
        return m;
    }

    cpx& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    const cpx& operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

    bool square() const { return rows == cols; }

    bool all_finite() const {
        for (const cpx& v : a)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
        return true;
    }

    ComplexMatrix adjoint() const {
        ComplexMatrix m(cols, rows);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j) m(j, i) = std::conj((*this)(i, j));
        return m;
    }

    ComplexMatrix transpose() const {
        ComplexMatrix m(cols, rows);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j) m(j, i) = (*this)(i, j);
        return m;
    }

    ComplexMatrix conj() const {
        ComplexMatrix m(rows, cols);
        for (std::size_t k = 0; k < a.size(); ++k) m.a[k] = std::conj(a[k]);
        return m;
    }

    cpx trace() const {
        cpx t = 0.0;
        for (std::size_t i = 0; i < std::min(rows, cols); ++i) t += (*this)(i, i);
        return t;
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (const cpx& v : a) s += std::norm(v);
        return std::sqrt(s);
    }

    double max_abs() const {
        double m = 0.0;
        for (const cpx& v : a) m = std::max(m, std::abs(v));
        return m;
    }

    ComplexMatrix block(std::size_t i0, std::size_t j0, std::size_t r, std::size_t c) const {
        ComplexMatrix m(r, c);
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < c; ++j) m(i, j) = (*this)(i0 + i, j0 + j);
        return m;
    }

    void set_block(std::size_t i0, std::size_t j0, const ComplexMatrix& m) {
        for (std::size_t i = 0; i < m.rows; ++i)
            for (std::size_t j = 0; j < m.cols; ++j) (*this)(i0 + i, j0 + j) = m(i, j);
    }

    friend bool operator==(const ComplexMatrix& x, const ComplexMatrix& y) {
        return x.rows == y.rows && x.cols == y.cols && x.a == y.a;
    }
};

inline ComplexMatrix operator+(const ComplexMatrix& x, const ComplexMatrix& y) {
    require(x.rows == y.rows && x.cols == y.cols, Err::DimensionMismatch, "matrix add");
    ComplexMatrix m(x.rows, x.cols);
    for (std::size_t k = 0; k < m.a.size(); ++k) m.a[k] = x.a[k] + y.a[k];
    return m;
}

inline ComplexMatrix operator-(const ComplexMatrix& x, const ComplexMatrix& y) {
    require(x.rows == y.rows && x.cols == y.cols, Err::DimensionMismatch, "matrix sub");
    ComplexMatrix m(x.rows, x.cols);
    for (std::size_t k = 0; k < m.a.size(); ++k) m.a[k] = x.a[k] - y.a[k];
    return m;
}

inline ComplexMatrix operator*(const cpx& s, const ComplexMatrix& x) {
    ComplexMatrix m(x.rows, x.cols);
    for (std::size_t k = 0; k < m.a.size(); ++k) m.a[k] = s * x.a[k];
    return m;
}

inline ComplexMatrix operator*(const ComplexMatrix& x, const ComplexMatrix& y) {
    require(x.cols == y.rows, Err::DimensionMismatch, "matrix product");
    ComplexMatrix m(x.rows, y.cols);
    for (std::size_t i = 0; i < x.rows; ++i) {
        for (std::size_t k = 0; k < x.cols; ++k) {
            const cpx xik = x(i, k);
            if (xik == cpx(0.0)) continue;
            const cpx* yrow = &y.a[k * y.cols];
            cpx* mrow = &m.a[i * m.cols];
            for (std::size_t j = 0; j < y.cols; ++j) mrow[j] += xik * yrow[j];
        }
    }
    return m;
}

// diag(A, B); the 0x0 matrix acts as the empty summand.
inline ComplexMatrix direct_sum(const ComplexMatrix& x, const ComplexMatrix& y) {
    require(x.square() && y.square(), Err::DimensionMismatch, "direct_sum needs square blocks");
    ComplexMatrix m(x.rows + y.rows, x.cols + y.cols);
    m.set_block(0, 0, x);
    m.set_block(x.rows, x.cols, y);
    return m;
}

inline ComplexMatrix kron(const ComplexMatrix& x, const ComplexMatrix& y) {
    ComplexMatrix m(x.rows * y.rows, x.cols * y.cols);
    for (std::size_t i = 0; i < x.rows; ++i)
        for (std::size_t j = 0; j < x.cols; ++j) {
            const cpx xij = x(i, j);
            if (xij == cpx(0.0)) continue;
            for (std::size_t p = 0; p < y.rows; ++p)
                for (std::size_t q = 0; q < y.cols; ++q)
                    m(i * y.rows + p, j * y.cols + q) = xij * y(p, q);
        }
    return m;
}

inline ComplexMatrix hermitize(const ComplexMatrix& x) {
    require(x.square(), Err::DimensionMismatch, "hermitize needs square input");
    ComplexMatrix m(x.rows, x.cols);
    for (std::size_t i = 0; i < x.rows; ++i)
        for (std::size_t j = 0; j < x.cols; ++j)
            m(i, j) = 0.5 * (x(i, j) + std::conj(x(j, i)));
    return m;
}

inline double hermitian_defect(const ComplexMatrix& x) {
    return (x - x.adjoint()).frobenius_norm();
}

// Frobenius inner product <X, Y> = tr(X* Y).
inline cpx frob_inner(const ComplexMatrix& x, const ComplexMatrix& y) {
    require(x.rows == y.rows && x.cols == y.cols, Err::DimensionMismatch, "frob_inner");
    cpx s = 0.0;
    for (std::size_t k = 0; k < x.a.size(); ++k) s += std::conj(x.a[k]) * y.a[k];
    return s;
}

}  // namespace calcular
