#include <cstdio>

#include "calcular/eig.hpp"
#include "calcular/lu.hpp"
#include "calcular/matrix.hpp"
#include "calcular/rng.hpp"
#include "calcular/schur.hpp"

using namespace calcular;

static ComplexMatrix random_matrix(std::size_t n, Rng& rng) {
    ComplexMatrix m(n, n);
    for (auto& v : m.a) v = rng.cnormal();
    return m;
}

int main() {
    Rng rng(42);

    // hermitian eig reconstruction
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 2 + (trial % 9);
        ComplexMatrix h = random_matrix(n, rng);
        h = hermitize(h + h.adjoint());
        const auto eig = hermitian_eig(h);
        ComplexMatrix rec(n, n);
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    rec(i, j) += eig.eigenvalues[k] * eig.eigenvectors(i, k) *
                                 std::conj(eig.eigenvectors(j, k));
        const double err = (rec - h).frobenius_norm();
        const double unit = (eig.eigenvectors.adjoint() * eig.eigenvectors -
                             ComplexMatrix::identity(n))
                                .frobenius_norm();
        if (err > 1e-10 * (1 + h.frobenius_norm()) || unit > 1e-10) {
            std::printf("EIG FAIL n=%zu err=%.3e unit=%.3e\n", n, err, unit);
            return 1;
        }
    }
    std::printf("eig ok\n");

    // operator norm vs diag
    {
        const double v = operator_norm(ComplexMatrix::diagonal({cpx(3), cpx(1)}));
        if (std::abs(v - 3.0) > 1e-12) { std::printf("NORM FAIL %.17g\n", v); return 1; }
    }

    // psd_factor
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 2 + (trial % 5);
        ComplexMatrix w = random_matrix(n, rng);
        ComplexMatrix g = hermitize(w * w.adjoint());
        const ComplexMatrix l = psd_factor(g, 1e-10);
        const double err = (l * l.adjoint() - g).frobenius_norm();
        if (err > 1e-9 * (1 + g.frobenius_norm())) {
            std::printf("PSD FAIL err=%.3e\n", err);
            return 1;
        }
    }
    std::printf("psd ok\n");

    // lu
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 3 + (trial % 6);
        const ComplexMatrix m = random_matrix(n, rng);
        const ComplexMatrix inv = inverse(m);
        const double err = (m * inv - ComplexMatrix::identity(n)).frobenius_norm();
        if (err > 1e-10) { std::printf("LU FAIL err=%.3e\n", err); return 1; }
    }
    std::printf("lu ok\n");

    // schur
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 1 + (trial % 12);
        const ComplexMatrix m = random_matrix(n, rng);
        const auto sr = schur_decompose(m);
        const double rec = (sr.q * sr.t * sr.q.adjoint() - m).frobenius_norm();
        const double unit =
            (sr.q.adjoint() * sr.q - ComplexMatrix::identity(n)).frobenius_norm();
        double lower = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < i; ++j) lower += std::norm(sr.t(i, j));
        if (rec > 1e-11 * (1 + m.frobenius_norm()) || unit > 1e-12 || lower > 0.0) {
            std::printf("SCHUR FAIL n=%zu rec=%.3e unit=%.3e lower=%.3e\n", n, rec, unit,
                        lower);
            return 1;
        }
    }
    // defective case: Jordan block
    {
        ComplexMatrix j(3, 3);
        j(0, 1) = 1.0;
        j(1, 2) = 1.0;
        const auto sr = schur_decompose(j);
        const double rec = (sr.q * sr.t * sr.q.adjoint() - j).frobenius_norm();
        if (rec > 1e-12) { std::printf("SCHUR JORDAN FAIL %.3e\n", rec); return 1; }
    }
    std::printf("schur ok\n");
    return 0;
}
