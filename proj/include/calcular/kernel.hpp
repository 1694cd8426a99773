#pragma once

#include <string>
#include <vector>

#include "calcular/domain.hpp"
#include "calcular/eig.hpp"
#include "calcular/errors.hpp"
#include "calcular/function.hpp"
#include "calcular/lu.hpp"
#include "calcular/matrix.hpp"
#include "calcular/tuple.hpp"

namespace calcular {

// A finite set of pairwise-distinct, strictly interior points of the domain.
struct FinitePointSet {
    Domain domain;
    std::vector<Point> points;

    std::size_t size() const { return points.size(); }
};

inline FinitePointSet make_finite_point_set(const Domain& dom, std::vector<Point> points) {
    require(!points.empty(), Err::ValueError, "point set must be nonempty");
    for (const Point& p : points) require_strict_interior(dom, p, "finite point set");
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            double dist = 0.0;
            for (int r = 0; r < dom.d; ++r) dist += std::norm(points[i][r] - points[j][r]);
            require(std::sqrt(dist) > 1e-9, Err::DuplicatePoints,
                    "points must be pairwise distinct");
        }
    return FinitePointSet{dom, std::move(points)};
}

// Gram matrix of a kernel restricted to a finite point set:
// gram(a, b) = k(z_a, z_b).
struct KernelMatrix {
    FinitePointSet pointset;
    ComplexMatrix gram;
};

inline KernelMatrix make_kernel_matrix(FinitePointSet f, const ComplexMatrix& gram,
                                       double psd_clip = 1e-10) {
    require(gram.square() && gram.rows == f.size(), Err::DimensionMismatch,
            "gram size must match point count");
    require(gram.all_finite(), Err::InvalidMatrix, "gram has non-finite entries");
    require(hermitian_defect(gram) <= 1e-12 * (1.0 + gram.frobenius_norm()), Err::NotHermitian,
            "kernel gram must be Hermitian");
    require(min_eigenvalue(hermitize(gram)) >= -psd_clip, Err::NotPSD,
            "kernel gram must be positive semidefinite");
    return KernelMatrix{std::move(f), hermitize(gram)};
}

inline std::vector<cpx> eval_on_points(const HoloFunction& f, const FinitePointSet& fps) {
    std::vector<cpx> vals;
    vals.reserve(fps.size());
    for (const Point& z : fps.points) vals.push_back(eval_point(f, z));
    return vals;
}

// Membership in K_S: for every psi in S the matrix
// [(1 - psi(z_a) conj(psi(z_b))) * k(a,b)] must be PSD within tol.
inline bool in_K_S(const KernelMatrix& k, const ClassSpec& spec, double tol = 1e-10) {
    const std::size_t n = k.pointset.size();
    for (const auto& psi : spec.constraints) {
        const std::vector<cpx> vals = eval_on_points(psi, k.pointset);
        ComplexMatrix test(n, n);
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
                test(a, b) = (1.0 - vals[a] * std::conj(vals[b])) * k.gram(a, b);
        if (min_eigenvalue(hermitize(test)) < -tol) return false;
    }
    return true;
}

// Smallest M with [(M^2 - phi(z_a) conj(phi(z_b))) k(a,b)] PSD, for strictly
// positive definite k.  Computed as the operator norm of L^{-1} D_phi L with
// L L* = gram; the equivalence with the PSD definition is covered by tests.
inline double finite_multiplier_norm(const std::vector<cpx>& phi_vals, const KernelMatrix& k) {
    const std::size_t n = k.pointset.size();
    require(phi_vals.size() == n, Err::DimensionMismatch,
            "multiplier values must match point count");
    const auto eig = hermitian_eig(k.gram, 1e-10);
    require(eig.eigenvalues.back() > 1e-10, Err::SingularGram,
            "multiplier norm needs a strictly positive definite gram");
    const ComplexMatrix l = psd_factor(k.gram, 1e-12);
    return operator_norm(inverse(l) * ComplexMatrix::diagonal(phi_vals) * l);
}

inline double finite_multiplier_norm(const HoloFunction& phi, const KernelMatrix& k) {
    return finite_multiplier_norm(eval_on_points(phi, k.pointset), k);
}

// The adjoint multiplier model tuple of the kernel, represented on the span
// of the kernel functions at the points: joint eigenvalues are the points
// themselves and the eigenvector Gram is the inverse of the kernel gram, so
// that ||phi(T)|| recovers the finite multiplier norm.
inline CommutingTuple model_tuple(const KernelMatrix& k) {
    const auto eig = hermitian_eig(k.gram, 1e-10);
    require(eig.eigenvalues.back() > 1e-10, Err::SingularGram,
            "model tuple needs a strictly positive definite gram");
    const ComplexMatrix inv_gram = hermitize(inverse(k.gram));
    return make_generic_tuple(k.pointset.domain, k.pointset.points, inv_gram);
}

// --- built-in kernels --------------------------------------------------------

enum class BuiltinKernel { szego_disk, example_2_4 };

struct BuiltinKernelResult {
    KernelMatrix kernel;
    int truncation = 0;      // terms used (series kernels)
    double tail_bound = 0.0;  // bound on the dropped tail
};

namespace detail {

// Exact tail of sum_{n>N} (n+1)^2 x^n at real x in [0,1), via the closed form
// (1+x)/(1-x)^3 minus the partial sum.
inline double squared_weights_tail(int trunc, double x) {
    if (x <= 0.0) return 0.0;
    const double full = (1.0 + x) / std::pow(1.0 - x, 3);
    double partial = 0.0, xn = 1.0;
    for (int n = 0; n <= trunc; ++n) {
        partial += (n + 1.0) * (n + 1.0) * xn;
        xn *= x;
    }
    return std::max(0.0, full - partial);
}

}  // namespace detail

// truncation == 0 requests the default: the smallest N whose tail bound at
// max |z_a| drops below 1e-12.
inline BuiltinKernelResult builtin_kernel(BuiltinKernel name, const FinitePointSet& f,
                                          int truncation = 0) {
    require(f.domain.d == 1, Err::WrongDimension, "built-in kernels are univariate");
    const std::size_t n = f.size();
    ComplexMatrix gram(n, n);
    BuiltinKernelResult out{KernelMatrix{}, 0, 0.0};

    if (name == BuiltinKernel::szego_disk) {
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
                gram(a, b) = 1.0 / (1.0 - f.points[a][0] * std::conj(f.points[b][0]));
    } else {
        double rho = 0.0;
        for (const Point& p : f.points) rho = std::max(rho, std::abs(p[0]));
        int trunc = truncation;
        if (trunc <= 0) {
            trunc = 1;
            while (detail::squared_weights_tail(trunc, rho * rho) >= 1e-12 && trunc < 100000)
                ++trunc;
        }
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b) {
                const cpx zw = f.points[a][0] * std::conj(f.points[b][0]);
                cpx sum = 0.0, pow = 1.0;
                for (int k = 0; k <= trunc; ++k) {
                    sum += (k + 1.0) * (k + 1.0) * pow;
                    pow *= zw;
                }
                gram(a, b) = sum;
            }
        out.truncation = trunc;
        out.tail_bound = detail::squared_weights_tail(trunc, rho * rho);
    }
    out.kernel = make_kernel_matrix(f, hermitize(gram));
    return out;
}

}  // namespace calcular
