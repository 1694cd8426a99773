#pragma once

#include <optional>
#include <vector>

#include "calcular/domain.hpp"
#include "calcular/eig.hpp"
#include "calcular/errors.hpp"
#include "calcular/function.hpp"
#include "calcular/lu.hpp"
#include "calcular/matrix.hpp"
#include "calcular/rng.hpp"
#include "calcular/schur.hpp"

namespace calcular {

inline constexpr double kCommuteTol = 1e-10;
inline constexpr double kMemberTol = 1e-9;
inline constexpr std::uint64_t kSpectrumSeed = 0x5ca1ab1eull;

// A commuting d-tuple of square matrices on a common carrier space.  Tuples
// built from joint eigen data carry (V, Lambda) so the functional calculus
// and spectrum are cheap afterwards.
struct CommutingTuple {
    int d = 1;
    std::size_t dim = 0;
    std::vector<ComplexMatrix> coords;

    struct EigenData {
        ComplexMatrix v;      // eigenvector columns, invertible
        ComplexMatrix v_inv;
        std::vector<Point> lambda;  // dim joint eigenvalues, pairwise distinct
    };
    std::optional<EigenData> eigen;
};

inline bool check_commuting(const CommutingTuple& t, double tol = kCommuteTol) {
    for (int r = 0; r < t.d; ++r) {
        require(t.coords[r].square() && t.coords[r].rows == t.dim, Err::DimensionMismatch,
                "tuple coordinates must be square of equal size");
        for (int s = r + 1; s < t.d; ++s) {
            const double scale =
                1.0 + t.coords[r].frobenius_norm() * t.coords[s].frobenius_norm();
            const double comm =
                (t.coords[r] * t.coords[s] - t.coords[s] * t.coords[r]).frobenius_norm();
            if (comm > tol * scale) return false;
        }
    }
    return true;
}

inline CommutingTuple make_commuting_tuple(std::vector<ComplexMatrix> coords,
                                           double tol = kCommuteTol) {
    require(!coords.empty(), Err::ValueError, "tuple needs at least one coordinate");
    CommutingTuple t;
    t.d = static_cast<int>(coords.size());
    t.dim = coords[0].rows;
    for (const auto& m : coords) {
        require(m.square() && m.rows == t.dim, Err::DimensionMismatch,
                "tuple coordinates must be square of equal size");
        require(m.all_finite(), Err::InvalidMatrix, "tuple coordinate has non-finite entries");
    }
    t.coords = std::move(coords);
    require(check_commuting(t, tol), Err::NotCommuting, "commutator norm above tolerance");
    return t;
}

// Joint eigenvalues via unitary triangularization of a random real linear
// combination of the coordinates; the same Schur basis generically
// triangularizes the whole family, verified by the off-triangular residual
// and retried with fresh coefficients otherwise.
inline std::vector<Point> joint_spectrum(const CommutingTuple& t,
                                         std::uint64_t seed = kSpectrumSeed,
                                         double resid_tol = 1e-8) {
    require(check_commuting(t), Err::NotCommuting, "joint_spectrum needs a commuting tuple");
    if (t.eigen) return t.eigen->lambda;
    const std::size_t n = t.dim;
    if (n == 0) return {};

    for (int attempt = 0; attempt < 10; ++attempt) {
        Rng rng(Rng::derive(seed, static_cast<std::uint64_t>(attempt)));
        ComplexMatrix combo(n, n);
        for (int r = 0; r < t.d; ++r) {
            double c = 0.0;
            while (std::abs(c) < 0.1) c = rng.uniform(-1.0, 1.0);
            combo = combo + cpx(c) * t.coords[r];
        }
        SchurResult sr;
        try {
            sr = schur_decompose(combo);
        } catch (const Error&) {
            continue;
        }
        std::vector<ComplexMatrix> rotated(t.d);
        bool ok = true;
        for (int r = 0; r < t.d && ok; ++r) {
            rotated[r] = sr.q.adjoint() * t.coords[r] * sr.q;
            double lower = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < i; ++j) lower += std::norm(rotated[r](i, j));
            if (std::sqrt(lower) > resid_tol * (1.0 + t.coords[r].frobenius_norm()))
                ok = false;
        }
        if (!ok) continue;
        std::vector<Point> points(n, Point(t.d));
        for (std::size_t j = 0; j < n; ++j)
            for (int r = 0; r < t.d; ++r) points[j][r] = rotated[r](j, j);
        return points;
    }
    fail(Err::NoConvergence, "joint_spectrum: no simultaneous triangularization found");
}

// Generic d-tuple with prescribed joint eigenvalues and eigenvector Gram
// matrix: V is chosen with V*V = gram and T^r = V diag(lambda^r) V^{-1}.
inline CommutingTuple make_generic_tuple(const Domain& dom, const std::vector<Point>& points,
                                         const ComplexMatrix& gram) {
    const std::size_t n = points.size();
    require(n >= 1, Err::ValueError, "make_generic_tuple needs at least one point");
    require(gram.square() && gram.rows == n, Err::DimensionMismatch,
            "gram must be n x n");
    for (const Point& p : points) require_strict_interior(dom, p, "make_generic_tuple");
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double dist = 0.0;
            for (int r = 0; r < dom.d; ++r) dist += std::norm(points[i][r] - points[j][r]);
            require(std::sqrt(dist) > 1e-9, Err::DuplicatePoints,
                    "joint eigenvalues must be pairwise distinct");
        }

    require(hermitian_defect(gram) <= 1e-10 * (1.0 + gram.frobenius_norm()),
            Err::SingularGram, "gram must be Hermitian");
    const auto eig = hermitian_eig(gram, 1e-10);
    require(eig.eigenvalues.back() > 1e-10, Err::SingularGram,
            "gram must be strictly positive definite");

    const ComplexMatrix v = psd_factor(gram, 1e-12).adjoint();  // V*V = gram
    const ComplexMatrix v_inv = inverse(v);
    require(one_norm(v) * one_norm(v_inv) < 1e10, Err::SingularGram,
            "eigenvector basis too ill-conditioned");

    CommutingTuple t;
    t.d = dom.d;
    t.dim = n;
    t.coords.reserve(dom.d);
    for (int r = 0; r < dom.d; ++r) {
        std::vector<cpx> diag(n);
        for (std::size_t j = 0; j < n; ++j) diag[j] = points[j][r];
        t.coords.push_back(v * ComplexMatrix::diagonal(diag) * v_inv);
    }
    t.eigen = CommutingTuple::EigenData{v, v_inv, points};
    return t;
}

// --- functional calculus ----------------------------------------------------

enum class CalcRoute { automatic, horner, diagonalized };

struct Realization;
// Defined in realization.hpp.
ComplexMatrix transfer_eval_tuple(const Realization& r, const CommutingTuple& t);

namespace detail {

struct MatrixRing {
    using value_type = ComplexMatrix;
    std::size_t n;
    ComplexMatrix zero() const { return ComplexMatrix::zeros(n, n); }
    ComplexMatrix scalar(cpx c) const { return c * ComplexMatrix::identity(n); }
    ComplexMatrix add(const ComplexMatrix& x, const ComplexMatrix& y) const { return x + y; }
    ComplexMatrix mul(const ComplexMatrix& x, const ComplexMatrix& y) const { return x * y; }
};

inline ComplexMatrix apply_polynomial_horner(const Polynomial& p, const CommutingTuple& t) {
    require(p.d == t.d, Err::WrongDimension, "polynomial dimension does not match tuple");
    return eval_polynomial(MatrixRing{t.dim}, p, t.coords);
}

inline ComplexMatrix apply_polynomial_diagonalized(const Polynomial& p,
                                                   const CommutingTuple& t) {
    const auto& e = *t.eigen;
    std::vector<cpx> diag(t.dim);
    for (std::size_t j = 0; j < t.dim; ++j)
        diag[j] = eval_polynomial(ScalarRing{}, p, e.lambda[j]);
    return e.v * ComplexMatrix::diagonal(diag) * e.v_inv;
}

}  // namespace detail

inline void require_spectrum_interior(const CommutingTuple& t, const Domain& dom,
                                      std::uint64_t seed = kSpectrumSeed) {
    for (const Point& p : joint_spectrum(t, seed))
        require(domain_contains(dom, p, /*strict=*/true), Err::SpectrumOutsideDomain,
                "joint spectrum escapes the domain interior");
}

// phi(T).  Constants and coordinates are exact; polynomials go through the
// deterministic Horner order (or the diagonalized route when eigen data is
// cached); transfer functions evaluate their realization at the tuple.
inline ComplexMatrix apply_function(const HoloFunction& f, const CommutingTuple& t,
                                    CalcRoute route = CalcRoute::automatic,
                                    const Domain* dom = nullptr) {
    if (dom) require_spectrum_interior(t, *dom);
    if (const auto* c = std::get_if<Constant>(&f.rep))
        return c->value * ComplexMatrix::identity(t.dim);
    if (const auto* coord = std::get_if<Coordinate>(&f.rep)) {
        require(coord->index <= t.d, Err::WrongDimension,
                "coordinate index exceeds tuple dimension");
        return t.coords[coord->index - 1];
    }
    if (const auto* p = std::get_if<Polynomial>(&f.rep)) {
        const bool diag = route == CalcRoute::diagonalized ||
                          (route == CalcRoute::automatic && t.eigen.has_value());
        if (diag) {
            require(t.eigen.has_value(), Err::UnsupportedVariant,
                    "diagonalized route needs eigen data");
            return detail::apply_polynomial_diagonalized(*p, t);
        }
        return detail::apply_polynomial_horner(*p, t);
    }
    return transfer_eval_tuple(*std::get<std::shared_ptr<const Realization>>(f.rep), t);
}

// T^r -> T^r + lambda^r I_pad blocks; the scalar padding used to equalize
// carrier dimensions.
inline CommutingTuple direct_sum_with_scalar(const CommutingTuple& t, const Point& lambda,
                                             std::size_t pad, const Domain& dom) {
    require(pad >= 1, Err::ValueError, "pad must be positive");
    require_strict_interior(dom, lambda, "direct_sum_with_scalar");
    require(t.d == dom.d, Err::WrongDimension, "tuple does not match domain dimension");
    CommutingTuple out;
    out.d = t.d;
    out.dim = t.dim + pad;
    for (int r = 0; r < t.d; ++r)
        out.coords.push_back(
            direct_sum(t.coords[r], lambda[r] * ComplexMatrix::identity(pad)));

    // Eigen data survives only when the joint eigenvalues stay distinct.
    if (t.eigen && pad == 1) {
        bool distinct = true;
        for (const Point& mu : t.eigen->lambda) {
            double dist = 0.0;
            for (int r = 0; r < t.d; ++r) dist += std::norm(mu[r] - lambda[r]);
            if (std::sqrt(dist) <= 1e-9) distinct = false;
        }
        if (distinct) {
            CommutingTuple::EigenData e;
            e.v = direct_sum(t.eigen->v, ComplexMatrix::identity(1));
            e.v_inv = direct_sum(t.eigen->v_inv, ComplexMatrix::identity(1));
            e.lambda = t.eigen->lambda;
            e.lambda.push_back(lambda);
            out.eigen = std::move(e);
        }
    }
    return out;
}

// The constraint family S together with its domain.
struct ClassSpec {
    std::vector<HoloFunction> constraints;
    Domain domain;
};

inline ClassSpec make_class_spec(std::vector<HoloFunction> constraints, const Domain& dom,
                                 bool validate = true) {
    require(!constraints.empty(), Err::ValueError, "constraint family must be nonempty");
    if (validate) {
        const double shrink = 1.0 - 2.0 * dom.margin;
        for (const auto& psi : constraints) {
            for (Point z : boundary_sample(dom, 8)) {
                for (cpx& zr : z) zr *= shrink;
                require(std::abs(eval_point(psi, z)) <= 1.0 + 1e-9, Err::ValueError,
                        "constraint exceeds the closed unit disk on sample points");
            }
        }
    }
    return ClassSpec{std::move(constraints), dom};
}

// Membership in H(S): spectrum strictly interior and every constraint
// contractive on the tuple.
inline bool in_H_of_S(const CommutingTuple& t, const ClassSpec& spec,
                      double member_tol = kMemberTol) {
    require(check_commuting(t), Err::NotCommuting, "in_H_of_S needs a commuting tuple");
    for (const Point& p : joint_spectrum(t))
        if (!domain_contains(spec.domain, p, /*strict=*/true)) return false;
    for (const auto& psi : spec.constraints) {
        try {
            if (operator_norm(apply_function(psi, t)) > 1.0 + member_tol) return false;
        } catch (const Error& e) {
            if (e.code() == Err::NotInClass || e.code() == Err::SingularResolvent)
                return false;
            throw;
        }
    }
    return true;
}

// [phi_ij(T)] as one (dim*n) x (dim*n) block matrix.
inline ComplexMatrix apply_matrix_function(const MatrixFunction& phi, const CommutingTuple& t,
                                           CalcRoute route = CalcRoute::automatic) {
    ComplexMatrix out(phi.n * t.dim, phi.n * t.dim);
    for (std::size_t i = 0; i < phi.n; ++i)
        for (std::size_t j = 0; j < phi.n; ++j)
            out.set_block(i * t.dim, j * t.dim, apply_function(phi(i, j), t, route));
    return out;
}

inline double matrix_norm_level_n(const MatrixFunction& phi, const CommutingTuple& t) {
    return operator_norm(apply_matrix_function(phi, t));
}

}  // namespace calcular
