#pragma once

#include <memory>
#include <vector>

#include "calcular/agler.hpp"
#include "calcular/errors.hpp"
#include "calcular/kernel.hpp"
#include "calcular/lu.hpp"
#include "calcular/matrix.hpp"
#include "calcular/rng.hpp"
#include "calcular/tuple.hpp"

namespace calcular {

// Unitary colligation U = [[A, B], [C, D]] on C (+) C^m, together with the
// projection partition of the state space by constraint: rho(E(z)) acts as
// psi_j(z) on the j-th group.  The transfer function is
//   phi(z) = A + B rho(E(z)) (I - D rho(E(z)))^{-1} C.
struct Realization {
    ClassSpec constraints;
    std::size_t state_dim = 0;
    ComplexMatrix u;  // (1+m) x (1+m), unitary
    std::vector<std::size_t> group_offsets;  // size n_S + 1, prefix sums of group ranks
};

namespace detail {

// Orthonormal basis of the orthogonal complement of the column span of E
// (columns assumed orthonormal), via accumulated Householder QR.
inline ComplexMatrix orthonormal_complement(const ComplexMatrix& e) {
    const std::size_t n = e.rows, r = e.cols;
    ComplexMatrix a = e;
    ComplexMatrix q = ComplexMatrix::identity(n);
    std::vector<cpx> u(n);
    for (std::size_t k = 0; k < r; ++k) {
        double norm_sq = 0.0;
        for (std::size_t i = k; i < n; ++i) norm_sq += std::norm(a(i, k));
        const double beta = std::sqrt(norm_sq);
        if (beta <= 1e-300) continue;
        const cpx x0 = a(k, k);
        const cpx phase = std::abs(x0) == 0.0 ? cpx(1.0) : x0 / std::abs(x0);
        double vnorm_sq = 0.0;
        for (std::size_t i = k; i < n; ++i) {
            cpx vi = a(i, k);
            if (i == k) vi += phase * beta;
            u[i] = vi;
            vnorm_sq += std::norm(vi);
        }
        if (vnorm_sq <= 1e-300) continue;
        const double inv = 1.0 / std::sqrt(vnorm_sq);
        for (std::size_t i = k; i < n; ++i) u[i] *= inv;
        for (std::size_t j = k; j < r; ++j) {
            cpx dot = 0.0;
            for (std::size_t i = k; i < n; ++i) dot += std::conj(u[i]) * a(i, j);
            dot *= 2.0;
            for (std::size_t i = k; i < n; ++i) a(i, j) -= dot * u[i];
        }
        for (std::size_t i = 0; i < n; ++i) {
            cpx dot = 0.0;
            for (std::size_t j = k; j < n; ++j) dot += q(i, j) * u[j];
            dot *= 2.0;
            for (std::size_t j = k; j < n; ++j) q(i, j) -= dot * std::conj(u[j]);
        }
    }
    return q.block(0, r, n, n - r);
}

// Nearest matrix with orthonormal columns, via E (E*E)^{-1/2}.
inline ComplexMatrix polar_orthonormalize(const ComplexMatrix& e) {
    const ComplexMatrix p = hermitize(e.adjoint() * e);
    const auto eig = hermitian_eig(p, 1e-8);
    require(eig.eigenvalues.empty() || eig.eigenvalues.back() > 0.25,
            Err::RankDeficiencyUnresolvable, "isometry frame nearly rank deficient");
    ComplexMatrix inv_sqrt(p.rows, p.cols);
    for (std::size_t k = 0; k < p.rows; ++k) {
        const double w = 1.0 / std::sqrt(eig.eigenvalues[k]);
        for (std::size_t i = 0; i < p.rows; ++i)
            for (std::size_t j = 0; j < p.cols; ++j)
                inv_sqrt(i, j) += w * eig.eigenvectors(i, k) * std::conj(eig.eigenvectors(j, k));
    }
    return e * inv_sqrt;
}

inline ComplexMatrix rho_of_point(const Realization& r, const std::vector<cpx>& psi_vals) {
    ComplexMatrix rho(r.state_dim, r.state_dim);
    for (std::size_t j = 0; j + 1 < r.group_offsets.size(); ++j)
        for (std::size_t k = r.group_offsets[j]; k < r.group_offsets[j + 1]; ++k)
            rho(k, k) = psi_vals[j];
    return rho;
}

}  // namespace detail

// Lurking-isometry construction from an Agler decomposition with bound M <= 1.
// Certificates are rank-factored, the decomposition identity makes the map
//   (1 (+) psi_j(z_a) g_j(a)) -> (phi(z_a) (+) g_j(a))
// an isometry on its span, and the isometry extends to a unitary colligation.
inline Realization build_realization(const std::vector<cpx>& phi_vals, const FinitePointSet& f,
                                     const ClassSpec& s, const AglerDecomposition& dec) {
    const std::size_t n = f.size();
    require(phi_vals.size() == n, Err::DimensionMismatch,
            "phi values must match point count");
    require(dec.certificates.size() == s.constraints.size(), Err::CertificateInvalid,
            "certificate count does not match constraint family");
    require(dec.bound <= 1.0 + 1e-9, Err::CertificateInvalid,
            "realization needs a certificate with bound M <= 1");
    const auto psi_vals = detail::constraint_values_on(f, s);
    const std::size_t ns = psi_vals.size();

    // Promote the bound-M certificate to an exact bound-1 certificate: the
    // shortfall (1 - M^2) * all-ones splits through the Szego-type kernel of
    // the first constraint, 1/(1 - psi_1(z_a) conj(psi_1(z_b))), which is a
    // positive kernel because |psi_1| < 1 on F.
    std::vector<ComplexMatrix> gammas = dec.certificates;
    const double t = dec.bound * dec.bound;
    if (t < 1.0) {
        ComplexMatrix boost(n, n);
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
                boost(a, b) =
                    (1.0 - t) / (1.0 - psi_vals[0][a] * std::conj(psi_vals[0][b]));
        gammas[0] = hermitize(gammas[0] + boost);
    }
    require(detail::decomposition_residual(phi_vals, psi_vals, gammas, 1.0) <= 1e-6,
            Err::CertificateInvalid, "certificate does not reproduce 1 - phi phi*");

    std::vector<ComplexMatrix> factors;
    std::vector<std::size_t> offsets{0};
    for (std::size_t j = 0; j < ns; ++j) {
        const auto eig = hermitian_eig(hermitize(gammas[j]), 1e-7);
        const double lmax = eig.eigenvalues.empty() ? 0.0 : std::max(eig.eigenvalues[0], 0.0);
        factors.push_back(psd_factor(hermitize(gammas[j]), 1e-9 * lmax + 1e-30));
        offsets.push_back(offsets.back() + factors.back().cols);
    }
    const std::size_t m = offsets.back();

    ComplexMatrix u_mat(1 + m, n), v_mat(1 + m, n);
    for (std::size_t a = 0; a < n; ++a) {
        u_mat(0, a) = 1.0;
        v_mat(0, a) = phi_vals[a];
        for (std::size_t j = 0; j < ns; ++j)
            for (std::size_t k = 0; k < factors[j].cols; ++k) {
                u_mat(1 + offsets[j] + k, a) = psi_vals[j][a] * factors[j](a, k);
                v_mat(1 + offsets[j] + k, a) = factors[j](a, k);
            }
    }

    // The two Gram matrices coincide by the decomposition identity; average
    // away the numerical defect and expand both frames with one eigenbasis.
    const ComplexMatrix gram =
        hermitize(cpx(0.5) * (u_mat.adjoint() * u_mat + v_mat.adjoint() * v_mat));
    const auto geig = hermitian_eig(gram, 1e-8);
    const double lmax = geig.eigenvalues.empty() ? 0.0 : std::max(geig.eigenvalues[0], 0.0);
    std::size_t rank = 0;
    while (rank < n && geig.eigenvalues[rank] > 1e-9 * (lmax + 1.0)) ++rank;

    ComplexMatrix e_u(1 + m, rank), e_v(1 + m, rank);
    for (std::size_t k = 0; k < rank; ++k) {
        const double w = 1.0 / std::sqrt(geig.eigenvalues[k]);
        for (std::size_t i = 0; i < 1 + m; ++i) {
            cpx su = 0.0, sv = 0.0;
            for (std::size_t a = 0; a < n; ++a) {
                su += u_mat(i, a) * geig.eigenvectors(a, k);
                sv += v_mat(i, a) * geig.eigenvectors(a, k);
            }
            e_u(i, k) = w * su;
            e_v(i, k) = w * sv;
        }
    }

    // Both frames are orthonormal only up to the certificate residual; a
    // polar polish E (E*E)^{-1/2} restores exact orthonormality while moving
    // each frame to second order, keeping the column correspondence intact.
    e_u = detail::polar_orthonormalize(e_u);
    e_v = detail::polar_orthonormalize(e_v);

    const ComplexMatrix f_u = detail::orthonormal_complement(e_u);
    const ComplexMatrix f_v = detail::orthonormal_complement(e_v);
    require(f_u.cols == f_v.cols, Err::RankDeficiencyUnresolvable,
            "defect dimensions disagree");

    ComplexMatrix big = e_v * e_u.adjoint() + f_v * f_u.adjoint();

    // Gauge: a global state-space phase making the first nonzero entry of C
    // real nonnegative, so serialized colligations are reproducible.
    for (std::size_t k = 1; k < 1 + m; ++k) {
        const cpx c = big(k, 0);
        if (std::abs(c) > 1e-12) {
            const cpx ph = std::conj(c) / std::abs(c);
            for (std::size_t i = 1; i < 1 + m; ++i) big(i, 0) *= ph;
            for (std::size_t j = 1; j < 1 + m; ++j) big(0, j) *= std::conj(ph);
            break;
        }
    }

    Realization r{s, m, big, offsets};
    const double unit =
        (big.adjoint() * big - ComplexMatrix::identity(1 + m)).frobenius_norm();
    require(unit <= 1e-10, Err::RankDeficiencyUnresolvable,
            "colligation failed the unitarity contract");
    for (std::size_t a = 0; a < n; ++a) {
        const cpx val = transfer_eval_point(r, f.points[a]);
        require(std::abs(val - phi_vals[a]) <= 1e-8, Err::CertificateInvalid,
                "transfer function does not interpolate the data");
    }
    return r;
}

inline cpx transfer_eval_point(const Realization& r, const Point& z) {
    require_strict_interior(r.constraints.domain, z, "transfer_eval_point");
    std::vector<cpx> psi_vals;
    psi_vals.reserve(r.constraints.constraints.size());
    for (const auto& psi : r.constraints.constraints) {
        const cpx v = eval_point(psi, z);
        require(std::abs(v) < 1.0, Err::OutsideDomain,
                "constraint value leaves the open unit disk");
        psi_vals.push_back(v);
    }
    const std::size_t m = r.state_dim;
    const cpx a = r.u(0, 0);
    if (m == 0) return a;
    const ComplexMatrix rho = detail::rho_of_point(r, psi_vals);
    const ComplexMatrix d = r.u.block(1, 1, m, m);
    const ComplexMatrix resolvent_m = ComplexMatrix::identity(m) - d * rho;
    require(condition_estimate(resolvent_m) < 1e12, Err::SingularResolvent,
            "I - D rho(E(z)) numerically singular");
    const ComplexMatrix c = r.u.block(1, 0, m, 1);
    const ComplexMatrix x = solve(resolvent_m, c);
    const ComplexMatrix b = r.u.block(0, 1, 1, m);
    return a + (b * rho * x)(0, 0);
}

// Evaluation at a commuting tuple via rho(E(T)) = sum_j psi_j(T) (x) P_j and a
// direct resolvent solve; requires T in H(S) with margin on every constraint.
inline ComplexMatrix transfer_eval_tuple(const Realization& r, const CommutingTuple& t) {
    const std::size_t h = t.dim;
    const std::size_t m = r.state_dim;
    for (const Point& p : joint_spectrum(t))
        require(domain_contains(r.constraints.domain, p, /*strict=*/true), Err::NotInClass,
                "tuple spectrum escapes the domain interior");
    std::vector<ComplexMatrix> psi_t;
    for (const auto& psi : r.constraints.constraints) {
        psi_t.push_back(apply_function(psi, t));
        require(operator_norm(psi_t.back()) <= 1.0 - 1e-6, Err::NotInClass,
                "constraint norm at the tuple misses the strict margin");
    }
    const cpx a = r.u(0, 0);
    if (m == 0) return a * ComplexMatrix::identity(h);

    ComplexMatrix rho(h * m, h * m);
    for (std::size_t j = 0; j < psi_t.size(); ++j) {
        ComplexMatrix proj(m, m);
        for (std::size_t k = r.group_offsets[j]; k < r.group_offsets[j + 1]; ++k)
            proj(k, k) = 1.0;
        rho = rho + kron(psi_t[j], proj);
    }
    const ComplexMatrix d = r.u.block(1, 1, m, m);
    const ComplexMatrix eye_h = ComplexMatrix::identity(h);
    const ComplexMatrix lhs = ComplexMatrix::identity(h * m) - kron(eye_h, d) * rho;
    require(condition_estimate(lhs) < 1e12, Err::SingularResolvent,
            "I - (I (x) D) rho(E(T)) numerically singular");
    const ComplexMatrix c = r.u.block(1, 0, m, 1);
    const ComplexMatrix x = solve(lhs, kron(eye_h, c));
    const ComplexMatrix b = r.u.block(0, 1, 1, m);
    return a * eye_h + kron(eye_h, b) * rho * x;
}

struct RealizationReport {
    double unitarity_residual = 0.0;
    std::vector<double> interpolation_errors;
    double max_interpolation_error = 0.0;
    double max_abs_on_sample = 0.0;  // over a 200-point interior sample
    bool pass = true;
};

inline std::vector<Point> interior_sample(const Domain& dom, std::size_t count,
                                          std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Point> pts;
    const double shrink = 1.0 - 2.0 * dom.margin;
    while (pts.size() < count) {
        Point z(dom.d);
        for (int r = 0; r < dom.d; ++r) {
            const double rad = shrink * std::sqrt(rng.uniform());
            const double th = 2.0 * 3.14159265358979323846 * rng.uniform();
            z[r] = {rad * std::cos(th), rad * std::sin(th)};
        }
        if (dom.kind == DomainKind::euclidean_ball) {
            double s = 0.0;
            for (const cpx& v : z) s += std::norm(v);
            if (s >= shrink * shrink) continue;
        }
        pts.push_back(std::move(z));
    }
    return pts;
}

inline RealizationReport verify_realization(const Realization& r,
                                            const std::vector<Point>& points,
                                            const std::vector<cpx>& phi_vals, double tol) {
    require(points.size() == phi_vals.size(), Err::DimensionMismatch,
            "points and values disagree");
    RealizationReport rep;
    rep.unitarity_residual =
        (r.u.adjoint() * r.u - ComplexMatrix::identity(1 + r.state_dim)).frobenius_norm();
    for (std::size_t a = 0; a < points.size(); ++a) {
        const double err = std::abs(transfer_eval_point(r, points[a]) - phi_vals[a]);
        rep.interpolation_errors.push_back(err);
        rep.max_interpolation_error = std::max(rep.max_interpolation_error, err);
    }
    for (const Point& z : interior_sample(r.constraints.domain, 200, 0x5eedu)) {
        try {
            rep.max_abs_on_sample =
                std::max(rep.max_abs_on_sample, std::abs(transfer_eval_point(r, z)));
        } catch (const Error&) {
            rep.pass = false;
        }
    }
    rep.pass = rep.pass && rep.unitarity_residual <= tol &&
               rep.max_interpolation_error <= tol * 1e2 &&
               rep.max_abs_on_sample <= 1.0 + 1e-9;
    return rep;
}

}  // namespace calcular
