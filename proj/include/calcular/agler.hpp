#pragma once

#include <string>
#include <vector>

#include "calcular/errors.hpp"
#include "calcular/kernel.hpp"
#include "calcular/matrix.hpp"
#include "calcular/sdp.hpp"
#include "calcular/tuple.hpp"

namespace calcular {

// PSD certificate for the decomposition
//   M^2 - phi(z_a) conj(phi(z_b)) = sum_j (1 - psi_j(z_a) conj(psi_j(z_b))) * Gamma_j(a,b)
// entrywise on F x F, one certificate block per constraint psi_j.
struct AglerDecomposition {
    double bound = 0.0;                       // M
    std::vector<ComplexMatrix> certificates;  // Gamma_j, Hermitian PSD
    double residual = 0.0;                    // max-entry defect of the identity above
    bool separation_warning = false;          // S failed to separate some point pair
};

struct AglerResult {
    double norm = 0.0;  // M = sqrt(optimal t)
    AglerDecomposition decomposition;
    int iterations = 0;
    bool used_fallback = false;
};

namespace detail {

inline std::vector<std::vector<cpx>> constraint_values_on(const FinitePointSet& f,
                                                          const ClassSpec& s) {
    std::vector<std::vector<cpx>> vals;
    vals.reserve(s.constraints.size());
    for (const auto& psi : s.constraints) vals.push_back(eval_on_points(psi, f));
    for (const auto& v : vals)
        for (const cpx& x : v)
            require(std::abs(x) <= 1.0 - 1e-9, Err::OutsideDomain,
                    "constraint value too close to the unit circle on F");
    return vals;
}

// Necessary condition for the standing assumption that S generates all
// functions on F: the constraint values must separate the points.
inline bool separates_points(const std::vector<std::vector<cpx>>& psi_vals, std::size_t n) {
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b) {
            double gap = 0.0;
            for (const auto& v : psi_vals) gap = std::max(gap, std::abs(v[a] - v[b]));
            if (gap <= 1e-9) return false;
        }
    return true;
}

inline double decomposition_residual(const std::vector<cpx>& phi_vals,
                                     const std::vector<std::vector<cpx>>& psi_vals,
                                     const std::vector<ComplexMatrix>& gammas, double t) {
    const std::size_t n = phi_vals.size();
    double resid = 0.0;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            cpx lhs = t - phi_vals[a] * std::conj(phi_vals[b]);
            for (std::size_t j = 0; j < gammas.size(); ++j)
                lhs -= (1.0 - psi_vals[j][a] * std::conj(psi_vals[j][b])) * gammas[j](a, b);
            resid = std::max(resid, std::abs(lhs));
        }
    return resid;
}

}  // namespace detail

// The A-infinity norm of phi over K_S restricted to F, with certificate: the
// smallest M admitting the decomposition above.  M^2 enters the SDP as the
// linear variable t, so no bisection is involved.
inline AglerResult agler_norm(const std::vector<cpx>& phi_vals, const FinitePointSet& f,
                              const ClassSpec& s, const SdpOptions& opts = {}) {
    const std::size_t n = f.size();
    require(phi_vals.size() == n, Err::DimensionMismatch,
            "phi values must match point count");
    require(f.domain.d == s.domain.d && f.domain.kind == s.domain.kind, Err::WrongDimension,
            "point set and constraint family live on different domains");
    const auto psi_vals = detail::constraint_values_on(f, s);
    const std::size_t ns = psi_vals.size();

    SdpProblem p;
    for (std::size_t j = 0; j < ns; ++j) p.blocks.push_back({n});
    p.num_scalars = 1;
    p.objective.scalar_coefs = {1.0};
    p.objective.block_trace_coefs.assign(ns, 0.0);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a; b < n; ++b) {
            SdpConstraint con;
            for (std::size_t j = 0; j < ns; ++j)
                con.terms.push_back(
                    {static_cast<int>(j), a, b,
                     1.0 - psi_vals[j][a] * std::conj(psi_vals[j][b])});
            con.scalar_terms.push_back({0, cpx(-1.0)});
            con.rhs = -phi_vals[a] * std::conj(phi_vals[b]);
            p.constraints.push_back(std::move(con));
        }

    const SdpSolution sol = solve_min(p, opts);
    if (sol.status == SdpStatus::infeasible) {
        std::string msg = "Agler decomposition SDP infeasible; dual certificate [";
        for (std::size_t i = 0; i < sol.certificate.size(); ++i) {
            if (i) msg += ", ";
            msg += std::to_string(sol.certificate[i]);
        }
        fail(Err::Infeasible, msg + "]");
    }
    require(sol.status == SdpStatus::optimal, Err::Diverged,
            "Agler decomposition SDP did not converge");

    AglerResult res;
    const double t = std::max(0.0, sol.scalar_values[0]);
    res.norm = std::sqrt(t);
    res.iterations = sol.iterations;
    res.used_fallback = sol.used_fallback;
    res.decomposition.bound = res.norm;
    res.decomposition.certificates = sol.block_values;
    res.decomposition.separation_warning = !detail::separates_points(psi_vals, n);
    res.decomposition.residual =
        detail::decomposition_residual(phi_vals, psi_vals, sol.block_values, t);
    require(res.decomposition.residual <= 1e-7 * (1.0 + t), Err::CertificateInvalid,
            "decomposition residual above tolerance");
    return res;
}

inline AglerResult agler_norm(const HoloFunction& phi, const FinitePointSet& f,
                              const ClassSpec& s, const SdpOptions& opts = {}) {
    return agler_norm(eval_on_points(phi, f), f, s, opts);
}

}  // namespace calcular
