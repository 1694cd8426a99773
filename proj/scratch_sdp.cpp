#include <cstdio>

#include "calcular/eig.hpp"
#include "calcular/rng.hpp"
#include "calcular/sdp.hpp"

using namespace calcular;

// min t s.t. t I - A >= 0 as: slack block X with X_ij - t delta_ij = -A_ij.
static SdpProblem lambda_max_problem(const ComplexMatrix& a) {
    SdpProblem p;
    const std::size_t n = a.rows;
    p.blocks.push_back({n});
    p.num_scalars = 1;
    p.objective.scalar_coefs = {1.0};
    p.objective.block_trace_coefs = {0.0};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            SdpConstraint con;
            con.terms.push_back({0, i, j, cpx(1.0)});
            if (i == j) con.scalar_terms.push_back({0, cpx(-1.0)});
            con.rhs = -a(i, j);
            p.constraints.push_back(con);
        }
    return p;
}

int main() {
    Rng rng(7);
    double worst = 0.0;
    int fallbacks = 0;
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 2 + (trial % 9);
        ComplexMatrix a(n, n);
        for (auto& v : a.a) v = rng.cnormal();
        a = hermitize(a + a.adjoint());
        const auto eig = hermitian_eig(a);
        const auto sol = solve_min(lambda_max_problem(a), {});
        if (sol.status != SdpStatus::optimal) {
            std::printf("trial %d n=%zu status=%s iters=%d presid=%.3e\n", trial, n,
                        sdp_status_name(sol.status), sol.iterations, sol.primal_residual);
            return 1;
        }
        if (sol.used_fallback) ++fallbacks;
        const double err = std::abs(sol.scalar_values[0] - eig.eigenvalues.front());
        worst = std::max(worst, err);
        if (err > 1e-8) {
            std::printf("trial %d n=%zu err=%.3e iters=%d\n", trial, n, err, sol.iterations);
            return 1;
        }
    }
    std::printf("lambda_max ok worst=%.3e fallbacks=%d\n", worst, fallbacks);

    // feasibility: X >= 0, tr X = 1
    {
        SdpProblem p;
        p.blocks.push_back({3});
        p.objective.block_trace_coefs = {0.0};
        SdpConstraint con;
        for (std::size_t i = 0; i < 3; ++i) con.terms.push_back({0, i, i, cpx(1.0)});
        con.rhs = 1.0;
        p.constraints.push_back(con);
        const auto sol = solve_min(p, {});
        if (sol.status != SdpStatus::optimal ||
            std::abs(sol.block_values[0].trace().real() - 1.0) > 1e-8 ||
            min_eigenvalue(sol.block_values[0]) < -1e-9) {
            std::printf("feasibility FAIL status=%s\n", sdp_status_name(sol.status));
            return 1;
        }
        std::printf("feasibility ok trace=%.12f\n", sol.block_values[0].trace().real());
    }

    // infeasible: tr X = -1
    {
        SdpProblem p;
        p.blocks.push_back({3});
        p.objective.block_trace_coefs = {0.0};
        SdpConstraint con;
        for (std::size_t i = 0; i < 3; ++i) con.terms.push_back({0, i, i, cpx(1.0)});
        con.rhs = -1.0;
        p.constraints.push_back(con);
        const auto sol = solve_min(p, {});
        if (sol.status != SdpStatus::infeasible) {
            std::printf("infeasible FAIL status=%s iters=%d\n", sdp_status_name(sol.status),
                        sol.iterations);
            return 1;
        }
        std::printf("infeasible ok (certificate size %zu)\n", sol.certificate.size());
    }

    // determinism
    {
        ComplexMatrix a(5, 5);
        for (auto& v : a.a) v = rng.cnormal();
        a = hermitize(a + a.adjoint());
        const auto p = lambda_max_problem(a);
        const auto s1 = solve_min(p, {});
        const auto s2 = solve_min(p, {});
        if (s1.summary() != s2.summary()) {
            std::printf("determinism FAIL\n%s\n%s\n", s1.summary().c_str(),
                        s2.summary().c_str());
            return 1;
        }
        std::printf("determinism ok: %s\n", s1.summary().c_str());
    }
    return 0;
}
