#include <cstdio>

#include "calcular/agler.hpp"
#include "calcular/kernel.hpp"
#include "calcular/realization.hpp"

using namespace calcular;

int main() {
    const Domain disk = make_domain(DomainKind::polydisk, 1);
    const ClassSpec s_z = make_class_spec({make_coordinate(1)}, disk);

    // Pick closed forms on F = {0, 1/2}
    const FinitePointSet f = make_finite_point_set(disk, {{cpx(0.0)}, {cpx(0.5)}});
    {
        const auto res = agler_norm(std::vector<cpx>{0.0, 0.75}, f, s_z);
        std::printf("pick 3/4 -> M=%.12f (expect 1.5) resid=%.3e iters=%d\n", res.norm,
                    res.decomposition.residual, res.iterations);
        if (std::abs(res.norm - 1.5) > 1e-6) return 1;
    }
    {
        const auto res = agler_norm(std::vector<cpx>{0.0, 0.5}, f, s_z);
        std::printf("pick 1/2 -> M=%.12f (expect 1.0)\n", res.norm);
        if (std::abs(res.norm - 1.0) > 1e-6) return 1;
    }
    // constant
    {
        const auto res = agler_norm(std::vector<cpx>{cpx(0.3, 0.4), cpx(0.3, 0.4)}, f, s_z);
        std::printf("const -> M=%.12f (expect 0.5)\n", res.norm);
        if (std::abs(res.norm - 0.5) > 1e-6) return 1;
    }

    // multiplier norm via similarity vs Pick values
    {
        const auto szego = builtin_kernel(BuiltinKernel::szego_disk, f);
        const double m1 = finite_multiplier_norm(std::vector<cpx>{0.0, 0.75}, szego.kernel);
        const double m2 = finite_multiplier_norm(std::vector<cpx>{0.0, 0.5}, szego.kernel);
        std::printf("mult norms: %.12f %.12f\n", m1, m2);
        if (std::abs(m1 - 1.5) > 1e-9 || std::abs(m2 - 1.0) > 1e-9) return 1;
        // model tuple consistency
        const CommutingTuple t = model_tuple(szego.kernel);
        const double m3 = operator_norm(
            apply_function(make_polynomial(1, {{{1}, cpx(1.5)}}), t));  // phi(z)=1.5 z
        const double m4 = finite_multiplier_norm(make_polynomial(1, {{{1}, cpx(1.5)}}),
                                                 szego.kernel);
        std::printf("model vs mult: %.12f %.12f\n", m3, m4);
        if (std::abs(m3 - m4) > 1e-8) return 1;
    }

    // Schur-Agler bound for z1 z2 on the bidisk
    {
        const Domain bidisk = make_domain(DomainKind::polydisk, 2);
        const ClassSpec s2 = make_class_spec({make_coordinate(1), make_coordinate(2)}, bidisk);
        const FinitePointSet f2 = make_finite_point_set(
            bidisk, {{cpx(0.1, 0.2), cpx(-0.3, 0.1)},
                     {cpx(0.5), cpx(0.4, -0.2)},
                     {cpx(-0.2, -0.4), cpx(0.6)}});
        const HoloFunction z1z2 = make_polynomial(2, {{{1, 1}, cpx(1.0)}});
        const auto res = agler_norm(z1z2, f2, s2);
        std::printf("z1z2 -> M=%.12f (expect <= 1)\n", res.norm);
        if (res.norm > 1.0 + 1e-7) return 1;

        // realize it: M <= 1
        const auto dec = res.decomposition;
        const Realization r = build_realization(eval_on_points(z1z2, f2), f2, s2, dec);
        std::printf("realization m=%zu unit=%.3e\n", r.state_dim,
                    (r.u.adjoint() * r.u - ComplexMatrix::identity(1 + r.state_dim))
                        .frobenius_norm());
        const auto rep = verify_realization(r, f2.points, eval_on_points(z1z2, f2), 1e-10);
        std::printf("verify: interp=%.3e sample_max=%.6f pass=%d\n",
                    rep.max_interpolation_error, rep.max_abs_on_sample, rep.pass ? 1 : 0);
        if (!rep.pass) return 1;
    }

    // hand case: phi = z, Gamma = all-ones, F = {0, 1/2}
    {
        AglerDecomposition dec;
        dec.bound = 1.0;
        ComplexMatrix ones(2, 2);
        for (auto& v : ones.a) v = 1.0;
        dec.certificates = {ones};
        const Realization r =
            build_realization(std::vector<cpx>{0.0, 0.5}, f, s_z, dec);
        std::printf("phi=z realization m=%zu\n", r.state_dim);
        if (r.state_dim != 1) return 1;
        const cpx v = transfer_eval_point(r, {cpx(0.3)});
        std::printf("transfer(0.3) = %.12f + %.3e i\n", v.real(), v.imag());
        if (std::abs(v - cpx(0.3)) > 1e-10) return 1;
        std::printf("U = [[%.6f%+.6fi, %.6f%+.6fi],[%.6f%+.6fi, %.6f%+.6fi]]\n",
                    r.u(0, 0).real(), r.u(0, 0).imag(), r.u(0, 1).real(), r.u(0, 1).imag(),
                    r.u(1, 0).real(), r.u(1, 0).imag(), r.u(1, 1).real(), r.u(1, 1).imag());

        // tuple evaluation: a contraction with spectrum in D maps to itself
        ComplexMatrix tm(3, 3);
        tm(0, 0) = cpx(0.2, 0.1);
        tm(0, 1) = 0.5;
        tm(1, 1) = cpx(-0.3);
        tm(1, 2) = 0.2;
        tm(2, 2) = cpx(0.1, -0.4);
        const CommutingTuple tt = make_commuting_tuple({tm});
        const ComplexMatrix img = transfer_eval_tuple(r, tt);
        const double err = (img - tm).frobenius_norm();
        std::printf("transfer(T) vs T: %.3e, norm=%.6f\n", err, operator_norm(img));
        if (err > 1e-9) return 1;
    }

    // constant realization on a single interpolation node: canonical 2x2 form
    {
        const cpx c(0.6, -0.3);
        const double s = std::sqrt(1.0 - std::norm(c));
        const FinitePointSet f1 = make_finite_point_set(disk, {{cpx(0.0)}});
        AglerDecomposition dec;
        dec.bound = std::abs(c);
        dec.certificates = {ComplexMatrix::zeros(1, 1)};
        const Realization r = build_realization(std::vector<cpx>{c}, f1, s_z, dec);
        std::printf("const realization m=%zu A=%.6f%+.6fi C=%.6f%+.6fi\n", r.state_dim,
                    r.u(0, 0).real(), r.u(0, 0).imag(), r.u(1, 0).real(), r.u(1, 0).imag());
        if (r.state_dim != 1) return 1;
        if (std::abs(r.u(0, 0) - c) > 1e-10) return 1;
        if (std::abs(r.u(1, 0) - cpx(s)) > 1e-10) return 1;  // gauge: C real nonneg
        if (std::abs(std::abs(r.u(0, 1)) - s) > 1e-10) return 1;
        if (std::abs(std::abs(r.u(1, 1)) - std::abs(c)) > 1e-10) return 1;
        const cpx v = transfer_eval_point(r, {cpx(0.0)});
        if (std::abs(v - c) > 1e-9) return 1;
    }

    std::printf("all ok\n");
    return 0;
}
