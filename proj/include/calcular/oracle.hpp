#pragma once

#include <string>
#include <vector>

#include "calcular/agler.hpp"
#include "calcular/errors.hpp"
#include "calcular/kernel.hpp"
#include "calcular/parallel.hpp"
#include "calcular/realization.hpp"
#include "calcular/rng.hpp"
#include "calcular/tuple.hpp"

namespace calcular {

struct SearchBudget {
    int samples = 10000;
    int refine_steps = 200;
    std::uint64_t seed = 0;
};

struct KernelSearchOutcome {
    double lower_bound = 0.0;
    KernelMatrix best_kernel;
    int accepted = 0;
    int rejected = 0;
    std::uint64_t seed = 0;
};

namespace detail {

inline bool gram_in_K_S(const ComplexMatrix& gram,
                        const std::vector<std::vector<cpx>>& psi_vals, double tol) {
    const std::size_t n = gram.rows;
    for (const auto& vals : psi_vals) {
        ComplexMatrix test(n, n);
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
                test(a, b) = (1.0 - vals[a] * std::conj(vals[b])) * gram(a, b);
        if (min_eig_complex_hermitian(test) < -tol) return false;
    }
    return true;
}

inline double gram_multiplier_norm(const ComplexMatrix& gram, const std::vector<cpx>& phi) {
    const auto eig = hermitian_eig(gram, 1e-8);
    if (eig.eigenvalues.back() <= 1e-10) return -1.0;  // reject near-singular grams
    const ComplexMatrix l = psd_factor(gram, 1e-12);
    if (l.cols != gram.rows) return -1.0;
    return operator_norm(inverse(l) * ComplexMatrix::diagonal(phi) * l);
}

inline ComplexMatrix wishart_gram(std::size_t n, Rng& rng) {
    ComplexMatrix w(n, n + 2);
    for (auto& v : w.a) v = rng.cnormal();
    ComplexMatrix g = w * w.adjoint();
    for (std::size_t i = 0; i < n; ++i) g(i, i) += 1e-8;
    return hermitize(g);
}

}  // namespace detail

// Independent lower bound on the Agler/A-infinity norm: sample strictly-PSD
// Wishart grams, keep those inside K_S, evaluate the finite multiplier norm,
// then coordinate-hill-climb the factor entries of the best survivors while
// staying inside K_S.  Deterministic given the budget seed; sampling is
// parallel with per-index substreams so thread count does not matter.
inline KernelSearchOutcome kernel_search_lower_bound(const HoloFunction& phi,
                                                     const FinitePointSet& f,
                                                     const ClassSpec& s,
                                                     const SearchBudget& budget) {
    const std::size_t n = f.size();
    const std::vector<cpx> phi_vals = eval_on_points(phi, f);
    std::vector<std::vector<cpx>> psi_vals;
    for (const auto& psi : s.constraints) psi_vals.push_back(eval_on_points(psi, f));
    const double member_tol = 1e-10;

    std::vector<double> values(budget.samples, -1.0);
    parallel_for(budget.samples, [&](std::size_t i) {
        Rng rng(Rng::derive(budget.seed, i));
        const ComplexMatrix g = detail::wishart_gram(n, rng);
        if (!detail::gram_in_K_S(g, psi_vals, member_tol)) return;
        values[i] = detail::gram_multiplier_norm(g, phi_vals);
    });

    KernelSearchOutcome out;
    out.seed = budget.seed;
    std::vector<std::size_t> survivors;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] >= 0.0)
            survivors.push_back(i);
        else
            ++out.rejected;
    }
    out.accepted = static_cast<int>(survivors.size());
    if (survivors.empty())
        fail(Err::NoFeasibleSample,
             "no sampled gram was accepted by the K_S membership test (rejected " +
                 std::to_string(out.rejected) + " of " + std::to_string(budget.samples) + ")");

    std::sort(survivors.begin(), survivors.end(), [&](std::size_t a, std::size_t b) {
        return values[a] != values[b] ? values[a] > values[b] : a < b;
    });
    const std::size_t climbers = std::min<std::size_t>(survivors.size(), 16);

    double best_value = -1.0;
    ComplexMatrix best_gram;
    for (std::size_t c = 0; c < climbers; ++c) {
        const std::size_t idx = survivors[c];
        Rng rng(Rng::derive(budget.seed, idx));
        ComplexMatrix gram = detail::wishart_gram(n, rng);
        ComplexMatrix l = psd_factor(gram, 1e-12);
        double value = values[idx];
        double step = 0.25 * (1.0 + l.max_abs());

        for (int round = 0; round < budget.refine_steps; ++round) {
            bool improved = false;
            for (std::size_t k = 0; k < l.a.size(); ++k) {
                for (const cpx delta :
                     {cpx(step, 0.0), cpx(-step, 0.0), cpx(0.0, step), cpx(0.0, -step)}) {
                    ComplexMatrix lt = l;
                    lt.a[k] += delta;
                    const ComplexMatrix gt = hermitize(lt * lt.adjoint());
                    if (!detail::gram_in_K_S(gt, psi_vals, member_tol)) continue;
                    const double vt = detail::gram_multiplier_norm(gt, phi_vals);
                    if (vt > value + 1e-14) {
                        value = vt;
                        l = lt;
                        improved = true;
                    }
                }
            }
            if (!improved) {
                step *= 0.5;
                if (step < 1e-10) break;
            }
        }
        if (value > best_value) {
            best_value = value;
            best_gram = hermitize(l * l.adjoint());
        }
    }

    out.lower_bound = best_value;
    out.best_kernel = make_kernel_matrix(f, best_gram);
    return out;
}

// --- closure report ----------------------------------------------------------

struct ClosureCounterexample {
    std::string check;    // "a", "b" or "c"
    std::string detail;   // reproduction data: indices and seeds
    double value = 0.0;   // offending norm
};

struct ClosureReport {
    bool pass = true;
    int checks_a = 0, checks_b = 0, checks_c = 0;
    double worst_a = 0.0, worst_b = 0.0, worst_c = 0.0;  // max norm seen per check
    std::vector<ClosureCounterexample> counterexamples;
    std::uint64_t seed = 0;
};

namespace detail {

inline HoloFunction scale_function(const HoloFunction& fn, double s, int d) {
    return {poly_scale(to_polynomial(fn, d), cpx(s))};
}

}  // namespace detail

// Sample-level closure checks:
//  (a) every T in C stays contractive under pool functions normalized by
//      their sup norm over C (the H(S(C)) ⊇ C direction);
//  (b) every psi in S is contractive on model tuples of sampled K_S kernels
//      (the S(H(S)) ⊇ S direction);
//  (c) pool functions normalized by their sampled Agler norm and certified by
//      a realization stay contractive on those same sampled members.
inline ClosureReport closure_report(const ClassSpec& s, const std::vector<CommutingTuple>& c,
                                    const std::vector<HoloFunction>& phi_pool,
                                    const SearchBudget& budget) {
    ClosureReport rep;
    rep.seed = budget.seed;
    const int d = s.domain.d;
    const double tol_a = 1e-9;
    const double tol_b = 1e-9;
    const double tol_c = 1e-6;

    for (const auto& t : c)
        require(check_commuting(t), Err::NotCommuting, "closure_report: tuple not commuting");

    // (a)
    for (std::size_t fi = 0; fi < phi_pool.size(); ++fi) {
        double sup = 0.0;
        for (const auto& t : c) sup = std::max(sup, operator_norm(apply_function(phi_pool[fi], t)));
        if (sup < 1e-12) continue;
        const HoloFunction scaled = detail::scale_function(phi_pool[fi], 1.0 / sup, d);
        for (std::size_t ti = 0; ti < c.size(); ++ti) {
            const double v = operator_norm(apply_function(scaled, c[ti]));
            rep.worst_a = std::max(rep.worst_a, v);
            ++rep.checks_a;
            if (v > 1.0 + tol_a)
                rep.counterexamples.push_back(
                    {"a", "pool_function=" + std::to_string(fi) + " tuple=" + std::to_string(ti),
                     v});
        }
    }

    // sampled H(S) members: model tuples of K_S kernels with a strict margin
    std::vector<KernelMatrix> kernels;
    std::vector<CommutingTuple> members;
    std::vector<std::string> member_tags;
    const int kernel_target = 8;
    for (int attempt = 0; attempt < 400 && static_cast<int>(kernels.size()) < kernel_target;
         ++attempt) {
        Rng rng(Rng::derive(budget.seed ^ 0xb00f5ull, attempt));
        const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform_int(0, 1));
        std::vector<Point> pts;
        while (pts.size() < n) {
            Point z(d);
            for (int r = 0; r < d; ++r) {
                const double rad = 0.7 * std::sqrt(rng.uniform());
                const double th = 2.0 * 3.14159265358979323846 * rng.uniform();
                z[r] = {rad * std::cos(th), rad * std::sin(th)};
            }
            bool distinct = true;
            for (const Point& q : pts) {
                double dist = 0.0;
                for (int r = 0; r < d; ++r) dist += std::norm(q[r] - z[r]);
                if (std::sqrt(dist) <= 1e-3) distinct = false;
            }
            if (distinct) pts.push_back(std::move(z));
        }
        const FinitePointSet fset = make_finite_point_set(s.domain, pts);
        std::vector<std::vector<cpx>> psi_vals;
        for (const auto& psi : s.constraints) psi_vals.push_back(eval_on_points(psi, fset));
        const ComplexMatrix g = detail::wishart_gram(n, rng);
        // strict margin: marginal members would blur the contractivity check
        bool strict = true;
        for (const auto& vals : psi_vals) {
            ComplexMatrix test(n, n);
            for (std::size_t a = 0; a < n; ++a)
                for (std::size_t b = 0; b < n; ++b)
                    test(a, b) = (1.0 - vals[a] * std::conj(vals[b])) * g(a, b);
            if (min_eig_complex_hermitian(test) < 1e-9) strict = false;
        }
        if (!strict) continue;
        kernels.push_back(make_kernel_matrix(fset, g));
        members.push_back(model_tuple(kernels.back()));
        member_tags.push_back("kernel_attempt=" + std::to_string(attempt));
    }
    require(!kernels.empty(), Err::NoFeasibleSample,
            "closure_report: no K_S kernel sample survived the strict margin");

    // (b)
    for (std::size_t ji = 0; ji < s.constraints.size(); ++ji)
        for (std::size_t mi = 0; mi < members.size(); ++mi) {
            const double v = operator_norm(apply_function(s.constraints[ji], members[mi]));
            rep.worst_b = std::max(rep.worst_b, v);
            ++rep.checks_b;
            if (v > 1.0 + tol_b)
                rep.counterexamples.push_back(
                    {"b",
                     "constraint=" + std::to_string(ji) + " member=" + std::to_string(mi) +
                         " (" + member_tags[mi] + ") seed=" + std::to_string(budget.seed),
                     v});
        }

    // (c)
    for (std::size_t fi = 0; fi < phi_pool.size(); ++fi) {
        double anorm = 0.0;
        for (const auto& k : kernels)
            anorm = std::max(anorm, agler_norm(phi_pool[fi], k.pointset, s).norm);
        if (anorm < 1e-12) continue;
        const HoloFunction scaled = detail::scale_function(phi_pool[fi], 1.0 / anorm, d);

        // realization certificate on the point set attaining the max
        std::size_t arg = 0;
        double best = -1.0;
        for (std::size_t ki = 0; ki < kernels.size(); ++ki) {
            const double v = agler_norm(phi_pool[fi], kernels[ki].pointset, s).norm;
            if (v > best) {
                best = v;
                arg = ki;
            }
        }
        const auto cert = agler_norm(scaled, kernels[arg].pointset, s);
        if (cert.norm <= 1.0 + 1e-9) {
            const Realization r = build_realization(
                eval_on_points(scaled, kernels[arg].pointset), kernels[arg].pointset, s,
                cert.decomposition);
            const auto vr = verify_realization(r, kernels[arg].pointset.points,
                                               eval_on_points(scaled, kernels[arg].pointset),
                                               1e-9);
            if (!vr.pass)
                rep.counterexamples.push_back(
                    {"c", "realization certificate failed for pool_function=" +
                              std::to_string(fi),
                     vr.max_interpolation_error});
        }

        for (std::size_t mi = 0; mi < members.size(); ++mi) {
            const double v = operator_norm(apply_function(scaled, members[mi]));
            rep.worst_c = std::max(rep.worst_c, v);
            ++rep.checks_c;
            if (v > 1.0 + tol_c)
                rep.counterexamples.push_back(
                    {"c",
                     "pool_function=" + std::to_string(fi) + " member=" + std::to_string(mi) +
                         " seed=" + std::to_string(budget.seed),
                     v});
        }
    }

    rep.pass = rep.counterexamples.empty();
    return rep;
}

// --- Ruan axiom spot checks ---------------------------------------------------

struct RuanReport {
    int trials = 0;
    int violations = 0;
    double worst_product_slack = 0.0;   // max(0, |XaY| - |X||a||Y|)
    double worst_direct_sum_dev = 0.0;  // | |a (+) b| - max(|a|, |b|) |
    std::uint64_t seed = 0;
};

inline RuanReport ruan_check(const std::vector<MatrixFunction>& phi_pool,
                             const std::vector<CommutingTuple>& t_pool, int trials,
                             std::uint64_t seed) {
    require(!phi_pool.empty() && !t_pool.empty(), Err::ValueError,
            "ruan_check needs nonempty pools");
    RuanReport rep;
    rep.seed = seed;
    rep.trials = trials;
    for (int i = 0; i < trials; ++i) {
        Rng rng(Rng::derive(seed, static_cast<std::uint64_t>(i)));
        const MatrixFunction& phi =
            phi_pool[static_cast<std::size_t>(rng.uniform_int(0, phi_pool.size() - 1))];
        const MatrixFunction& psi =
            phi_pool[static_cast<std::size_t>(rng.uniform_int(0, phi_pool.size() - 1))];
        const CommutingTuple& t =
            t_pool[static_cast<std::size_t>(rng.uniform_int(0, t_pool.size() - 1))];

        const std::size_t n = phi.n;
        ComplexMatrix x(n, n), y(n, n);
        for (auto& v : x.a) v = rng.cnormal();
        for (auto& v : y.a) v = rng.cnormal();

        const ComplexMatrix a = apply_matrix_function(phi, t);
        const ComplexMatrix eye = ComplexMatrix::identity(t.dim);
        const double lhs = operator_norm(kron(x, eye) * a * kron(y, eye));
        const double rhs = operator_norm(x) * operator_norm(a) * operator_norm(y);
        rep.worst_product_slack = std::max(rep.worst_product_slack, lhs - rhs);
        if (lhs > rhs + 1e-9) ++rep.violations;

        // a (+) b via the block-diagonal matrix function
        std::vector<HoloFunction> entries;
        const std::size_t nn = phi.n + psi.n;
        entries.reserve(nn * nn);
        for (std::size_t r = 0; r < nn; ++r)
            for (std::size_t c2 = 0; c2 < nn; ++c2) {
                if (r < phi.n && c2 < phi.n)
                    entries.push_back(phi(r, c2));
                else if (r >= phi.n && c2 >= phi.n)
                    entries.push_back(psi(r - phi.n, c2 - phi.n));
                else
                    entries.push_back(make_constant(0.0));
            }
        const MatrixFunction both = make_matrix_function(nn, std::move(entries));
        const double sum_norm = matrix_norm_level_n(both, t);
        const double expect =
            std::max(operator_norm(a), operator_norm(apply_matrix_function(psi, t)));
        const double dev = std::abs(sum_norm - expect);
        rep.worst_direct_sum_dev = std::max(rep.worst_direct_sum_dev, dev);
        if (dev > 1e-10) ++rep.violations;
    }
    return rep;
}

// --- von Neumann spot check ----------------------------------------------------

struct VnReport {
    double norm_at_tuple = 0.0;
    double grid_sup = 0.0;
    double slack = 0.0;  // Lipschitz allowance for grid undersampling
    int resolution_used = 0;
    std::string verdict;  // "pass", "fail" or "exploratory"
};

// Reports |p(T)| against the boundary-grid sup norm with a sound
// coefficient-derivative slack.  For d <= 2 a FAIL verdict is meaningful; for
// d >= 3 only exploratory runs are allowed (the inequality can genuinely fail
// there).
inline VnReport von_neumann_check(const CommutingTuple& t, const HoloFunction& p,
                                  int resolution, bool exploratory = false) {
    if (t.d > 2)
        require(exploratory, Err::UnsupportedDimension,
                "von Neumann verdicts are restricted to d <= 2; rerun exploratory");
    const Domain dom = make_domain(DomainKind::polydisk, t.d);
    for (int r = 0; r < t.d; ++r)
        require(operator_norm(t.coords[r]) <= 1.0 + 1e-10, Err::NotInClass,
                "von_neumann_check needs a tuple of contractions");
    require_spectrum_interior(t, dom);

    const Polynomial poly = to_polynomial(p, t.d);
    VnReport rep;
    rep.resolution_used = detail::effective_resolution(resolution);
    rep.norm_at_tuple = operator_norm(apply_function(p, t));
    rep.grid_sup = grid_sup_norm(HoloFunction{poly}, dom, resolution);
    rep.slack =
        poly_derivative_bound(poly) * 3.14159265358979323846 / rep.resolution_used;
    if (t.d > 2)
        rep.verdict = "exploratory";
    else
        rep.verdict = rep.norm_at_tuple <= rep.grid_sup + rep.slack ? "pass" : "fail";
    return rep;
}

}  // namespace calcular
