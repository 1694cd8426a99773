#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <string>
#include <vector>

#include "calcular/eig.hpp"
#include "calcular/errors.hpp"
#include "calcular/matrix.hpp"

namespace calcular {

// ---------------------------------------------------------------------------
// Problem description (complex-facing).
//
// Variables are Hermitian PSD blocks Gamma_b plus free real scalars u_k.
// Each equality constraint is a complex-linear functional
//     sum_t coef_t * Gamma_{block_t}[row_t, col_t] + sum_k scoef_k * u_k = rhs,
// understood together with its conjugate (the blocks are Hermitian).  The
// objective is a real linear functional of the scalars and the block traces.
// ---------------------------------------------------------------------------

struct SdpBlockSpec {
    std::size_t size = 0;
};

struct SdpTerm {
    int block = 0;
    std::size_t row = 0, col = 0;
    cpx coef;
};

struct SdpScalarTerm {
    int index = 0;
    cpx coef;
};

struct SdpConstraint {
    std::vector<SdpTerm> terms;
    std::vector<SdpScalarTerm> scalar_terms;
    cpx rhs;
};

struct SdpObjective {
    std::vector<double> scalar_coefs;       // length num_scalars
    std::vector<double> block_trace_coefs;  // length blocks.size()
};

struct SdpProblem {
    std::vector<SdpBlockSpec> blocks;
    int num_scalars = 0;
    std::vector<SdpConstraint> constraints;
    SdpObjective objective;
};

struct SdpOptions {
    int max_iter = 100;
    double tol = 1e-10;
    std::uint64_t seed = 0;  // echoed for replay; the solver itself is deterministic
};

enum class SdpStatus { optimal, infeasible, diverged };

inline const char* sdp_status_name(SdpStatus s) {
    switch (s) {
        case SdpStatus::optimal: return "optimal";
        case SdpStatus::infeasible: return "infeasible";
        case SdpStatus::diverged: return "diverged";
    }
    return "?";
}

struct SdpSolution {
    SdpStatus status = SdpStatus::diverged;
    std::vector<ComplexMatrix> block_values;
    std::vector<double> scalar_values;
    double objective = 0.0;
    double primal_residual = 0.0;  // max |constraint violation| in complex form
    double dual_gap = 0.0;         // |primal objective - dual objective|
    int iterations = 0;
    bool used_fallback = false;
    std::vector<double> certificate;  // Farkas direction when infeasible

    std::string summary() const {
        char buf[256];
        std::snprintf(buf, sizeof(buf),
                      "status=%s iters=%d fallback=%d obj=%.17g presid=%.17g dgap=%.17g",
                      sdp_status_name(status), iterations, used_fallback ? 1 : 0, objective,
                      primal_residual, dual_gap);
        return buf;
    }
};

namespace detail {

// --- dense real symmetric kernel used only inside the solver ---------------

struct RMat {
    std::size_t n = 0;
    std::vector<double> a;
    RMat() = default;
    explicit RMat(std::size_t n_) : n(n_), a(n_ * n_, 0.0) {}
    double& at(std::size_t i, std::size_t j) { return a[i * n + j]; }
    double at(std::size_t i, std::size_t j) const { return a[i * n + j]; }
    static RMat identity(std::size_t n_, double s = 1.0) {
        RMat m(n_);
        for (std::size_t i = 0; i < n_; ++i) m.at(i, i) = s;
        return m;
    }
    double trace() const {
        double t = 0.0;
        for (std::size_t i = 0; i < n; ++i) t += at(i, i);
        return t;
    }
    double frob() const {
        double s = 0.0;
        for (double v : a) s += v * v;
        return std::sqrt(s);
    }
};

inline void raxpy(RMat& y, const RMat& x, double s) {
    for (std::size_t k = 0; k < y.a.size(); ++k) y.a[k] += s * x.a[k];
}

inline double rinner(const RMat& x, const RMat& y) {
    double s = 0.0;
    for (std::size_t k = 0; k < x.a.size(); ++k) s += x.a[k] * y.a[k];
    return s;
}

inline RMat rmul(const RMat& x, const RMat& y) {
    RMat m(x.n);
    for (std::size_t i = 0; i < x.n; ++i)
        for (std::size_t k = 0; k < x.n; ++k) {
            const double v = x.at(i, k);
            if (v == 0.0) continue;
            const double* yr = &y.a[k * y.n];
            double* mr = &m.a[i * m.n];
            for (std::size_t j = 0; j < y.n; ++j) mr[j] += v * yr[j];
        }
    return m;
}

inline RMat rtranspose(const RMat& x) {
    RMat m(x.n);
    for (std::size_t i = 0; i < x.n; ++i)
        for (std::size_t j = 0; j < x.n; ++j) m.at(j, i) = x.at(i, j);
    return m;
}

inline void rsymmetrize(RMat& x) {
    for (std::size_t i = 0; i < x.n; ++i)
        for (std::size_t j = i + 1; j < x.n; ++j) {
            const double v = 0.5 * (x.at(i, j) + x.at(j, i));
            x.at(i, j) = v;
            x.at(j, i) = v;
        }
}

// Lower Cholesky; false on breakdown.
inline bool rchol(const RMat& x, RMat& l) {
    const std::size_t n = x.n;
    l = RMat(n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = x.at(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= l.at(j, k) * l.at(j, k);
        if (!(d > 0.0) || !std::isfinite(d)) return false;
        const double lj = std::sqrt(d);
        l.at(j, j) = lj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = x.at(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l.at(i, k) * l.at(j, k);
            l.at(i, j) = s / lj;
        }
    }
    return true;
}

// Solve L Y = B (lower triangular), B overwritten column-wise.
inline RMat lower_solve(const RMat& l, const RMat& b) {
    RMat y = b;
    const std::size_t n = l.n;
    for (std::size_t j = 0; j < y.n; ++j)
        for (std::size_t i = 0; i < n; ++i) {
            double s = y.at(i, j);
            for (std::size_t k = 0; k < i; ++k) s -= l.at(i, k) * y.at(k, j);
            y.at(i, j) = s / l.at(i, i);
        }
    return y;
}

inline std::vector<double> lower_solve_vec(const RMat& l, std::vector<double> v) {
    const std::size_t n = l.n;
    for (std::size_t i = 0; i < n; ++i) {
        double s = v[i];
        for (std::size_t k = 0; k < i; ++k) s -= l.at(i, k) * v[k];
        v[i] = s / l.at(i, i);
    }
    return v;
}

inline std::vector<double> upper_solve_vec(const RMat& l, std::vector<double> v) {
    // solves L^T x = v
    const std::size_t n = l.n;
    for (std::size_t ii = n; ii-- > 0;) {
        double s = v[ii];
        for (std::size_t k = ii + 1; k < n; ++k) s -= l.at(k, ii) * v[k];
        v[ii] = s / l.at(ii, ii);
    }
    return v;
}

inline RMat lower_inverse(const RMat& l) {
    return lower_solve(l, RMat::identity(l.n));
}

// Cyclic real Jacobi for symmetric matrices; eigenvalues ascending.
inline void jacobi_sym(RMat h, RMat& v, std::vector<double>& vals) {
    const std::size_t n = h.n;
    v = RMat::identity(n);
    const double scale = h.frob();
    const double stop = 1e-14 * (1.0 + scale);
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += h.at(p, q) * h.at(p, q);
        if (std::sqrt(2.0 * off) <= stop) break;
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = h.at(p, q);
                if (std::abs(apq) <= 1e-18 * (1.0 + scale)) continue;
                const double tau = (h.at(q, q) - h.at(p, p)) / (2.0 * apq);
                const double t =
                    (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (std::size_t i = 0; i < n; ++i) {
                    const double hip = h.at(i, p), hiq = h.at(i, q);
                    h.at(i, p) = c * hip - s * hiq;
                    h.at(i, q) = s * hip + c * hiq;
                }
                for (std::size_t j = 0; j < n; ++j) {
                    const double hpj = h.at(p, j), hqj = h.at(q, j);
                    h.at(p, j) = c * hpj - s * hqj;
                    h.at(q, j) = s * hpj + c * hqj;
                }
                h.at(p, q) = 0.0;
                h.at(q, p) = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double vip = v.at(i, p), viq = v.at(i, q);
                    v.at(i, p) = c * vip - s * viq;
                    v.at(i, q) = s * vip + c * viq;
                }
            }
    }
    vals.resize(n);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return h.at(i, i) < h.at(j, j); });
    RMat vs(n);
    for (std::size_t k = 0; k < n; ++k) {
        vals[k] = h.at(order[k], order[k]);
        for (std::size_t i = 0; i < n; ++i) vs.at(i, k) = v.at(i, order[k]);
    }
    v = vs;
}

inline double min_eig_sym(const RMat& x) {
    RMat v;
    std::vector<double> vals;
    jacobi_sym(x, v, vals);
    return x.n == 0 ? 0.0 : vals.front();
}

// --- realified problem data --------------------------------------------------

struct SparseEntry {
    int i, j;
    double v;
};

struct RealRow {
    std::vector<std::vector<SparseEntry>> blk;  // per block
    std::vector<double> scal;                   // per scalar variable
    double rhs = 0.0;
};

struct RealProblem {
    std::vector<std::size_t> block_sizes;  // realified (doubled) sizes
    std::size_t num_scalars = 0;
    std::vector<RealRow> rows;
    std::vector<RMat> c_blocks;
    std::vector<double> c_scal;
    bool inconsistent = false;  // exact contradictory rows found during assembly
    std::vector<double> farkas;  // certificate for `inconsistent`
};

inline double sparse_inner(const std::vector<SparseEntry>& a, const RMat& x) {
    double s = 0.0;
    for (const auto& e : a) s += e.v * x.at(e.i, e.j);
    return s;
}

// W A W for sparse symmetric A: sum of v * W[:,i] W[:,j]^T over entries.
inline RMat sandwich(const RMat& w, const std::vector<SparseEntry>& a) {
    RMat m(w.n);
    for (const auto& e : a) {
        const double* wi = &w.a[0];
        for (std::size_t r = 0; r < w.n; ++r) {
            const double wri = wi[r * w.n + e.i] * e.v;
            if (wri == 0.0) continue;
            const double* wj = &w.a[e.j];
            double* mr = &m.a[r * m.n];
            for (std::size_t c = 0; c < w.n; ++c) mr[c] += wri * wj[c * w.n];
        }
    }
    return m;
}

// Realify one complex linear functional into a sparse symmetric coefficient
// set on the doubled block.  The complex Hermitian pairing matrix M with
// tr(M Gamma) = Re(sum coef * Gamma[i][j]) maps to (1/2) [[Re M, Im M],
// [-Im M, Re M]] on the embedded symmetric variable.
inline void realify_terms(const std::vector<SdpTerm>& terms, bool imag_part,
                          const std::vector<std::size_t>& complex_sizes,
                          std::vector<std::vector<SparseEntry>>& out) {
    // Accumulate Hermitian pairing matrices per block (sparse via map-ish
    // linear scan; term lists are tiny).
    struct MEntry {
        int block;
        std::size_t p, q;
        cpx m;
    };
    std::vector<MEntry> ms;
    for (const auto& t : terms) {
        cpx c = t.coef;
        if (imag_part) c *= cpx(0.0, -1.0);
        if (t.row == t.col) {
            ms.push_back({t.block, t.row, t.col, cpx(c.real(), 0.0)});
        } else {
            ms.push_back({t.block, t.col, t.row, 0.5 * c});
            ms.push_back({t.block, t.row, t.col, 0.5 * std::conj(c)});
        }
    }
    auto add = [&](int block, std::size_t i, std::size_t j, double v) {
        if (v == 0.0) return;
        for (auto& e : out[block])
            if (e.i == static_cast<int>(i) && e.j == static_cast<int>(j)) {
                e.v += v;
                return;
            }
        out[block].push_back({static_cast<int>(i), static_cast<int>(j), v});
    };
    for (const auto& me : ms) {
        const std::size_t n = complex_sizes[me.block];
        add(me.block, me.p, me.q, 0.5 * me.m.real());
        add(me.block, n + me.p, n + me.q, 0.5 * me.m.real());
        add(me.block, me.p, n + me.q, -0.5 * me.m.imag());
        add(me.block, n + me.p, me.q, 0.5 * me.m.imag());
    }
}

inline RealProblem realify(const SdpProblem& p) {
    RealProblem rp;
    std::vector<std::size_t> csizes;
    for (const auto& b : p.blocks) {
        csizes.push_back(b.size);
        rp.block_sizes.push_back(2 * b.size);
    }
    rp.num_scalars = static_cast<std::size_t>(p.num_scalars);

    for (std::size_t b = 0; b < p.blocks.size(); ++b) {
        const double tc =
            b < p.objective.block_trace_coefs.size() ? p.objective.block_trace_coefs[b] : 0.0;
        rp.c_blocks.push_back(RMat::identity(rp.block_sizes[b], 0.5 * tc));
    }
    rp.c_scal.assign(rp.num_scalars, 0.0);
    for (std::size_t k = 0; k < rp.num_scalars && k < p.objective.scalar_coefs.size(); ++k)
        rp.c_scal[k] = p.objective.scalar_coefs[k];

    for (const auto& con : p.constraints) {
        for (int part = 0; part < 2; ++part) {
            RealRow row;
            row.blk.resize(p.blocks.size());
            row.scal.assign(rp.num_scalars, 0.0);
            realify_terms(con.terms, part == 1, csizes, row.blk);
            for (const auto& st : con.scalar_terms)
                row.scal[st.index] += part == 0 ? st.coef.real() : st.coef.imag();
            row.rhs = part == 0 ? con.rhs.real() : con.rhs.imag();

            double maxc = 0.0;
            for (const auto& bl : row.blk)
                for (const auto& e : bl) maxc = std::max(maxc, std::abs(e.v));
            for (double s : row.scal) maxc = std::max(maxc, std::abs(s));
            if (maxc <= 1e-15) {
                if (std::abs(row.rhs) > 1e-12) {
                    rp.inconsistent = true;
                    rp.farkas.assign(rp.rows.size() + 1, 0.0);
                    rp.farkas.back() = row.rhs > 0 ? 1.0 : -1.0;
                    rp.rows.push_back(std::move(row));
                    return rp;
                }
                continue;  // vacuous row (e.g. trivial imaginary parts)
            }
            rp.rows.push_back(std::move(row));
        }
    }

    // Drop rows that duplicate (or negate) an earlier row; conjugate-pair
    // inputs produce these.  A duplicate with conflicting rhs is an exact
    // infeasibility certificate.
    auto canonical = [](const RealRow& r) {
        RealRow c = r;
        for (auto& bl : c.blk)
            std::sort(bl.begin(), bl.end(), [](const SparseEntry& x, const SparseEntry& y) {
                return x.i != y.i ? x.i < y.i : x.j < y.j;
            });
        double lead = 0.0;
        for (const auto& bl : c.blk)
            for (const auto& e : bl)
                if (lead == 0.0 && e.v != 0.0) lead = e.v;
        if (lead == 0.0)
            for (double s : c.scal)
                if (lead == 0.0 && s != 0.0) lead = s;
        const double sign = lead < 0.0 ? -1.0 : 1.0;
        for (auto& bl : c.blk)
            for (auto& e : bl) e.v *= sign;
        for (auto& s : c.scal) s *= sign;
        c.rhs *= sign;
        return c;
    };
    auto same_lhs = [](const RealRow& x, const RealRow& y) {
        if (x.scal != y.scal) return false;
        for (std::size_t b = 0; b < x.blk.size(); ++b) {
            if (x.blk[b].size() != y.blk[b].size()) return false;
            for (std::size_t k = 0; k < x.blk[b].size(); ++k) {
                const auto& e = x.blk[b][k];
                const auto& f = y.blk[b][k];
                if (e.i != f.i || e.j != f.j || e.v != f.v) return false;
            }
        }
        return true;
    };
    std::vector<RealRow> canon;
    std::vector<RealRow> kept;
    for (auto& row : rp.rows) {
        RealRow c = canonical(row);
        bool dup = false;
        for (std::size_t k = 0; k < canon.size(); ++k) {
            if (same_lhs(canon[k], c)) {
                if (std::abs(canon[k].rhs - c.rhs) > 1e-12) {
                    rp.inconsistent = true;
                    rp.farkas.assign(kept.size(), 0.0);
                    // conflicting pair: certificate supported on rows k and new
                    rp.farkas[k] = c.rhs > canon[k].rhs ? -1.0 : 1.0;
                }
                dup = true;
                break;
            }
        }
        if (!dup) {
            canon.push_back(std::move(c));
            kept.push_back(std::move(row));
        }
        if (rp.inconsistent) break;
    }
    rp.rows = std::move(kept);
    return rp;
}

}  // namespace detail

SdpSolution solve_min(const SdpProblem& p, const SdpOptions& opts = {});

struct SdpVerifyReport {
    bool ok = true;
    double worst_psd_violation = 0.0;       // most negative block eigenvalue, as >= 0
    double worst_equality_violation = 0.0;  // max |lhs - rhs|
    double objective_mismatch = 0.0;
    std::vector<std::string> failures;
};

// Re-checks a solution against the complex problem data, independently of any
// solver internals.
inline SdpVerifyReport verify_solution(const SdpProblem& p, const SdpSolution& s, double tol) {
    SdpVerifyReport rep;
    if (s.status != SdpStatus::optimal) {
        rep.ok = false;
        rep.failures.push_back("solution status is not optimal");
        return rep;
    }
    for (std::size_t b = 0; b < p.blocks.size(); ++b) {
        if (p.blocks[b].size == 0) continue;
        const double lmin = min_eigenvalue(hermitize(s.block_values[b]));
        rep.worst_psd_violation = std::max(rep.worst_psd_violation, std::max(0.0, -lmin));
    }
    if (rep.worst_psd_violation > tol) {
        rep.ok = false;
        rep.failures.push_back("block not PSD within tolerance");
    }
    for (const auto& con : p.constraints) {
        cpx lhs = 0.0;
        for (const auto& t : con.terms) lhs += t.coef * s.block_values[t.block](t.row, t.col);
        for (const auto& st : con.scalar_terms) lhs += st.coef * s.scalar_values[st.index];
        rep.worst_equality_violation =
            std::max(rep.worst_equality_violation, std::abs(lhs - con.rhs));
    }
    if (rep.worst_equality_violation > tol) {
        rep.ok = false;
        rep.failures.push_back("equality constraint violated");
    }
    double obj = 0.0;
    for (std::size_t b = 0; b < p.blocks.size(); ++b)
        if (b < p.objective.block_trace_coefs.size())
            obj += p.objective.block_trace_coefs[b] * s.block_values[b].trace().real();
    for (int k = 0; k < p.num_scalars; ++k)
        if (k < static_cast<int>(p.objective.scalar_coefs.size()))
            obj += p.objective.scalar_coefs[k] * s.scalar_values[k];
    rep.objective_mismatch = std::abs(obj - s.objective);
    if (rep.objective_mismatch > tol * (1.0 + std::abs(obj))) {
        rep.ok = false;
        rep.failures.push_back("objective value mismatch");
    }
    return rep;
}

}  // namespace calcular

#include "calcular/sdp_ipm.hpp"
