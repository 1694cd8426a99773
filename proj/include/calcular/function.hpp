#pragma once

#include <map>
#include <memory>
#include <variant>
#include <vector>

#include "calcular/domain.hpp"
#include "calcular/errors.hpp"
#include "calcular/matrix.hpp"

namespace calcular {

struct Realization;  // realization.hpp

// Multi-index polynomial over C^d.  Coefficients live in a sorted map so the
// Horner contraction order is deterministic and results reproduce bit-exactly.
struct Polynomial {
    int d = 1;
    std::map<std::vector<int>, cpx> coeffs;
};

struct Constant {
    cpx value;
};

struct Coordinate {
    int index = 1;  // 1-based
};

// A holomorphic function in one of the four representable forms:
// constant | coordinate | polynomial | transfer function of a realization.
struct HoloFunction {
    std::variant<Constant, Coordinate, Polynomial, std::shared_ptr<const Realization>> rep;
};

inline HoloFunction make_constant(cpx c) {
    require(std::isfinite(c.real()) && std::isfinite(c.imag()), Err::ValueError,
            "constant must be finite");
    return {Constant{c}};
}

inline HoloFunction make_coordinate(int index) {
    require(index >= 1, Err::ValueError, "coordinate index is 1-based");
    return {Coordinate{index}};
}

inline constexpr int kMaxDegreePerVariable = 64;

inline HoloFunction make_polynomial(int d, std::map<std::vector<int>, cpx> coeffs) {
    require(d >= 1, Err::ValueError, "polynomial needs d >= 1");
    std::map<std::vector<int>, cpx> clean;
    for (auto& [alpha, c] : coeffs) {
        require(static_cast<int>(alpha.size()) == d, Err::ValueError,
                "multi-index length must equal d");
        for (int e : alpha)
            require(e >= 0 && e <= kMaxDegreePerVariable, Err::ValueError,
                    "exponent out of range [0, 64]");
        require(std::isfinite(c.real()) && std::isfinite(c.imag()), Err::ValueError,
                "polynomial coefficient must be finite");
        if (c != cpx(0.0)) clean.emplace(alpha, c);
    }
    return {Polynomial{d, std::move(clean)}};
}

inline HoloFunction make_transfer(std::shared_ptr<const Realization> r) {
    require(r != nullptr, Err::ValueError, "null realization");
    return {std::move(r)};
}

inline bool is_transfer(const HoloFunction& f) {
    return std::holds_alternative<std::shared_ptr<const Realization>>(f.rep);
}

// Defined in realization.hpp.
cpx transfer_eval_point(const Realization& r, const Point& z);

namespace detail {

struct ScalarRing {
    using value_type = cpx;
    cpx zero() const { return 0.0; }
    cpx scalar(cpx c) const { return c; }
    cpx add(const cpx& x, const cpx& y) const { return x + y; }
    cpx mul(const cpx& x, const cpx& y) const { return x * y; }
};

template <class Ring>
typename Ring::value_type ring_pow(const Ring& ring, const typename Ring::value_type& x,
                                   int e, const typename Ring::value_type& one) {
    auto acc = one;
    for (int i = 0; i < e; ++i) acc = ring.mul(acc, x);
    return acc;
}

// Sparse recursive Horner over the lexicographically sorted term list.
// `terms` is a contiguous segment sharing a fixed exponent prefix of length
// `var`; the segment is split by the exponent of variable `var`, contracted
// with descending powers, and recursed.
template <class Ring>
typename Ring::value_type horner_segment(
    const Ring& ring, const std::vector<typename Ring::value_type>& vars,
    const std::vector<std::pair<const std::vector<int>*, cpx>>& terms, std::size_t begin,
    std::size_t end, std::size_t var) {
    using T = typename Ring::value_type;
    const T one = ring.scalar(1.0);
    if (begin == end) return ring.zero();
    if (var == vars.size()) {
        // All exponents consumed; at most one term remains.
        T acc = ring.zero();
        for (std::size_t k = begin; k < end; ++k)
            acc = ring.add(acc, ring.scalar(terms[k].second));
        return acc;
    }

    // Group boundaries by exponent of `var`; groups appear in ascending
    // exponent order, so walk them from the back for Horner.
    std::vector<std::pair<int, std::pair<std::size_t, std::size_t>>> groups;
    std::size_t k = begin;
    while (k < end) {
        const int e = (*terms[k].first)[var];
        std::size_t j = k;
        while (j < end && (*terms[j].first)[var] == e) ++j;
        groups.push_back({e, {k, j}});
        k = j;
    }

    T acc = horner_segment(ring, vars, terms, groups.back().second.first,
                           groups.back().second.second, var + 1);
    int current_exp = groups.back().first;
    for (std::size_t gi = groups.size() - 1; gi-- > 0;) {
        const int e = groups[gi].first;
        acc = ring.mul(acc, ring_pow(ring, vars[var], current_exp - e, one));
        acc = ring.add(acc, horner_segment(ring, vars, terms, groups[gi].second.first,
                                           groups[gi].second.second, var + 1));
        current_exp = e;
    }
    if (current_exp > 0) acc = ring.mul(acc, ring_pow(ring, vars[var], current_exp, one));
    return acc;
}

template <class Ring>
typename Ring::value_type eval_polynomial(const Ring& ring, const Polynomial& p,
                                          const std::vector<typename Ring::value_type>& vars) {
    std::vector<std::pair<const std::vector<int>*, cpx>> terms;
    terms.reserve(p.coeffs.size());
    for (const auto& [alpha, c] : p.coeffs) terms.push_back({&alpha, c});
    return horner_segment(ring, vars, terms, 0, terms.size(), 0);
}

}  // namespace detail

inline cpx eval_point(const HoloFunction& f, const Point& z) {
    if (const auto* c = std::get_if<Constant>(&f.rep)) return c->value;
    if (const auto* coord = std::get_if<Coordinate>(&f.rep)) {
        require(coord->index <= static_cast<int>(z.size()), Err::WrongDimension,
                "coordinate index exceeds point dimension");
        return z[coord->index - 1];
    }
    if (const auto* p = std::get_if<Polynomial>(&f.rep)) {
        require(p->d == static_cast<int>(z.size()), Err::WrongDimension,
                "polynomial dimension does not match point");
        return detail::eval_polynomial(detail::ScalarRing{}, *p, z);
    }
    return transfer_eval_point(*std::get<std::shared_ptr<const Realization>>(f.rep), z);
}

// f_r(z) = f(rz): multiply the coefficient of alpha by r^|alpha|.  `d` fixes
// the ambient dimension for coordinate functions; 0 means infer.
inline HoloFunction scale_argument(const HoloFunction& f, double r, int d = 0) {
    require(r > 0.0 && r <= 1.0, Err::ValueError, "scale factor must lie in (0, 1]");
    if (std::holds_alternative<Constant>(f.rep)) return f;
    if (const auto* coord = std::get_if<Coordinate>(&f.rep)) {
        const int dim = d > 0 ? d : coord->index;
        require(coord->index <= dim, Err::WrongDimension, "coordinate index exceeds d");
        std::vector<int> alpha(dim, 0);
        alpha[coord->index - 1] = 1;
        return make_polynomial(dim, {{alpha, cpx(r)}});
    }
    if (const auto* p = std::get_if<Polynomial>(&f.rep)) {
        Polynomial q{p->d, {}};
        for (const auto& [alpha, c] : p->coeffs) {
            int total = 0;
            for (int e : alpha) total += e;
            q.coeffs.emplace(alpha, c * std::pow(r, total));
        }
        return {std::move(q)};
    }
    fail(Err::UnsupportedVariant, "scale_argument does not apply to transfer functions");
}

// --- polynomial arithmetic -------------------------------------------------

inline Polynomial to_polynomial(const HoloFunction& f, int d) {
    require(d >= 1, Err::ValueError, "to_polynomial needs d >= 1");
    if (const auto* c = std::get_if<Constant>(&f.rep)) {
        Polynomial p{d, {}};
        if (c->value != cpx(0.0)) p.coeffs.emplace(std::vector<int>(d, 0), c->value);
        return p;
    }
    if (const auto* coord = std::get_if<Coordinate>(&f.rep)) {
        require(coord->index <= d, Err::WrongDimension, "coordinate index exceeds d");
        Polynomial p{d, {}};
        std::vector<int> alpha(d, 0);
        alpha[coord->index - 1] = 1;
        p.coeffs.emplace(alpha, cpx(1.0));
        return p;
    }
    if (const auto* p = std::get_if<Polynomial>(&f.rep)) {
        require(p->d == d, Err::WrongDimension, "polynomial dimension mismatch");
        return *p;
    }
    fail(Err::UnsupportedVariant, "transfer functions have no polynomial form");
}

inline Polynomial poly_add(const Polynomial& x, const Polynomial& y) {
    require(x.d == y.d, Err::WrongDimension, "poly_add dimension mismatch");
    Polynomial r = x;
    for (const auto& [alpha, c] : y.coeffs) {
        auto it = r.coeffs.find(alpha);
        if (it == r.coeffs.end())
            r.coeffs.emplace(alpha, c);
        else if ((it->second += c) == cpx(0.0))
            r.coeffs.erase(it);
    }
    return r;
}

inline Polynomial poly_scale(const Polynomial& x, cpx s) {
    Polynomial r{x.d, {}};
    if (s == cpx(0.0)) return r;
    for (const auto& [alpha, c] : x.coeffs) r.coeffs.emplace(alpha, s * c);
    return r;
}

inline Polynomial poly_mul(const Polynomial& x, const Polynomial& y) {
    require(x.d == y.d, Err::WrongDimension, "poly_mul dimension mismatch");
    Polynomial r{x.d, {}};
    for (const auto& [a, ca] : x.coeffs)
        for (const auto& [b, cb] : y.coeffs) {
            std::vector<int> alpha(x.d);
            for (int i = 0; i < x.d; ++i) {
                alpha[i] = a[i] + b[i];
                require(alpha[i] <= kMaxDegreePerVariable, Err::ValueError,
                        "poly_mul: degree cap exceeded");
            }
            auto it = r.coeffs.find(alpha);
            if (it == r.coeffs.end())
                r.coeffs.emplace(std::move(alpha), ca * cb);
            else if ((it->second += ca * cb) == cpx(0.0))
                r.coeffs.erase(it);
        }
    return r;
}

// Sum of |c_alpha| * |alpha|_1; a derivative bound on the polydisk torus used
// to account for grid undersampling.
inline double poly_derivative_bound(const Polynomial& p) {
    double s = 0.0;
    for (const auto& [alpha, c] : p.coeffs) {
        int total = 0;
        for (int e : alpha) total += e;
        s += std::abs(c) * total;
    }
    return s;
}

// --- boundary grids ---------------------------------------------------------

namespace detail {

// Grids at power-of-two resolutions are nested, which is what makes the grid
// sup norm monotone in the resolution parameter.
inline int effective_resolution(int resolution) {
    require(resolution >= 2, Err::ValueError, "resolution must be at least 2");
    int r = 2;
    while (2 * r <= resolution) r *= 2;
    return r;
}

inline void torus_phases(int res, std::vector<cpx>& out) {
    out.resize(res);
    for (int k = 0; k < res; ++k) {
        const double theta = 2.0 * 3.14159265358979323846 * k / res;
        out[k] = {std::cos(theta), std::sin(theta)};
    }
}

}  // namespace detail

// Deterministic sample of the distinguished boundary (polydisk: the torus;
// ball: the unit sphere via polar angles).  Nested across resolutions.
inline std::vector<Point> boundary_sample(const Domain& dom, int resolution) {
    const int res = detail::effective_resolution(resolution);
    std::vector<cpx> phases;
    detail::torus_phases(res, phases);
    std::vector<Point> pts;

    if (dom.kind == DomainKind::polydisk || dom.d == 1) {
        std::vector<int> idx(dom.d, 0);
        while (true) {
            Point z(dom.d);
            for (int r = 0; r < dom.d; ++r) z[r] = phases[idx[r]];
            pts.push_back(std::move(z));
            int r = dom.d - 1;
            while (r >= 0 && ++idx[r] == res) idx[r--] = 0;
            if (r < 0) break;
        }
        return pts;
    }

    // Sphere: moduli from polar angles in [0, pi/2]^(d-1), phases from the torus.
    const int na = res + 1;
    std::vector<double> angles(na);
    for (int k = 0; k < na; ++k) angles[k] = 0.5 * 3.14159265358979323846 * k / res;
    std::vector<int> aidx(dom.d - 1, 0);
    while (true) {
        std::vector<double> moduli(dom.d, 1.0);
        for (int i = 0; i < dom.d - 1; ++i) {
            const double eta = angles[aidx[i]];
            moduli[i] *= std::cos(eta);
            for (int j = i + 1; j < dom.d; ++j) moduli[j] *= std::sin(eta);
        }
        std::vector<int> pidx(dom.d, 0);
        while (true) {
            Point z(dom.d);
            for (int r = 0; r < dom.d; ++r) z[r] = moduli[r] * phases[pidx[r]];
            pts.push_back(std::move(z));
            int r = dom.d - 1;
            while (r >= 0 && ++pidx[r] == res) pidx[r--] = 0;
            if (r < 0) break;
        }
        int i = dom.d - 2;
        while (i >= 0 && ++aidx[i] == na) aidx[i--] = 0;
        if (i < 0) break;
    }
    return pts;
}

// Max of |f| over the deterministic boundary grid; a numeric stand-in for the
// H-infinity norm.  Transfer functions are sampled on a slightly shrunk
// boundary so their resolvents stay regular.
inline double grid_sup_norm(const HoloFunction& f, const Domain& dom, int resolution) {
    const double shrink = is_transfer(f) ? 1.0 - 2.0 * dom.margin : 1.0;
    double best = 0.0;
    for (const Point& z : boundary_sample(dom, resolution)) {
        Point w = z;
        if (shrink != 1.0)
            for (cpx& zr : w) zr *= shrink;
        best = std::max(best, std::abs(eval_point(f, w)));
    }
    return best;
}

// n-by-n array of functions over a common domain; evaluated entrywise at a
// tuple it yields the level-n matrix norms.
struct MatrixFunction {
    std::size_t n = 0;
    std::vector<HoloFunction> entries;  // row-major n*n

    const HoloFunction& operator()(std::size_t i, std::size_t j) const {
        return entries[i * n + j];
    }
};

inline MatrixFunction make_matrix_function(std::size_t n, std::vector<HoloFunction> entries) {
    require(entries.size() == n * n, Err::ValueError, "matrix function needs n*n entries");
    return MatrixFunction{n, std::move(entries)};
}

}  // namespace calcular
