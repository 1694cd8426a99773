#pragma once

#include <cmath>
#include <vector>

#include "calcular/errors.hpp"
#include "calcular/matrix.hpp"

namespace calcular {

using Point = std::vector<cpx>;  // a point of C^d

enum class DomainKind { polydisk, euclidean_ball };

// The two concrete domain families.  `margin` is the interior safety band:
// "strict" membership tests against 1 - margin so spectra stay a measurable
// distance inside and resolvents remain bounded.
struct Domain {
    DomainKind kind = DomainKind::polydisk;
    int d = 1;
    double margin = 1e-6;
};

inline Domain make_domain(DomainKind kind, int d, double margin = 1e-6) {
    require(d >= 1, Err::ValueError, "domain dimension must be positive");
    require(margin > 0.0 && margin < 1.0, Err::ValueError, "margin must lie in (0, 1)");
    return Domain{kind, d, margin};
}

inline bool domain_contains(const Domain& dom, const Point& z, bool strict) {
    require(static_cast<int>(z.size()) == dom.d, Err::WrongDimension,
            "point dimension does not match domain");
    const double bound = strict ? 1.0 - dom.margin : 1.0;
    if (dom.kind == DomainKind::polydisk) {
        for (const cpx& zr : z)
            if (!(std::abs(zr) < bound)) return false;
        return true;
    }
    double s = 0.0;
    for (const cpx& zr : z) s += std::norm(zr);
    return s < bound;
}

inline void require_strict_interior(const Domain& dom, const Point& z, const char* what) {
    require(domain_contains(dom, z, /*strict=*/true), Err::OutsideDomain,
            std::string(what) + ": point not strictly interior");
}

}  // namespace calcular
