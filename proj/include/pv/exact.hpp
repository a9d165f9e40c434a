#pragma once

#include <gmpxx.h>

#include <array>
#include <stdexcept>

#include "pv/field.hpp"

namespace pv {

// 4D plane over the rationals, pi(p) = g.p + w.  Coefficients are the exact
// binary-float embeddings of the double inputs, so float and exact backends
// cut with the same geometric planes.
struct RationalPlane {
    std::array<mpq_class, 4> g;
    mpq_class w;

    mpq_class eval(const std::array<mpq_class, 4>& p) const {
        return g[0] * p[0] + g[1] * p[1] + g[2] * p[2] + g[3] * p[3] + w;
    }
};

RationalPlane rationalize(const Plane4& p);

// Exact field fit: same contract as fit_hyperplane but over rationals, so the
// field reproduces the (embedded) vertex distances exactly.  Returned in
// cutting form.  Throws ValidationError on a singular system.
RationalPlane rational_cut_plane(const std::array<Vec3, 4>& verts, const std::array<double, 4>& d);

// Point where four planes meet.  Throws ValidationError when the planes are
// linearly dependent.
std::array<mpq_class, 4> intersect_planes(const RationalPlane& p0, const RationalPlane& p1,
                                          const RationalPlane& p2, const RationalPlane& p3);

// Sign of h at a point (-1, 0, +1).
int exact_side(const std::array<mpq_class, 4>& v, const RationalPlane& h);

// Sign of h at the vertex encoded by four defining planes.
int exact_side(const std::array<const RationalPlane*, 4>& encoding, const RationalPlane& h);

inline Vec4 to_double(const std::array<mpq_class, 4>& v) {
    return {v[0].get_d(), v[1].get_d(), v[2].get_d(), v[3].get_d()};
}

}  // namespace pv
