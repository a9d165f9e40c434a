#include "pv/exact.hpp"

#include "pv/linsolve.hpp"
#include "pv/mesh.hpp"

namespace pv {

RationalPlane rationalize(const Plane4& p) {
    RationalPlane r;
    r.g = {mpq_class(p.g.x), mpq_class(p.g.y), mpq_class(p.g.z), mpq_class(p.g.d)};
    r.w = mpq_class(p.w);
    return r;
}

RationalPlane rational_cut_plane(const std::array<Vec3, 4>& verts,
                                 const std::array<double, 4>& d) {
    std::array<std::array<mpq_class, 4>, 4> A;
    std::array<mpq_class, 4> rhs;
    for (int j = 0; j < 4; ++j) {
        A[j] = {mpq_class(verts[j].x), mpq_class(verts[j].y), mpq_class(verts[j].z),
                mpq_class(1)};
        rhs[j] = mpq_class(d[j]);
    }
    if (!solve_linear(A, rhs)) throw ValidationError("degenerate tet: singular exact field fit");
    // field d = a x + b y + c z + w  ->  pi = d - field
    RationalPlane r;
    r.g = {-rhs[0], -rhs[1], -rhs[2], mpq_class(1)};
    r.w = -rhs[3];
    return r;
}

std::array<mpq_class, 4> intersect_planes(const RationalPlane& p0, const RationalPlane& p1,
                                          const RationalPlane& p2, const RationalPlane& p3) {
    std::array<std::array<mpq_class, 4>, 4> A;
    std::array<mpq_class, 4> b;
    const RationalPlane* planes[4] = {&p0, &p1, &p2, &p3};
    for (int i = 0; i < 4; ++i) {
        A[i] = planes[i]->g;
        b[i] = -planes[i]->w;
    }
    if (!solve_linear(A, b))
        throw ValidationError("defining planes do not meet in a point");
    return b;
}

int exact_side(const std::array<mpq_class, 4>& v, const RationalPlane& h) {
    return sgn(h.eval(v));
}

int exact_side(const std::array<const RationalPlane*, 4>& encoding, const RationalPlane& h) {
    return exact_side(intersect_planes(*encoding[0], *encoding[1], *encoding[2], *encoding[3]), h);
}

}  // namespace pv
