#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pv/exact.hpp"
#include "pv/field.hpp"

namespace pv {

// Float-mode cutting hit an unrecoverable tolerance failure; the caller
// restarts the whole tet in exact mode.
struct CutInconsistency : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Side { Above, Below, On };

struct CutConfig {
    double epsilon = 1e-9;
    bool exact = false;
    double d_max = 0.0;  // finite stand-in for the prism's open top
    double d_min = 0.0;  // prism floor; must sit at/below every inserted field
};

// Side of the field graph a 4D point lies on.  Float mode: Above when
// pi(v) >= eps, Below when pi(v) <= -eps, else On, with pi(v) = d - h(x,y,z).
// Exact mode: rational sign with boundary (sign 0) counted as Above.
Side classify(const Vec4& v, const Hyperplane4& h, const CutConfig& cfg);

// Crossing point of segment v1v2 with the field graph (both endpoints must
// straddle it): v = pi(v1)/(pi(v1)-pi(v2)) * v2 - pi(v2)/(pi(v1)-pi(v2)) * v1.
Vec4 edge_hyperplane_intersection(const Vec4& v1, const Vec4& v2, const Hyperplane4& h);

// Convex region of (x,y,z,d) space above a base tetrahedron, cut incrementally
// by the graphs of linear distance fields, keeping d <= every field.  Tracks
// the full face lattice (vertices/edges/2-faces/3-cells) so the lower
// envelope and its generator-pair labels fall out of the 2-faces whose two
// supporting hyperplanes are both non-initial.
class Polytope4 {
public:
    static constexpr int kInitialPlanes = 6;  // bottom, top, 4 sides

    Polytope4(const std::array<Vec3, 4>& tet, const CutConfig& cfg);

    // Intersect with {d <= h(x,y,z)}.  Returns ids of vertices created by the
    // cut (empty for a no-op).  raw_d supplies the four vertex distances the
    // field was fitted from so exact mode can refit them rationally.
    std::vector<int> cut(const Hyperplane4& h, const std::array<double, 4>* raw_d = nullptr);

    struct EnvelopeFace {
        std::vector<Vec3> polygon;
        std::array<int, 2> fields;  // indices into inserted-field list, ascending
    };
    std::vector<EnvelopeFace> lower_envelope() const;

    int field_count() const { return static_cast<int>(fields_.size()); }
    const Hyperplane4& field(int i) const { return fields_[i]; }

    Vec3 position3(int vid) const;  // exact mode solves the defining planes
    double value_d(int vid) const;
    bool vertex_alive(int vid) const { return verts_[vid].alive; }
    int vertex_count() const { return static_cast<int>(verts_.size()); }

    // Field whose envelope cell contains p (ties to the lowest field id);
    // -1 when p is outside the base tet or nothing was inserted.
    int owning_field(const Vec3& p, double tol = 1e-9) const;

    int alive_vertex_count() const;
    int alive_edge_count() const;
    int alive_face_count() const;
    int alive_cell_count() const;

    void validate(double tol = 1e-7) const;  // throws std::logic_error
    std::string dump() const;

private:
    struct VertexRec {
        Vec4 pos;
        std::array<int, 4> quad;  // defining planes, ascending
        bool alive = true;
        bool solved = true;  // pos valid (exact mode defers the solve)
    };
    struct EdgeRec {
        int v0, v1;
        std::array<int, 3> planes;
        bool alive = true;
    };
    struct FaceRec {
        std::vector<int> loop;   // vertex ids, cyclic
        std::vector<int> eloop;  // eloop[i] joins loop[i] -> loop[i+1]
        std::array<int, 2> planes;
        bool alive = true;
    };
    struct CellRec {
        std::vector<int> faces;
        int plane;
        bool alive = true;
    };

    int add_vertex(const Vec4& pos, std::array<int, 4> quad, bool solved);
    int add_edge(int v0, int v1, std::array<int, 3> planes);
    const RationalPlane& rplane(int id) const;
    const std::array<mpq_class, 4>& rvertex(int vid) const;
    int sign_at(int vid, int plane_id) const;
    void solve_position(int vid) const;

    CutConfig cfg_;
    std::array<Vec3, 4> tet_;
    std::vector<VertexRec> verts_;
    std::vector<EdgeRec> edges_;
    std::vector<FaceRec> faces_;
    std::vector<CellRec> cells_;
    std::vector<Plane4> planes_;
    std::vector<Hyperplane4> fields_;

    mutable std::vector<std::optional<RationalPlane>> rplanes_;
    mutable std::vector<std::optional<std::array<mpq_class, 4>>> rpos_;
};

}  // namespace pv
