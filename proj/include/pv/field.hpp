#pragma once

#include <array>
#include <string>
#include <vector>

#include "pv/mesh.hpp"
#include "pv/vec.hpp"

namespace pv {

enum class MetricVariant { Vd, Pd, Awvd, Mwvd };

MetricVariant parse_variant(const std::string& name);  // "vd" | "pd" | "awvd" | "mwvd"
const char* variant_name(MetricVariant v);

// Identifies the generator a linear field belongs to.  Virtual generators are
// the mirrored copies used by offset extraction.
struct GeneratorTag {
    int patch = -1;
    bool is_virtual = false;

    int label() const { return is_virtual ? encode_virtual_label(patch) : patch; }
    bool operator==(const GeneratorTag&) const = default;
};

// One generator's linear distance field over a tetrahedron: d = a x + b y + c z + w.
struct Hyperplane4 {
    double a = 0, b = 0, c = 0, w = 0;
    GeneratorTag tag;

    double eval(const Vec3& p) const { return a * p.x + b * p.y + c * p.z + w; }
};

// Metric transform applied to the raw Euclidean distance before fitting.
// Throws std::invalid_argument for a nonpositive MWVD weight.
double transform_distance(double D, double weight, MetricVariant variant);

// Unique linear interpolant of (verts[j], d[j]).  Throws ValidationError when
// the tet is degenerate (singular system).
Hyperplane4 fit_hyperplane(const std::array<Vec3, 4>& verts, const std::array<double, 4>& d,
                           GeneratorTag tag);

// 3D plane A x + B y + C z + W = 0 where the two fields agree.
// Throws std::invalid_argument when the fields are coefficient-wise identical.
Vec4 bisector_plane(const Hyperplane4& hi, const Hyperplane4& hj);

// Max deviation of the fitted field from the true distance inside the tet.
double linearization_error_bound(const std::array<Vec3, 4>& tet);

// Cutting halfspace of a field in (x,y,z,d) space: pi(p) = g.p + w, with the
// region below the field graph at pi <= 0.
struct Plane4 {
    Vec4 g;
    double w = 0;

    double eval(const Vec4& p) const { return dot(g, p) + w; }
};

inline Plane4 cut_plane(const Hyperplane4& h) {
    return {{-h.a, -h.b, -h.c, 1.0}, -h.w};
}

// Per-patch weights, file format: lines of "patch_id weight".
std::vector<double> load_weights(const std::string& path, int patch_count);

}  // namespace pv
