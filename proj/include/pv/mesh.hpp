#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "pv/vec.hpp"

namespace pv {

// All loaders/validators throw one of these; the CLI maps them to exit code 1.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Relative degeneracy floors, scaled by the bounding-box diagonal.
inline constexpr double kTriangleAreaFloor = 1e-12;   // * diag^2
inline constexpr double kTetVolumeFloor = 1e-14;      // * diag^3
inline constexpr double kWeldTolerance = 1e-9;        // * diag

// Triangle mesh partitioned into labeled generator patches.
struct PatchedSurface {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<int> patch_of_triangle;          // triangle -> patch id, contiguous 0..P-1
    std::vector<std::vector<int>> patches;       // patch id -> triangle indices
    std::set<int> excluded_patches;              // generators to skip (e.g. sheet-metal sides)

    int patch_count() const { return static_cast<int>(patches.size()); }
    Aabb bounds() const {
        Aabb b;
        for (const Vec3& v : vertices) b.expand(v);
        return b;
    }
    Vec3 triangle_normal(int t) const {
        const auto& tri = triangles[t];
        return normalized(cross(vertices[tri[1]] - vertices[tri[0]],
                                vertices[tri[2]] - vertices[tri[0]]));
    }
};

// Tetrahedral domain. Tets are reoriented to positive volume on load.
struct TetMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 4>> tets;
    std::vector<double> circumradius;  // per tet, cached

    int tet_count() const { return static_cast<int>(tets.size()); }
    std::array<Vec3, 4> tet_vertices(int t) const {
        const auto& tet = tets[t];
        return {vertices[tet[0]], vertices[tet[1]], vertices[tet[2]], vertices[tet[3]]};
    }
    double max_circumradius() const {
        double h = 0.0;
        for (double r : circumradius) h = std::max(h, r);
        return h;
    }
    Aabb bounds() const {
        Aabb b;
        for (const Vec3& v : vertices) b.expand(v);
        return b;
    }
};

// Generator label carried by every output polygon: a real patch id, or the
// virtual mirror of a patch used by offsetting. Serialized as an integer,
// real patch p -> p, virtual mirror of p -> -1-p.
inline int encode_virtual_label(int patch) { return -1 - patch; }
inline bool is_virtual_label(int label) { return label < 0; }
inline int label_patch(int label) { return label < 0 ? -1 - label : label; }

// Labeled polygon soup: per-tet envelope facets, optionally vertex-welded.
struct CellComplex {
    std::vector<Vec3> vertices;
    std::vector<std::vector<int>> polygons;            // vertex-index loops
    std::vector<std::array<int, 2>> polygon_labels;    // encoded label pair, sorted ascending
    std::vector<int> source_tet;                       // originating tet index per polygon

    int polygon_count() const { return static_cast<int>(polygons.size()); }
    Aabb bounds() const {
        Aabb b;
        for (const Vec3& v : vertices) b.expand(v);
        return b;
    }
};

enum class MeshFormat { Obj, Ply };

// OBJ surface with patches from g/o groups; a sidecar label file (one patch id
// per triangle) overrides the groups when given.
PatchedSurface load_patched_surface(const std::string& path,
                                    const std::optional<std::string>& labels_path = {});

// Gmsh MSH v2 ASCII or legacy VTK unstructured-grid ASCII.
TetMesh load_tet_mesh(const std::string& path);

void write_cell_complex(const CellComplex& cc, const std::string& path, MeshFormat format);

// Re-reader for the two formats written above (round-trip checks, tooling).
CellComplex load_cell_complex(const std::string& path);

// Merge vertices closer than kWeldTolerance * bbox diagonal. Deterministic.
CellComplex weld_vertices(const CellComplex& cc, double tolerance);

void validate_surface(const PatchedSurface& s);
void validate_tet_mesh(const TetMesh& m);

}  // namespace pv
