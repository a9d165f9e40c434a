#pragma once

#include <limits>
#include <vector>

#include "pv/mesh.hpp"
#include "pv/vec.hpp"

namespace pv {

// Closest-point query result against a triangle set.
struct NearestHit {
    double distance = std::numeric_limits<double>::infinity();
    Vec3 point;          // closest point on the surface
    int triangle = -1;   // index into the *surface* triangle array
};

// Static AABB tree over a subset of a surface's triangles.  Median split on
// the longest axis of the centroid bounds; ties between equally near
// triangles resolve to the lowest triangle index, so queries are
// deterministic regardless of build order.
class Bvh {
public:
    // Empty tree: nearest() returns an infinite-distance miss.
    Bvh() = default;
    Bvh(const PatchedSurface& surface, std::vector<int> triangles);

    NearestHit nearest(const Vec3& query) const;
    bool empty() const { return tris_.empty(); }
    size_t triangle_count() const { return tris_.size(); }

private:
    struct Node {
        Aabb box;
        int left = -1;    // internal: child pair (left, left+1); leaf: -1
        int begin = 0;    // leaf: range into tris_
        int count = 0;
    };

    int build(std::vector<int>& order, int begin, int end);
    void search(int node, const Vec3& query, NearestHit& best) const;

    std::vector<Node> nodes_;
    std::vector<int> tris_;                    // triangle indices, leaf-contiguous
    std::vector<std::array<Vec3, 3>> corners_; // per entry of tris_
};

// Whole-generator tree: every triangle except those in excluded patches.
Bvh build_whole_surface_bvh(const PatchedSurface& surface);

// One tree per patch (excluded patches get empty trees).
std::vector<Bvh> build_patch_bvhs(const PatchedSurface& surface);

}  // namespace pv
