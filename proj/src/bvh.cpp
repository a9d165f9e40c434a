#include "pv/bvh.hpp"

#include <algorithm>
#include <cmath>

namespace pv {

namespace {
constexpr int kLeafSize = 4;
constexpr double kTieTol = 1e-12;
}

Bvh::Bvh(const PatchedSurface& surface, std::vector<int> triangles) {
    if (triangles.empty()) return;
    std::sort(triangles.begin(), triangles.end());
    corners_.reserve(triangles.size());
    for (int t : triangles) {
        const auto& tri = surface.triangles[t];
        corners_.push_back({surface.vertices[tri[0]], surface.vertices[tri[1]],
                            surface.vertices[tri[2]]});
    }
    tris_ = std::move(triangles);

    std::vector<int> order(tris_.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    build(order, 0, static_cast<int>(order.size()));

    // permute tris_/corners_ into leaf-contiguous order
    std::vector<int> tris(order.size());
    std::vector<std::array<Vec3, 3>> corners(order.size());
    for (size_t i = 0; i < order.size(); ++i) {
        tris[i] = tris_[order[i]];
        corners[i] = corners_[order[i]];
    }
    tris_ = std::move(tris);
    corners_ = std::move(corners);
}

int Bvh::build(std::vector<int>& order, int begin, int end) {
    int self = static_cast<int>(nodes_.size());
    nodes_.emplace_back();

    Aabb box, cbox;
    for (int i = begin; i < end; ++i) {
        for (const Vec3& c : corners_[order[i]]) box.expand(c);
        const auto& t = corners_[order[i]];
        cbox.expand((t[0] + t[1] + t[2]) * (1.0 / 3.0));
    }
    nodes_[self].box = box;

    if (end - begin <= kLeafSize) {
        nodes_[self].begin = begin;
        nodes_[self].count = end - begin;
        return self;
    }

    int axis = cbox.longest_axis();
    std::stable_sort(order.begin() + begin, order.begin() + end, [&](int a, int b) {
        const auto& ta = corners_[a];
        const auto& tb = corners_[b];
        double ca = (ta[0][axis] + ta[1][axis] + ta[2][axis]);
        double cb = (tb[0][axis] + tb[1][axis] + tb[2][axis]);
        if (ca != cb) return ca < cb;
        return tris_[a] < tris_[b];
    });
    int mid = begin + (end - begin) / 2;

    int left = build(order, begin, mid);
    int right = build(order, mid, end);
    nodes_[self].left = left;
    nodes_[self].begin = -1;       // internal marker
    nodes_[self].count = right;    // right child index
    return self;
}

void Bvh::search(int node, const Vec3& query, NearestHit& best) const {
    const Node& n = nodes_[node];
    if (n.begin >= 0) {  // leaf
        for (int i = n.begin; i < n.begin + n.count; ++i) {
            const auto& c = corners_[i];
            TriClosest tc = closest_point_on_triangle(query, c[0], c[1], c[2]);
            double d = norm(tc.point - query);
            if (d < best.distance - kTieTol ||
                (d < best.distance + kTieTol && tris_[i] < best.triangle)) {
                best.distance = std::min(d, best.distance);
                best.point = tc.point;
                best.triangle = tris_[i];
            }
        }
        return;
    }
    int kids[2] = {n.left, n.count};
    double d2[2] = {nodes_[kids[0]].box.dist2(query), nodes_[kids[1]].box.dist2(query)};
    if (d2[1] < d2[0]) {
        std::swap(kids[0], kids[1]);
        std::swap(d2[0], d2[1]);
    }
    for (int k = 0; k < 2; ++k) {
        double limit = best.distance + kTieTol;
        if (d2[k] <= limit * limit) search(kids[k], query, best);
    }
}

NearestHit Bvh::nearest(const Vec3& query) const {
    NearestHit best;
    if (nodes_.empty()) return best;
    best.triangle = std::numeric_limits<int>::max();
    search(0, query, best);
    if (best.triangle == std::numeric_limits<int>::max()) best.triangle = -1;
    return best;
}

Bvh build_whole_surface_bvh(const PatchedSurface& surface) {
    std::vector<char> excluded(surface.patch_count(), 0);
    for (int p : surface.excluded_patches) excluded[p] = 1;
    std::vector<int> tris;
    tris.reserve(surface.triangles.size());
    for (size_t t = 0; t < surface.triangles.size(); ++t)
        if (!excluded[surface.patch_of_triangle[t]]) tris.push_back(static_cast<int>(t));
    return Bvh(surface, std::move(tris));
}

std::vector<Bvh> build_patch_bvhs(const PatchedSurface& surface) {
    std::vector<char> excluded(surface.patch_count(), 0);
    for (int p : surface.excluded_patches) excluded[p] = 1;
    std::vector<Bvh> out;
    out.reserve(surface.patches.size());
    for (size_t p = 0; p < surface.patches.size(); ++p) {
        if (excluded[p])
            out.emplace_back();
        else
            out.emplace_back(surface, surface.patches[p]);
    }
    return out;
}

}  // namespace pv
