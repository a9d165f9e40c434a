#include "pv/propagate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "pv/mesh.hpp"

namespace pv {

namespace {

int patch_at(const TetContext& ctx, const Vec3& p) {
    NearestHit hit = ctx.whole->nearest(p);
    if (hit.triangle < 0)
        throw ValidationError("generator surface has no usable patches");
    return ctx.surface->patch_of_triangle[hit.triangle];
}

// Insert the linear field of patch `p`, fitted from per-patch distances at the
// tet corners.  Newly created polytope vertices go on the queue.
void insert_patch_field(const TetContext& ctx, TetState& st, int p) {
    std::array<double, 4> raw;
    std::array<double, 4> val;
    const Bvh& tree = (*ctx.per_patch)[p];
    for (int j = 0; j < 4; ++j) {
        raw[j] = tree.nearest(st.corners[j]).distance;
        val[j] = transform_distance(raw[j], ctx.weight_of(p), ctx.variant);
    }
    Hyperplane4 h = fit_hyperplane(st.corners, val, GeneratorTag{p, false});
    std::vector<int> created = st.poly->cut(h, &val);
    for (int v : created) st.pending.push_back(v);
    st.discovered.push_back(p);
    st.in_gamma[p] = 1;
    st.raw_dist.push_back(raw);
}

// Upper/lower bounds for every field value this tet can ever see, used to
// place the prism top and bottom.  Any patch discovered inside the tet is the
// nearest patch of some point q in it, so D(p, corner) <= maxseed + 2*diam.
void prism_bounds(const TetContext& ctx, const TetState& st, double maxseed,
                  double* d_min, double* d_max) {
    double diam = 0.0;
    for (int a = 0; a < 4; ++a)
        for (int b = a + 1; b < 4; ++b)
            diam = std::max(diam, norm(st.corners[a] - st.corners[b]));
    double b_raw = maxseed + 2.0 * diam;

    double wmin = 0.0, wmax = 0.0, wmax2 = 0.0;
    if (ctx.weights && !ctx.weights->empty()) {
        wmin = *std::min_element(ctx.weights->begin(), ctx.weights->end());
        wmax = *std::max_element(ctx.weights->begin(), ctx.weights->end());
        for (double w : *ctx.weights) wmax2 = std::max(wmax2, w * w);
    }

    double hi = b_raw, lo = 0.0;
    switch (ctx.variant) {
        case MetricVariant::Vd:
            break;
        case MetricVariant::Pd:
            hi = b_raw * b_raw;
            lo = -wmax2;
            break;
        case MetricVariant::Awvd:
            hi = b_raw + std::max(0.0, wmax);
            lo = std::min(0.0, wmin);
            break;
        case MetricVariant::Mwvd:
            hi = b_raw * std::max(1.0, wmax);
            break;
    }
    if (ctx.offset_distance) {
        double d = *ctx.offset_distance;  // mirror values lie in [2d - b_raw, 2d]
        hi = std::max(hi, 2.0 * d);
        lo = std::min(lo, 2.0 * d - b_raw);
    }
    // Keep both walls strictly clear of every field value.  A floor at exactly
    // 0 would coincide with the field graph over corners that lie on the
    // generator surface (distance 0) -- routine in conforming meshes -- and
    // whole-facet contact is the one degeneracy the float cases cannot patch.
    *d_max = 2.0 * hi + ctx.bbox_diag + 1.0;
    *d_min = 2.0 * lo - ctx.bbox_diag - 1.0;
}

}  // namespace

TetState seed_tet(const TetContext& ctx, int tet_index) {
    TetState st;
    st.tet = tet_index;
    st.corners = ctx.tets->tet_vertices(tet_index);
    st.in_gamma.assign(ctx.surface->patch_count(), 0);

    // Nearest patch per corner; keep first-appearance order for determinism.
    std::array<int, 4> seed_patch;
    double maxseed = 0.0;
    for (int j = 0; j < 4; ++j) {
        NearestHit hit = ctx.whole->nearest(st.corners[j]);
        if (hit.triangle < 0)
            throw ValidationError("generator surface has no usable patches");
        seed_patch[j] = ctx.surface->patch_of_triangle[hit.triangle];
        maxseed = std::max(maxseed, hit.distance);
    }

    CutConfig cfg;
    cfg.epsilon = ctx.epsilon;
    cfg.exact = ctx.exact;
    prism_bounds(ctx, st, maxseed, &cfg.d_min, &cfg.d_max);
    st.poly = std::make_unique<Polytope4>(st.corners, cfg);

    for (int j = 0; j < 4; ++j)
        if (!st.in_gamma[seed_patch[j]]) insert_patch_field(ctx, st, seed_patch[j]);
    return st;
}

void refine_tet(const TetContext& ctx, TetState& st) {
    while (!st.pending.empty()) {
        int v = st.pending.front();
        st.pending.pop_front();
        if (!st.poly->vertex_alive(v)) continue;  // lazy deletion
        int gamma = patch_at(ctx, st.poly->position3(v));
        if (st.in_gamma[gamma]) continue;
        insert_patch_field(ctx, st, gamma);
        if (static_cast<int>(st.discovered.size()) > ctx.surface->patch_count())
            throw std::runtime_error("discovery overflow in tet " + std::to_string(st.tet));
    }
}

std::vector<int> survival_filter_offset(const TetContext& ctx, TetState& st) {
    double d = ctx.offset_distance.value();
    std::vector<int> survivors;
    for (size_t k = 0; k < st.discovered.size(); ++k) {
        const std::array<double, 4>& raw = st.raw_dist[k];
        double lo = *std::min_element(raw.begin(), raw.end());
        double hi = *std::max_element(raw.begin(), raw.end());
        if (lo <= d && d <= hi) survivors.push_back(static_cast<int>(k));
    }
    st.active = !survivors.empty();
    return survivors;
}

Hyperplane4 mirror_field(const TetContext& ctx, const TetState& st, int k,
                         std::array<double, 4>* values) {
    double d = ctx.offset_distance.value();
    for (int j = 0; j < 4; ++j) (*values)[j] = 2.0 * d - st.raw_dist[k][j];
    return fit_hyperplane(st.corners, *values, GeneratorTag{st.discovered[k], true});
}

}  // namespace pv
