#pragma once

#include <deque>
#include <memory>
#include <optional>
#include <vector>

#include "pv/bvh.hpp"
#include "pv/field.hpp"
#include "pv/polytope.hpp"

namespace pv {

// Shared read-only inputs for per-tet work.  One instance serves all worker
// threads.
struct TetContext {
    const PatchedSurface* surface = nullptr;
    const TetMesh* tets = nullptr;
    const Bvh* whole = nullptr;                   // generator surface minus excluded patches
    const std::vector<Bvh>* per_patch = nullptr;  // one tree per patch
    MetricVariant variant = MetricVariant::Vd;
    const std::vector<double>* weights = nullptr;  // null => all zero (VD)
    double bbox_diag = 0.0;
    double epsilon = 1e-9;
    bool exact = false;
    std::optional<double> offset_distance;  // engaged only in the offset pipeline

    double weight_of(int patch) const { return weights ? (*weights)[patch] : 0.0; }
};

// Per-tet discovery state: the polytope being cut, the discovered generator
// set (Gamma) and the FIFO vertex queue (Q).
struct TetState {
    int tet = -1;
    std::array<Vec3, 4> corners;
    std::unique_ptr<Polytope4> poly;
    std::vector<int> discovered;                  // patch ids in insertion order
    std::vector<char> in_gamma;                   // patch id -> discovered?
    std::vector<std::array<double, 4>> raw_dist;  // per discovered patch, Euclidean at corners
    std::deque<int> pending;                      // polytope vertex ids, FIFO
    bool active = true;                           // offset: false once no generator survives
};

// Step 1: query the nearest patch at each tet corner, insert those fields,
// enqueue the vertices the cuts created.
TetState seed_tet(const TetContext& ctx, int tet_index);

// Steps 2-3: pop vertices FIFO, discover + insert the nearest patch of each
// live vertex until the queue drains.  Dead vertices are skipped on pop.
void refine_tet(const TetContext& ctx, TetState& st);

// Offset pre-pass: keep generators with min_j D <= d <= max_j D over the tet
// corners; marks the tet inactive when none survive.  Returns the survivors'
// indices into st.discovered.
std::vector<int> survival_filter_offset(const TetContext& ctx, TetState& st);

// The mirrored field (vertex distances 2d - D) of discovered generator k.
Hyperplane4 mirror_field(const TetContext& ctx, const TetState& st, int k,
                         std::array<double, 4>* values);

}  // namespace pv
