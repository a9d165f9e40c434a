#pragma once

#include <map>
#include <optional>
#include <vector>

#include "pv/mesh.hpp"
#include "pv/propagate.hpp"

namespace pv {

// Robustness policy for the cutting arithmetic.
//  FloatFallback: float cuts; a tet whose cut turns inconsistent is redone in
//                 exact arithmetic from scratch (default).
//  FloatStrict:   float cuts only; an inconsistency aborts the run.
//  Exact:         rational arithmetic everywhere.
enum class RobustMode { FloatFallback, FloatStrict, Exact };

struct OrganicFilter {
    double dihedral_deg = 170.0;  // remove adjacent-pair facets folding flatter than this; <= 0 disables
    double min_area = -1.0;       // component area floor; < 0 => 1e-4 * diag^2, 0 disables
};

struct PipelineConfig {
    MetricVariant variant = MetricVariant::Vd;
    std::vector<double> weights;   // one per patch; empty for VD
    double offset_distance = 0.0;  // offsets only, must be > 0 there
    double epsilon = 1e-9;
    RobustMode mode = RobustMode::FloatFallback;
    int threads = 0;  // 0: PATCHVORONOI_THREADS, then hardware concurrency
    bool weld = true;
    std::optional<OrganicFilter> organic;
};

struct RunStats {
    int tet_count = 0;
    int facet_count = 0;
    std::map<int, int> gamma_hist;  // discovered-generator count -> tets
    int fallback_tets = 0;          // float tets redone exactly
    double seconds_build = 0.0;     // BVH construction
    double seconds_propagate = 0.0;
    double seconds_assemble = 0.0;
};

// Envelope facets of one tet, labeled and ready to merge.
struct TetFacets {
    std::vector<std::vector<Vec3>> polygons;
    std::vector<std::array<int, 2>> labels;
    int gamma_size = 0;
    bool fell_back = false;
};

struct OffsetResult {
    CellComplex inward;
    CellComplex outward;
};

CellComplex compute_voronoi(const PatchedSurface& surface, const TetMesh& tets,
                            const PipelineConfig& cfg, RunStats* stats = nullptr);

// Voronoi facets of the interior tet mesh, minus facets hugging the input
// surface; excluded patches do not generate.
CellComplex compute_medial_axis(const PatchedSurface& surface, const TetMesh& tets,
                                const PipelineConfig& cfg, RunStats* stats = nullptr);

// Envelope of the generators and their offset mirrors; keeps (real, virtual)
// facets and splits them into inward/outward shells.
OffsetResult compute_offset(const PatchedSurface& surface, const TetMesh& tets,
                            const PipelineConfig& cfg, RunStats* stats = nullptr);

// Merge per-tet facets in increasing tet order; weld optionally.
CellComplex assemble(const std::vector<TetFacets>& per_tet, double weld_tol, bool weld);

// Remove facets of patch pairs meeting at near-flat dihedrals and facets in
// connected components whose total area falls below the floor.
CellComplex filter_organic(const CellComplex& cc, const PatchedSurface& surface,
                           const OrganicFilter& filter);

// Component id per facet; facets sharing a (near-)coincident vertex connect.
std::vector<int> facet_components(const CellComplex& cc, double tolerance);

int resolve_thread_count(int requested);

}  // namespace pv
