#include "pv/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <unordered_map>

namespace pv {

namespace {

enum class Product { Voronoi, Medial, Offset };

using Clock = std::chrono::steady_clock;

double elapsed(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

double polygon_area(const std::vector<Vec3>& loop) {
    Vec3 s{0.0, 0.0, 0.0};
    for (size_t i = 1; i + 1 < loop.size(); ++i)
        s = s + cross(loop[i] - loop[0], loop[i + 1] - loop[0]);
    return 0.5 * norm(s);
}

Vec3 polygon_centroid(const std::vector<Vec3>& loop) {
    Vec3 s{0.0, 0.0, 0.0};
    for (const Vec3& p : loop) s = s + p;
    return s * (1.0 / static_cast<double>(loop.size()));
}

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) {
        for (int i = 0; i < n; ++i) parent[i] = i;
    }
    int find(int a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

uint64_t grid_key(int64_t x, int64_t y, int64_t z) {
    return static_cast<uint64_t>(x) * 73856093u ^ static_cast<uint64_t>(y) * 19349663u ^
           static_cast<uint64_t>(z) * 83492791u;
}

// Representative vertex id per position, merging within `tol` (same greedy
// first-wins scheme as welding, but without touching the complex).
std::vector<int> snap_reps(const std::vector<Vec3>& verts, double tol) {
    std::vector<int> rep(verts.size());
    std::unordered_map<uint64_t, std::vector<int>> cells;
    double cell = tol > 0.0 ? tol : 1.0;
    for (size_t i = 0; i < verts.size(); ++i) {
        const Vec3& p = verts[i];
        int64_t cx = static_cast<int64_t>(std::floor(p.x / cell));
        int64_t cy = static_cast<int64_t>(std::floor(p.y / cell));
        int64_t cz = static_cast<int64_t>(std::floor(p.z / cell));
        int found = -1;
        for (int dx = -1; dx <= 1 && found < 0; ++dx)
            for (int dy = -1; dy <= 1 && found < 0; ++dy)
                for (int dz = -1; dz <= 1 && found < 0; ++dz) {
                    auto it = cells.find(grid_key(cx + dx, cy + dy, cz + dz));
                    if (it == cells.end()) continue;
                    for (int j : it->second)
                        if (norm(verts[j] - p) <= tol) {
                            found = j;
                            break;
                        }
                }
        rep[i] = found >= 0 ? rep[found] : static_cast<int>(i);
        cells[grid_key(cx, cy, cz)].push_back(static_cast<int>(i));
    }
    return rep;
}

bool near_surface(const TetContext& ctx, const std::vector<Vec3>& loop) {
    double eps = kWeldTolerance * ctx.bbox_diag;
    for (const Vec3& p : loop)
        if (ctx.whole->nearest(p).distance > eps) return false;
    return true;
}

// Float-mode cuts can corrupt the lattice without tripping a tolerance case;
// promote that to the inconsistency signal so FloatFallback redoes the tet.
void check_lattice(const TetContext& ctx, const Polytope4& poly) {
    if (ctx.exact) return;  // correct by construction
    try {
        poly.validate();
    } catch (const std::logic_error& e) {
        throw CutInconsistency(e.what());
    }
}

TetFacets do_tet(const TetContext& ctx, int tet, Product product) {
    TetState st = seed_tet(ctx, tet);
    refine_tet(ctx, st);
    check_lattice(ctx, *st.poly);
    TetFacets out;
    out.gamma_size = static_cast<int>(st.discovered.size());
    if (product == Product::Offset) {
        std::vector<int> survivors = survival_filter_offset(ctx, st);
        if (!st.active) return out;
        // One mirror at a time on a copy of the refined polytope.  The
        // same-patch (real, virtual) facets are then exactly the pieces of
        // {D = d} inside that generator's cell; inserting all mirrors at once
        // would let a far generator's mirror (2d - D < d) undercut them.
        for (int k : survivors) {
            Polytope4 copy = *st.poly;
            std::array<double, 4> val;
            Hyperplane4 h = mirror_field(ctx, st, k, &val);
            copy.cut(h, &val);
            check_lattice(ctx, copy);
            for (const Polytope4::EnvelopeFace& f : copy.lower_envelope()) {
                GeneratorTag ta = copy.field(f.fields[0]).tag;
                GeneratorTag tb = copy.field(f.fields[1]).tag;
                if (ta.patch != tb.patch || ta.is_virtual == tb.is_virtual) continue;
                int la = ta.label(), lb = tb.label();
                if (la > lb) std::swap(la, lb);
                out.polygons.push_back(f.polygon);
                out.labels.push_back({la, lb});
            }
        }
        return out;
    }
    for (const Polytope4::EnvelopeFace& f : st.poly->lower_envelope()) {
        GeneratorTag ta = st.poly->field(f.fields[0]).tag;
        GeneratorTag tb = st.poly->field(f.fields[1]).tag;
        if (product == Product::Medial && near_surface(ctx, f.polygon)) continue;
        int la = ta.label(), lb = tb.label();
        if (la > lb) std::swap(la, lb);
        out.polygons.push_back(f.polygon);
        out.labels.push_back({la, lb});
    }
    return out;
}

TetFacets run_one(const TetContext& fl, const TetContext& ex, RobustMode mode, int tet,
                  Product product) {
    if (mode == RobustMode::Exact) return do_tet(ex, tet, product);
    if (mode == RobustMode::FloatStrict) return do_tet(fl, tet, product);
    try {
        return do_tet(fl, tet, product);
    } catch (const CutInconsistency&) {
        TetFacets r = do_tet(ex, tet, product);
        r.fell_back = true;
        return r;
    }
}

struct Trees {
    Bvh whole;
    std::vector<Bvh> per_patch;
    double diag = 0.0;
};

Trees build_trees(const PatchedSurface& surface) {
    Trees t;
    t.whole = build_whole_surface_bvh(surface);
    t.per_patch = build_patch_bvhs(surface);
    Aabb box = surface.bounds();
    t.diag = norm(box.hi - box.lo);
    return t;
}

void validate_config(const PatchedSurface& surface, const PipelineConfig& cfg) {
    if (cfg.variant == MetricVariant::Vd) return;
    if (static_cast<int>(cfg.weights.size()) != surface.patch_count())
        throw ValidationError("weights: expected one weight per patch");
    if (cfg.variant == MetricVariant::Mwvd)
        for (size_t p = 0; p < cfg.weights.size(); ++p)
            if (!(cfg.weights[p] > 0.0))
                throw ValidationError("weights: patch " + std::to_string(p) +
                                      " must have a positive multiplicative weight");
}

std::vector<TetFacets> run_tets(const PatchedSurface& surface, const TetMesh& tets,
                                const PipelineConfig& cfg, const Trees& trees,
                                Product product, RunStats* stats) {
    TetContext fl;
    fl.surface = &surface;
    fl.tets = &tets;
    fl.whole = &trees.whole;
    fl.per_patch = &trees.per_patch;
    fl.variant = cfg.variant;
    fl.weights = cfg.weights.empty() ? nullptr : &cfg.weights;
    fl.bbox_diag = trees.diag;
    fl.epsilon = cfg.epsilon;
    fl.exact = cfg.mode == RobustMode::Exact;
    if (product == Product::Offset) fl.offset_distance = cfg.offset_distance;
    TetContext ex = fl;
    ex.exact = true;

    size_t n = tets.tets.size();
    std::vector<TetFacets> results(n);
    std::atomic<size_t> next{0};
    std::atomic<bool> failed{false};
    std::mutex err_mutex;
    std::exception_ptr err;

    auto worker = [&]() {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= n || failed.load()) break;
            try {
                results[i] = run_one(fl, ex, cfg.mode, static_cast<int>(i), product);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!err) err = std::current_exception();
                failed.store(true);
                break;
            }
        }
    };

    int nw = std::max(1, std::min<int>(resolve_thread_count(cfg.threads), static_cast<int>(n)));
    if (nw == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < nw; ++w) pool.emplace_back(worker);
        for (std::thread& th : pool) th.join();
    }
    if (err) std::rethrow_exception(err);

    if (stats) {
        stats->tet_count = static_cast<int>(n);
        for (const TetFacets& r : results) {
            ++stats->gamma_hist[r.gamma_size];
            if (r.fell_back) ++stats->fallback_tets;
        }
    }
    return results;
}

// Copy the facets selected by `take`, compacting the vertex pool.
CellComplex route_facets(const CellComplex& cc, const std::vector<char>& take) {
    CellComplex out;
    std::vector<int> remap(cc.vertices.size(), -1);
    for (size_t f = 0; f < cc.polygons.size(); ++f) {
        if (!take[f]) continue;
        std::vector<int> loop;
        loop.reserve(cc.polygons[f].size());
        for (int v : cc.polygons[f]) {
            if (remap[v] < 0) {
                remap[v] = static_cast<int>(out.vertices.size());
                out.vertices.push_back(cc.vertices[v]);
            }
            loop.push_back(remap[v]);
        }
        out.polygons.push_back(std::move(loop));
        out.polygon_labels.push_back(cc.polygon_labels[f]);
        out.source_tet.push_back(cc.source_tet[f]);
    }
    return out;
}

}  // namespace

int resolve_thread_count(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("PATCHVORONOI_THREADS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

CellComplex assemble(const std::vector<TetFacets>& per_tet, double weld_tol, bool weld) {
    CellComplex cc;
    for (size_t t = 0; t < per_tet.size(); ++t) {
        const TetFacets& r = per_tet[t];
        for (size_t f = 0; f < r.polygons.size(); ++f) {
            std::vector<int> loop;
            loop.reserve(r.polygons[f].size());
            for (const Vec3& p : r.polygons[f]) {
                loop.push_back(static_cast<int>(cc.vertices.size()));
                cc.vertices.push_back(p);
            }
            cc.polygons.push_back(std::move(loop));
            cc.polygon_labels.push_back(r.labels[f]);
            cc.source_tet.push_back(static_cast<int>(t));
        }
    }
    if (weld) return weld_vertices(cc, weld_tol);
    return cc;
}

std::vector<int> facet_components(const CellComplex& cc, double tolerance) {
    std::vector<int> rep = snap_reps(cc.vertices, tolerance);
    UnionFind uf(static_cast<int>(cc.vertices.size()));
    for (const std::vector<int>& poly : cc.polygons)
        for (size_t i = 1; i < poly.size(); ++i) uf.unite(rep[poly[0]], rep[poly[i]]);
    std::vector<int> comp(cc.polygons.size(), -1);
    std::unordered_map<int, int> dense;
    for (size_t f = 0; f < cc.polygons.size(); ++f) {
        int root = cc.polygons[f].empty() ? -1 : uf.find(rep[cc.polygons[f][0]]);
        auto it = dense.find(root);
        if (it == dense.end()) it = dense.emplace(root, static_cast<int>(dense.size())).first;
        comp[f] = it->second;
    }
    return comp;
}

CellComplex filter_organic(const CellComplex& cc, const PatchedSurface& surface,
                           const OrganicFilter& filter) {
    Aabb box = surface.bounds();
    double diag = norm(box.hi - box.lo);
    std::vector<char> keep(cc.polygons.size(), 1);

    if (filter.dihedral_deg > 0.0) {
        // Flattest fold per adjacent patch pair, over shared edges.
        std::unordered_map<uint64_t, int> edge_first;
        std::map<std::pair<int, int>, double> pair_min;
        for (size_t t = 0; t < surface.triangles.size(); ++t) {
            const std::array<int, 3>& tri = surface.triangles[t];
            for (int e = 0; e < 3; ++e) {
                int a = tri[e], b = tri[(e + 1) % 3];
                uint64_t key = (static_cast<uint64_t>(std::min(a, b)) << 32) |
                               static_cast<uint64_t>(std::max(a, b));
                auto it = edge_first.find(key);
                if (it == edge_first.end()) {
                    edge_first.emplace(key, static_cast<int>(t));
                    continue;
                }
                int pa = surface.patch_of_triangle[it->second];
                int pb = surface.patch_of_triangle[t];
                if (pa == pb) continue;
                Vec3 n1 = surface.triangle_normal(it->second);
                Vec3 n2 = surface.triangle_normal(static_cast<int>(t));
                double c = std::clamp(dot(n1, n2) / (norm(n1) * norm(n2)), -1.0, 1.0);
                double fold = 180.0 - std::acos(c) * 180.0 / 3.14159265358979323846;
                std::pair<int, int> pr{std::min(pa, pb), std::max(pa, pb)};
                auto mit = pair_min.find(pr);
                if (mit == pair_min.end())
                    pair_min.emplace(pr, fold);
                else
                    mit->second = std::min(mit->second, fold);
            }
        }
        for (size_t f = 0; f < cc.polygons.size(); ++f) {
            const std::array<int, 2>& lab = cc.polygon_labels[f];
            if (lab[0] < 0 || lab[1] < 0) continue;
            auto it = pair_min.find({lab[0], lab[1]});
            if (it != pair_min.end() && it->second >= filter.dihedral_deg) keep[f] = 0;
        }
    }

    double floor_area = filter.min_area < 0.0 ? 1e-4 * diag * diag : filter.min_area;
    if (floor_area > 0.0) {
        std::vector<int> comp = facet_components(cc, kWeldTolerance * diag);
        std::unordered_map<int, double> area;
        for (size_t f = 0; f < cc.polygons.size(); ++f) {
            if (!keep[f]) continue;
            std::vector<Vec3> loop;
            for (int v : cc.polygons[f]) loop.push_back(cc.vertices[v]);
            area[comp[f]] += polygon_area(loop);
        }
        for (size_t f = 0; f < cc.polygons.size(); ++f)
            if (keep[f] && area[comp[f]] < floor_area) keep[f] = 0;
    }
    return route_facets(cc, keep);
}

CellComplex compute_voronoi(const PatchedSurface& surface, const TetMesh& tets,
                            const PipelineConfig& cfg, RunStats* stats) {
    validate_config(surface, cfg);
    Clock::time_point t0 = Clock::now();
    Trees trees = build_trees(surface);
    if (stats) stats->seconds_build = elapsed(t0);

    Clock::time_point t1 = Clock::now();
    std::vector<TetFacets> per_tet = run_tets(surface, tets, cfg, trees, Product::Voronoi, stats);
    if (stats) stats->seconds_propagate = elapsed(t1);

    Clock::time_point t2 = Clock::now();
    CellComplex cc = assemble(per_tet, kWeldTolerance * trees.diag, cfg.weld);
    if (cfg.organic) cc = filter_organic(cc, surface, *cfg.organic);
    if (stats) {
        stats->seconds_assemble = elapsed(t2);
        stats->facet_count = static_cast<int>(cc.polygons.size());
    }
    return cc;
}

CellComplex compute_medial_axis(const PatchedSurface& surface, const TetMesh& tets,
                                const PipelineConfig& cfg, RunStats* stats) {
    validate_config(surface, cfg);
    Clock::time_point t0 = Clock::now();
    Trees trees = build_trees(surface);
    if (stats) stats->seconds_build = elapsed(t0);

    Clock::time_point t1 = Clock::now();
    std::vector<TetFacets> per_tet = run_tets(surface, tets, cfg, trees, Product::Medial, stats);
    if (stats) stats->seconds_propagate = elapsed(t1);

    Clock::time_point t2 = Clock::now();
    CellComplex cc = assemble(per_tet, kWeldTolerance * trees.diag, cfg.weld);
    if (cfg.organic) cc = filter_organic(cc, surface, *cfg.organic);
    if (stats) {
        stats->seconds_assemble = elapsed(t2);
        stats->facet_count = static_cast<int>(cc.polygons.size());
    }
    return cc;
}

OffsetResult compute_offset(const PatchedSurface& surface, const TetMesh& tets,
                            const PipelineConfig& cfg, RunStats* stats) {
    if (cfg.variant != MetricVariant::Vd)
        throw ValidationError("offset surfaces use the Euclidean metric only");
    if (!(cfg.offset_distance > 0.0))
        throw ValidationError("offset distance must be positive");
    validate_config(surface, cfg);

    Clock::time_point t0 = Clock::now();
    Trees trees = build_trees(surface);
    if (stats) stats->seconds_build = elapsed(t0);

    Clock::time_point t1 = Clock::now();
    std::vector<TetFacets> per_tet = run_tets(surface, tets, cfg, trees, Product::Offset, stats);
    if (stats) stats->seconds_propagate = elapsed(t1);

    Clock::time_point t2 = Clock::now();
    double tol = kWeldTolerance * trees.diag;
    CellComplex cc = assemble(per_tet, tol, true);  // split below needs weld connectivity

    // Classify each shell by which side of the generator surface it lies on:
    // area-weighted vote of sign(dot(centroid - foot, outward normal)).
    std::vector<int> comp = facet_components(cc, tol);
    std::unordered_map<int, double> vote;
    for (size_t f = 0; f < cc.polygons.size(); ++f) {
        std::vector<Vec3> loop;
        for (int v : cc.polygons[f]) loop.push_back(cc.vertices[v]);
        Vec3 c = polygon_centroid(loop);
        NearestHit hit = trees.whole.nearest(c);
        if (hit.triangle < 0) continue;
        Vec3 nrm = surface.triangle_normal(hit.triangle);
        double side = dot(c - hit.point, nrm);
        vote[comp[f]] += (side > 0.0 ? 1.0 : -1.0) * polygon_area(loop);
    }
    std::vector<char> outward(cc.polygons.size(), 0);
    for (size_t f = 0; f < cc.polygons.size(); ++f) outward[f] = vote[comp[f]] >= 0.0 ? 1 : 0;

    OffsetResult res;
    std::vector<char> inv(outward.size());
    for (size_t f = 0; f < outward.size(); ++f) inv[f] = !outward[f];
    res.outward = route_facets(cc, outward);
    res.inward = route_facets(cc, inv);
    if (stats) {
        stats->seconds_assemble = elapsed(t2);
        stats->facet_count =
            static_cast<int>(res.inward.polygons.size() + res.outward.polygons.size());
    }
    return res;
}

}  // namespace pv
