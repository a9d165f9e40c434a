#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <iterator>

#include "fixtures.hpp"
#include "pv/pipeline.hpp"

using namespace pv;

namespace {

std::string file_bytes(const std::string& p) {
    std::ifstream f(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("slab voronoi: single bisector plane at z=0.5") {
    PatchedSurface surface = fx::slab_surface();
    TetMesh tets = fx::kuhn_grid({0, 0, 0}, {1, 1, 1}, 7, 7, 7);
    PipelineConfig cfg;
    RunStats stats;
    CellComplex cc = compute_voronoi(surface, tets, cfg, &stats);

    REQUIRE(cc.polygons.size() > 0);
    CHECK(stats.tet_count == 7 * 7 * 7 * 6);
    CHECK(stats.facet_count == static_cast<int>(cc.polygons.size()));
    for (const auto& lab : cc.polygon_labels) {
        CHECK(lab[0] == 0);
        CHECK(lab[1] == 1);
    }
    // Plane generators make the per-tet fields exact, so the facets sit on
    // the true bisector up to roundoff.
    for (const Vec3& v : cc.vertices) CHECK(std::abs(v.z - 0.5) < 1e-9);
    // Facets only come from tets straddling z=0.5.
    for (int t : cc.source_tet) CHECK(t >= 0);
}

TEST_CASE("slab medial axis matches voronoi away from the surface") {
    PatchedSurface surface = fx::slab_surface();
    TetMesh tets = fx::kuhn_grid({0, 0, 0}, {1, 1, 1}, 5, 5, 5);
    PipelineConfig cfg;
    CellComplex vd = compute_voronoi(surface, tets, cfg);
    CellComplex ma = compute_medial_axis(surface, tets, cfg);
    REQUIRE(vd.polygons.size() > 0);
    CHECK(vd.polygons.size() == ma.polygons.size());
}

TEST_CASE("outputs byte-identical across worker counts") {
    PatchedSurface surface = fx::cube_surface();
    TetMesh tets = fx::kuhn_grid({0, 0, 0}, {1, 1, 1}, 5, 5, 5);
    fx::TempDir tmp;
    std::vector<std::string> bytes;
    for (int workers : {1, 4, 8}) {
        PipelineConfig cfg;
        cfg.threads = workers;
        CellComplex cc = compute_medial_axis(surface, tets, cfg);
        std::string path = tmp.path("w" + std::to_string(workers) + ".obj");
        write_cell_complex(cc, path, MeshFormat::Obj);
        bytes.push_back(file_bytes(path));
    }
    CHECK(bytes[0] == bytes[1]);
    CHECK(bytes[0] == bytes[2]);
    CHECK(!bytes[0].empty());
}

TEST_CASE("cube medial axis: labels are adjacent pairs, equidistant vertices") {
    PatchedSurface surface = fx::cube_surface();
    TetMesh tets = fx::kuhn_grid({0, 0, 0}, {1, 1, 1}, 7, 7, 7);
    PipelineConfig cfg;
    CellComplex cc = compute_medial_axis(surface, tets, cfg);
    REQUIRE(cc.polygons.size() > 0);

    Bvh whole = build_whole_surface_bvh(surface);
    std::vector<Bvh> per_patch = build_patch_bvhs(surface);
    double worst = 0.0;
    for (size_t f = 0; f < cc.polygons.size(); ++f) {
        auto [a, b] = cc.polygon_labels[f];
        CHECK(a >= 0);
        CHECK(b >= 0);
        CHECK(a < b);
        for (int v : cc.polygons[f]) {
            double da = per_patch[a].nearest(cc.vertices[v]).distance;
            double db = per_patch[b].nearest(cc.vertices[v]).distance;
            worst = std::max(worst, std::abs(da - db));
        }
    }
    // Fields of flat faces are exact inside the cube, so equidistance is tight.
    CHECK(worst < 1e-7);
}

TEST_CASE("offset: shells straddle the generator at the right distance") {
    PatchedSurface surface = fx::cube_surface();
    TetMesh tets = fx::kuhn_grid({-0.35, -0.35, -0.35}, {1.35, 1.35, 1.35}, 10, 10, 10);
    PipelineConfig cfg;
    cfg.offset_distance = 0.2;
    RunStats stats;
    OffsetResult res = compute_offset(surface, tets, cfg, &stats);
    REQUIRE(res.inward.polygons.size() > 0);
    REQUIRE(res.outward.polygons.size() > 0);

    for (const auto& lab : res.inward.polygon_labels) {
        CHECK(lab[0] < 0);   // virtual mirror
        CHECK(lab[1] >= 0);  // real patch
    }
    auto inside_cube = [](const Vec3& p) {
        return p.x > 0 && p.x < 1 && p.y > 0 && p.y < 1 && p.z > 0 && p.z < 1;
    };
    for (const Vec3& v : res.inward.vertices) CHECK(inside_cube(v));
    for (const Vec3& v : res.outward.vertices) CHECK(!inside_cube(v));

    // Inward offset of the cube at 0.2 is exactly the 0.6-cube.
    for (const Vec3& v : res.inward.vertices) {
        double d = std::min({v.x, 1 - v.x, v.y, 1 - v.y, v.z, 1 - v.z});
        CHECK(std::abs(d - 0.2) < 1e-7);
    }
}

TEST_CASE("organic filter: coplanar adjacent pair removed, square angles kept") {
    // Two coplanar half-squares at z=0 meeting along x=0.5.
    PatchedSurface flat;
    flat.vertices = {{0, 0, 0}, {0.5, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0.5, 1, 0}, {1, 1, 0}};
    flat.triangles = {{0, 1, 4}, {0, 4, 3}, {1, 2, 5}, {1, 5, 4}};
    flat.patch_of_triangle = {0, 0, 1, 1};
    fx::finalize_surface(flat);

    CellComplex cc;
    cc.vertices = {{0.5, 0, 1}, {0.5, 1, 1}, {0.5, 1, 2}, {0.5, 0, 2}};
    cc.polygons = {{0, 1, 2, 3}};
    cc.polygon_labels = {{0, 1}};
    cc.source_tet = {0};

    OrganicFilter f;
    f.min_area = 0.0;  // isolate the dihedral rule
    CHECK(filter_organic(cc, flat, f).polygons.empty());

    f.dihedral_deg = 0.0;  // disabled
    CHECK(filter_organic(cc, flat, f).polygons.size() == 1);

    // Right-angle patches stay with the default threshold.
    PatchedSurface cube = fx::cube_surface();
    CellComplex cc2 = cc;
    OrganicFilter f2;
    f2.min_area = 0.0;
    CHECK(filter_organic(cc2, cube, f2).polygons.size() == 1);
}

TEST_CASE("organic filter: small components dropped by the area floor") {
    PatchedSurface cube = fx::cube_surface();
    CellComplex cc;
    cc.vertices = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                   {5, 5, 5}, {5.001, 5, 5}, {5.001, 5.001, 5}};
    cc.polygons = {{0, 1, 2, 3}, {4, 5, 6}};
    cc.polygon_labels = {{0, 1}, {2, 3}};
    cc.source_tet = {0, 1};
    OrganicFilter f;
    f.dihedral_deg = 0.0;
    f.min_area = 1e-3;
    CellComplex out = filter_organic(cc, cube, f);
    REQUIRE(out.polygons.size() == 1);
    CHECK(out.polygon_labels[0][0] == 0);
    CHECK(out.polygon_labels[0][1] == 1);
}

TEST_CASE("pipeline validation errors") {
    PatchedSurface surface = fx::slab_surface();
    TetMesh tets = fx::kuhn_grid({0, 0, 0}, {1, 1, 1}, 2, 2, 2);
    PipelineConfig cfg;
    cfg.variant = MetricVariant::Mwvd;
    cfg.weights = {1.0};  // wrong count
    CHECK_THROWS_AS(compute_voronoi(surface, tets, cfg), ValidationError);
    cfg.weights = {1.0, -2.0};
    CHECK_THROWS_AS(compute_voronoi(surface, tets, cfg), ValidationError);

    PipelineConfig off;
    off.offset_distance = -1.0;
    CHECK_THROWS_AS(compute_offset(surface, tets, off), ValidationError);
    off.offset_distance = 0.1;
    off.variant = MetricVariant::Pd;
    CHECK_THROWS_AS(compute_offset(surface, tets, off), ValidationError);
}

TEST_CASE("stats: histogram and stage seconds populated") {
    PatchedSurface surface = fx::slab_surface();
    TetMesh tets = fx::kuhn_grid({0, 0, 0}, {1, 1, 1}, 3, 3, 3);
    PipelineConfig cfg;
    RunStats stats;
    compute_voronoi(surface, tets, cfg, &stats);
    CHECK(stats.tet_count == 3 * 3 * 3 * 6);
    int histo_total = 0;
    for (const auto& [size, count] : stats.gamma_hist) {
        CHECK(size >= 1);
        CHECK(size <= 2);
        histo_total += count;
    }
    CHECK(histo_total == stats.tet_count);
    CHECK(stats.seconds_propagate >= 0.0);
    CHECK(stats.fallback_tets == 0);
}
