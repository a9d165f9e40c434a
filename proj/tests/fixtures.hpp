#pragma once

// Shared analytic fixtures: axis-aligned generator surfaces, Kuhn tet grids,
// random tets/fields, and temp-file scaffolding for the IO/CLI suites.

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "pv/mesh.hpp"

namespace fx {

inline void finalize_surface(pv::PatchedSurface& s) {
    int np = 0;
    for (int p : s.patch_of_triangle) np = std::max(np, p + 1);
    s.patches.assign(np, {});
    for (size_t t = 0; t < s.triangles.size(); ++t)
        s.patches[s.patch_of_triangle[t]].push_back(static_cast<int>(t));
    pv::validate_surface(s);
}

// Two quads z=0 (patch 0, outward -z) and z=1 (patch 1, outward +z) spanning
// [-m, 1+m]^2 so interior queries always project onto the quad interior.
inline pv::PatchedSurface slab_surface(double m = 0.25) {
    pv::PatchedSurface s;
    double a = -m, b = 1.0 + m;
    s.vertices = {{a, a, 0}, {b, a, 0}, {b, b, 0}, {a, b, 0},
                  {a, a, 1}, {b, a, 1}, {b, b, 1}, {a, b, 1}};
    s.triangles = {{0, 3, 2}, {0, 2, 1},    // bottom, normal -z
                   {4, 5, 6}, {4, 6, 7}};   // top, normal +z
    s.patch_of_triangle = {0, 0, 1, 1};
    finalize_surface(s);
    return s;
}

// Unit cube, two triangles per face; patches 0..5 = -x,+x,-y,+y,-z,+z with
// outward normals, or a single patch covering everything.
inline pv::PatchedSurface cube_surface(bool single_patch = false) {
    pv::PatchedSurface s;
    s.vertices = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                  {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};
    auto quad = [&](int a, int b, int c, int d, int patch) {
        s.triangles.push_back({a, b, c});
        s.triangles.push_back({a, c, d});
        s.patch_of_triangle.push_back(single_patch ? 0 : patch);
        s.patch_of_triangle.push_back(single_patch ? 0 : patch);
    };
    quad(0, 4, 7, 3, 0);  // -x
    quad(1, 2, 6, 5, 1);  // +x
    quad(0, 1, 5, 4, 2);  // -y
    quad(3, 7, 6, 2, 3);  // +y
    quad(0, 3, 2, 1, 4);  // -z
    quad(4, 5, 6, 7, 5);  // +z
    finalize_surface(s);
    return s;
}

// Four side squares of the unit cube as patches 0..3 (open at top/bottom).
inline pv::PatchedSurface tube4_surface() {
    pv::PatchedSurface s;
    s.vertices = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                  {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};
    auto quad = [&](int a, int b, int c, int d, int patch) {
        s.triangles.push_back({a, b, c});
        s.triangles.push_back({a, c, d});
        s.patch_of_triangle.push_back(patch);
        s.patch_of_triangle.push_back(patch);
    };
    quad(0, 4, 7, 3, 0);  // x=0
    quad(1, 2, 6, 5, 1);  // x=1
    quad(0, 1, 5, 4, 2);  // y=0
    quad(3, 7, 6, 2, 3);  // y=1
    finalize_surface(s);
    return s;
}

// Kuhn subdivision: 6 tets per grid cell, all sharing the cell's main
// diagonal; conforming across cells.
inline pv::TetMesh kuhn_grid(pv::Vec3 lo, pv::Vec3 hi, int nx, int ny, int nz) {
    pv::TetMesh m;
    auto vid = [&](int i, int j, int k) {
        return (k * (ny + 1) + j) * (nx + 1) + i;
    };
    for (int k = 0; k <= nz; ++k)
        for (int j = 0; j <= ny; ++j)
            for (int i = 0; i <= nx; ++i)
                m.vertices.push_back({lo.x + (hi.x - lo.x) * i / nx,
                                      lo.y + (hi.y - lo.y) * j / ny,
                                      lo.z + (hi.z - lo.z) * k / nz});
    static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                    {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i)
                for (const auto& p : perms) {
                    std::array<int, 3> at{i, j, k};
                    std::array<int, 4> tet;
                    tet[0] = vid(at[0], at[1], at[2]);
                    for (int s = 0; s < 3; ++s) {
                        ++at[p[s]];
                        tet[s + 1] = vid(at[0], at[1], at[2]);
                    }
                    m.tets.push_back(tet);
                }
    for (auto& tet : m.tets) {
        std::array<pv::Vec3, 4> v{m.vertices[tet[0]], m.vertices[tet[1]],
                                  m.vertices[tet[2]], m.vertices[tet[3]]};
        if (pv::tet_signed_volume(v[0], v[1], v[2], v[3]) < 0.0) std::swap(tet[2], tet[3]);
        m.circumradius.push_back(pv::tet_circumradius(
            m.vertices[tet[0]], m.vertices[tet[1]], m.vertices[tet[2]], m.vertices[tet[3]]));
    }
    pv::validate_tet_mesh(m);
    return m;
}

inline std::array<pv::Vec3, 4> random_tet(std::mt19937& rng, double min_volume = 0.01) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (;;) {
        std::array<pv::Vec3, 4> v;
        for (auto& p : v) p = {u(rng), u(rng), u(rng)};
        double vol = pv::tet_signed_volume(v[0], v[1], v[2], v[3]);
        if (std::abs(vol) < min_volume) continue;
        if (vol < 0.0) std::swap(v[2], v[3]);
        return v;
    }
}

inline std::array<double, 4> random_field_values(std::mt19937& rng, double lo = 0.1,
                                                 double hi = 3.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    return {u(rng), u(rng), u(rng), u(rng)};
}

struct TempDir {
    std::filesystem::path dir;
    TempDir() {
        dir = std::filesystem::temp_directory_path() /
              ("pvtest_" + std::to_string(std::random_device{}()));
        std::filesystem::create_directories(dir);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(dir, ec);
    }
    std::string path(const std::string& name) const { return (dir / name).string(); }
};

inline void write_obj_surface(const pv::PatchedSurface& s, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    for (const pv::Vec3& v : s.vertices) {
        char buf[128];
        std::snprintf(buf, sizeof(buf), "v %.17g %.17g %.17g\n", v.x, v.y, v.z);
        f << buf;
    }
    int current = -1;
    for (size_t t = 0; t < s.triangles.size(); ++t) {
        if (s.patch_of_triangle[t] != current) {
            current = s.patch_of_triangle[t];
            f << "g p" << current << "\n";
        }
        const auto& tri = s.triangles[t];
        f << "f " << tri[0] + 1 << " " << tri[1] + 1 << " " << tri[2] + 1 << "\n";
    }
}

inline void write_msh(const pv::TetMesh& m, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    f << "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n$Nodes\n" << m.vertices.size() << "\n";
    for (size_t i = 0; i < m.vertices.size(); ++i) {
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%zu %.17g %.17g %.17g\n", i + 1, m.vertices[i].x,
                      m.vertices[i].y, m.vertices[i].z);
        f << buf;
    }
    f << "$EndNodes\n$Elements\n" << m.tets.size() << "\n";
    for (size_t t = 0; t < m.tets.size(); ++t) {
        const auto& tet = m.tets[t];
        f << t + 1 << " 4 2 0 1 " << tet[0] + 1 << " " << tet[1] + 1 << " " << tet[2] + 1
          << " " << tet[3] + 1 << "\n";
    }
    f << "$EndElements\n";
}

inline void write_vtk(const pv::TetMesh& m, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    f << "# vtk DataFile Version 3.0\ntets\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    f << "POINTS " << m.vertices.size() << " double\n";
    for (const pv::Vec3& v : m.vertices) {
        char buf[128];
        std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g\n", v.x, v.y, v.z);
        f << buf;
    }
    f << "CELLS " << m.tets.size() << " " << m.tets.size() * 5 << "\n";
    for (const auto& tet : m.tets)
        f << "4 " << tet[0] << " " << tet[1] << " " << tet[2] << " " << tet[3] << "\n";
    f << "CELL_TYPES " << m.tets.size() << "\n";
    for (size_t t = 0; t < m.tets.size(); ++t) f << "10\n";
}

}  // namespace fx
