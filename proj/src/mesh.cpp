#include "pv/mesh.hpp"

#include <algorithm>
#include <cctype>
#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

namespace pv {

namespace {

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open file: " + path);
    return in;
}

// First vertex index of an OBJ face corner ("7", "7/2", "7//3", "7/2/3").
int parse_obj_index(const std::string& token, int vertex_count, const std::string& path) {
    size_t slash = token.find('/');
    std::string head = slash == std::string::npos ? token : token.substr(0, slash);
    int idx = 0;
    try {
        idx = std::stoi(head);
    } catch (const std::exception&) {
        throw ParseError(path + ": bad face index '" + token + "'");
    }
    if (idx < 0) idx = vertex_count + idx + 1;  // negative = relative to end
    if (idx < 1 || idx > vertex_count)
        throw ParseError(path + ": face index out of range: " + head);
    return idx - 1;
}

}  // namespace

PatchedSurface load_patched_surface(const std::string& path,
                                    const std::optional<std::string>& labels_path) {
    std::ifstream in = open_input(path);
    PatchedSurface s;
    std::vector<int> group_of_triangle;
    std::map<std::string, int> group_ids;
    int current_group = -1;

    auto group_id = [&](const std::string& name) {
        auto it = group_ids.find(name);
        if (it != group_ids.end()) return it->second;
        int id = static_cast<int>(group_ids.size());
        group_ids.emplace(name, id);
        return id;
    };

    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key) || key[0] == '#') continue;
        if (key == "v") {
            Vec3 p;
            if (!(ls >> p.x >> p.y >> p.z))
                throw ParseError(path + ":" + std::to_string(lineno) + ": bad vertex line");
            s.vertices.push_back(p);
        } else if (key == "g" || key == "o") {
            std::string name;
            std::getline(ls, name);
            size_t b = name.find_first_not_of(" \t");
            name = b == std::string::npos ? std::string() : name.substr(b);
            current_group = group_id(name.empty() ? "default" : name);
        } else if (key == "f") {
            std::vector<int> corners;
            std::string tok;
            while (ls >> tok)
                corners.push_back(parse_obj_index(tok, static_cast<int>(s.vertices.size()), path));
            if (corners.size() < 3)
                throw ParseError(path + ":" + std::to_string(lineno) + ": face with <3 vertices");
            if (current_group < 0) current_group = group_id("default");
            for (size_t i = 1; i + 1 < corners.size(); ++i) {  // fan-triangulate
                s.triangles.push_back({corners[0], corners[i], corners[i + 1]});
                group_of_triangle.push_back(current_group);
            }
        }
        // vt/vn/usemtl/etc. ignored
    }
    if (s.triangles.empty()) throw ParseError(path + ": no faces");

    s.patch_of_triangle = group_of_triangle;
    if (labels_path) {
        std::ifstream lf = open_input(*labels_path);
        std::vector<int> labels;
        int v;
        while (lf >> v) labels.push_back(v);
        if (labels.size() != s.triangles.size())
            throw ParseError(*labels_path + ": " + std::to_string(labels.size()) +
                             " labels for " + std::to_string(s.triangles.size()) + " triangles");
        s.patch_of_triangle = labels;
    }

    int patch_count = 0;
    for (int p : s.patch_of_triangle) {
        if (p < 0) throw ValidationError(path + ": negative patch id");
        patch_count = std::max(patch_count, p + 1);
    }
    s.patches.assign(patch_count, {});
    for (size_t t = 0; t < s.triangles.size(); ++t)
        s.patches[s.patch_of_triangle[t]].push_back(static_cast<int>(t));

    validate_surface(s);
    return s;
}

void validate_surface(const PatchedSurface& s) {
    if (s.patches.empty()) throw ValidationError("surface has no patches");
    for (size_t p = 0; p < s.patches.size(); ++p)
        if (s.patches[p].empty())
            throw ValidationError("patch ids not contiguous: patch " + std::to_string(p) +
                                  " is empty");
    if (s.patch_of_triangle.size() != s.triangles.size())
        throw ValidationError("triangle without patch label");

    double diag = s.bounds().diagonal();
    double floor = kTriangleAreaFloor * diag * diag;
    for (size_t t = 0; t < s.triangles.size(); ++t) {
        const auto& tri = s.triangles[t];
        for (int k = 0; k < 3; ++k)
            if (tri[k] < 0 || tri[k] >= static_cast<int>(s.vertices.size()))
                throw ValidationError("triangle " + std::to_string(t) + ": vertex index out of range");
        double area = triangle_area(s.vertices[tri[0]], s.vertices[tri[1]], s.vertices[tri[2]]);
        if (!(area > floor))
            throw ValidationError("degenerate triangle " + std::to_string(t) +
                                  " (area " + fmt_double(area) + ")");
    }
    for (int p : s.excluded_patches)
        if (p < 0 || p >= s.patch_count())
            throw ValidationError("excluded patch " + std::to_string(p) + " out of range");
}

namespace {

TetMesh load_msh(std::ifstream& in, const std::string& path) {
    TetMesh m;
    std::unordered_map<long, int> node_id;
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("$Nodes", 0) == 0) {
            size_t n;
            if (!(in >> n)) throw ParseError(path + ": bad $Nodes count");
            m.vertices.reserve(n);
            for (size_t i = 0; i < n; ++i) {
                long id;
                Vec3 p;
                if (!(in >> id >> p.x >> p.y >> p.z)) throw ParseError(path + ": bad node line");
                node_id[id] = static_cast<int>(m.vertices.size());
                m.vertices.push_back(p);
            }
        } else if (line.rfind("$Elements", 0) == 0) {
            size_t n;
            if (!(in >> n)) throw ParseError(path + ": bad $Elements count");
            std::getline(in, line);
            for (size_t i = 0; i < n; ++i) {
                if (!std::getline(in, line)) throw ParseError(path + ": truncated elements");
                std::istringstream es(line);
                long id;
                int type, ntags;
                if (!(es >> id >> type >> ntags)) throw ParseError(path + ": bad element line");
                for (int t = 0; t < ntags; ++t) {
                    long tag;
                    es >> tag;
                }
                if (type != 4) continue;  // keep 4-node tets, skip points/triangles/etc.
                std::array<int, 4> tet;
                for (int k = 0; k < 4; ++k) {
                    long nid;
                    if (!(es >> nid)) throw ParseError(path + ": truncated tet element");
                    auto it = node_id.find(nid);
                    if (it == node_id.end())
                        throw ParseError(path + ": tet references unknown node " + std::to_string(nid));
                    tet[k] = it->second;
                }
                m.tets.push_back(tet);
            }
        }
    }
    return m;
}

TetMesh load_vtk(std::ifstream& in, const std::string& path) {
    TetMesh m;
    std::string tok;
    std::vector<std::vector<int>> cells;
    while (in >> tok) {
        if (tok == "DATASET") {
            in >> tok;
            if (tok != "UNSTRUCTURED_GRID")
                throw ParseError(path + ": expected UNSTRUCTURED_GRID, got " + tok);
        } else if (tok == "POINTS") {
            size_t n;
            std::string type;
            if (!(in >> n >> type)) throw ParseError(path + ": bad POINTS header");
            m.vertices.resize(n);
            for (size_t i = 0; i < n; ++i)
                if (!(in >> m.vertices[i].x >> m.vertices[i].y >> m.vertices[i].z))
                    throw ParseError(path + ": truncated POINTS");
        } else if (tok == "CELLS") {
            size_t n, total;
            if (!(in >> n >> total)) throw ParseError(path + ": bad CELLS header");
            cells.resize(n);
            for (size_t i = 0; i < n; ++i) {
                int cnt;
                if (!(in >> cnt)) throw ParseError(path + ": truncated CELLS");
                cells[i].resize(cnt);
                for (int k = 0; k < cnt; ++k)
                    if (!(in >> cells[i][k])) throw ParseError(path + ": truncated CELLS");
            }
        } else if (tok == "CELL_TYPES") {
            size_t n;
            if (!(in >> n)) throw ParseError(path + ": bad CELL_TYPES header");
            if (n != cells.size()) throw ParseError(path + ": CELL_TYPES/CELLS mismatch");
            for (size_t i = 0; i < n; ++i) {
                int type;
                if (!(in >> type)) throw ParseError(path + ": truncated CELL_TYPES");
                if (type != 10)
                    throw ParseError(path + ": unsupported cell type " + std::to_string(type) +
                                     " (only tetrahedra)");
                if (cells[i].size() != 4) throw ParseError(path + ": tetra cell without 4 nodes");
                m.tets.push_back({cells[i][0], cells[i][1], cells[i][2], cells[i][3]});
            }
        }
    }
    return m;
}

}  // namespace

TetMesh load_tet_mesh(const std::string& path) {
    std::ifstream in = open_input(path);
    std::string first;
    std::getline(in, first);
    in.seekg(0);
    TetMesh m;
    if (first.rfind("$MeshFormat", 0) == 0)
        m = load_msh(in, path);
    else if (first.rfind("# vtk", 0) == 0)
        m = load_vtk(in, path);
    else
        throw ParseError(path + ": unrecognized tet mesh format (want MSH v2 or legacy VTK)");
    if (m.tets.empty()) throw ParseError(path + ": no tetrahedra");

    for (auto& tet : m.tets) {
        for (int k = 0; k < 4; ++k)
            if (tet[k] < 0 || tet[k] >= static_cast<int>(m.vertices.size()))
                throw ValidationError(path + ": tet vertex index out of range");
        // normalize to positive orientation
        if (tet_signed_volume(m.vertices[tet[0]], m.vertices[tet[1]], m.vertices[tet[2]],
                              m.vertices[tet[3]]) < 0.0)
            std::swap(tet[2], tet[3]);
    }
    validate_tet_mesh(m);

    m.circumradius.resize(m.tets.size());
    for (size_t t = 0; t < m.tets.size(); ++t) {
        auto v = m.tet_vertices(static_cast<int>(t));
        m.circumradius[t] = tet_circumradius(v[0], v[1], v[2], v[3]);
    }
    return m;
}

void validate_tet_mesh(const TetMesh& m) {
    if (m.tets.empty()) throw ValidationError("tet mesh is empty");
    double diag = m.bounds().diagonal();
    double floor = kTetVolumeFloor * diag * diag * diag;
    for (size_t t = 0; t < m.tets.size(); ++t) {
        auto v = m.tet_vertices(static_cast<int>(t));
        double vol = tet_signed_volume(v[0], v[1], v[2], v[3]);
        if (!(vol > floor))
            throw ValidationError("degenerate tet " + std::to_string(t) + " (volume " +
                                  fmt_double(vol) + ")");
    }
}

void write_cell_complex(const CellComplex& cc, const std::string& path, MeshFormat format) {
    std::ofstream out(path, std::ios::binary);  // binary: one newline convention everywhere
    if (!out) throw IoError("cannot write file: " + path);

    if (format == MeshFormat::Obj) {
        out << "# patchvoronoi cell complex\n";
        out << "# vertices " << cc.vertices.size() << " polygons " << cc.polygons.size() << "\n";
        for (const Vec3& v : cc.vertices)
            out << "v " << fmt_double(v.x) << ' ' << fmt_double(v.y) << ' ' << fmt_double(v.z)
                << "\n";
        for (size_t i = 0; i < cc.polygons.size(); ++i) {
            out << "# labels " << cc.polygon_labels[i][0] << ' ' << cc.polygon_labels[i][1] << "\n";
            out << "f";
            for (int v : cc.polygons[i]) out << ' ' << v + 1;
            out << "\n";
        }
    } else {
        out << "ply\nformat ascii 1.0\n";
        out << "element vertex " << cc.vertices.size() << "\n";
        out << "property double x\nproperty double y\nproperty double z\n";
        out << "element face " << cc.polygons.size() << "\n";
        out << "property list uchar int vertex_indices\n";
        out << "property int label_a\nproperty int label_b\nproperty int source_tet\n";
        out << "end_header\n";
        for (const Vec3& v : cc.vertices)
            out << fmt_double(v.x) << ' ' << fmt_double(v.y) << ' ' << fmt_double(v.z) << "\n";
        for (size_t i = 0; i < cc.polygons.size(); ++i) {
            out << cc.polygons[i].size();
            for (int v : cc.polygons[i]) out << ' ' << v;
            out << ' ' << cc.polygon_labels[i][0] << ' ' << cc.polygon_labels[i][1] << ' '
                << (i < cc.source_tet.size() ? cc.source_tet[i] : -1) << "\n";
        }
    }
    if (!out) throw IoError("write failed: " + path);
}

CellComplex load_cell_complex(const std::string& path) {
    std::ifstream in = open_input(path);
    CellComplex cc;
    std::string line;
    std::getline(in, line);
    in.seekg(0);

    if (line == "ply") {
        size_t nv = 0, nf = 0;
        while (std::getline(in, line)) {
            std::istringstream ls(line);
            std::string k;
            ls >> k;
            if (k == "element") {
                std::string what;
                size_t n;
                ls >> what >> n;
                (what == "vertex" ? nv : nf) = n;
            } else if (k == "end_header")
                break;
        }
        cc.vertices.resize(nv);
        for (size_t i = 0; i < nv; ++i)
            if (!(in >> cc.vertices[i].x >> cc.vertices[i].y >> cc.vertices[i].z))
                throw ParseError(path + ": truncated vertices");
        for (size_t i = 0; i < nf; ++i) {
            size_t cnt;
            if (!(in >> cnt)) throw ParseError(path + ": truncated faces");
            std::vector<int> loop(cnt);
            for (auto& v : loop)
                if (!(in >> v)) throw ParseError(path + ": truncated face");
            int la, lb, st;
            if (!(in >> la >> lb >> st)) throw ParseError(path + ": missing face properties");
            cc.polygons.push_back(std::move(loop));
            cc.polygon_labels.push_back({la, lb});
            cc.source_tet.push_back(st);
        }
        return cc;
    }

    // OBJ
    std::array<int, 2> pending_label{0, 0};
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string k;
        if (!(ls >> k)) continue;
        if (k == "#") {
            std::string what;
            if (ls >> what && what == "labels") ls >> pending_label[0] >> pending_label[1];
        } else if (k == "v") {
            Vec3 p;
            ls >> p.x >> p.y >> p.z;
            cc.vertices.push_back(p);
        } else if (k == "f") {
            std::vector<int> loop;
            int v;
            while (ls >> v) loop.push_back(v - 1);
            cc.polygons.push_back(std::move(loop));
            cc.polygon_labels.push_back(pending_label);
            cc.source_tet.push_back(-1);
        }
    }
    return cc;
}

CellComplex weld_vertices(const CellComplex& cc, double tolerance) {
    CellComplex out;
    out.polygons.reserve(cc.polygons.size());

    struct CellKey {
        int64_t a, b, c;
        bool operator==(const CellKey&) const = default;
    };
    struct CellHash {
        size_t operator()(const CellKey& k) const {
            uint64_t h = 1469598103934665603ull;
            for (int64_t v : {k.a, k.b, k.c}) {
                h ^= static_cast<uint64_t>(v);
                h *= 1099511628211ull;
            }
            return h;
        }
    };
    std::unordered_map<CellKey, std::vector<int>, CellHash> grid;
    std::vector<int> remap(cc.vertices.size());
    double inv = tolerance > 0.0 ? 1.0 / tolerance : 0.0;
    double tol2 = tolerance * tolerance;

    for (size_t i = 0; i < cc.vertices.size(); ++i) {
        const Vec3& p = cc.vertices[i];
        int found = -1;
        if (tolerance > 0.0) {
            CellKey base{static_cast<int64_t>(std::floor(p.x * inv)),
                         static_cast<int64_t>(std::floor(p.y * inv)),
                         static_cast<int64_t>(std::floor(p.z * inv))};
            for (int dx = -1; dx <= 1 && found < 0; ++dx)
                for (int dy = -1; dy <= 1 && found < 0; ++dy)
                    for (int dz = -1; dz <= 1 && found < 0; ++dz) {
                        auto it = grid.find({base.a + dx, base.b + dy, base.c + dz});
                        if (it == grid.end()) continue;
                        for (int cand : it->second)
                            if (norm2(out.vertices[cand] - p) <= tol2) {
                                found = cand;
                                break;
                            }
                    }
            if (found < 0) {
                found = static_cast<int>(out.vertices.size());
                out.vertices.push_back(p);
                grid[base].push_back(found);
            }
        } else {
            found = static_cast<int>(out.vertices.size());
            out.vertices.push_back(p);
        }
        remap[i] = found;
    }

    for (size_t i = 0; i < cc.polygons.size(); ++i) {
        std::vector<int> loop;
        loop.reserve(cc.polygons[i].size());
        for (int v : cc.polygons[i]) {
            int m = remap[v];
            if (loop.empty() || loop.back() != m) loop.push_back(m);
        }
        while (loop.size() > 1 && loop.front() == loop.back()) loop.pop_back();
        if (loop.size() < 3) continue;  // polygon collapsed under welding
        out.polygons.push_back(std::move(loop));
        out.polygon_labels.push_back(cc.polygon_labels[i]);
        out.source_tet.push_back(i < cc.source_tet.size() ? cc.source_tet[i] : -1);
    }

    // Drop vertices that only supported collapsed polygons.
    std::vector<int> used(out.vertices.size(), -1);
    std::vector<Vec3> packed;
    for (auto& loop : out.polygons)
        for (int& v : loop) {
            if (used[v] < 0) {
                used[v] = static_cast<int>(packed.size());
                packed.push_back(out.vertices[v]);
            }
            v = used[v];
        }
    out.vertices = std::move(packed);
    return out;
}

}  // namespace pv
