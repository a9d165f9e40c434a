#include "pv/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <sstream>

#include "pv/mesh.hpp"

namespace pv {

namespace {
constexpr int kGap = -1;  // eloop placeholder during face rebuild

// classification codes
constexpr int8_t kAbove = 1;
constexpr int8_t kOn = 0;
constexpr int8_t kBelow = -1;

// edge fates
enum : int8_t { kKeep = 0, kDie = 1, kTrim = 2 };
}  // namespace

Side classify(const Vec4& v, const Hyperplane4& h, const CutConfig& cfg) {
    if (cfg.exact) {
        RationalPlane p = rationalize(cut_plane(h));
        std::array<mpq_class, 4> rv{mpq_class(v.x), mpq_class(v.y), mpq_class(v.z),
                                    mpq_class(v.d)};
        return exact_side(rv, p) < 0 ? Side::Below : Side::Above;
    }
    double pi = cut_plane(h).eval(v);
    if (pi >= cfg.epsilon) return Side::Above;
    if (pi <= -cfg.epsilon) return Side::Below;
    return Side::On;
}

Vec4 edge_hyperplane_intersection(const Vec4& v1, const Vec4& v2, const Hyperplane4& h) {
    Plane4 p = cut_plane(h);
    double p1 = p.eval(v1), p2 = p.eval(v2);
    if (p1 * p2 > 0.0)
        throw std::invalid_argument("edge endpoints on the same side of the hyperplane");
    double denom = p1 - p2;
    if (denom == 0.0) throw std::invalid_argument("edge lies in the hyperplane");
    return v2 * (p1 / denom) - v1 * (p2 / denom);
}

Polytope4::Polytope4(const std::array<Vec3, 4>& tet, const CutConfig& cfg)
    : cfg_(cfg), tet_(tet) {
    if (!(cfg.d_max > cfg.d_min))
        throw std::invalid_argument("prism needs d_max > d_min");

    // planes 0..5: bottom, top, then the side plane opposite each tet vertex
    planes_.push_back({{0, 0, 0, -1}, cfg.d_min});
    planes_.push_back({{0, 0, 0, 1}, -cfg.d_max});
    for (int j = 0; j < 4; ++j) {
        const Vec3& a = tet[(j + 1) & 3];
        const Vec3& b = tet[(j + 2) & 3];
        const Vec3& c = tet[(j + 3) & 3];
        Vec3 n = cross(b - a, c - a);
        double w = -dot(n, a);
        if (dot(n, tet[j]) + w > 0) {  // orient: inside (vertex j) <= 0
            n = n * -1.0;
            w = -w;
        }
        planes_.push_back({{n.x, n.y, n.z, 0}, w});
    }
    rplanes_.resize(planes_.size());

    // vertices: bottom 0..3, top 4..7; corner i misses only side plane 2+i
    for (int i = 0; i < 4; ++i) {
        std::array<int, 4> quad{0, 0, 0, 0};
        int k = 1;
        quad[0] = 0;
        for (int j = 0; j < 4; ++j)
            if (j != i) quad[k++] = 2 + j;
        add_vertex({tet[i].x, tet[i].y, tet[i].z, cfg.d_min}, quad, true);
    }
    for (int i = 0; i < 4; ++i) {
        std::array<int, 4> quad{1, 0, 0, 0};
        int k = 1;
        for (int j = 0; j < 4; ++j)
            if (j != i) quad[k++] = 2 + j;
        add_vertex({tet[i].x, tet[i].y, tet[i].z, cfg.d_max}, quad, true);
    }

    // edges: bottom pairs (ids 0..5), top pairs (6..11), verticals (12..15)
    static const int kPair[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
    auto pair_index = [](int i, int j) {
        for (int e = 0; e < 6; ++e)
            if (kPair[e][0] == std::min(i, j) && kPair[e][1] == std::max(i, j)) return e;
        return -1;
    };
    for (int e = 0; e < 6; ++e) {
        int i = kPair[e][0], j = kPair[e][1];
        std::array<int, 3> pl{0, 0, 0};
        int k = 1;
        pl[0] = 0;
        for (int m = 0; m < 4; ++m)
            if (m != i && m != j) pl[k++] = 2 + m;
        add_edge(i, j, pl);
    }
    for (int e = 0; e < 6; ++e) {
        int i = kPair[e][0], j = kPair[e][1];
        std::array<int, 3> pl{1, 0, 0};
        int k = 1;
        for (int m = 0; m < 4; ++m)
            if (m != i && m != j) pl[k++] = 2 + m;
        add_edge(4 + i, 4 + j, pl);
    }
    for (int i = 0; i < 4; ++i) {
        std::array<int, 3> pl;
        int k = 0;
        for (int m = 0; m < 4; ++m)
            if (m != i) pl[k++] = 2 + m;
        add_edge(i, 4 + i, pl);
    }

    // faces: bottom triangles (0..3, one per side plane), top triangles
    // (4..7), side quads per tet edge (8..13)
    for (int j = 0; j < 4; ++j) {  // triangle opposite vertex j, at d_min
        int p = (j + 1) & 3, q = (j + 2) & 3, r = (j + 3) & 3;
        FaceRec f;
        f.loop = {p, q, r};
        f.eloop = {pair_index(p, q), pair_index(q, r), pair_index(r, p)};
        f.planes = {0, 2 + j};
        faces_.push_back(std::move(f));
    }
    for (int j = 0; j < 4; ++j) {
        int p = (j + 1) & 3, q = (j + 2) & 3, r = (j + 3) & 3;
        FaceRec f;
        f.loop = {4 + p, 4 + q, 4 + r};
        f.eloop = {6 + pair_index(p, q), 6 + pair_index(q, r), 6 + pair_index(r, p)};
        f.planes = {1, 2 + j};
        faces_.push_back(std::move(f));
    }
    for (int e = 0; e < 6; ++e) {
        int i = kPair[e][0], j = kPair[e][1];
        FaceRec f;
        f.loop = {i, j, 4 + j, 4 + i};
        f.eloop = {e, 12 + j, 6 + e, 12 + i};
        std::array<int, 2> pl;
        int k = 0;
        for (int m = 0; m < 4; ++m)
            if (m != i && m != j) pl[k++] = 2 + m;
        f.planes = pl;
        faces_.push_back(std::move(f));
    }

    // cells: bottom, top, one per side plane
    cells_.push_back({{0, 1, 2, 3}, 0, true});
    cells_.push_back({{4, 5, 6, 7}, 1, true});
    for (int j = 0; j < 4; ++j) {
        int p = (j + 1) & 3, q = (j + 2) & 3, r = (j + 3) & 3;
        CellRec c;
        c.plane = 2 + j;
        c.faces = {j, 4 + j, 8 + pair_index(p, q), 8 + pair_index(q, r), 8 + pair_index(r, p)};
        cells_.push_back(std::move(c));
    }
}

int Polytope4::add_vertex(const Vec4& pos, std::array<int, 4> quad, bool solved) {
    std::sort(quad.begin(), quad.end());
    verts_.push_back({pos, quad, true, solved});
    rpos_.emplace_back();
    return static_cast<int>(verts_.size()) - 1;
}

int Polytope4::add_edge(int v0, int v1, std::array<int, 3> planes) {
    std::sort(planes.begin(), planes.end());
    edges_.push_back({v0, v1, planes, true});
    return static_cast<int>(edges_.size()) - 1;
}

const RationalPlane& Polytope4::rplane(int id) const {
    if (rplanes_[id]) return *rplanes_[id];
    RationalPlane r;
    if (id == 0) {
        r.g = {0, 0, 0, -1};
        r.w = mpq_class(cfg_.d_min);
    } else if (id == 1) {
        r.g = {0, 0, 0, 1};
        r.w = -mpq_class(cfg_.d_max);
    } else if (id < kInitialPlanes) {
        // exact side plane from the rational cross product, so prism corners
        // solve back to the exact embedded tet coordinates
        int j = id - 2;
        std::array<mpq_class, 3> a, b, c, vj;
        const Vec3& va = tet_[(j + 1) & 3];
        const Vec3& vb = tet_[(j + 2) & 3];
        const Vec3& vc = tet_[(j + 3) & 3];
        const Vec3& vv = tet_[j];
        a = {mpq_class(va.x), mpq_class(va.y), mpq_class(va.z)};
        b = {mpq_class(vb.x), mpq_class(vb.y), mpq_class(vb.z)};
        c = {mpq_class(vc.x), mpq_class(vc.y), mpq_class(vc.z)};
        vj = {mpq_class(vv.x), mpq_class(vv.y), mpq_class(vv.z)};
        std::array<mpq_class, 3> u{b[0] - a[0], b[1] - a[1], b[2] - a[2]};
        std::array<mpq_class, 3> v{c[0] - a[0], c[1] - a[1], c[2] - a[2]};
        std::array<mpq_class, 3> n{u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2],
                                   u[0] * v[1] - u[1] * v[0]};
        mpq_class w = -(n[0] * a[0] + n[1] * a[1] + n[2] * a[2]);
        if (sgn(n[0] * vj[0] + n[1] * vj[1] + n[2] * vj[2] + w) > 0) {
            for (auto& x : n) x = -x;
            w = -w;
        }
        r.g = {n[0], n[1], n[2], mpq_class(0)};
        r.w = w;
    } else {
        // field plane inserted without raw distances: embed the float fit
        r = rationalize(planes_[id]);
    }
    rplanes_[id] = std::move(r);
    return *rplanes_[id];
}

const std::array<mpq_class, 4>& Polytope4::rvertex(int vid) const {
    if (rpos_[vid]) return *rpos_[vid];
    const auto& q = verts_[vid].quad;
    if (vid < 8) {  // prism corner: embed directly
        const Vec4& p = verts_[vid].pos;
        rpos_[vid] = std::array<mpq_class, 4>{mpq_class(p.x), mpq_class(p.y), mpq_class(p.z),
                                              mpq_class(p.d)};
    } else {
        rpos_[vid] = intersect_planes(rplane(q[0]), rplane(q[1]), rplane(q[2]), rplane(q[3]));
    }
    return *rpos_[vid];
}

int Polytope4::sign_at(int vid, int plane_id) const {
    return exact_side(rvertex(vid), rplane(plane_id));
}

void Polytope4::solve_position(int vid) const {
    const auto& r = rvertex(vid);
    const_cast<VertexRec&>(verts_[vid]).pos = to_double(r);
    const_cast<VertexRec&>(verts_[vid]).solved = true;
}

Vec3 Polytope4::position3(int vid) const {
    if (!verts_[vid].solved) solve_position(vid);
    const Vec4& p = verts_[vid].pos;
    return {p.x, p.y, p.z};
}

double Polytope4::value_d(int vid) const {
    if (!verts_[vid].solved) solve_position(vid);
    return verts_[vid].pos.d;
}

std::vector<int> Polytope4::cut(const Hyperplane4& h, const std::array<double, 4>* raw_d) {
    const int hid = static_cast<int>(planes_.size());
    planes_.push_back(cut_plane(h));
    fields_.push_back(h);
    rplanes_.emplace_back();
    if (cfg_.exact)
        rplanes_[hid] = raw_d ? rational_cut_plane(tet_, *raw_d)
                              : rationalize(planes_[hid]);

    // bounds guard: the prism must box every inserted field over the tet
    // (slack at the floor: a fitted field may dip ~1e-16 under a distance-0
    // corner on the generator surface)
    {
        double lo = h.eval(tet_[0]), hi = lo;
        for (int i = 1; i < 4; ++i) {
            double v = h.eval(tet_[i]);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        double slack = 1e-7 * (1.0 + std::abs(cfg_.d_min) + std::abs(cfg_.d_max));
        if (!(hi < cfg_.d_max) || !(lo >= cfg_.d_min - slack))
            throw std::logic_error("field escapes prism d-range");
    }

    // 1. classify every live vertex
    const int nv = static_cast<int>(verts_.size());
    const int ne = static_cast<int>(edges_.size());
    const int nf = static_cast<int>(faces_.size());
    std::vector<int8_t> cls(nv, kBelow);
    bool any_strict_above = false;
    for (int v = 0; v < nv; ++v) {
        if (!verts_[v].alive) continue;
        if (cfg_.exact) {
            int s = sign_at(v, hid);
            cls[v] = s > 0 ? kAbove : (s < 0 ? kBelow : kOn);
            if (s > 0) any_strict_above = true;
        } else {
            double pi = planes_[hid].eval(verts_[v].pos);
            cls[v] = pi >= cfg_.epsilon ? kAbove : (pi <= -cfg_.epsilon ? kBelow : kOn);
            if (cls[v] == kAbove) any_strict_above = true;
        }
    }
    if (!any_strict_above) return {};  // graze or duplicate: nothing to remove

    auto kept = [&](int v) { return cfg_.exact ? cls[v] <= kOn : cls[v] == kBelow; };

    // cell flags from pre-cut loops
    const int nc = static_cast<int>(cells_.size());
    std::vector<char> cell_below(nc, 0), cell_above(nc, 0);
    for (int c = 0; c < nc; ++c) {
        if (!cells_[c].alive) continue;
        for (int f : cells_[c].faces) {
            if (!faces_[f].alive) continue;
            for (int v : faces_[f].loop) {
                if (cls[v] == kBelow) cell_below[c] = 1;
                if (cls[v] == kAbove) cell_above[c] = 1;
            }
        }
    }

    // 2. per-edge fates; trims spawn the crossing vertex (shared by all faces
    // bordering the edge)
    std::vector<int8_t> efate(ne, kKeep);
    std::vector<int> ecross(ne, -1);
    std::vector<int> new_verts;
    for (int e = 0; e < ne; ++e) {
        EdgeRec& ed = edges_[e];
        if (!ed.alive) continue;
        int8_t ca = cls[ed.v0], cb = cls[ed.v1];
        int8_t fate;
        if (cfg_.exact) {
            if (ca <= kOn && cb <= kOn)
                fate = kKeep;
            else if (ca == kAbove && cb == kBelow)
                fate = kTrim;
            else if (ca == kBelow && cb == kAbove)
                fate = kTrim;
            else
                fate = kDie;  // above/above or above touching an on-vertex
        } else {
            if (ca == kBelow && cb == kBelow)
                fate = kKeep;
            else if ((ca == kBelow && cb != kBelow) || (cb == kBelow && ca != kBelow))
                fate = kTrim;  // cases 1, 5, 7
            else
                fate = kDie;  // cases 2, 4, 6, 8
        }
        efate[e] = fate;
        if (fate != kTrim) {
            if (fate == kDie) ed.alive = false;
            continue;
        }
        std::array<int, 4> quad{ed.planes[0], ed.planes[1], ed.planes[2], hid};
        int x;
        if (cfg_.exact) {
            x = add_vertex({0, 0, 0, 0}, quad, false);
        } else {
            const Vec4& p1 = verts_[ed.v0].pos;
            const Vec4& p2 = verts_[ed.v1].pos;
            double pi1 = planes_[hid].eval(p1), pi2 = planes_[hid].eval(p2);
            double denom = pi1 - pi2;
            double s = denom != 0.0 ? pi1 / denom : std::numeric_limits<double>::infinity();
            if (!(s > -0.5 && s < 2.5))
                throw CutInconsistency("crossing parameter blew up");
            x = add_vertex(p2 * (pi1 / denom) - p1 * (pi2 / denom), quad, true);
        }
        ecross[e] = x;
        new_verts.push_back(x);
        cls.push_back(kOn);  // new vertex sits on hid
        // trim in place: replace the removed endpoint
        if (kept(ed.v0))
            ed.v1 = x;
        else
            ed.v0 = x;
    }

    // 3. kill removed vertices
    for (int v = 0; v < nv; ++v) {
        if (!verts_[v].alive) continue;
        bool dead = cfg_.exact ? cls[v] == kAbove : cls[v] != kBelow;
        if (dead) verts_[v].alive = false;
    }

    // 4. rebuild touched faces; gaps become closing edges on hid
    std::vector<std::vector<int>> closing_by_face(nf);
    for (int f = 0; f < nf; ++f) {
        FaceRec& fc = faces_[f];
        if (!fc.alive) continue;
        bool touched = false;
        for (int e : fc.eloop)
            if (efate[e] != kKeep) {
                touched = true;
                break;
            }
        if (!touched) continue;

        const int n = static_cast<int>(fc.loop.size());
        std::vector<int> loop, links;
        loop.reserve(n + 2);
        for (int i = 0; i < n; ++i) {
            int u = fc.loop[i];
            int e = fc.eloop[i];
            switch (efate[e]) {
                case kKeep:
                    loop.push_back(u);
                    links.push_back(e);
                    break;
                case kTrim:
                    if (kept(u)) {
                        loop.push_back(u);
                        links.push_back(e);
                        loop.push_back(ecross[e]);
                        links.push_back(kGap);
                    } else {
                        loop.push_back(ecross[e]);
                        links.push_back(e);
                    }
                    break;
                case kDie:
                    if (kept(u)) {
                        loop.push_back(u);
                        links.push_back(kGap);
                    }
                    break;
            }
        }
        if (static_cast<int>(loop.size()) < 3) {
            fc.alive = false;
            continue;
        }
        int gaps = 0;
        for (int i = 0; i < static_cast<int>(links.size()); ++i) {
            if (links[i] != kGap) continue;
            ++gaps;
            if (gaps > 1)
                throw CutInconsistency("hyperplane met a face in more than one run");
            int a = loop[i];
            int b = loop[(i + 1) % loop.size()];
            int ce = add_edge(a, b, {fc.planes[0], fc.planes[1], hid});
            links[i] = ce;
            closing_by_face[f].push_back(ce);
        }
        fc.loop = std::move(loop);
        fc.eloop = std::move(links);
    }

    // 5. rebuild cells: cap the cut ones, adopt live faces of dead ones
    std::vector<int> n_faces;  // face set of the new cell on hid
    for (int c = 0; c < nc; ++c) {
        CellRec& cl = cells_[c];
        if (!cl.alive) continue;
        if (!cell_below[c]) {
            cl.alive = false;
            for (int f : cl.faces)
                if (faces_[f].alive) n_faces.push_back(f);  // face lies in hid
            continue;
        }
        if (!cell_above[c]) continue;  // untouched

        // pool: closing edges from this cell's faces, plus (exact mode)
        // surviving edges lying entirely on hid
        std::vector<int> pool;
        for (int f : cl.faces) pool.insert(pool.end(), closing_by_face[f].begin(),
                                           closing_by_face[f].end());
        if (cfg_.exact) {
            for (int f : cl.faces) {
                if (!faces_[f].alive) continue;
                for (int e : faces_[f].eloop)
                    if (e < ne && edges_[e].alive && cls[edges_[e].v0] == kOn &&
                        cls[edges_[e].v1] == kOn)
                        pool.push_back(e);
            }
        }
        std::sort(pool.begin(), pool.end());
        pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
        if (pool.empty()) {  // cut both sides but no section boundary: broken
            throw CutInconsistency("cut cell produced no cap boundary");
        }

        // chain the pool into one closed loop
        std::vector<char> used(pool.size(), 0);
        auto other_end = [&](int e, int v) {
            return edges_[e].v0 == v ? edges_[e].v1 : edges_[e].v0;
        };
        std::vector<int> eloop{pool[0]};
        used[0] = 1;
        int start = edges_[pool[0]].v0;
        int at = edges_[pool[0]].v1;
        std::vector<int> vloop{start};
        while (at != start) {
            vloop.push_back(at);
            int next = -1;
            for (size_t k = 0; k < pool.size(); ++k) {
                if (used[k]) continue;
                if (edges_[pool[k]].v0 == at || edges_[pool[k]].v1 == at) {
                    if (next != -1) throw CutInconsistency("branching cap chain");
                    next = static_cast<int>(k);
                }
            }
            if (next == -1) throw CutInconsistency("open cap chain");
            used[next] = 1;
            eloop.push_back(pool[next]);
            at = other_end(pool[next], at);
        }
        for (char u : used)
            if (!u) throw CutInconsistency("cap chain left edges behind");
        if (vloop.size() < 3) throw CutInconsistency("degenerate cap");

        FaceRec cap;
        cap.loop = std::move(vloop);
        cap.eloop = std::move(eloop);
        cap.planes = {std::min(cl.plane, hid), std::max(cl.plane, hid)};
        faces_.push_back(std::move(cap));
        int cap_id = static_cast<int>(faces_.size()) - 1;

        std::vector<int> nf2;
        for (int f : cl.faces)
            if (faces_[f].alive) nf2.push_back(f);
        nf2.push_back(cap_id);
        cl.faces = std::move(nf2);
        n_faces.push_back(cap_id);
    }

    if (n_faces.empty()) throw CutInconsistency("cut removed volume but capped nothing");
    cells_.push_back({std::move(n_faces), hid, true});

    // 6. sweep: drop edges unreferenced by live faces, then vertices
    std::vector<char> eref(edges_.size(), 0), vref(verts_.size(), 0);
    bool any_cell = false;
    for (const auto& cl : cells_) any_cell |= cl.alive;
    if (!any_cell) throw CutInconsistency("polytope annihilated");
    for (const auto& fc : faces_) {
        if (!fc.alive) continue;
        for (int e : fc.eloop) eref[e] = 1;
        for (int v : fc.loop) vref[v] = 1;
    }
    for (size_t e = 0; e < edges_.size(); ++e)
        if (edges_[e].alive && !eref[e]) edges_[e].alive = false;
    for (size_t v = 0; v < verts_.size(); ++v)
        if (verts_[v].alive && !vref[v]) verts_[v].alive = false;

    return new_verts;
}

std::vector<Polytope4::EnvelopeFace> Polytope4::lower_envelope() const {
    std::vector<EnvelopeFace> out;
    for (const auto& fc : faces_) {
        if (!fc.alive) continue;
        if (fc.planes[0] < kInitialPlanes || fc.planes[1] < kInitialPlanes) continue;
        // deterministic loop normalization: lowest vertex id first, then walk
        // toward its smaller neighbor
        const int n = static_cast<int>(fc.loop.size());
        int lo = 0;
        for (int i = 1; i < n; ++i)
            if (fc.loop[i] < fc.loop[lo]) lo = i;
        bool forward = fc.loop[(lo + 1) % n] <= fc.loop[(lo + n - 1) % n];
        EnvelopeFace ef;
        ef.fields = {fc.planes[0] - kInitialPlanes, fc.planes[1] - kInitialPlanes};
        ef.polygon.reserve(n);
        for (int k = 0; k < n; ++k) {
            int i = forward ? (lo + k) % n : (lo + n - k) % n;
            ef.polygon.push_back(position3(fc.loop[i]));
        }
        out.push_back(std::move(ef));
    }
    return out;
}

int Polytope4::owning_field(const Vec3& p, double tol) const {
    for (const auto& cl : cells_) {
        if (!cl.alive || cl.plane < kInitialPlanes) continue;
        const Hyperplane4& f = fields_[cl.plane - kInitialPlanes];
        Vec4 lift{p.x, p.y, p.z, f.eval(p)};
        bool inside = true;
        for (int fid : cl.faces) {
            const FaceRec& fc = faces_[fid];
            if (!fc.alive) continue;
            int other = fc.planes[0] == cl.plane ? fc.planes[1] : fc.planes[0];
            if (planes_[other].eval(lift) > tol) {
                inside = false;
                break;
            }
        }
        if (inside) return cl.plane - kInitialPlanes;
    }
    return -1;
}

int Polytope4::alive_vertex_count() const {
    int n = 0;
    for (const auto& v : verts_) n += v.alive;
    return n;
}
int Polytope4::alive_edge_count() const {
    int n = 0;
    for (const auto& e : edges_) n += e.alive;
    return n;
}
int Polytope4::alive_face_count() const {
    int n = 0;
    for (const auto& f : faces_) n += f.alive;
    return n;
}
int Polytope4::alive_cell_count() const {
    int n = 0;
    for (const auto& c : cells_) n += c.alive;
    return n;
}

void Polytope4::validate(double tol) const {
    auto fail = [](const std::string& msg) { throw std::logic_error("polytope: " + msg); };

    // Euler-type count for the boundary complex of a 4-polytope
    if (alive_vertex_count() - alive_edge_count() + alive_face_count() - alive_cell_count() != 0)
        fail("Euler count violated");

    std::vector<int> face_cells(faces_.size(), 0);
    for (const auto& cl : cells_) {
        if (!cl.alive) continue;
        if (cl.faces.size() < 4) fail("cell with fewer than 4 faces");
        for (int f : cl.faces) {
            if (!faces_[f].alive) fail("cell references dead face");
            ++face_cells[f];
        }
    }
    std::vector<int> edge_faces(edges_.size(), 0);
    for (size_t f = 0; f < faces_.size(); ++f) {
        const FaceRec& fc = faces_[f];
        if (!fc.alive) continue;
        if (fc.loop.size() < 3) fail("face loop shorter than 3");
        if (fc.loop.size() != fc.eloop.size()) fail("loop/eloop length mismatch");
        if (face_cells[f] != 2) fail("face not shared by exactly 2 cells");
        const int n = static_cast<int>(fc.loop.size());
        for (int i = 0; i < n; ++i) {
            int u = fc.loop[i], v = fc.loop[(i + 1) % n], e = fc.eloop[i];
            if (!verts_[u].alive) fail("face references dead vertex");
            const EdgeRec& ed = edges_[e];
            if (!ed.alive) fail("face references dead edge");
            if (!((ed.v0 == u && ed.v1 == v) || (ed.v0 == v && ed.v1 == u)))
                fail("eloop edge does not join consecutive loop vertices");
            ++edge_faces[e];
        }
    }
    for (size_t e = 0; e < edges_.size(); ++e)
        if (edges_[e].alive && edge_faces[e] < 2) fail("edge bordered by fewer than 2 faces");

    // convexity: every live vertex on or below every plane
    for (size_t v = 0; v < verts_.size(); ++v) {
        if (!verts_[v].alive) continue;
        if (cfg_.exact) {
            for (size_t pid = 0; pid < planes_.size(); ++pid)
                if (sign_at(static_cast<int>(v), static_cast<int>(pid)) > 0)
                    fail("vertex strictly above a retained plane (exact)");
        } else {
            for (const auto& pl : planes_)
                if (pl.eval(verts_[v].pos) > tol) fail("vertex above a retained plane");
            // defining planes pass through the vertex
            for (int q : verts_[v].quad)
                if (std::abs(planes_[q].eval(verts_[v].pos)) > tol)
                    fail("vertex drifted off its defining planes");
        }
    }
}

std::string Polytope4::dump() const {
    std::ostringstream os;
    os << "polytope4 v=" << alive_vertex_count() << " e=" << alive_edge_count()
       << " f=" << alive_face_count() << " c=" << alive_cell_count() << "\n";
    char buf[128];
    for (size_t v = 0; v < verts_.size(); ++v) {
        if (!verts_[v].alive) continue;
        Vec3 p = position3(static_cast<int>(v));
        double d = value_d(static_cast<int>(v));
        std::snprintf(buf, sizeof(buf), "v%zu (%.17g %.17g %.17g %.17g) [%d %d %d %d]\n", v, p.x,
                      p.y, p.z, d, verts_[v].quad[0], verts_[v].quad[1], verts_[v].quad[2],
                      verts_[v].quad[3]);
        os << buf;
    }
    for (size_t f = 0; f < faces_.size(); ++f) {
        if (!faces_[f].alive) continue;
        os << "f" << f << " {" << faces_[f].planes[0] << "," << faces_[f].planes[1] << "}";
        for (int v : faces_[f].loop) os << " " << v;
        os << "\n";
    }
    for (size_t c = 0; c < cells_.size(); ++c) {
        if (!cells_[c].alive) continue;
        os << "c" << c << " {" << cells_[c].plane << "}";
        for (int fid : cells_[c].faces) os << " f" << fid;
        os << "\n";
    }
    return os.str();
}

}  // namespace pv
