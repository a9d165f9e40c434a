#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace pv {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    double& operator[](int i) { return (&x)[i]; }
    double operator[](int i) const { return (&x)[i]; }

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    bool operator==(const Vec3& o) const { return x == o.x && y == o.y && z == o.z; }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }
inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm2(const Vec3& v) { return dot(v, v); }
inline double norm(const Vec3& v) { return std::sqrt(norm2(v)); }
inline Vec3 normalized(const Vec3& v) {
    double n = norm(v);
    return n > 0.0 ? v / n : Vec3{0, 0, 0};
}
inline Vec3 min(const Vec3& a, const Vec3& b) {
    return {std::min(a.x, b.x), std::min(a.y, b.y), std::min(a.z, b.z)};
}
inline Vec3 max(const Vec3& a, const Vec3& b) {
    return {std::max(a.x, b.x), std::max(a.y, b.y), std::max(a.z, b.z)};
}

// A point in (x, y, z, d) space: position plus scalar field value.
struct Vec4 {
    double x = 0.0, y = 0.0, z = 0.0, d = 0.0;

    double& operator[](int i) { return (&x)[i]; }
    double operator[](int i) const { return (&x)[i]; }

    Vec4 operator+(const Vec4& o) const { return {x + o.x, y + o.y, z + o.z, d + o.d}; }
    Vec4 operator-(const Vec4& o) const { return {x - o.x, y - o.y, z - o.z, d - o.d}; }
    Vec4 operator*(double s) const { return {x * s, y * s, z * s, d * s}; }
    Vec3 xyz() const { return {x, y, z}; }
};

inline Vec4 operator*(double s, const Vec4& v) { return v * s; }
inline double dot(const Vec4& a, const Vec4& b) {
    return a.x * b.x + a.y * b.y + a.z * b.z + a.d * b.d;
}

struct Aabb {
    Vec3 lo{std::numeric_limits<double>::max(), std::numeric_limits<double>::max(),
            std::numeric_limits<double>::max()};
    Vec3 hi{std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest(),
            std::numeric_limits<double>::lowest()};

    void expand(const Vec3& p) { lo = min(lo, p); hi = max(hi, p); }
    void expand(const Aabb& b) { lo = min(lo, b.lo); hi = max(hi, b.hi); }
    bool valid() const { return lo.x <= hi.x; }
    Vec3 center() const { return (lo + hi) * 0.5; }
    Vec3 extent() const { return hi - lo; }
    double diagonal() const { return valid() ? norm(hi - lo) : 0.0; }
    int longest_axis() const {
        Vec3 e = extent();
        if (e.x >= e.y && e.x >= e.z) return 0;
        return e.y >= e.z ? 1 : 2;
    }
    // Squared distance from p to the box (0 inside).
    double dist2(const Vec3& p) const {
        double s = 0.0;
        for (int i = 0; i < 3; ++i) {
            double v = p[i];
            if (v < lo[i]) s += (lo[i] - v) * (lo[i] - v);
            if (v > hi[i]) s += (v - hi[i]) * (v - hi[i]);
        }
        return s;
    }
};

// Closest point on triangle (a,b,c) to p, with barycentric coordinates.
// Region classification after Ericson, Real-Time Collision Detection.
struct TriClosest {
    Vec3 point;
    double u = 0.0, v = 0.0, w = 0.0;  // barycentric wrt a, b, c
};

inline TriClosest closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b,
                                            const Vec3& c) {
    Vec3 ab = b - a, ac = c - a, ap = p - a;
    double d1 = dot(ab, ap), d2 = dot(ac, ap);
    if (d1 <= 0.0 && d2 <= 0.0) return {a, 1, 0, 0};

    Vec3 bp = p - b;
    double d3 = dot(ab, bp), d4 = dot(ac, bp);
    if (d3 >= 0.0 && d4 <= d3) return {b, 0, 1, 0};

    double vc = d1 * d4 - d3 * d2;
    if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
        double t = d1 / (d1 - d3);
        return {a + ab * t, 1 - t, t, 0};
    }

    Vec3 cp = p - c;
    double d5 = dot(ab, cp), d6 = dot(ac, cp);
    if (d6 >= 0.0 && d5 <= d6) return {c, 0, 0, 1};

    double vb = d5 * d2 - d1 * d6;
    if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
        double t = d2 / (d2 - d6);
        return {a + ac * t, 1 - t, 0, t};
    }

    double va = d3 * d6 - d5 * d4;
    if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
        double t = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return {b + (c - b) * t, 0, 1 - t, t};
    }

    double denom = 1.0 / (va + vb + vc);
    double v = vb * denom, w = vc * denom;
    return {a + ab * v + ac * w, 1 - v - w, v, w};
}

inline double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
    return 0.5 * norm(cross(b - a, c - a));
}

inline double tet_signed_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
    return dot(cross(b - a, c - a), d - a) / 6.0;
}

// Radius of the circumscribed sphere. Requires a non-degenerate tet.
inline double tet_circumradius(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
    // Circumcenter solves 2 (v_i - a) . x = |v_i|^2 - |a|^2 for i = b, c, d.
    Vec3 rb = b - a, rc = c - a, rd = d - a;
    double kb = 0.5 * norm2(rb), kc = 0.5 * norm2(rc), kd = 0.5 * norm2(rd);
    Vec3 cr = cross(rc, rd);
    double det = dot(rb, cr);
    if (det == 0.0) return std::numeric_limits<double>::infinity();
    Vec3 x = (kb * cr + kc * cross(rd, rb) + kd * cross(rb, rc)) / det;
    return norm(x);
}

}  // namespace pv
