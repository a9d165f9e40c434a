#include "pv/field.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "pv/linsolve.hpp"

namespace pv {

MetricVariant parse_variant(const std::string& name) {
    if (name == "vd") return MetricVariant::Vd;
    if (name == "pd") return MetricVariant::Pd;
    if (name == "awvd") return MetricVariant::Awvd;
    if (name == "mwvd") return MetricVariant::Mwvd;
    throw std::invalid_argument("unknown metric variant: " + name);
}

const char* variant_name(MetricVariant v) {
    switch (v) {
        case MetricVariant::Vd: return "vd";
        case MetricVariant::Pd: return "pd";
        case MetricVariant::Awvd: return "awvd";
        case MetricVariant::Mwvd: return "mwvd";
    }
    return "?";
}

double transform_distance(double D, double weight, MetricVariant variant) {
    switch (variant) {
        case MetricVariant::Vd: return D;
        case MetricVariant::Pd: return D * D - weight * weight;
        case MetricVariant::Awvd: return D + weight;
        case MetricVariant::Mwvd:
            if (!(weight > 0.0))
                throw std::invalid_argument("MWVD weight must be positive");
            return D * weight;
    }
    return D;
}

Hyperplane4 fit_hyperplane(const std::array<Vec3, 4>& verts, const std::array<double, 4>& d,
                           GeneratorTag tag) {
    std::array<std::array<double, 4>, 4> A;
    std::array<double, 4> rhs = d;
    for (int j = 0; j < 4; ++j) A[j] = {verts[j].x, verts[j].y, verts[j].z, 1.0};
    if (!solve_linear(A, rhs))
        throw ValidationError("degenerate tet: singular field fit");
    return {rhs[0], rhs[1], rhs[2], rhs[3], tag};
}

Vec4 bisector_plane(const Hyperplane4& hi, const Hyperplane4& hj) {
    Vec4 p{hi.a - hj.a, hi.b - hj.b, hi.c - hj.c, hi.w - hj.w};
    if (p.x == 0 && p.y == 0 && p.z == 0 && p.d == 0)
        throw std::invalid_argument("identical hyperplanes have no bisector");
    return p;
}

double linearization_error_bound(const std::array<Vec3, 4>& tet) {
    return 2.0 * tet_circumradius(tet[0], tet[1], tet[2], tet[3]);
}

std::vector<double> load_weights(const std::string& path, int patch_count) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open weights file: " + path);
    std::vector<double> w(patch_count, 0.0);
    std::vector<char> seen(patch_count, 0);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        int patch;
        double value;
        std::string head;
        if (!(ls >> head) || head[0] == '#') continue;
        try {
            patch = std::stoi(head);
        } catch (const std::exception&) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": bad patch id");
        }
        if (!(ls >> value))
            throw ParseError(path + ":" + std::to_string(lineno) + ": missing weight value");
        if (patch < 0 || patch >= patch_count)
            throw ValidationError(path + ":" + std::to_string(lineno) + ": patch id out of range");
        w[patch] = value;
        seen[patch] = 1;
    }
    for (int p = 0; p < patch_count; ++p)
        if (!seen[p])
            throw ValidationError(path + ": no weight for patch " + std::to_string(p));
    return w;
}

}  // namespace pv
