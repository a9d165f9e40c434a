#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <random>

#include "fixtures.hpp"
#include "pv/field.hpp"

using namespace pv;

namespace {

double det3(const std::array<std::array<double, 3>, 3>& m) {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

double det4(const std::array<std::array<double, 4>, 4>& m) {
    double s = 0.0;
    for (int c = 0; c < 4; ++c) {
        std::array<std::array<double, 3>, 3> minor;
        for (int r = 1; r < 4; ++r) {
            int mc = 0;
            for (int cc = 0; cc < 4; ++cc) {
                if (cc == c) continue;
                minor[r - 1][mc++] = m[r][cc];
            }
        }
        s += (c % 2 == 0 ? 1.0 : -1.0) * m[0][c] * det3(minor);
    }
    return s;
}

// Independent Cramer's-rule solve of the interpolation system.
std::array<double, 4> cramer_fit(const std::array<Vec3, 4>& tet,
                                 const std::array<double, 4>& val) {
    std::array<std::array<double, 4>, 4> a;
    for (int r = 0; r < 4; ++r) a[r] = {tet[r].x, tet[r].y, tet[r].z, 1.0};
    double d = det4(a);
    std::array<double, 4> out;
    for (int c = 0; c < 4; ++c) {
        std::array<std::array<double, 4>, 4> m = a;
        for (int r = 0; r < 4; ++r) m[r][c] = val[r];
        out[c] = det4(m) / d;
    }
    return out;
}

}  // namespace

TEST_CASE("fit_hyperplane interpolates and matches Cramer's rule") {
    std::mt19937 rng(42);
    for (int trial = 0; trial < 300; ++trial) {
        std::array<Vec3, 4> tet = fx::random_tet(rng);
        std::array<double, 4> val = fx::random_field_values(rng);
        Hyperplane4 h = fit_hyperplane(tet, val, GeneratorTag{3, false});
        CHECK(h.tag.patch == 3);
        for (int j = 0; j < 4; ++j)
            CHECK(h.eval(tet[j]) == doctest::Approx(val[j]).epsilon(1e-9));
        std::array<double, 4> ref = cramer_fit(tet, val);
        CHECK(h.a == doctest::Approx(ref[0]).epsilon(1e-6));
        CHECK(h.b == doctest::Approx(ref[1]).epsilon(1e-6));
        CHECK(h.c == doctest::Approx(ref[2]).epsilon(1e-6));
        CHECK(h.w == doctest::Approx(ref[3]).epsilon(1e-6));
    }
}

TEST_CASE("fit_hyperplane rejects flat tets") {
    std::array<Vec3, 4> flat{Vec3{0, 0, 0}, Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{1, 1, 0}};
    CHECK_THROWS(fit_hyperplane(flat, {0, 0, 0, 0}, GeneratorTag{0, false}));
}

TEST_CASE("metric transforms") {
    CHECK(transform_distance(2.0, 0.5, MetricVariant::Vd) == 2.0);
    CHECK(transform_distance(2.0, 0.5, MetricVariant::Pd) == doctest::Approx(3.75));
    CHECK(transform_distance(0.5, 1.0, MetricVariant::Pd) == doctest::Approx(-0.75));
    CHECK(transform_distance(2.0, -0.5, MetricVariant::Awvd) == doctest::Approx(1.5));
    CHECK(transform_distance(2.0, 0.5, MetricVariant::Mwvd) == doctest::Approx(1.0));
    CHECK_THROWS_AS(transform_distance(1.0, 0.0, MetricVariant::Mwvd), std::invalid_argument);
    CHECK_THROWS_AS(transform_distance(1.0, -1.0, MetricVariant::Mwvd), std::invalid_argument);
}

TEST_CASE("variant names parse both ways") {
    for (const char* name : {"vd", "pd", "awvd", "mwvd"}) {
        MetricVariant v = parse_variant(name);
        CHECK(variant_name(v) == std::string(name));
    }
    CHECK_THROWS(parse_variant("euclid"));
}

TEST_CASE("bisector plane vanishes exactly where the fields agree") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        std::array<Vec3, 4> tet = fx::random_tet(rng);
        Hyperplane4 h1 = fit_hyperplane(tet, fx::random_field_values(rng), GeneratorTag{0, false});
        Hyperplane4 h2 = fit_hyperplane(tet, fx::random_field_values(rng), GeneratorTag{1, false});
        Vec4 pl = bisector_plane(h1, h2);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int i = 0; i < 20; ++i) {
            Vec3 p{u(rng), u(rng), u(rng)};
            double side = pl.x * p.x + pl.y * p.y + pl.z * p.z + pl.d;
            CHECK(side == doctest::Approx(h1.eval(p) - h2.eval(p)).epsilon(1e-9));
        }
    }
    Hyperplane4 h{1, 2, 3, 4, GeneratorTag{0, false}};
    CHECK_THROWS_AS(bisector_plane(h, h), std::invalid_argument);
}

TEST_CASE("power-diagram fields give the radical plane of two point generators") {
    // Point generators a=(0,0,0) w=0.6 and b=(1,0,0) w=0.3: the radical plane
    // of PD = D^2 - w^2 sits at x = (1 + wa^2 - wb^2) / 2.
    Vec3 a{0, 0, 0}, b{1, 0, 0};
    double wa = 0.6, wb = 0.3;
    std::array<Vec3, 4> tet{Vec3{0.2, 0, 0}, Vec3{0.8, 0.1, 0}, Vec3{0.5, 0.9, 0.1},
                            Vec3{0.4, 0.3, 0.8}};
    std::array<double, 4> va, vb;
    for (int j = 0; j < 4; ++j) {
        va[j] = transform_distance(norm(tet[j] - a), wa, MetricVariant::Pd);
        vb[j] = transform_distance(norm(tet[j] - b), wb, MetricVariant::Pd);
    }
    // D^2 is quadratic, but the quadratic parts cancel in the bisector, so the
    // per-tet linear fits reproduce the radical plane exactly up to roundoff.
    Hyperplane4 ha = fit_hyperplane(tet, va, GeneratorTag{0, false});
    Hyperplane4 hb = fit_hyperplane(tet, vb, GeneratorTag{1, false});
    double x_star = (1.0 + wa * wa - wb * wb) / 2.0;
    for (double y : {0.0, 0.4}) {
        Vec3 p{x_star, y, 0.2};
        CHECK(ha.eval(p) - hb.eval(p) == doctest::Approx(0.0).epsilon(1e-9));
    }
}

TEST_CASE("linearization error bound is twice the circumradius") {
    std::mt19937 rng(13);
    for (int trial = 0; trial < 50; ++trial) {
        std::array<Vec3, 4> tet = fx::random_tet(rng);
        double r = tet_circumradius(tet[0], tet[1], tet[2], tet[3]);
        CHECK(linearization_error_bound(tet) == doctest::Approx(2.0 * r));
    }
}

TEST_CASE("linearization error of a true distance field stays under 2h") {
    // Distance to a point generator, sampled inside the tet vs the linear fit.
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::array<Vec3, 4> tet = fx::random_tet(rng);
        Vec3 gen{u(rng) * 4.0 - 2.0, u(rng) * 4.0 - 2.0, u(rng) * 4.0 - 2.0};
        std::array<double, 4> val;
        for (int j = 0; j < 4; ++j) val[j] = norm(tet[j] - gen);
        Hyperplane4 h = fit_hyperplane(tet, val, GeneratorTag{0, false});
        double bound = linearization_error_bound(tet);
        for (int i = 0; i < 100; ++i) {
            double b0 = u(rng), b1 = u(rng) * (1 - b0), b2 = u(rng) * (1 - b0 - b1);
            double b3 = 1 - b0 - b1 - b2;
            Vec3 p = tet[0] * b0 + tet[1] * b1 + tet[2] * b2 + tet[3] * b3;
            CHECK(std::abs(h.eval(p) - norm(p - gen)) <= bound + 1e-12);
        }
    }
}

TEST_CASE("weights file parsing") {
    fx::TempDir tmp;
    std::ofstream(tmp.path("w.txt")) << "# comment line\n0 1.5\n2 0.25\n1 2.0\n";
    std::vector<double> w = load_weights(tmp.path("w.txt"), 3);
    CHECK(w == std::vector<double>{1.5, 2.0, 0.25});

    std::ofstream(tmp.path("missing.txt")) << "0 1.0\n1 1.0\n";
    CHECK_THROWS_AS(load_weights(tmp.path("missing.txt"), 3), ValidationError);

    std::ofstream(tmp.path("range.txt")) << "0 1.0\n5 1.0\n";
    CHECK_THROWS_AS(load_weights(tmp.path("range.txt"), 2), ValidationError);

    std::ofstream(tmp.path("garbled.txt")) << "zero 1.0\n";
    CHECK_THROWS_AS(load_weights(tmp.path("garbled.txt"), 1), ParseError);

    CHECK_THROWS_AS(load_weights(tmp.path("absent.txt"), 1), IoError);
}
