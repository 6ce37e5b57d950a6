#include <doctest.h>
#include <hexgram/errors.hpp>
#include <hexgram/geometry.hpp>
#include <hexgram/quadrature.hpp>
#include <sstream>

using namespace hexgram;

namespace {

std::array<Vec3, 8> unit_cube()
{
    std::array<Vec3, 8> X;
    for (int v = 0; v < 8; ++v) X[v] = Vec3(v & 1, (v >> 1) & 1, (v >> 2) & 1);
    return X;
}

double maxdiff(const Mat3& a, const Mat3& b) { return (a - b).cwiseAbs().maxCoeff(); }

} // namespace

TEST_CASE("identity map") {
    auto m = ElementMap::identity();
    for (Vec3 xi : {Vec3(0, 0, 0), Vec3(0.3, 0.9, 0.5), Vec3(1, 1, 1)}) {
        auto g = eval_geometry(m, xi);
        CHECK(g.J == Mat3::Identity());
        CHECK(g.detJ == 1.0);
        CHECK(g.D == Mat3::Identity());
        CHECK(g.C == Mat3::Identity());
        CHECK(g.x == xi);
    }
}

TEST_CASE("diagonal map (2,1,1)") {
    auto m = ElementMap::diagonal(Vec3(2, 1, 1));
    auto g = eval_geometry(m, Vec3(0.2, 0.4, 0.7));
    CHECK(g.detJ == 2.0);
    CHECK(maxdiff(g.D, Vec3(0.25, 1, 1).asDiagonal().toDenseMatrix()) == 0.0);
    CHECK(maxdiff(g.C, Vec3(4, 1, 1).asDiagonal().toDenseMatrix()) == 0.0);
}

TEST_CASE("trilinear with one perturbed vertex") {
    auto X = unit_cube();
    X[7] = Vec3(1.1, 1, 1);
    auto m = ElementMap::trilinear(X);
    auto g = eval_geometry(m, Vec3(0, 0, 0));
    CHECK(g.detJ == doctest::Approx(1.0).epsilon(1e-15));
    // at the perturbed corner d x1 / d xi_k picks up the 0.1 offset
    auto h = eval_geometry(m, Vec3(1, 1, 1));
    CHECK(h.J(0, 1) == doctest::Approx(0.1));
    CHECK(h.J(0, 2) == doctest::Approx(0.1));
    CHECK(h.x[0] == doctest::Approx(1.1));
}

TEST_CASE("jacobian matches finite differences of x") {
    for (const auto& name : preset_map_names()) {
        auto m = preset_map(name);
        Vec3 xi(0.31, 0.62, 0.47);
        auto g = eval_geometry(m, xi);
        const double h = 1e-6;
        for (int k = 0; k < 3; ++k) {
            Vec3 e = Vec3::Zero();
            e[k] = h;
            Vec3 fd = (eval_geometry(m, xi + e).x - eval_geometry(m, xi - e).x) / (2 * h);
            INFO(name, k);
            CHECK((fd - g.J.col(k)).cwiseAbs().maxCoeff() <= 1e-8);
        }
        CHECK(g.detJ == doctest::Approx(g.J.determinant()).epsilon(1e-14));
        CHECK(maxdiff(g.Jinv * g.J, Mat3::Identity()) <= 1e-14);
        CHECK(maxdiff(g.D, g.Jinv * g.Jinv.transpose()) <= 1e-14);
        CHECK(maxdiff(g.C, g.J.transpose() * g.J) <= 1e-14);
    }
}

TEST_CASE("classify") {
    CHECK(classify(ElementMap::identity()) == MapClass::constant_jacobian);
    CHECK(classify(ElementMap::diagonal(Vec3(1, 2, 3))) == MapClass::constant_jacobian);
    CHECK(classify(preset_map("affine")) == MapClass::constant_jacobian);
    CHECK(classify(preset_map("extrusion")) == MapClass::extrusion);
    CHECK(classify(preset_map("trilinear")) == MapClass::general);
    CHECK(to_string(MapClass::extrusion) == "extrusion");
}

TEST_CASE("general affine maps have constant geometry") {
    auto m = preset_map("affine");
    auto g0 = eval_geometry(m, Vec3(0.5, 0.5, 0.5));
    auto r = tensor_rule(4);
    for (const auto& p : r.points) {
        auto g = eval_geometry(m, Vec3(p[0], p[1], p[2]));
        CHECK(maxdiff(g.J, g0.J) <= 1e-15);
        CHECK(maxdiff(g.D, g0.D) <= 1e-15);
        CHECK(maxdiff(g.C, g0.C) <= 1e-15);
        CHECK(std::abs(g.detJ - g0.detJ) <= 1e-15);
    }
}

TEST_CASE("extrusion determinant factorizes") {
    std::array<Eigen::Vector2d, 4> q{Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 0.2), Eigen::Vector2d(0.1, 1),
                                     Eigen::Vector2d(1.3, 1.1)};
    auto m = ElementMap::extrusion(2.5, 1.0, q);
    Vec3 xi(0.7, 0.3, 0.6);
    auto g = eval_geometry(m, xi);
    CHECK(g.x[0] == doctest::Approx(2.5 * 0.7 + 1.0));
    CHECK(g.J(0, 0) == 2.5);
    CHECK(g.J(0, 1) == 0.0);
    CHECK(g.J(1, 0) == 0.0);
    CHECK(g.detJ == doctest::Approx(2.5 * g.J.block<2, 2>(1, 1).determinant()).epsilon(1e-15));
    // planar block independent of xi1
    auto g2 = eval_geometry(m, Vec3(0.1, 0.3, 0.6));
    CHECK(maxdiff(g.J, g2.J) == 0.0);
}

TEST_CASE("degenerate and out-of-domain") {
    CHECK_THROWS_AS(ElementMap::diagonal(Vec3(1, -1, 1)), DegenerateMapError);
    CHECK_THROWS_AS(ElementMap::diagonal(Vec3(1, 0, 1)), DegenerateMapError);
    Mat3 A = Mat3::Identity();
    A(2, 2) = -1;
    CHECK_THROWS_AS(ElementMap::affine(A), DegenerateMapError);
    auto X = unit_cube();
    std::swap(X[0], X[1]); // inverted element
    CHECK_THROWS_AS(ElementMap::trilinear(X), DegenerateMapError);
    auto Y = unit_cube();
    Y[7] = Vec3(0, 0, 0); // folds over near the far corner
    CHECK_THROWS_AS(ElementMap::trilinear(Y), DegenerateMapError);
    CHECK_THROWS_AS(eval_geometry(ElementMap::identity(), Vec3(1.2, 0, 0)), DomainError);
}

TEST_CASE("map lines and config") {
    CHECK(parse_map_line("identity").kind() == ElementMap::identity().kind());
    auto d = parse_map_line("diagonal 2 1 1");
    CHECK(eval_geometry(d, Vec3(0.1, 0.2, 0.3)).detJ == 2.0);
    auto d6 = parse_map_line("diagonal 2 1 1 5 0 0");
    CHECK(eval_geometry(d6, Vec3(0, 0, 0)).x[0] == 5.0);
    auto a = parse_map_line("affine 1 0 0 0 2 0 0 0 3 0 0 0");
    CHECK(eval_geometry(a, Vec3(0.5, 0.5, 0.5)).detJ == doctest::Approx(6.0));
    auto e = parse_map_line("extrusion 1 0 0 0 1 0 0 1 1 1");
    CHECK(classify(e) == MapClass::extrusion);
    CHECK(eval_geometry(e, Vec3(0.4, 0.4, 0.4)).detJ == doctest::Approx(1.0));
    auto t = parse_map_line("trilinear 0 0 0 1 0 0 0 1 0 1 1 0 0 0 1 1 0 1 0 1 1 1.1 1 1");
    CHECK(classify(t) == MapClass::general);
    CHECK(eval_geometry(t, Vec3(0, 0, 0)).detJ == doctest::Approx(1.0));
    CHECK_THROWS_AS(parse_map_line("diagonal 1 2"), std::invalid_argument);
    CHECK_THROWS_AS(parse_map_line("diagonal 1 x 2"), std::invalid_argument);
    CHECK_THROWS_AS(parse_map_line("sphere 1"), std::invalid_argument);
    CHECK_THROWS_AS(parse_map_line(""), std::invalid_argument);

    std::istringstream cfg("# maps\nidentity\n\ndiagonal 2 1 1  # stretched\n   \naffine 1 0 0 0 1 0 0 0 1 0 0 0\n");
    auto maps = parse_map_config(cfg);
    REQUIRE(maps.size() == 3);
    CHECK(classify(maps[1]) == MapClass::constant_jacobian);
}

TEST_CASE("presets") {
    auto names = preset_map_names();
    CHECK(names.size() == 5);
    for (const auto& n : names) CHECK_NOTHROW(check_diffeomorphism(preset_map(n)));
    CHECK_THROWS_AS(preset_map("nope"), std::invalid_argument);
}
