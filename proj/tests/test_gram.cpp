#include <doctest.h>
#include <hexgram/errors.hpp>
#include <hexgram/gram.hpp>

using namespace hexgram;
using Eigen::MatrixXd;

namespace {

double rel_diff(const MatrixXd& a, const MatrixXd& b)
{
    return (a - b).cwiseAbs().maxCoeff() / std::max(a.cwiseAbs().maxCoeff(), 1e-300);
}

const Space all_spaces[] = {Space::H1, Space::Hcurl, Space::Hdiv, Space::L2};

std::int64_t ipow(std::int64_t b, int e)
{
    std::int64_t r = 1;
    while (e--) r *= b;
    return r;
}

} // namespace

TEST_CASE("backend names and default rule") {
    CHECK(parse_backend("conventional") == Backend::conventional);
    CHECK(parse_backend("tensor") == Backend::tensorized);
    CHECK(parse_backend("simplified") == Backend::simplified);
    CHECK(to_string(Backend::tensorized) == "tensor");
    CHECK_THROWS_AS(parse_backend("fast"), std::invalid_argument);
    CHECK(default_rule_order({Space::L2, {2, 5, 3}}) == 5);
    CHECK(default_rule_order({Space::H1, {2, 5, 3}}) == 6);
    CHECK(default_rule_order({Space::Hcurl, {1, 1, 1}}) == 2);
}

TEST_CASE("lowest-order L2") {
    SpaceSignature s{Space::L2, {1, 1, 1}};
    auto c = gram_conventional(s, ElementMap::identity(), tensor_rule(1));
    REQUIRE(c.matrix.rows() == 1);
    CHECK(c.matrix(0, 0) == 1.0);
    auto t = gram_tensorized(s, ElementMap::identity(), gauss_rule(1));
    CHECK(t.matrix(0, 0) == c.matrix(0, 0));
    auto d = ElementMap::diagonal(Vec3(2, 1, 1));
    CHECK(gram_conventional(s, d, tensor_rule(1)).matrix(0, 0) == 0.5);
    FTable ft;
    auto sm = gram_simplified(s, d, ft, gauss_rule(1));
    CHECK(sm.matrix(0, 0) == 0.5);
    CHECK(sm.counters.geometry_calls == 1);
}

TEST_CASE("H1 vertex function diagonal entry") {
    auto g = gram_conventional({Space::H1, {1, 1, 1}}, ElementMap::identity(), tensor_rule(2));
    CHECK(g.matrix(0, 0) == doctest::Approx(1.0 / 27 + 1.0 / 3).epsilon(1e-15));
}

// Exact rational values from symbolic integration.
TEST_CASE("frozen H(curl) entries, identity map") {
    SpaceSignature s{Space::Hcurl, {1, 1, 1}};
    const struct {
        int I, J;
        double v;
    } ref[] = {{0, 0, 7.0 / 9},  {1, 0, -1.0 / 9}, {2, 0, -1.0 / 9}, {3, 0, -11.0 / 36}, {4, 0, -1.0 / 3},
               {5, 0, 1.0 / 3},  {8, 0, -1.0 / 3}, {9, 1, 1.0 / 6},  {11, 3, -1.0 / 3}};
    for (auto b : {Backend::conventional, Backend::tensorized, Backend::simplified}) {
        auto G = gram(s, ElementMap::identity(), b).matrix;
        for (auto& r : ref) {
            INFO(to_string(b), r.I, r.J);
            CHECK(std::abs(G(r.I, r.J) - r.v) <= 1e-14);
            CHECK(G(r.J, r.I) == G(r.I, r.J));
        }
    }
}

TEST_CASE("frozen H(div) matrix, diagonal map (2,1,1)") {
    SpaceSignature s{Space::Hdiv, {1, 1, 1}};
    MatrixXd ref(6, 6);
    const double a = 7.0 / 6, b = -1.0 / 6, h = 0.5, t = 2.0 / 3, f = -5.0 / 12;
    ref << a, b, h, -h, h, -h, //
        b, a, -h, h, -h, h,    //
        h, -h, t, f, h, -h,    //
        -h, h, f, t, -h, h,    //
        h, -h, h, -h, t, f,    //
        -h, h, -h, h, f, t;
    auto d = ElementMap::diagonal(Vec3(2, 1, 1));
    for (auto bk : {Backend::conventional, Backend::tensorized, Backend::simplified}) {
        INFO(to_string(bk));
        CHECK((gram(s, d, bk).matrix - ref).cwiseAbs().maxCoeff() <= 1e-14);
    }
}

TEST_CASE("frozen H1 entries, sheared affine map") {
    SpaceSignature s{Space::H1, {2, 1, 1}};
    const struct {
        int I, J;
        double v;
    } ref[] = {{0, 0, 9876709.0 / 31644000},   {2, 0, -4943567.0 / 63288000},  {2, 2, 455383.0 / 6592500},
               {5, 1, 3646829.0 / 63288000},   {11, 2, -495361.0 / 210960000}, {11, 9, -4943567.0 / 63288000}};
    for (auto b : {Backend::conventional, Backend::tensorized, Backend::simplified}) {
        auto G = gram(s, preset_map("affine"), b).matrix;
        for (auto& r : ref) {
            INFO(to_string(b), r.I, r.J);
            CHECK(std::abs(G(r.I, r.J) - r.v) <= 1e-14);
        }
    }
}

TEST_CASE("tensorized equals conventional") {
    auto tri = preset_map("trilinear");
    SpaceSignature h{Space::H1, {3, 3, 3}};
    int L = default_rule_order(h);
    auto c = gram_conventional(h, tri, tensor_rule(L)).matrix;
    auto t = gram_tensorized(h, tri, gauss_rule(L)).matrix;
    CHECK(rel_diff(t, c) <= 1e-12);

    SpaceSignature hc{Space::Hcurl, {2, 2, 2}};
    auto gc = gram(hc, ElementMap::identity(), Backend::conventional).matrix;
    auto gt = gram(hc, ElementMap::identity(), Backend::tensorized).matrix;
    CHECK(rel_diff(gt, gc) <= 1e-12);
    CHECK(gt == gt.transpose());
    CHECK(is_spd(gt));

    for (auto sp : all_spaces)
        for (const auto& m : preset_map_names()) {
            SpaceSignature sig{sp, {2, 3, 1}};
            auto a = gram(sig, preset_map(m), Backend::conventional).matrix;
            auto b = gram(sig, preset_map(m), Backend::tensorized).matrix;
            INFO(to_string(sp), " ", m);
            CHECK(rel_diff(a, b) <= 1e-12);
            CHECK(is_spd(b));
        }
}

TEST_CASE("loop orders agree and differ in geometry calls") {
    for (auto sp : all_spaces) {
        SpaceSignature sig = SpaceSignature::uniform(sp, 3);
        int L = default_rule_order(sig);
        auto r = gauss_rule(L);
        auto a = gram_tensorized(sig, preset_map("trilinear"), r, LoopOrder::standard);
        auto b = gram_tensorized(sig, preset_map("trilinear"), r, LoopOrder::alternative);
        CHECK(a.matrix == b.matrix);
        CHECK(b.counters.geometry_calls == std::int64_t(L) * L * L);
        CHECK(a.counters.geometry_calls > b.counters.geometry_calls);
        CHECK(a.counters.accumulations == b.counters.accumulations);
    }
}

TEST_CASE("simplified backend") {
    FTable ft;
    SpaceSignature l2{Space::L2, {2, 2, 2}};
    auto g = gram_simplified(l2, ElementMap::identity(), ft, gauss_rule(2)).matrix;
    const double diag[8] = {1, 1.0 / 3, 1.0 / 3, 1.0 / 9, 1.0 / 3, 1.0 / 9, 1.0 / 9, 1.0 / 27};
    for (int I = 0; I < 8; ++I)
        for (int J = 0; J < 8; ++J) CHECK(std::abs(g(I, J) - (I == J ? diag[I] : 0.0)) <= 1e-15);

    std::array<Eigen::Vector2d, 4> q;
    const double c = std::cos(0.3), s = std::sin(0.3);
    const Eigen::Vector2d base[4] = {{0, 0}, {1, 0}, {0, 1}, {1.1, 0.9}};
    for (int k = 0; k < 4; ++k) q[k] = Eigen::Vector2d(c * base[k][0] - s * base[k][1], s * base[k][0] + c * base[k][1]);
    auto ex = ElementMap::extrusion(1.0, 0.0, q);
    auto r = gauss_rule(2);
    auto gs = gram_simplified(l2, ex, ft, r).matrix;
    auto gc = gram_conventional(l2, ex, tensor_rule(r)).matrix;
    CHECK(rel_diff(gs, gc) <= 1e-11);

    for (auto sp : all_spaces) {
        SpaceSignature sig{sp, {3, 2, 2}};
        for (const auto& m : {"identity", "diagonal", "affine", "extrusion"}) {
            auto a = gram(sig, preset_map(m), Backend::conventional).matrix;
            auto b = gram(sig, preset_map(m), Backend::simplified).matrix;
            INFO(to_string(sp), " ", m);
            CHECK(rel_diff(a, b) <= 1e-12);
        }
        auto cj = gram(sig, preset_map("affine"), Backend::simplified);
        CHECK(cj.counters.geometry_calls == 1);
        CHECK(cj.counters.shape1_calls == 0);
    }

    CHECK_THROWS_AS(gram_simplified(l2, preset_map("trilinear"), ft, gauss_rule(2)), SimplificationNotApplicable);
    FTable small(2);
    CHECK_THROWS_AS(gram_simplified({Space::H1, {4, 4, 4}}, ElementMap::identity(), small, gauss_rule(5)),
                    IndexOutOfRange);
}

TEST_CASE("L2 operation counts") {
    for (int p = 1; p <= 5; ++p) {
        SpaceSignature s = SpaceSignature::uniform(Space::L2, p);
        auto c = gram_conventional(s, ElementMap::identity(), tensor_rule(p));
        CHECK(c.counters.accumulations == ipow(p, 6) * (ipow(p, 3) + 1) / 2);
        CHECK(c.counters.geometry_calls == ipow(p, 3));
        auto t = gram_tensorized(s, ElementMap::identity(), gauss_rule(p));
        CHECK(t.counters.accumulations == p * ipow(p * (p + 1) / 2, 3));
    }
}

TEST_CASE("conventional counts for every space") {
    for (auto sp : all_spaces) {
        SpaceSignature s{sp, {2, 1, 3}};
        int L = default_rule_order(s);
        std::int64_t N = dim(s);
        auto c = gram_conventional(s, preset_map("diagonal"), tensor_rule(L));
        CHECK(c.counters.accumulations == std::int64_t(L) * L * L * N * (N + 1) / 2);
        CHECK(c.counters.shape3_calls == std::int64_t(L) * L * L);
    }
}

TEST_CASE("guards skip only out-of-range combinations") {
    for (auto sp : {Space::Hdiv, Space::Hcurl})
        for (std::array<int, 3> p : {std::array<int, 3>{1, 1, 1}, std::array<int, 3>{1, 2, 3}}) {
            SpaceSignature s{sp, p};
            auto t = gram(s, preset_map("trilinear"), Backend::tensorized);
            auto c = gram(s, preset_map("trilinear"), Backend::conventional);
            CHECK(t.counters.guard_skips > 0);
            CHECK(rel_diff(t.matrix, c.matrix) <= 1e-12);
        }
    CHECK(gram({Space::H1, {2, 2, 2}}, ElementMap::identity(), Backend::tensorized).counters.guard_skips == 0);
}

TEST_CASE("divergence term is an L2 Gram of Legendre products") {
    for (const auto& m : {"identity", "affine", "trilinear"}) {
        SpaceSignature sd{Space::Hdiv, {2, 3, 2}}, sl{Space::L2, {2, 3, 2}};
        int L = default_rule_order(sd);
        auto map = preset_map(m);
        auto D = gram(sd, map, Backend::tensorized, L, GramOptions{0.0, 1.0}).matrix;
        auto Y = gram(sl, map, Backend::tensorized, L).matrix;
        MatrixXd M = MatrixXd::Zero(dim(sd), dim(sl));
        for (int I = 0; I < dim(sd); ++I) {
            auto mi = flat_to_multi(sd, I);
            int a = mi.component;
            MultiIndex mj{0, mi.i};
            mj.i[a] = std::max(mi.i[a] - 1, 0);
            M(I, multi_to_flat(sl, mj)) = mi.i[a] == 0 ? -1.0 : 1.0;
        }
        INFO(m);
        CHECK(rel_diff(D, M * Y * M.transpose()) <= 1e-13);
    }
}

TEST_CASE("weights combine linearly") {
    for (auto sp : {Space::H1, Space::Hcurl, Space::Hdiv}) {
        SpaceSignature s{sp, {2, 2, 3}};
        auto map = preset_map("trilinear");
        for (auto b : {Backend::conventional, Backend::tensorized}) {
            auto m = gram(s, map, b, std::nullopt, {1.0, 0.0}).matrix;
            auto d = gram(s, map, b, std::nullopt, {0.0, 1.0}).matrix;
            auto w = gram(s, map, b, std::nullopt, {2.5, 0.5}).matrix;
            CHECK(rel_diff(w, 2.5 * m + 0.5 * d) <= 1e-13);
        }
    }
}

TEST_CASE("block replication") {
    SpaceSignature h{Space::H1, {1, 1, 1}};
    auto one = gram_block(h, ElementMap::identity(), Backend::tensorized, 1);
    auto base = gram(h, ElementMap::identity(), Backend::tensorized);
    CHECK(one.matrix == base.matrix);
    auto three = gram_block(h, ElementMap::identity(), Backend::tensorized, 3);
    REQUIRE(three.matrix.rows() == 24);
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            MatrixXd blk = three.matrix.block(8 * a, 8 * b, 8, 8);
            if (a == b)
                CHECK(blk == base.matrix);
            else
                CHECK(blk.cwiseAbs().maxCoeff() == 0.0);
        }
    auto d3 = gram_block({Space::Hdiv, {1, 1, 1}}, ElementMap::identity(), Backend::conventional, 3);
    CHECK(d3.matrix.rows() == 18);
    CHECK(d3.matrix.block(6, 6, 6, 6) == gram({Space::Hdiv, {1, 1, 1}}, ElementMap::identity(), Backend::conventional).matrix);
    CHECK(d3.matrix.block(0, 12, 6, 6).cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(gram_block(h, ElementMap::identity(), Backend::tensorized, 0), std::invalid_argument);
    CHECK_THROWS_AS(gram_block(h, ElementMap::identity(), Backend::tensorized, 4), std::invalid_argument);
}

TEST_CASE("is_spd") {
    CHECK(is_spd(MatrixXd::Identity(3, 3)));
    MatrixXd ns(2, 2);
    ns << 2, 1, 0, 2;
    CHECK_FALSE(is_spd(ns));
    MatrixXd ind(2, 2);
    ind << 1, 2, 2, 1;
    CHECK_FALSE(is_spd(ind));
}
