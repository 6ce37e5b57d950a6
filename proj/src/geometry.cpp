#include "hexgram/geometry.hpp"

#include "hexgram/errors.hpp"
#include "hexgram/quadrature.hpp"

#include <cmath>
#include <istream>
#include <sstream>

namespace hexgram {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string point_str(const Vec3& xi)
{
    std::ostringstream os;
    os << "(" << xi[0] << "," << xi[1] << "," << xi[2] << ")";
    return os.str();
}

void jacobian_and_position(const ElementMap::Variant& v, const Vec3& xi, Vec3& x, Mat3& J)
{
    std::visit(overloaded{
                   [&](const IdentityMap&) {
                       x = xi;
                       J.setIdentity();
                   },
                   [&](const DiagonalAffineMap& m) {
                       x = m.lambda.cwiseProduct(xi) + m.shift;
                       J = m.lambda.asDiagonal();
                   },
                   [&](const GeneralAffineMap& m) {
                       x = m.A * xi + m.b;
                       J = m.A;
                   },
                   [&](const ExtrusionMap& m) {
                       const double s = xi[1], t = xi[2];
                       const double N[4] = {(1 - s) * (1 - t), s * (1 - t), (1 - s) * t, s * t};
                       const double Ns[4] = {-(1 - t), 1 - t, -t, t};
                       const double Nt[4] = {-(1 - s), -s, 1 - s, s};
                       Eigen::Vector2d y = Eigen::Vector2d::Zero(), ys = y, yt = y;
                       for (int k = 0; k < 4; ++k) {
                           y += N[k] * m.planar[k];
                           ys += Ns[k] * m.planar[k];
                           yt += Nt[k] * m.planar[k];
                       }
                       x << m.lambda1 * xi[0] + m.c1, y[0], y[1];
                       J << m.lambda1, 0, 0, 0, ys[0], yt[0], 0, ys[1], yt[1];
                   },
                   [&](const TrilinearMap& m) {
                       x.setZero();
                       J.setZero();
                       for (int v = 0; v < 8; ++v) {
                           const int b[3] = {v & 1, (v >> 1) & 1, (v >> 2) & 1};
                           double f[3], df[3];
                           for (int d = 0; d < 3; ++d) {
                               f[d] = b[d] ? xi[d] : 1 - xi[d];
                               df[d] = b[d] ? 1.0 : -1.0;
                           }
                           x += f[0] * f[1] * f[2] * m.vertices[v];
                           J.col(0) += df[0] * f[1] * f[2] * m.vertices[v];
                           J.col(1) += f[0] * df[1] * f[2] * m.vertices[v];
                           J.col(2) += f[0] * f[1] * df[2] * m.vertices[v];
                       }
                   },
               },
               v);
}

} // namespace

ElementMap ElementMap::identity() { return ElementMap(IdentityMap{}); }

ElementMap ElementMap::diagonal(const Vec3& lambda, const Vec3& shift)
{
    ElementMap m(DiagonalAffineMap{lambda, shift});
    check_diffeomorphism(m);
    return m;
}

ElementMap ElementMap::affine(const Mat3& A, const Vec3& b)
{
    ElementMap m(GeneralAffineMap{A, b});
    check_diffeomorphism(m);
    return m;
}

ElementMap ElementMap::extrusion(double lambda1, double c1, const std::array<Eigen::Vector2d, 4>& planar)
{
    ElementMap m(ExtrusionMap{lambda1, c1, planar});
    check_diffeomorphism(m);
    return m;
}

ElementMap ElementMap::trilinear(const std::array<Vec3, 8>& vertices)
{
    ElementMap m(TrilinearMap{vertices});
    check_diffeomorphism(m);
    return m;
}

std::string ElementMap::kind() const
{
    static const char* names[] = {"identity", "diagonal", "affine", "extrusion", "trilinear"};
    return names[v_.index()];
}

JacobianData eval_geometry(const ElementMap& map, const Vec3& xi)
{
    for (int d = 0; d < 3; ++d)
        if (!(xi[d] >= 0.0 && xi[d] <= 1.0))
            throw DomainError("geometry point " + point_str(xi) + " outside the master cube");
    JacobianData g;
    jacobian_and_position(map.data(), xi, g.x, g.J);
    g.detJ = g.J.determinant();
    if (!(g.detJ > 0.0))
        throw DegenerateMapError("det J = " + std::to_string(g.detJ) + " at " + point_str(xi));
    g.Jinv = g.J.inverse();
    g.D = g.Jinv * g.Jinv.transpose();
    g.C = g.J.transpose() * g.J;
    return g;
}

MapClass classify(const ElementMap& map)
{
    switch (map.data().index()) {
    case 0:
    case 1:
    case 2:
        return MapClass::constant_jacobian;
    case 3:
        return MapClass::extrusion;
    default:
        return MapClass::general;
    }
}

std::string to_string(MapClass c)
{
    switch (c) {
    case MapClass::constant_jacobian:
        return "constant-jacobian";
    case MapClass::extrusion:
        return "extrusion";
    default:
        return "general";
    }
}

void check_diffeomorphism(const ElementMap& map)
{
    const Rule1D r = gauss_rule(6);
    Vec3 x;
    Mat3 J;
    for (double a : r.nodes)
        for (double b : r.nodes)
            for (double c : r.nodes) {
                const Vec3 xi(a, b, c);
                jacobian_and_position(map.data(), xi, x, J);
                const double det = J.determinant();
                if (!(det > 0.0))
                    throw DegenerateMapError(map.kind() + " map: det J = " + std::to_string(det) + " at " +
                                             point_str(xi));
            }
}

ElementMap parse_map_line(const std::string& line)
{
    std::string body = line.substr(0, line.find('#'));
    std::istringstream is(body);
    std::string kind;
    if (!(is >> kind))
        throw std::invalid_argument("empty map specification");
    std::vector<double> v;
    for (double t; is >> t;)
        v.push_back(t);
    if (!is.eof())
        throw std::invalid_argument("non-numeric parameter in map line: " + line);
    auto need = [&](std::size_t n) {
        if (v.size() != n)
            throw std::invalid_argument(kind + " map expects " + std::to_string(n) + " parameters, got " +
                                        std::to_string(v.size()));
    };
    if (kind == "identity") {
        need(0);
        return ElementMap::identity();
    }
    if (kind == "diagonal") {
        if (v.size() == 3)
            return ElementMap::diagonal(Vec3(v[0], v[1], v[2]));
        need(6);
        return ElementMap::diagonal(Vec3(v[0], v[1], v[2]), Vec3(v[3], v[4], v[5]));
    }
    if (kind == "affine") {
        need(12);
        Mat3 A;
        A << v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8];
        return ElementMap::affine(A, Vec3(v[9], v[10], v[11]));
    }
    if (kind == "extrusion") {
        need(10);
        std::array<Eigen::Vector2d, 4> q;
        for (int k = 0; k < 4; ++k)
            q[k] = Eigen::Vector2d(v[2 + 2 * k], v[3 + 2 * k]);
        return ElementMap::extrusion(v[0], v[1], q);
    }
    if (kind == "trilinear") {
        need(24);
        std::array<Vec3, 8> X;
        for (int k = 0; k < 8; ++k)
            X[k] = Vec3(v[3 * k], v[3 * k + 1], v[3 * k + 2]);
        return ElementMap::trilinear(X);
    }
    throw std::invalid_argument("unknown map kind '" + kind + "'");
}

std::vector<ElementMap> parse_map_config(std::istream& in)
{
    std::vector<ElementMap> maps;
    for (std::string line; std::getline(in, line);) {
        const auto body = line.substr(0, line.find('#'));
        if (body.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        maps.push_back(parse_map_line(body));
    }
    return maps;
}

ElementMap preset_map(const std::string& name)
{
    if (name == "identity")
        return ElementMap::identity();
    if (name == "diagonal")
        return ElementMap::diagonal(Vec3(2.0, 1.5, 0.5), Vec3(1.0, 0.0, 0.0));
    if (name == "affine") {
        Mat3 A;
        A << 1.2, 0.3, 0.1, 0.2, 0.9, -0.2, 0.1, 0.25, 1.1;
        return ElementMap::affine(A, Vec3(0.5, -1.0, 2.0));
    }
    if (name == "extrusion") {
        const double c = std::cos(0.5), s = std::sin(0.5);
        const Eigen::Vector2d base[4] = {{0.0, 0.0}, {1.0, 0.1}, {-0.1, 0.9}, {1.2, 1.1}};
        std::array<Eigen::Vector2d, 4> q;
        for (int k = 0; k < 4; ++k)
            q[k] = Eigen::Vector2d(c * base[k][0] - s * base[k][1], s * base[k][0] + c * base[k][1]);
        return ElementMap::extrusion(1.0, 0.0, q);
    }
    if (name == "trilinear") {
        std::array<Vec3, 8> X;
        for (int v = 0; v < 8; ++v)
            X[v] = Vec3(v & 1, (v >> 1) & 1, (v >> 2) & 1);
        X[1] += Vec3(0.05, 0.0, -0.05);
        X[3] += Vec3(0.1, 0.08, 0.0);
        X[6] += Vec3(-0.05, 0.1, 0.05);
        X[7] += Vec3(0.1, 0.05, -0.05);
        return ElementMap::trilinear(X);
    }
    throw std::invalid_argument("unknown map preset '" + name + "'");
}

std::vector<std::string> preset_map_names() { return {"identity", "diagonal", "affine", "extrusion", "trilinear"}; }

} // namespace hexgram
