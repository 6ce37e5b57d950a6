#pragma once

#include <Eigen/Dense>

#include <array>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace hexgram {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

struct IdentityMap {};

struct DiagonalAffineMap {
    Vec3 lambda = Vec3::Ones();
    Vec3 shift = Vec3::Zero();
};

struct GeneralAffineMap {
    Mat3 A = Mat3::Identity();
    Vec3 b = Vec3::Zero();
};

// x1 = lambda1*xi1 + c1, (x2,x3) bilinear in (xi2,xi3) over planar vertices v2 + 2*v3.
struct ExtrusionMap {
    double lambda1 = 1.0;
    double c1 = 0.0;
    std::array<Eigen::Vector2d, 4> planar;
};

// Vertex index v1 + 2*v2 + 4*v3.
struct TrilinearMap {
    std::array<Vec3, 8> vertices;
};

enum class MapClass { constant_jacobian, extrusion, general };

class ElementMap {
public:
    using Variant = std::variant<IdentityMap, DiagonalAffineMap, GeneralAffineMap, ExtrusionMap, TrilinearMap>;

    ElementMap() = default;

    static ElementMap identity();
    static ElementMap diagonal(const Vec3& lambda, const Vec3& shift = Vec3::Zero());
    static ElementMap affine(const Mat3& A, const Vec3& b = Vec3::Zero());
    static ElementMap extrusion(double lambda1, double c1, const std::array<Eigen::Vector2d, 4>& planar);
    static ElementMap trilinear(const std::array<Vec3, 8>& vertices);

    const Variant& data() const { return v_; }
    std::string kind() const;

private:
    explicit ElementMap(Variant v) : v_(std::move(v)) {}
    Variant v_ = IdentityMap{};
};

struct JacobianData {
    Vec3 x;
    Mat3 J;
    Mat3 Jinv;
    double detJ = 1.0;
    Mat3 D; // Jinv * Jinv^T
    Mat3 C; // J^T * J
};

JacobianData eval_geometry(const ElementMap& map, const Vec3& xi);
MapClass classify(const ElementMap& map);
std::string to_string(MapClass c);

// Throws DegenerateMapError unless det J > 0 at every order-6 tensor Gauss point.
void check_diffeomorphism(const ElementMap& map);

// One map per line: kind followed by whitespace-separated parameters; '#' starts a comment.
ElementMap parse_map_line(const std::string& line);
std::vector<ElementMap> parse_map_config(std::istream& in);

// Named presets used by the CLI and the test suites.
ElementMap preset_map(const std::string& name);
std::vector<std::string> preset_map_names();

} // namespace hexgram
