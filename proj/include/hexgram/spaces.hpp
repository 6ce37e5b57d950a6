#pragma once

#include "hexgram/geometry.hpp"

#include <array>
#include <string>
#include <vector>

namespace hexgram {

enum class Space { H1, Hcurl, Hdiv, L2 };

std::string to_string(Space s);
Space parse_space(const std::string& s);

struct SpaceSignature {
    Space space = Space::H1;
    std::array<int, 3> p{1, 1, 1};

    static SpaceSignature uniform(Space s, int p) { return {s, {p, p, p}}; }
};

// component is 0-based (0 for scalar spaces).
struct MultiIndex {
    int component = 0;
    std::array<int, 3> i{0, 0, 0};
    bool operator==(const MultiIndex&) const = default;
};

// Per-component index extents: component c runs i_d in [0, n[c][d]).
struct SpaceLayout {
    static constexpr int max_comp = 4;
    int ncomp = 1;
    std::array<std::array<int, 3>, max_comp> n{};
    std::array<int, max_comp + 1> offset{};

    int size(int c) const { return n[c][0] * n[c][1] * n[c][2]; }
    int flat(int c, int i1, int i2, int i3) const { return offset[c] + i1 + n[c][0] * (i2 + n[c][1] * i3); }
};

SpaceLayout layout(const SpaceSignature& sig);
int dim(const SpaceSignature& sig);
MultiIndex flat_to_multi(const SpaceSignature& sig, int I);
int multi_to_flat(const SpaceSignature& sig, const MultiIndex& m);

// Values are scalar (H1, L2) or 3-vectors (Hcurl, Hdiv); derivative is the gradient (H1),
// curl (Hcurl), divergence (Hdiv) or absent (L2). All quantities are master-element ones.
struct ShapeEval3D {
    SpaceSignature sig;
    int n = 0;
    int value_dim = 1;
    int deriv_dim = 0;
    std::vector<double> value;
    std::vector<double> deriv;

    double val(int I, int k = 0) const { return value[I * value_dim + k]; }
    double der(int I, int k = 0) const { return deriv[I * deriv_dim + k]; }
};

void check_signature(const SpaceSignature& sig);
ShapeEval3D shape3_eval(const SpaceSignature& sig, const Vec3& xi);
// Reuses out's storage; out must come from a previous call with the same signature or be empty.
void shape3_eval_into(const SpaceSignature& sig, const Vec3& xi, ShapeEval3D& out);

} // namespace hexgram
