#pragma once

#include <array>
#include <vector>

namespace hexgram {

struct Rule1D {
    std::vector<double> nodes;
    std::vector<double> weights;
    int order = 0;
};

struct Rule3D {
    std::vector<std::array<double, 3>> points;
    std::vector<double> weights;
    int order = 0;
};

constexpr int max_rule_order = 32;

// L-point Gauss-Legendre rule on (0,1), nodes increasing.
Rule1D gauss_rule(int L);
// L^3 points, index (l*L + m)*L + n holds (z_l, z_m, z_n).
Rule3D tensor_rule(int L);
Rule3D tensor_rule(const Rule1D& r);

} // namespace hexgram
