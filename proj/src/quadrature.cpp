#include "hexgram/quadrature.hpp"

#include "hexgram/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace hexgram {

Rule1D gauss_rule(int L)
{
    if (L < 1 || L > max_rule_order)
        throw InvalidOrderError("rule order " + std::to_string(L) + " outside 1.." +
                                std::to_string(max_rule_order));
    Rule1D r;
    r.order = L;
    r.nodes.resize(L);
    r.weights.resize(L);
    const int half = (L + 1) / 2;
    for (int k = 0; k < half; ++k) {
        double x = std::cos(std::numbers::pi * (k + 0.75) / (L + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= L; ++j) {
                const double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = L * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15)
                break;
        }
        {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= L; ++j) {
                const double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = L * (x * p1 - p0) / (x * x - 1.0);
        }
        const double w = 1.0 / ((1.0 - x * x) * dp * dp);
        // x is the k-th largest root; map to (0,1)
        r.nodes[L - 1 - k] = 0.5 * (1.0 + x);
        r.nodes[k] = 0.5 * (1.0 - x);
        r.weights[L - 1 - k] = w;
        r.weights[k] = w;
    }
    if (L % 2 == 1)
        r.nodes[L / 2] = 0.5;
    return r;
}

Rule3D tensor_rule(const Rule1D& r)
{
    const int L = r.order;
    Rule3D t;
    t.order = L;
    t.points.reserve(L * L * L);
    t.weights.reserve(L * L * L);
    for (int l = 0; l < L; ++l)
        for (int m = 0; m < L; ++m)
            for (int n = 0; n < L; ++n) {
                t.points.push_back({r.nodes[l], r.nodes[m], r.nodes[n]});
                t.weights.push_back(r.weights[l] * r.weights[m] * r.weights[n]);
            }
    return t;
}

Rule3D tensor_rule(int L) { return tensor_rule(gauss_rule(L)); }

} // namespace hexgram
