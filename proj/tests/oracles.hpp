#pragma once
// Independent reference implementations for the test suites.
#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

// Shifted Legendre via the standard library special function.
inline double P(int n, double t) { return std::legendre(static_cast<unsigned>(n), 2.0 * t - 1.0); }

inline double chi(int i, double t) {
    if (i == 0) return 1.0 - t;
    if (i == 1) return t;
    return (P(i, t) - P(i - 2, t)) / (2.0 * (2 * i - 1));
}

inline double dchi(int i, double t) {
    if (i == 0) return -1.0;
    return P(i - 1, t);
}

// Composite 20-panel, 8-point Gauss on (0,1); nodes hard-coded from tables.
inline double integrate(const std::function<double(double)>& f) {
    static const double x[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
                                0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
    static const double w[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
                                0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};
    const int panels = 20;
    double s = 0.0;
    for (int k = 0; k < panels; ++k) {
        double a = double(k) / panels, h = 1.0 / panels;
        for (int q = 0; q < 8; ++q) s += 0.5 * h * w[q] * f(a + 0.5 * h * (x[q] + 1.0));
    }
    return s;
}

inline double max_abs(const std::vector<double>& v) {
    double m = 0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

} // namespace oracle
