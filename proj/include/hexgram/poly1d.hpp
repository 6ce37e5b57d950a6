#pragma once

#include <array>
#include <span>
#include <vector>

namespace hexgram {

// Legendre polynomials shifted to [0,1], P_i(1) = 1.
struct LegendreEval {
    std::vector<double> values;
    double point = 0.0;
};

// Integrated Legendre family chi_0 = 1 - xi, chi_1 = xi, chi_i = L_i (i >= 2) and derivatives.
struct ShapeTable1D {
    std::vector<double> chi;
    std::vector<double> dchi;
    double point = 0.0;
};

LegendreEval legendre_all(int n, double xi);
ShapeTable1D shape1_h1(int p, double xi);
std::vector<double> shape1_l2(int p, double xi);

// Allocation-free kernels, no domain checks. out must hold n+1 (legendre) or p+1 (chi, dchi) entries.
void legendre_into(int n, double xi, double* out);
void shape1_h1_into(int p, double xi, double* chi, double* dchi);

// Closed-form integral over (0,1) of chi_i^<r> chi_j^<s>.
double f_entry(int r, int s, int i, int j);

constexpr int default_pmax = 12;

class FTable {
public:
    explicit FTable(int pmax = default_pmax);

    int pmax() const { return pmax_; }
    double entry(int r, int s, int i, int j) const;
    // Test hook: overwrite a single (r,s,i,j) entry.
    void inject_fault(int r, int s, int i, int j, double value);

private:
    int pmax_;
    std::array<std::vector<double>, 4> tab_;
};

} // namespace hexgram
