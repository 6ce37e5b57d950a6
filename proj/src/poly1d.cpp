#include "hexgram/poly1d.hpp"

#include "hexgram/errors.hpp"

#include <string>

namespace hexgram {

namespace {

void check_point(double xi)
{
    if (!(xi >= 0.0 && xi <= 1.0))
        throw DomainError("point " + std::to_string(xi) + " outside [0,1]");
}

void check_order(int p)
{
    if (p < 1)
        throw InvalidOrderError("order must be >= 1, got " + std::to_string(p));
}

double sq(double x) { return x * x; }

double f00(int i, int j)
{
    if (i < j)
        std::swap(i, j);
    // i >= j from here
    if (j == 0) {
        if (i == 0) return 1.0 / 3.0;
        if (i == 1) return 1.0 / 6.0;
        if (i == 2) return -1.0 / 12.0;
        if (i == 3) return 1.0 / 60.0;
        return 0.0;
    }
    if (j == 1) {
        if (i == 1) return 1.0 / 3.0;
        if (i == 2) return -1.0 / 12.0;
        if (i == 3) return -1.0 / 60.0;
        return 0.0;
    }
    if (i == j)
        return (1.0 / (2 * j + 1) + 1.0 / (2 * j - 3)) / (4.0 * sq(2 * j - 1));
    if (i == j + 2)
        return -1.0 / (4.0 * (2 * j + 3) * (2 * j - 1) * (2 * j + 1));
    return 0.0;
}

double f01(int i, int j)
{
    if (j == 0)
        return -f01(i, 1);
    if (i == 0) {
        if (j == 1) return 0.5;
        if (j == 2) return -1.0 / 6.0;
        return 0.0;
    }
    if (i == 1) {
        if (j == 1) return 0.5;
        if (j == 2) return 1.0 / 6.0;
        return 0.0;
    }
    if (j == i + 1) return 1.0 / (2.0 * (2 * i - 1) * (2 * i + 1));
    if (j == i - 1) return -1.0 / (2.0 * (2 * i - 3) * (2 * i - 1));
    return 0.0;
}

double f11(int i, int j)
{
    if (i == 0 && j == 0) return 1.0;
    if (i == 0 || j == 0) return (i + j == 1) ? -1.0 : 0.0;
    return i == j ? 1.0 / (2 * i - 1) : 0.0;
}

} // namespace

void legendre_into(int n, double xi, double* out)
{
    const double t = 2.0 * xi - 1.0;
    out[0] = 1.0;
    if (n >= 1)
        out[1] = t;
    for (int i = 2; i <= n; ++i)
        out[i] = ((2 * i - 1) * t * out[i - 1] - (i - 1) * out[i - 2]) / i;
}

void shape1_h1_into(int p, double xi, double* chi, double* dchi)
{
    // dchi[i] = P_{i-1}, so dchi + 1 receives P_0..P_{p-1}; P_p is formed on the fly.
    legendre_into(p - 1, xi, dchi + 1);
    chi[0] = 1.0 - xi;
    chi[1] = xi;
    dchi[0] = -1.0;
    const double t = 2.0 * xi - 1.0;
    for (int i = 2; i <= p; ++i) {
        const double pim1 = dchi[i], pim2 = dchi[i - 1];
        const double pi = ((2 * i - 1) * t * pim1 - (i - 1) * pim2) / i;
        chi[i] = (pi - pim2) / (2.0 * (2 * i - 1));
    }
}

LegendreEval legendre_all(int n, double xi)
{
    if (n < 0)
        throw InvalidOrderError("negative Legendre degree");
    check_point(xi);
    LegendreEval e;
    e.values.resize(n + 1);
    e.point = xi;
    legendre_into(n, xi, e.values.data());
    return e;
}

ShapeTable1D shape1_h1(int p, double xi)
{
    check_order(p);
    check_point(xi);
    ShapeTable1D s;
    s.chi.resize(p + 1);
    s.dchi.resize(p + 1);
    s.point = xi;
    shape1_h1_into(p, xi, s.chi.data(), s.dchi.data());
    return s;
}

std::vector<double> shape1_l2(int p, double xi)
{
    check_order(p);
    check_point(xi);
    std::vector<double> nu(p);
    legendre_into(p - 1, xi, nu.data());
    return nu;
}

double f_entry(int r, int s, int i, int j)
{
    if (r == 0 && s == 0) return f00(i, j);
    if (r == 0 && s == 1) return f01(i, j);
    if (r == 1 && s == 0) return f01(j, i);
    return f11(i, j);
}

FTable::FTable(int pmax) : pmax_(pmax)
{
    if (pmax < 1)
        throw InvalidOrderError("FTable pmax must be >= 1");
    const int n = pmax + 1;
    for (int rs = 0; rs < 4; ++rs) {
        tab_[rs].resize(n * n);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                tab_[rs][i + n * j] = f_entry(rs >> 1, rs & 1, i, j);
    }
}

double FTable::entry(int r, int s, int i, int j) const
{
    if (i < 0 || j < 0 || i > pmax_ || j > pmax_)
        throw IndexOutOfRange("FTable index beyond pmax " + std::to_string(pmax_));
    return tab_[2 * r + s][i + (pmax_ + 1) * j];
}

void FTable::inject_fault(int r, int s, int i, int j, double value)
{
    if (i < 0 || j < 0 || i > pmax_ || j > pmax_)
        throw IndexOutOfRange("FTable index beyond pmax " + std::to_string(pmax_));
    tab_[2 * r + s][i + (pmax_ + 1) * j] = value;
}

} // namespace hexgram
