#include "hexgram/spaces.hpp"

#include "hexgram/errors.hpp"
#include "hexgram/poly1d.hpp"

#include <algorithm>

namespace hexgram {

std::string to_string(Space s)
{
    switch (s) {
    case Space::H1:
        return "h1";
    case Space::Hcurl:
        return "hcurl";
    case Space::Hdiv:
        return "hdiv";
    default:
        return "l2";
    }
}

Space parse_space(const std::string& s)
{
    std::string t = s;
    std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
    if (t == "h1") return Space::H1;
    if (t == "hcurl") return Space::Hcurl;
    if (t == "hdiv") return Space::Hdiv;
    if (t == "l2") return Space::L2;
    throw std::invalid_argument("unknown space '" + s + "'");
}

void check_signature(const SpaceSignature& sig)
{
    for (int d = 0; d < 3; ++d)
        if (sig.p[d] < 1)
            throw InvalidOrderError("space orders must be >= 1");
}

SpaceLayout layout(const SpaceSignature& sig)
{
    check_signature(sig);
    SpaceLayout L;
    const auto& p = sig.p;
    switch (sig.space) {
    case Space::H1:
        L.ncomp = 1;
        L.n[0] = {p[0] + 1, p[1] + 1, p[2] + 1};
        break;
    case Space::L2:
        L.ncomp = 1;
        L.n[0] = {p[0], p[1], p[2]};
        break;
    case Space::Hdiv:
        L.ncomp = 3;
        for (int a = 0; a < 3; ++a)
            for (int d = 0; d < 3; ++d)
                L.n[a][d] = p[d] + (d == a ? 1 : 0);
        break;
    case Space::Hcurl:
        L.ncomp = 3;
        for (int a = 0; a < 3; ++a)
            for (int d = 0; d < 3; ++d)
                L.n[a][d] = p[d] + (d == a ? 0 : 1);
        break;
    }
    L.offset[0] = 0;
    for (int c = 0; c < L.ncomp; ++c)
        L.offset[c + 1] = L.offset[c] + L.size(c);
    return L;
}

int dim(const SpaceSignature& sig)
{
    const auto L = layout(sig);
    return L.offset[L.ncomp];
}

MultiIndex flat_to_multi(const SpaceSignature& sig, int I)
{
    const auto L = layout(sig);
    if (I < 0 || I >= L.offset[L.ncomp])
        throw IndexOutOfRange("flat index " + std::to_string(I) + " outside [0," +
                              std::to_string(L.offset[L.ncomp]) + ")");
    MultiIndex m;
    while (I >= L.offset[m.component + 1])
        ++m.component;
    int r = I - L.offset[m.component];
    const auto& n = L.n[m.component];
    m.i[0] = r % n[0];
    r /= n[0];
    m.i[1] = r % n[1];
    m.i[2] = r / n[1];
    return m;
}

int multi_to_flat(const SpaceSignature& sig, const MultiIndex& m)
{
    const auto L = layout(sig);
    if (m.component < 0 || m.component >= L.ncomp)
        throw IndexOutOfRange("component out of range");
    for (int d = 0; d < 3; ++d)
        if (m.i[d] < 0 || m.i[d] >= L.n[m.component][d])
            throw IndexOutOfRange("multi-index out of range");
    return L.flat(m.component, m.i[0], m.i[1], m.i[2]);
}

ShapeEval3D shape3_eval(const SpaceSignature& sig, const Vec3& xi)
{
    ShapeEval3D out;
    shape3_eval_into(sig, xi, out);
    return out;
}

void shape3_eval_into(const SpaceSignature& sig, const Vec3& xi, ShapeEval3D& out)
{
    const auto L = layout(sig);
    for (int d = 0; d < 3; ++d)
        if (!(xi[d] >= 0.0 && xi[d] <= 1.0))
            throw DomainError("shape point outside the master cube");
    const int N = L.offset[L.ncomp];
    out.sig = sig;
    out.n = N;
    switch (sig.space) {
    case Space::H1:
        out.value_dim = 1;
        out.deriv_dim = 3;
        break;
    case Space::L2:
        out.value_dim = 1;
        out.deriv_dim = 0;
        break;
    case Space::Hdiv:
        out.value_dim = 3;
        out.deriv_dim = 1;
        break;
    case Space::Hcurl:
        out.value_dim = 3;
        out.deriv_dim = 3;
        break;
    }
    out.value.assign(std::size_t(N) * out.value_dim, 0.0);
    out.deriv.assign(std::size_t(N) * out.deriv_dim, 0.0);

    // chi[d][i], dchi[d][i] for i = 0..p_d; P_i = dchi[i+1].
    std::array<std::vector<double>, 3> chi, dchi;
    for (int d = 0; d < 3; ++d) {
        chi[d].resize(sig.p[d] + 1);
        dchi[d].resize(sig.p[d] + 1);
        shape1_h1_into(sig.p[d], xi[d], chi[d].data(), dchi[d].data());
    }

    for (int c = 0; c < L.ncomp; ++c) {
        const auto& n = L.n[c];
        for (int i3 = 0; i3 < n[2]; ++i3)
            for (int i2 = 0; i2 < n[1]; ++i2)
                for (int i1 = 0; i1 < n[0]; ++i1) {
                    const int I = L.flat(c, i1, i2, i3);
                    const int idx[3] = {i1, i2, i3};
                    double f[3], df[3];
                    for (int d = 0; d < 3; ++d) {
                        const int i = idx[d];
                        bool legendre = false;
                        switch (sig.space) {
                        case Space::H1:
                            break;
                        case Space::L2:
                            legendre = true;
                            break;
                        case Space::Hdiv:
                            legendre = d != c;
                            break;
                        case Space::Hcurl:
                            legendre = d == c;
                            break;
                        }
                        if (legendre) {
                            f[d] = dchi[d][i + 1];
                            df[d] = 0.0; // not used
                        } else {
                            f[d] = chi[d][i];
                            df[d] = dchi[d][i];
                        }
                    }
                    const double v = f[0] * f[1] * f[2];
                    switch (sig.space) {
                    case Space::L2:
                        out.value[I] = v;
                        break;
                    case Space::H1:
                        out.value[I] = v;
                        out.deriv[3 * I + 0] = df[0] * f[1] * f[2];
                        out.deriv[3 * I + 1] = f[0] * df[1] * f[2];
                        out.deriv[3 * I + 2] = f[0] * f[1] * df[2];
                        break;
                    case Space::Hdiv: {
                        out.value[3 * I + c] = v;
                        double g[3] = {f[0], f[1], f[2]};
                        g[c] = df[c];
                        out.deriv[I] = g[0] * g[1] * g[2];
                        break;
                    }
                    case Space::Hcurl: {
                        out.value[3 * I + c] = v;
                        const int a1 = (c + 1) % 3, a2 = (c + 2) % 3;
                        double g1[3] = {f[0], f[1], f[2]}, g2[3] = {f[0], f[1], f[2]};
                        g2[a2] = df[a2]; // d_{a+2} psi_a
                        g1[a1] = df[a1]; // d_{a+1} psi_a
                        out.deriv[3 * I + a1] = g2[0] * g2[1] * g2[2];
                        out.deriv[3 * I + a2] = -g1[0] * g1[1] * g1[2];
                        break;
                    }
                    }
                }
    }
}

} // namespace hexgram
