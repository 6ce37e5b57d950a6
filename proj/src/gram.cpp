#include "hexgram/gram.hpp"

#include "engine.hpp"
#include "hexgram/errors.hpp"

#include <algorithm>

namespace hexgram {

Counters& Counters::operator+=(const Counters& o)
{
    accumulations += o.accumulations;
    aux_accumulations += o.aux_accumulations;
    geometry_calls += o.geometry_calls;
    shape1_calls += o.shape1_calls;
    shape3_calls += o.shape3_calls;
    guard_skips += o.guard_skips;
    return *this;
}

std::string to_string(Backend b)
{
    switch (b) {
    case Backend::conventional:
        return "conventional";
    case Backend::tensorized:
        return "tensor";
    default:
        return "simplified";
    }
}

Backend parse_backend(const std::string& s)
{
    if (s == "conventional" || s == "conv")
        return Backend::conventional;
    if (s == "tensor" || s == "tensorized")
        return Backend::tensorized;
    if (s == "simplified" || s == "simple")
        return Backend::simplified;
    throw std::invalid_argument("unknown backend '" + s + "'");
}

int default_rule_order(const SpaceSignature& sig)
{
    const int pm = *std::max_element(sig.p.begin(), sig.p.end());
    return sig.space == Space::L2 ? pm : pm + 1;
}

GramResult gram_conventional(const SpaceSignature& sig, const ElementMap& map, const Rule3D& rule,
                             const GramOptions& opt)
{
    const int N = dim(sig);
    GramResult res;
    res.matrix = Eigen::MatrixXd::Zero(N, N);
    auto& G = res.matrix;
    auto& cnt = res.counters;
    ShapeEval3D s;
    std::vector<double> t1(3 * std::size_t(N)), t2(3 * std::size_t(N));
    const double mw = opt.mass_weight, dw = opt.deriv_weight;

    for (std::size_t q = 0; q < rule.points.size(); ++q) {
        const auto& pt = rule.points[q];
        const JacobianData g = eval_geometry(map, Vec3(pt[0], pt[1], pt[2]));
        ++cnt.geometry_calls;
        shape3_eval_into(sig, Vec3(pt[0], pt[1], pt[2]), s);
        ++cnt.shape3_calls;
        const double w = rule.weights[q];
        switch (sig.space) {
        case Space::L2: {
            const double c = mw * w / g.detJ;
            for (int J = 0; J < N; ++J) {
                const double a = s.value[J] * c;
                for (int I = J; I < N; ++I)
                    G(I, J) += s.value[I] * a;
            }
            break;
        }
        case Space::H1: {
            const double cm = mw * w * g.detJ, cd = dw * w * g.detJ;
            for (int J = 0; J < N; ++J) {
                const Vec3 d = g.D * Vec3(s.der(J, 0), s.der(J, 1), s.der(J, 2)) * cd;
                t1[3 * J] = d[0];
                t1[3 * J + 1] = d[1];
                t1[3 * J + 2] = d[2];
            }
            for (int J = 0; J < N; ++J) {
                const double a = s.value[J] * cm;
                const double* d = &t1[3 * J];
                for (int I = J; I < N; ++I) {
                    const double* gi = &s.deriv[3 * I];
                    G(I, J) += s.value[I] * a + gi[0] * d[0] + gi[1] * d[1] + gi[2] * d[2];
                }
            }
            break;
        }
        case Space::Hdiv: {
            const double cm = mw * w / g.detJ, cd = dw * w / g.detJ;
            for (int J = 0; J < N; ++J) {
                const Vec3 v = g.C * Vec3(s.val(J, 0), s.val(J, 1), s.val(J, 2)) * cm;
                t1[3 * J] = v[0];
                t1[3 * J + 1] = v[1];
                t1[3 * J + 2] = v[2];
            }
            for (int J = 0; J < N; ++J) {
                const double* v = &t1[3 * J];
                const double dj = s.deriv[J] * cd;
                for (int I = J; I < N; ++I) {
                    const double* vi = &s.value[3 * I];
                    G(I, J) += vi[0] * v[0] + vi[1] * v[1] + vi[2] * v[2] + s.deriv[I] * dj;
                }
            }
            break;
        }
        case Space::Hcurl: {
            const double cm = mw * w * g.detJ, cd = dw * w / g.detJ;
            for (int J = 0; J < N; ++J) {
                const Vec3 v = g.D * Vec3(s.val(J, 0), s.val(J, 1), s.val(J, 2)) * cm;
                const Vec3 c = g.C * Vec3(s.der(J, 0), s.der(J, 1), s.der(J, 2)) * cd;
                for (int k = 0; k < 3; ++k) {
                    t1[3 * J + k] = v[k];
                    t2[3 * J + k] = c[k];
                }
            }
            for (int J = 0; J < N; ++J) {
                const double* v = &t1[3 * J];
                const double* c = &t2[3 * J];
                for (int I = J; I < N; ++I) {
                    const double* vi = &s.value[3 * I];
                    const double* ci = &s.deriv[3 * I];
                    G(I, J) += vi[0] * v[0] + vi[1] * v[1] + vi[2] * v[2] + ci[0] * c[0] + ci[1] * c[1] + ci[2] * c[2];
                }
            }
            break;
        }
        }
        cnt.accumulations += std::int64_t(N) * (N + 1) / 2;
    }
    G.triangularView<Eigen::StrictlyUpper>() = G.transpose();
    return res;
}

GramResult gram_tensorized(const SpaceSignature& sig, const ElementMap& map, const Rule1D& rule, LoopOrder order,
                           const GramOptions& opt)
{
    const auto ts = detail::gram_terms(sig, opt);
    GramResult res;
    res.matrix = std::move(detail::run_tensorized(ts, map, rule, order, res.counters)[0]);
    return res;
}

GramResult gram_simplified(const SpaceSignature& sig, const ElementMap& map, const FTable& ftable, const Rule1D& rule,
                           const GramOptions& opt)
{
    const auto ts = detail::gram_terms(sig, opt);
    GramResult res;
    res.matrix = std::move(detail::run_simplified(ts, map, ftable, rule, res.counters)[0]);
    return res;
}

GramResult gram(const SpaceSignature& sig, const ElementMap& map, Backend backend, std::optional<int> rule_order,
                const GramOptions& opt)
{
    const int L = rule_order.value_or(default_rule_order(sig));
    switch (backend) {
    case Backend::conventional:
        return gram_conventional(sig, map, tensor_rule(L), opt);
    case Backend::tensorized:
        return gram_tensorized(sig, map, gauss_rule(L), LoopOrder::standard, opt);
    default: {
        const int pm = *std::max_element(sig.p.begin(), sig.p.end());
        return gram_simplified(sig, map, FTable(std::max(default_pmax, pm + 1)), gauss_rule(L), opt);
    }
    }
}

GramResult gram_block(const SpaceSignature& sig, const ElementMap& map, Backend backend, int copies)
{
    if (copies < 1 || copies > 3)
        throw std::invalid_argument("copies must be in 1..3");
    GramResult base = gram(sig, map, backend);
    if (copies == 1)
        return base;
    const Eigen::Index N = base.matrix.rows();
    GramResult res;
    res.counters = base.counters;
    res.matrix = Eigen::MatrixXd::Zero(copies * N, copies * N);
    for (int c = 0; c < copies; ++c)
        res.matrix.block(c * N, c * N, N, N) = base.matrix;
    return res;
}

bool is_spd(const Eigen::MatrixXd& G)
{
    if (G.rows() != G.cols() || !G.isApprox(G.transpose(), 1e-14))
        return false;
    Eigen::LLT<Eigen::MatrixXd> llt(G);
    return llt.info() == Eigen::Success;
}

} // namespace hexgram
