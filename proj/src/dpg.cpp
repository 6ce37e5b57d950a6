#include "hexgram/dpg.hpp"

#include "engine.hpp"
#include "hexgram/errors.hpp"

namespace hexgram {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd real_block(const MatrixXd& re, const MatrixXd& im)
{
    MatrixXd R(2 * re.rows(), 2 * re.cols());
    R << re, -im, im, re;
    return R;
}

SpaceLayout concat(const SpaceLayout& a, const SpaceLayout& b)
{
    SpaceLayout c;
    c.ncomp = a.ncomp + b.ncomp;
    if (c.ncomp > SpaceLayout::max_comp)
        throw std::logic_error("too many components");
    for (int k = 0; k < a.ncomp; ++k)
        c.n[k] = a.n[k];
    for (int k = 0; k < b.ncomp; ++k)
        c.n[a.ncomp + k] = b.n[k];
    c.offset[0] = 0;
    for (int k = 0; k < c.ncomp; ++k)
        c.offset[k + 1] = c.offset[k] + c.size(k);
    return c;
}

// Hdiv component a: chi^<1-delta>_{i+1-delta}; with deriv forced to 1 for the divergence.
detail::Factor hdiv_factor(int a, int d, bool div = false)
{
    return {(div || d != a) ? 1 : 0, d != a ? 1 : 0};
}

constexpr detail::Factor nu_factor{1, 1};

detail::TermSet mixed_terms(int pr)
{
    detail::TermSet ts;
    ts.rows = layout(SpaceSignature::uniform(Space::Hdiv, pr));
    ts.cols = layout(SpaceSignature::uniform(Space::H1, pr));
    ts.sym = detail::Symmetry::none;
    for (int a = 0; a < 3; ++a) {
        detail::Term dv;
        dv.row_comp = a;
        dv.col_comp = 0;
        for (int d = 0; d < 3; ++d) {
            dv.row[d] = hdiv_factor(a, d, true);
            dv.col[d] = {0, 0};
        }
        dv.scale = -1.0;
        ts.terms.push_back(dv);
        detail::Term gr = dv;
        for (int d = 0; d < 3; ++d) {
            gr.row[d] = hdiv_factor(a, d);
            gr.col[d] = {d == a ? 1 : 0, 0};
        }
        gr.scale = 1.0;
        ts.terms.push_back(gr);
    }
    return ts;
}

MatrixXd mixed_conventional(int pr, Counters& cnt)
{
    const auto sv = SpaceSignature::uniform(Space::Hdiv, pr);
    const auto sw = SpaceSignature::uniform(Space::H1, pr);
    const Rule3D rule = tensor_rule(pr + 1);
    const int nv = dim(sv), nw = dim(sw);
    MatrixXd X = MatrixXd::Zero(nv, nw);
    ShapeEval3D ev, ew;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
        const Vec3 xi(rule.points[q][0], rule.points[q][1], rule.points[q][2]);
        shape3_eval_into(sv, xi, ev);
        shape3_eval_into(sw, xi, ew);
        cnt.shape3_calls += 2;
        const double w = rule.weights[q];
        for (int k = 0; k < nw; ++k) {
            const double qk = ew.value[k] * w;
            const double g0 = ew.der(k, 0) * w, g1 = ew.der(k, 1) * w, g2 = ew.der(k, 2) * w;
            for (int i = 0; i < nv; ++i)
                X(i, k) += -ev.deriv[i] * qk + ev.val(i, 0) * g0 + ev.val(i, 1) * g1 + ev.val(i, 2) * g2;
        }
        cnt.accumulations += std::int64_t(nv) * nw;
    }
    return X;
}

detail::TermSet acoustics_b_terms(int p0, int pr, double omega)
{
    using detail::Term;
    using detail::Weight;
    detail::TermSet ts;
    ts.rows = concat(layout(SpaceSignature::uniform(Space::H1, pr)), layout(SpaceSignature::uniform(Space::Hdiv, pr)));
    const auto y = layout(SpaceSignature::uniform(Space::L2, p0));
    SpaceLayout y4;
    y4.ncomp = 4;
    for (int k = 0; k < 4; ++k) {
        y4.n[k] = y.n[0];
        y4.offset[k + 1] = y4.offset[k] + y.size(0);
    }
    ts.cols = y4;
    ts.sym = detail::Symmetry::none;
    ts.nout = 2;
    // (i omega p, q)
    {
        Term t;
        t.row_comp = 0;
        t.col_comp = 0;
        for (int d = 0; d < 3; ++d) {
            t.row[d] = {0, 0};
            t.col[d] = nu_factor;
        }
        t.weight = Weight::one;
        t.scale = omega;
        t.out = 1;
        ts.terms.push_back(t);
    }
    // -(u, grad q)
    for (int c = 0; c < 3; ++c)
        for (int e = 0; e < 3; ++e) {
            Term t;
            t.row_comp = 0;
            t.col_comp = 1 + c;
            for (int d = 0; d < 3; ++d) {
                t.row[d] = {d == e ? 1 : 0, 0};
                t.col[d] = nu_factor;
            }
            t.weight = Weight::Jinv;
            t.wr = e;
            t.wc = c;
            t.scale = -1.0;
            ts.terms.push_back(t);
        }
    for (int a = 0; a < 3; ++a) {
        // -(p, div v)
        Term t;
        t.row_comp = 1 + a;
        t.col_comp = 0;
        for (int d = 0; d < 3; ++d) {
            t.row[d] = hdiv_factor(a, d, true);
            t.col[d] = nu_factor;
        }
        t.weight = Weight::inv_det;
        t.scale = -1.0;
        ts.terms.push_back(t);
        // (i omega u, v)
        for (int c = 0; c < 3; ++c) {
            Term s;
            s.row_comp = 1 + a;
            s.col_comp = 1 + c;
            for (int d = 0; d < 3; ++d) {
                s.row[d] = hdiv_factor(a, d);
                s.col[d] = nu_factor;
            }
            s.weight = Weight::J_inv_det;
            s.wr = c;
            s.wc = a;
            s.scale = omega;
            s.out = 1;
            ts.terms.push_back(s);
        }
    }
    return ts;
}

void acoustics_b_conventional(int p0, int pr, double omega, const ElementMap& map, MatrixXd& Bre, MatrixXd& Bim,
                              Counters& cnt)
{
    const auto sw = SpaceSignature::uniform(Space::H1, pr);
    const auto sv = SpaceSignature::uniform(Space::Hdiv, pr);
    const auto sy = SpaceSignature::uniform(Space::L2, p0);
    const int nw = dim(sw), nv = dim(sv), ny = dim(sy);
    const int m = nw + nv, n = 4 * ny;
    Bre = MatrixXd::Zero(m, n);
    Bim = MatrixXd::Zero(m, n);
    const Rule3D rule = tensor_rule(pr + 1);
    ShapeEval3D ew, ev, ey;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
        const Vec3 xi(rule.points[q][0], rule.points[q][1], rule.points[q][2]);
        const JacobianData g = eval_geometry(map, xi);
        ++cnt.geometry_calls;
        shape3_eval_into(sw, xi, ew);
        shape3_eval_into(sv, xi, ev);
        shape3_eval_into(sy, xi, ey);
        cnt.shape3_calls += 3;
        const double w = rule.weights[q];
        for (int k = 0; k < ny; ++k) {
            const double yk = ey.value[k] * w;
            // columns: p_k, then u_c,k
            for (int i = 0; i < nw; ++i) {
                Bim(i, k) += omega * ew.value[i] * yk;
                const Vec3 gq = g.Jinv.transpose() * Vec3(ew.der(i, 0), ew.der(i, 1), ew.der(i, 2));
                for (int c = 0; c < 3; ++c)
                    Bre(i, ny * (1 + c) + k) += -gq[c] * yk;
            }
            for (int i = 0; i < nv; ++i) {
                const int r = nw + i;
                Bre(r, k) += -ev.deriv[i] * yk / g.detJ;
                const Vec3 Jv = g.J * Vec3(ev.val(i, 0), ev.val(i, 1), ev.val(i, 2));
                for (int c = 0; c < 3; ++c)
                    Bim(r, ny * (1 + c) + k) += omega * Jv[c] * yk / g.detJ;
            }
        }
        cnt.accumulations += std::int64_t(m) * n;
    }
}

VectorXd acoustics_load(const UltraweakAcousticsProblem& prob, int pr, const ElementMap& map, Counters& cnt)
{
    const auto sw = SpaceSignature::uniform(Space::H1, pr);
    const auto sv = SpaceSignature::uniform(Space::Hdiv, pr);
    const int nw = dim(sw), nv = dim(sv);
    VectorXd l = VectorXd::Zero(2 * (nw + nv));
    const Rule3D rule = tensor_rule(pr + 1);
    ShapeEval3D ew, ev;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
        const Vec3 xi(rule.points[q][0], rule.points[q][1], rule.points[q][2]);
        const JacobianData g = eval_geometry(map, xi);
        ++cnt.geometry_calls;
        const double fw = prob.f(g.x) * rule.weights[q];
        if (fw == 0.0)
            continue;
        if (prob.pairing == LoadPairing::pressure) {
            shape3_eval_into(sw, xi, ew);
            ++cnt.shape3_calls;
            for (int i = 0; i < nw; ++i)
                l[i] += fw * ew.value[i] * g.detJ;
        }
        else {
            shape3_eval_into(sv, xi, ev);
            ++cnt.shape3_calls;
            for (int i = 0; i < nv; ++i) {
                const Vec3 Jv = g.J * Vec3(ev.val(i, 0), ev.val(i, 1), ev.val(i, 2));
                l[nw + i] += fw * Jv.sum();
            }
        }
    }
    return l;
}

} // namespace

DpgOrders make_orders(int p0, int dp)
{
    if (p0 < 1 || dp < 1)
        throw InvalidOrderError("DPG orders need p0 >= 1 and dp >= 1");
    return {p0, dp, p0 + dp};
}

DpgElementSystem poisson_primal_element(int p0, int dp, const ScalarField& k, const ScalarField& r,
                                        const ElementMap& map, Backend gram_backend)
{
    DpgElementSystem sys;
    sys.orders = make_orders(p0, dp);
    const int pr = sys.orders.pr;
    const auto st = SpaceSignature::uniform(Space::H1, pr);
    const auto su = SpaceSignature::uniform(Space::H1, p0);
    GramResult G = gram(st, map, gram_backend);
    sys.G = std::move(G.matrix);
    sys.counters = G.counters;
    sys.m = dim(st);
    sys.n = dim(su);
    sys.B = MatrixXd::Zero(sys.m, sys.n);
    sys.l = VectorXd::Zero(sys.m);
    const Rule3D rule = tensor_rule(pr + 1);
    ShapeEval3D et, eu;
    std::vector<double> dg(3 * std::size_t(sys.n));
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
        const Vec3 xi(rule.points[q][0], rule.points[q][1], rule.points[q][2]);
        const JacobianData g = eval_geometry(map, xi);
        ++sys.counters.geometry_calls;
        shape3_eval_into(st, xi, et);
        shape3_eval_into(su, xi, eu);
        sys.counters.shape3_calls += 2;
        const double c = k(g.x) * g.detJ * rule.weights[q];
        const double rw = r(g.x) * g.detJ * rule.weights[q];
        for (int j = 0; j < sys.n; ++j) {
            const Vec3 d = g.D * Vec3(eu.der(j, 0), eu.der(j, 1), eu.der(j, 2)) * c;
            for (int e = 0; e < 3; ++e)
                dg[3 * j + e] = d[e];
        }
        for (int j = 0; j < sys.n; ++j)
            for (int i = 0; i < sys.m; ++i)
                sys.B(i, j) += et.der(i, 0) * dg[3 * j] + et.der(i, 1) * dg[3 * j + 1] + et.der(i, 2) * dg[3 * j + 2];
        for (int i = 0; i < sys.m; ++i)
            sys.l[i] += rw * et.value[i];
        sys.counters.accumulations += std::int64_t(sys.m) * sys.n;
    }
    return sys;
}

GramResult maxwell_gram(int pr, const ElementMap& map, Backend backend)
{
    return gram(SpaceSignature::uniform(Space::Hcurl, pr), map, backend);
}

MatrixXd adjoint_mixed_block(int pr, Backend backend, Counters* cnt)
{
    Counters local;
    Counters& c = cnt ? *cnt : local;
    if (backend == Backend::conventional)
        return mixed_conventional(pr, c);
    const auto ts = mixed_terms(pr);
    const auto id = ElementMap::identity();
    if (backend == Backend::tensorized)
        return detail::run_tensorized(ts, id, gauss_rule(pr + 1), LoopOrder::standard, c)[0];
    return detail::run_simplified(ts, id, FTable(std::max(default_pmax, pr + 1)), gauss_rule(pr + 1), c)[0];
}

GramResult adjoint_graph_gram(int pr, double omega, double alpha, const ElementMap& map, Backend backend,
                              bool include_mixed)
{
    if (!(omega >= 0.0) || !(alpha > 0.0))
        throw std::invalid_argument("adjoint graph norm needs omega >= 0 and alpha > 0");
    GramOptions opt;
    opt.mass_weight = omega * omega + alpha;
    const auto sw = SpaceSignature::uniform(Space::H1, pr);
    const auto sv = SpaceSignature::uniform(Space::Hdiv, pr);
    GramResult gw = gram(sw, map, backend, pr + 1, opt);
    GramResult gv = gram(sv, map, backend, pr + 1, opt);
    const Eigen::Index nw = gw.matrix.rows(), nv = gv.matrix.rows(), m = nw + nv;
    GramResult res;
    res.counters = gw.counters;
    res.counters += gv.counters;
    MatrixXd re = MatrixXd::Zero(m, m), im = MatrixXd::Zero(m, m);
    re.topLeftCorner(nw, nw) = gw.matrix;
    re.bottomRightCorner(nv, nv) = gv.matrix;
    if (include_mixed) {
        const MatrixXd X = adjoint_mixed_block(pr, backend, &res.counters);
        im.bottomLeftCorner(nv, nw) = omega * X;
        im.topRightCorner(nw, nv) = -omega * X.transpose();
    }
    res.matrix = real_block(re, im);
    return res;
}

DpgElementSystem acoustics_ultraweak_element(const UltraweakAcousticsProblem& prob, int p0, int dp,
                                             const ElementMap& map, Backend backend)
{
    if (!(prob.omega > 0.0) || !(prob.alpha > 0.0))
        throw std::invalid_argument("acoustics problem needs omega > 0 and alpha > 0");
    DpgElementSystem sys;
    sys.orders = make_orders(p0, dp);
    sys.complex = true;
    const int pr = sys.orders.pr;
    GramResult G = adjoint_graph_gram(pr, prob.omega, prob.alpha, map, backend);
    sys.G = std::move(G.matrix);
    sys.counters = G.counters;
    MatrixXd Bre, Bim;
    if (backend == Backend::conventional)
        acoustics_b_conventional(p0, pr, prob.omega, map, Bre, Bim, sys.counters);
    else {
        auto B = detail::run_tensorized(acoustics_b_terms(p0, pr, prob.omega), map, gauss_rule(pr + 1),
                                        LoopOrder::standard, sys.counters);
        Bre = std::move(B[0]);
        Bim = std::move(B[1]);
    }
    sys.m = int(Bre.rows());
    sys.n = int(Bre.cols());
    sys.B = real_block(Bre, Bim);
    sys.l = acoustics_load(prob, pr, map, sys.counters);
    return sys;
}

CondensedSystem condense(const DpgElementSystem& sys)
{
    Eigen::LLT<MatrixXd> llt(sys.G);
    if (llt.info() != Eigen::Success)
        throw NotPositiveDefiniteError("Gram matrix is not positive definite");
    const MatrixXd Y = llt.matrixL().solve(sys.B);
    const VectorXd z = llt.matrixL().solve(sys.l);
    CondensedSystem c;
    c.K = Y.transpose() * Y;
    c.f = Y.transpose() * z;
    return c;
}

ConstrainedSolve solve_condensed(const DpgElementSystem& sys, const std::vector<int>& fixed,
                                 const VectorXd& fixed_values)
{
    const CondensedSystem c = condense(sys);
    const int n = int(c.K.rows());
    std::vector<char> is_fixed(n, 0);
    for (int f : fixed) {
        if (f < 0 || f >= n)
            throw IndexOutOfRange("constrained dof out of range");
        is_fixed[f] = 1;
    }
    std::vector<int> free;
    for (int i = 0; i < n; ++i)
        if (!is_fixed[i])
            free.push_back(i);
    ConstrainedSolve out;
    out.u = VectorXd::Zero(n);
    for (std::size_t k = 0; k < fixed.size(); ++k)
        out.u[fixed[k]] = fixed_values[Eigen::Index(k)];
    if (!free.empty()) {
        const int nf = int(free.size());
        MatrixXd Kff(nf, nf);
        VectorXd rhs(nf);
        for (int a = 0; a < nf; ++a) {
            rhs[a] = c.f[free[a]];
            for (int j = 0; j < n; ++j)
                if (is_fixed[j])
                    rhs[a] -= c.K(free[a], j) * out.u[j];
            for (int b = 0; b < nf; ++b)
                Kff(a, b) = c.K(free[a], free[b]);
        }
        Eigen::LLT<MatrixXd> llt(Kff);
        if (llt.info() != Eigen::Success)
            throw NotPositiveDefiniteError("condensed matrix restricted to free dofs is singular");
        const VectorXd uf = llt.solve(rhs);
        for (int a = 0; a < nf; ++a)
            out.u[free[a]] = uf[a];
    }
    Eigen::LLT<MatrixXd> lg(sys.G);
    out.s = lg.solve(sys.B * out.u - sys.l);
    const VectorXd res = sys.B.transpose() * out.s;
    for (int i : free)
        out.free_residual = std::max(out.free_residual, std::abs(res[i]));
    return out;
}

std::vector<int> h1_boundary_dofs(int p)
{
    const auto sig = SpaceSignature::uniform(Space::H1, p);
    std::vector<int> b;
    for (int I = 0; I < dim(sig); ++I) {
        const auto mi = flat_to_multi(sig, I);
        if (mi.i[0] < 2 || mi.i[1] < 2 || mi.i[2] < 2)
            b.push_back(I);
    }
    return b;
}

} // namespace hexgram
