#include "engine.hpp"

#include "hexgram/errors.hpp"

#include <algorithm>

namespace hexgram::detail {

double weight_value(const Term& t, const JacobianData& g)
{
    double v = 1.0;
    switch (t.weight) {
    case Weight::one:
        break;
    case Weight::det:
        v = g.detJ;
        break;
    case Weight::inv_det:
        v = 1.0 / g.detJ;
        break;
    case Weight::D_det:
        v = g.D(t.wr, t.wc) * g.detJ;
        break;
    case Weight::C_inv_det:
        v = g.C(t.wr, t.wc) / g.detJ;
        break;
    case Weight::J_inv_det:
        v = g.J(t.wr, t.wc) / g.detJ;
        break;
    case Weight::Jinv:
        v = g.Jinv(t.wr, t.wc);
        break;
    }
    return t.scale * v;
}

TermSet gram_terms(const SpaceSignature& sig, const GramOptions& opt)
{
    TermSet ts;
    ts.rows = ts.cols = layout(sig);
    const double mw = opt.mass_weight, dw = opt.deriv_weight;
    auto uniform = [](int deriv, int shift) { return std::array<Factor, 3>{{{deriv, shift}, {deriv, shift}, {deriv, shift}}}; };
    switch (sig.space) {
    case Space::L2: {
        ts.sym = Symmetry::full_tensor;
        Term t;
        t.row = t.col = uniform(1, 1);
        t.weight = Weight::inv_det;
        t.scale = mw;
        ts.terms.push_back(t);
        break;
    }
    case Space::H1: {
        ts.sym = Symmetry::lower_i3;
        Term bar;
        bar.row = bar.col = uniform(0, 0);
        bar.weight = Weight::det;
        bar.scale = mw;
        ts.terms.push_back(bar);
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
                Term t;
                for (int d = 0; d < 3; ++d) {
                    t.row[d] = {d == a ? 1 : 0, 0};
                    t.col[d] = {d == b ? 1 : 0, 0};
                }
                t.weight = Weight::D_det;
                t.wr = a;
                t.wc = b;
                t.scale = dw;
                ts.terms.push_back(t);
            }
        break;
    }
    case Space::Hdiv: {
        ts.sym = Symmetry::lower;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
                Term t;
                t.row_comp = a;
                t.col_comp = b;
                for (int d = 0; d < 3; ++d) {
                    t.row[d] = {d == a ? 0 : 1, d == a ? 0 : 1};
                    t.col[d] = {d == b ? 0 : 1, d == b ? 0 : 1};
                }
                t.weight = Weight::C_inv_det;
                t.wr = a;
                t.wc = b;
                t.scale = mw;
                ts.terms.push_back(t);
                Term dv = t;
                for (int d = 0; d < 3; ++d) {
                    dv.row[d].deriv = 1;
                    dv.col[d].deriv = 1;
                }
                dv.weight = Weight::inv_det;
                dv.scale = dw;
                ts.terms.push_back(dv);
            }
        break;
    }
    case Space::Hcurl: {
        ts.sym = Symmetry::lower;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
                Term t;
                t.row_comp = a;
                t.col_comp = b;
                for (int d = 0; d < 3; ++d) {
                    t.row[d] = {d == a ? 1 : 0, d == a ? 1 : 0};
                    t.col[d] = {d == b ? 1 : 0, d == b ? 1 : 0};
                }
                t.weight = Weight::D_det;
                t.wr = a;
                t.wc = b;
                t.scale = mw;
                ts.terms.push_back(t);
                for (int al = 1; al <= 2; ++al)
                    for (int be = 1; be <= 2; ++be) {
                        const int ra = (a + al) % 3, cb = (b + be) % 3;
                        Term c = t;
                        for (int d = 0; d < 3; ++d) {
                            c.row[d] = {d == ra ? 0 : 1, d == a ? 1 : 0};
                            c.col[d] = {d == cb ? 0 : 1, d == b ? 1 : 0};
                        }
                        c.weight = Weight::C_inv_det;
                        c.wr = ra;
                        c.wc = cb;
                        c.scale = ((al + be) % 2 == 0 ? 1.0 : -1.0) * dw;
                        ts.terms.push_back(c);
                    }
            }
        break;
    }
    }
    return ts;
}

namespace {

// Terms sharing (row comp, col comp, output). Direction-1 factors are merged before the innermost loop:
// rsel lists distinct row factors, psel distinct (row, col) factor pairs.
struct Group {
    int rc = 0, cc = 0, out = 0;
    std::vector<int> terms;
    std::vector<Factor> rsel;
    std::vector<int> term_rsel;
    std::vector<std::pair<Factor, Factor>> psel;
    std::vector<int> term_psel;
    std::vector<int> psel_term;
    std::vector<int> psel_rsel;
};

struct Prep {
    const TermSet* ts = nullptr;
    std::array<int, 3> R{}, C{}, T{};
    std::vector<Group> groups;
    int nt = 0;
    int RC2 = 0;
};

Prep prepare(const TermSet& ts)
{
    Prep P;
    P.ts = &ts;
    P.nt = int(ts.terms.size());
    for (int d = 0; d < 3; ++d) {
        for (int c = 0; c < ts.rows.ncomp; ++c)
            P.R[d] = std::max(P.R[d], ts.rows.n[c][d]);
        for (int c = 0; c < ts.cols.ncomp; ++c)
            P.C[d] = std::max(P.C[d], ts.cols.n[c][d]);
        P.T[d] = 1;
    }
    for (int t = 0; t < P.nt; ++t) {
        const Term& tm = ts.terms[t];
        for (int d = 0; d < 3; ++d) {
            P.T[d] = std::max(P.T[d], ts.rows.n[tm.row_comp][d] - 1 + tm.row[d].shift);
            P.T[d] = std::max(P.T[d], ts.cols.n[tm.col_comp][d] - 1 + tm.col[d].shift);
        }
        auto it = std::find_if(P.groups.begin(), P.groups.end(), [&](const Group& g) {
            return g.rc == tm.row_comp && g.cc == tm.col_comp && g.out == tm.out;
        });
        if (it == P.groups.end()) {
            Group g;
            g.rc = tm.row_comp;
            g.cc = tm.col_comp;
            g.out = tm.out;
            P.groups.push_back(std::move(g));
            it = P.groups.end() - 1;
        }
        it->terms.push_back(t);
    }
    for (Group& g : P.groups)
        for (int t : g.terms) {
            const Term& tm = ts.terms[t];
            auto r = std::find(g.rsel.begin(), g.rsel.end(), tm.row[0]);
            if (r == g.rsel.end()) {
                g.rsel.push_back(tm.row[0]);
                r = g.rsel.end() - 1;
            }
            g.term_rsel.push_back(int(r - g.rsel.begin()));
            const auto pr = std::make_pair(tm.row[0], tm.col[0]);
            auto q = std::find(g.psel.begin(), g.psel.end(), pr);
            if (q == g.psel.end()) {
                g.psel.push_back(pr);
                g.psel_term.push_back(t);
                g.psel_rsel.push_back(int(r - g.rsel.begin()));
                q = g.psel.end() - 1;
            }
            g.term_psel.push_back(int(q - g.psel.begin()));
        }
    P.RC2 = P.R[1] * P.C[1];
    return P;
}

// chi^<deriv>_k at every node, laid out as [q * (T+1) + k].
struct Tables {
    std::array<std::array<std::vector<double>, 2>, 3> val;
    std::array<int, 3> S{};

    const double* row(const Term& t, int d) const { return val[d][t.row[d].deriv].data() + t.row[d].shift; }
    const double* col(const Term& t, int d) const { return val[d][t.col[d].deriv].data() + t.col[d].shift; }
};

Tables tabulate(const Prep& P, const Rule1D& rule, Counters& cnt)
{
    Tables tb;
    const int L = rule.order;
    for (int d = 0; d < 3; ++d) {
        const int S = P.T[d] + 1;
        tb.S[d] = S;
        tb.val[d][0].resize(std::size_t(L) * S);
        tb.val[d][1].resize(std::size_t(L) * S);
        for (int q = 0; q < L; ++q) {
            shape1_h1_into(P.T[d], rule.nodes[q], tb.val[d][0].data() + q * S, tb.val[d][1].data() + q * S);
            ++cnt.shape1_calls;
        }
    }
    return tb;
}

bool visit_i3j3(Symmetry s, int i3, int j3)
{
    return !((s == Symmetry::lower_i3 || s == Symmetry::full_tensor) && j3 > i3);
}

// Activates the terms whose third-direction guards hold; returns false if none does.
bool activate(const Prep& P, int i3, int j3, std::vector<char>& act, Counters& cnt)
{
    const TermSet& ts = *P.ts;
    bool any = false;
    for (int t = 0; t < P.nt; ++t) {
        const Term& tm = ts.terms[t];
        act[t] = i3 < ts.rows.n[tm.row_comp][2] && j3 < ts.cols.n[tm.col_comp][2];
        if (!act[t])
            ++cnt.guard_skips;
        any = any || act[t];
    }
    return any;
}

// B[i2*C2 + j2] += f2row(i2) f2col(j2) * a over the guarded (i2,j2) range
inline void accumulate_B(const Prep& P, const Term& tm, const double* r2, const double* c2, double a, double* B,
                         Counters& cnt)
{
    const TermSet& ts = *P.ts;
    const int nr = std::min(P.R[1], ts.rows.n[tm.row_comp][1]);
    const int nc = std::min(P.C[1], ts.cols.n[tm.col_comp][1]);
    const bool full = ts.sym == Symmetry::full_tensor;
    std::int64_t acc = 0;
    for (int i2 = 0; i2 < nr; ++i2) {
        const int jend = full ? std::min(nc, i2 + 1) : nc;
        const double ra = r2[i2] * a;
        double* Bi = B + i2 * P.C[1];
        for (int j2 = 0; j2 < jend; ++j2)
            Bi[j2] += ra * c2[j2];
        acc += jend;
    }
    cnt.aux_accumulations += acc;
}

// Visits the admissible (i2,j2,j1) combinations of every active group; setup(g, b) runs once per (i2,j2),
// row(g, j1, i1_begin, n1, col) accumulates column entries col[i1] for i1 in [i1_begin, n1).
template <class Setup, class Row>
void final_loops(const Prep& P, int i3, int j3, const std::vector<char>& act, std::vector<Eigen::MatrixXd>& G,
                 Counters& cnt, Setup&& setup, Row&& row)
{
    const TermSet& ts = *P.ts;
    const bool lower = ts.sym == Symmetry::lower || ts.sym == Symmetry::lower_i3;
    const bool full = ts.sym == Symmetry::full_tensor;
    std::int64_t acc = 0;
    for (std::size_t gi = 0; gi < P.groups.size(); ++gi) {
        const Group& g = P.groups[gi];
        if (!act[g.terms.front()])
            continue;
        const auto& nr = ts.rows.n[g.rc];
        const auto& nc = ts.cols.n[g.cc];
        Eigen::MatrixXd& Gout = G[g.out];
        for (int j2 = 0; j2 < P.C[1]; ++j2) {
            if (j2 >= nc[1])
                continue;
            for (int i2 = 0; i2 < P.R[1]; ++i2) {
                if (i2 >= nr[1] || (full && j2 > i2))
                    continue;
                const int Ib = ts.rows.offset[g.rc] + nr[0] * (i2 + nr[1] * i3);
                const int Jb = ts.cols.offset[g.cc] + nc[0] * (j2 + nc[1] * j3);
                setup(gi, i2 * P.C[1] + j2);
                for (int j1 = 0; j1 < nc[0]; ++j1) {
                    const int J = Jb + j1;
                    int i1 = 0;
                    if (lower)
                        i1 = std::max(0, J - Ib);
                    if (full)
                        i1 = j1;
                    if (i1 >= nr[0])
                        continue;
                    row(gi, j1, i1, nr[0], Gout.col(J).data() + Ib);
                    acc += nr[0] - i1;
                }
            }
        }
    }
    cnt.accumulations += acc;
}

constexpr int max_merge = 16;

// Final accumulation with direction-1 factors evaluated at node l and weight w.
void final_block_nodes(const Prep& P, const Tables& tb, int l, double w, int i3, int j3, const double* B,
                       const std::vector<char>& act, std::vector<Eigen::MatrixXd>& G, Counters& cnt)
{
    const TermSet& ts = *P.ts;
    const int S = tb.S[0];
    std::vector<std::vector<const double*>> rowv(P.groups.size()), colv(P.groups.size());
    for (std::size_t gi = 0; gi < P.groups.size(); ++gi) {
        const Group& g = P.groups[gi];
        for (const Factor& f : g.rsel)
            rowv[gi].push_back(tb.val[0][f.deriv].data() + f.shift + l * S);
        for (int t : g.psel_term)
            colv[gi].push_back(tb.col(ts.terms[t], 0) + l * S);
    }
    double bp[max_merge];
    final_loops(
        P, i3, j3, act, G, cnt,
        [&](std::size_t gi, int b) {
            const Group& g = P.groups[gi];
            std::fill(bp, bp + g.psel.size(), 0.0);
            for (std::size_t k = 0; k < g.terms.size(); ++k)
                bp[g.term_psel[k]] += B[g.terms[k] * P.RC2 + b];
            for (std::size_t u = 0; u < g.psel.size(); ++u)
                bp[u] *= w;
        },
        [&](std::size_t gi, int j1, int i1, int n1, double* col) {
            const Group& g = P.groups[gi];
            double c[max_merge] = {};
            const std::size_t np = g.psel.size();
            const double* const* cv = colv[gi].data();
            for (std::size_t u = 0; u < np; ++u)
                c[g.psel_rsel[u]] += cv[u][j1] * bp[u];
            const auto& rv = rowv[gi];
            const std::size_t nr = rv.size();
            if (nr == 1) {
                const double* r0 = rv[0];
                for (; i1 < n1; ++i1)
                    col[i1] += r0[i1] * c[0];
            }
            else if (nr == 2) {
                const double *r0 = rv[0], *r1 = rv[1];
                for (; i1 < n1; ++i1)
                    col[i1] += r0[i1] * c[0] + r1[i1] * c[1];
            }
            else {
                for (; i1 < n1; ++i1) {
                    double s = 0.0;
                    for (std::size_t r = 0; r < nr; ++r)
                        s += rv[r][i1] * c[r];
                    col[i1] += s;
                }
            }
        });
}

// Final accumulation with direction-1 integrals taken from F-table blocks F0[t] (R0 x C0, row-major).
void final_block_table(const Prep& P, const std::vector<double>& F0, int i3, int j3, const double* B,
                       const std::vector<char>& act, std::vector<Eigen::MatrixXd>& G, Counters& cnt)
{
    const int R0 = P.R[0], C0 = P.C[0];
    double cu[max_merge];
    final_loops(
        P, i3, j3, act, G, cnt,
        [&](std::size_t gi, int b) {
            const Group& g = P.groups[gi];
            std::fill(cu, cu + g.psel.size(), 0.0);
            for (std::size_t k = 0; k < g.terms.size(); ++k)
                cu[g.term_psel[k]] += B[g.terms[k] * P.RC2 + b];
        },
        [&](std::size_t gi, int j1, int i1, int n1, double* col) {
            const Group& g = P.groups[gi];
            const std::size_t np = g.psel.size();
            for (; i1 < n1; ++i1) {
                double s = 0.0;
                for (std::size_t u = 0; u < np; ++u)
                    s += F0[(std::size_t(g.psel_term[u]) * R0 + i1) * C0 + j1] * cu[u];
                col[i1] += s;
            }
        });
}

void finish(const TermSet& ts, std::vector<Eigen::MatrixXd>& G)
{
    if (ts.sym == Symmetry::none)
        return;
    for (auto& M : G) {
        if (ts.sym == Symmetry::full_tensor) {
            const auto& n = ts.rows.n[0];
            auto flat = [&](const int* i) { return i[0] + n[0] * (i[1] + n[1] * i[2]); };
            for (int i3 = 0; i3 < n[2]; ++i3)
                for (int j3 = 0; j3 <= i3; ++j3)
                    for (int i2 = 0; i2 < n[1]; ++i2)
                        for (int j2 = 0; j2 <= i2; ++j2)
                            for (int i1 = 0; i1 < n[0]; ++i1)
                                for (int j1 = 0; j1 <= i1; ++j1) {
                                    const int ci[3] = {i1, i2, i3}, cj[3] = {j1, j2, j3};
                                    const double v = M(flat(ci), flat(cj));
                                    for (int mask = 1; mask < 8; ++mask) {
                                        int a[3], b[3];
                                        for (int d = 0; d < 3; ++d) {
                                            const bool sw = (mask >> d) & 1;
                                            a[d] = sw ? cj[d] : ci[d];
                                            b[d] = sw ? ci[d] : cj[d];
                                        }
                                        const int I = flat(a), J = flat(b);
                                        M(std::max(I, J), std::min(I, J)) = v;
                                    }
                                }
        }
        M.triangularView<Eigen::StrictlyUpper>() = M.transpose();
    }
}

std::vector<Eigen::MatrixXd> alloc(const TermSet& ts)
{
    const int m = ts.rows.offset[ts.rows.ncomp], n = ts.cols.offset[ts.cols.ncomp];
    return std::vector<Eigen::MatrixXd>(ts.nout, Eigen::MatrixXd::Zero(m, n));
}

} // namespace

std::vector<Eigen::MatrixXd> run_tensorized(const TermSet& ts, const ElementMap& map, const Rule1D& rule,
                                            LoopOrder order, Counters& cnt)
{
    const Prep P = prepare(ts);
    const Tables tb = tabulate(P, rule, cnt);
    auto G = alloc(ts);
    const int L = rule.order;
    const auto& z = rule.nodes;
    const auto& w = rule.weights;
    const int nt = P.nt;
    std::vector<char> act(nt);

    if (order == LoopOrder::standard) {
        std::vector<double> A(nt), B(std::size_t(nt) * P.RC2);
        for (int l = 0; l < L; ++l)
            for (int i3 = 0; i3 < P.R[2]; ++i3)
                for (int j3 = 0; j3 < P.C[2]; ++j3) {
                    if (!visit_i3j3(ts.sym, i3, j3) || !activate(P, i3, j3, act, cnt))
                        continue;
                    std::fill(B.begin(), B.end(), 0.0);
                    for (int m = 0; m < L; ++m) {
                        std::fill(A.begin(), A.end(), 0.0);
                        for (int n = 0; n < L; ++n) {
                            const JacobianData g = eval_geometry(map, Vec3(z[l], z[m], z[n]));
                            ++cnt.geometry_calls;
                            for (int t = 0; t < nt; ++t) {
                                if (!act[t])
                                    continue;
                                const Term& tm = ts.terms[t];
                                const double wt = weight_value(tm, g);
                                A[t] += tb.row(tm, 2)[n * tb.S[2] + i3] * tb.col(tm, 2)[n * tb.S[2] + j3] * wt * w[n];
                                ++cnt.aux_accumulations;
                            }
                        }
                        for (int t = 0; t < nt; ++t) {
                            if (!act[t])
                                continue;
                            const Term& tm = ts.terms[t];
                            accumulate_B(P, tm, tb.row(tm, 1) + m * tb.S[1], tb.col(tm, 1) + m * tb.S[1], A[t] * w[m],
                                         B.data() + t * P.RC2, cnt);
                        }
                    }
                    final_block_nodes(P, tb, l, w[l], i3, j3, B.data(), act, G, cnt);
                }
    }
    else {
        const int n33 = P.R[2] * P.C[2];
        const std::size_t blk = std::size_t(nt) * P.RC2;
        std::vector<double> Ball(blk * n33), wt(std::size_t(nt) * L);
        std::vector<char> acts(std::size_t(nt) * n33), visit(n33);
        for (int i3 = 0; i3 < P.R[2]; ++i3)
            for (int j3 = 0; j3 < P.C[2]; ++j3) {
                const int k = i3 * P.C[2] + j3;
                visit[k] = visit_i3j3(ts.sym, i3, j3) && activate(P, i3, j3, act, cnt);
                std::copy(act.begin(), act.end(), acts.begin() + std::size_t(k) * nt);
            }
        std::vector<char> act_k(nt);
        for (int l = 0; l < L; ++l) {
            std::fill(Ball.begin(), Ball.end(), 0.0);
            for (int m = 0; m < L; ++m) {
                for (int n = 0; n < L; ++n) {
                    const JacobianData g = eval_geometry(map, Vec3(z[l], z[m], z[n]));
                    ++cnt.geometry_calls;
                    for (int t = 0; t < nt; ++t)
                        wt[t * L + n] = weight_value(ts.terms[t], g);
                }
                for (int i3 = 0; i3 < P.R[2]; ++i3)
                    for (int j3 = 0; j3 < P.C[2]; ++j3) {
                        const int k = i3 * P.C[2] + j3;
                        if (!visit[k])
                            continue;
                        for (int t = 0; t < nt; ++t) {
                            if (!acts[std::size_t(k) * nt + t])
                                continue;
                            const Term& tm = ts.terms[t];
                            double A = 0.0;
                            for (int n = 0; n < L; ++n) {
                                A += tb.row(tm, 2)[n * tb.S[2] + i3] * tb.col(tm, 2)[n * tb.S[2] + j3] * wt[t * L + n] *
                                     w[n];
                                ++cnt.aux_accumulations;
                            }
                            accumulate_B(P, tm, tb.row(tm, 1) + m * tb.S[1], tb.col(tm, 1) + m * tb.S[1], A * w[m],
                                         Ball.data() + k * blk + t * P.RC2, cnt);
                        }
                    }
            }
            for (int i3 = 0; i3 < P.R[2]; ++i3)
                for (int j3 = 0; j3 < P.C[2]; ++j3) {
                    const int k = i3 * P.C[2] + j3;
                    if (!visit[k])
                        continue;
                    std::copy(acts.begin() + std::size_t(k) * nt, acts.begin() + std::size_t(k + 1) * nt,
                              act_k.begin());
                    final_block_nodes(P, tb, l, w[l], i3, j3, Ball.data() + k * blk, act_k, G, cnt);
                }
        }
    }
    finish(ts, G);
    return G;
}

std::vector<Eigen::MatrixXd> run_simplified(const TermSet& ts, const ElementMap& map, const FTable& ft,
                                            const Rule1D& rule, Counters& cnt)
{
    const MapClass cls = classify(map);
    if (cls == MapClass::general)
        throw SimplificationNotApplicable("simplified backend needs a constant-jacobian or extrusion map, got " +
                                          map.kind());
    const Prep P = prepare(ts);
    for (int d = 0; d < 3; ++d)
        if (P.T[d] > ft.pmax())
            throw IndexOutOfRange("F table pmax " + std::to_string(ft.pmax()) + " too small for order " +
                                  std::to_string(P.T[d]));
    auto G = alloc(ts);
    const int nt = P.nt;
    std::vector<char> act(nt);
    std::vector<double> B(std::size_t(nt) * P.RC2);

    // F^{rs}_{(i+shift)(j+shift)} per term and direction as dense R x C blocks.
    std::array<std::vector<double>, 3> F;
    for (int d = 0; d < 3; ++d) {
        F[d].assign(std::size_t(nt) * P.R[d] * P.C[d], 0.0);
        for (int t = 0; t < nt; ++t) {
            const Term& tm = ts.terms[t];
            for (int i = 0; i < ts.rows.n[tm.row_comp][d]; ++i)
                for (int j = 0; j < ts.cols.n[tm.col_comp][d]; ++j)
                    F[d][(std::size_t(t) * P.R[d] + i) * P.C[d] + j] =
                        ft.entry(tm.row[d].deriv, tm.col[d].deriv, i + tm.row[d].shift, j + tm.col[d].shift);
        }
    }
    auto Fv = [&](int d, int t, int i, int j) { return F[d][(std::size_t(t) * P.R[d] + i) * P.C[d] + j]; };

    if (cls == MapClass::constant_jacobian) {
        const JacobianData g = eval_geometry(map, Vec3(0.5, 0.5, 0.5));
        ++cnt.geometry_calls;
        std::vector<double> wt(nt);
        for (int t = 0; t < nt; ++t)
            wt[t] = weight_value(ts.terms[t], g);
        for (int i3 = 0; i3 < P.R[2]; ++i3)
            for (int j3 = 0; j3 < P.C[2]; ++j3) {
                if (!visit_i3j3(ts.sym, i3, j3) || !activate(P, i3, j3, act, cnt))
                    continue;
                std::fill(B.begin(), B.end(), 0.0);
                for (int t = 0; t < nt; ++t) {
                    if (!act[t])
                        continue;
                    const double A = Fv(2, t, i3, j3) * wt[t];
                    ++cnt.aux_accumulations;
                    const Term& tm = ts.terms[t];
                    const int nr = ts.rows.n[tm.row_comp][1], nc = ts.cols.n[tm.col_comp][1];
                    for (int i2 = 0; i2 < nr; ++i2)
                        for (int j2 = 0; j2 < nc; ++j2) {
                            if (ts.sym == Symmetry::full_tensor && j2 > i2)
                                continue;
                            B[t * P.RC2 + i2 * P.C[1] + j2] = Fv(1, t, i2, j2) * A;
                            ++cnt.aux_accumulations;
                        }
                }
                final_block_table(P, F[0], i3, j3, B.data(), act, G, cnt);
            }
    }
    else {
        const Tables tb = tabulate(P, rule, cnt);
        const int L = rule.order;
        const auto& z = rule.nodes;
        const auto& w = rule.weights;
        std::vector<double> A(nt);
        for (int i3 = 0; i3 < P.R[2]; ++i3)
            for (int j3 = 0; j3 < P.C[2]; ++j3) {
                if (!visit_i3j3(ts.sym, i3, j3) || !activate(P, i3, j3, act, cnt))
                    continue;
                std::fill(B.begin(), B.end(), 0.0);
                for (int m = 0; m < L; ++m) {
                    std::fill(A.begin(), A.end(), 0.0);
                    for (int n = 0; n < L; ++n) {
                        const JacobianData g = eval_geometry(map, Vec3(0.5, z[m], z[n]));
                        ++cnt.geometry_calls;
                        for (int t = 0; t < nt; ++t) {
                            if (!act[t])
                                continue;
                            const Term& tm = ts.terms[t];
                            A[t] += tb.row(tm, 2)[n * tb.S[2] + i3] * tb.col(tm, 2)[n * tb.S[2] + j3] *
                                    weight_value(tm, g) * w[n];
                            ++cnt.aux_accumulations;
                        }
                    }
                    for (int t = 0; t < nt; ++t) {
                        if (!act[t])
                            continue;
                        const Term& tm = ts.terms[t];
                        accumulate_B(P, tm, tb.row(tm, 1) + m * tb.S[1], tb.col(tm, 1) + m * tb.S[1], A[t] * w[m],
                                     B.data() + t * P.RC2, cnt);
                    }
                }
                final_block_table(P, F[0], i3, j3, B.data(), act, G, cnt);
            }
    }
    finish(ts, G);
    return G;
}

} // namespace hexgram::detail
