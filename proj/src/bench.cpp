#include "hexgram/bench.hpp"

#include "hexgram/dpg.hpp"
#include "hexgram/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <ostream>
#include <sstream>

namespace hexgram {

namespace {

using Eigen::MatrixXd;

struct Produced {
    std::vector<MatrixXd> parts;
    Counters counters;
};

double max_abs_diff(const Produced& a, const Produced& b)
{
    double m = 0.0;
    for (std::size_t k = 0; k < a.parts.size() && k < b.parts.size(); ++k)
        m = std::max(m, (a.parts[k] - b.parts[k]).cwiseAbs().maxCoeff());
    return m;
}

std::string fmt17(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_time(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6e", v);
    return buf;
}

} // namespace

ElementMap resolve_map(const std::string& spec)
{
    const auto names = preset_map_names();
    if (std::find(names.begin(), names.end(), spec) != names.end())
        return preset_map(spec);
    return parse_map_line(spec);
}

int default_runs(const BenchConfig& cfg)
{
    if (cfg.runs > 0)
        return cfg.runs;
    if (cfg.task == "gram" && (cfg.space == "h1" || cfg.space == "l2"))
        return 50;
    return 20;
}

BenchResult run_bench(const BenchConfig& cfg)
{
    if (cfg.task != "gram" && cfg.task != "dpg-all")
        throw std::invalid_argument("unknown task '" + cfg.task + "'");
    if (cfg.p_first < 1 || cfg.p_last < cfg.p_first || cfg.p_last + cfg.dp + 1 > default_pmax + 1)
        throw std::invalid_argument("p range outside the supported orders");
    if (cfg.runs < 0)
        throw std::invalid_argument("runs must be positive");
    const int runs = default_runs(cfg);
    const ElementMap map = resolve_map(cfg.map);
    const bool general = classify(map) == MapClass::general;
    std::vector<Backend> backends = cfg.backends;
    std::sort(backends.begin(), backends.end());
    backends.erase(std::unique(backends.begin(), backends.end()), backends.end());

    BenchResult res;
    for (int p = cfg.p_first; p <= cfg.p_last; ++p) {
        int p0, dp, pr;
        if (cfg.task == "gram") {
            pr = p;
            p0 = std::max(1, pr - cfg.dp);
            dp = pr - p0;
        }
        else {
            p0 = p;
            dp = cfg.dp;
            pr = p0 + dp;
        }
        struct Out {
            Backend b;
            Produced prod;
            double mean, sd;
        };
        std::vector<Out> outs;
        for (Backend b : backends) {
            if (b == Backend::simplified && general) {
                res.skipped.push_back("p=" + std::to_string(p) + " backend=simplified map=" + cfg.map +
                                      ": simplification not applicable to a general map");
                continue;
            }
            std::function<Produced()> fn;
            if (cfg.task == "gram") {
                const auto sig = SpaceSignature::uniform(parse_space(cfg.space), pr);
                const int L = cfg.rule.value_or(default_rule_order(sig));
                if (b == Backend::conventional) {
                    auto r3 = std::make_shared<Rule3D>(tensor_rule(L));
                    fn = [=, &map] {
                        auto g = gram_conventional(sig, map, *r3);
                        return Produced{{std::move(g.matrix)}, g.counters};
                    };
                }
                else if (b == Backend::tensorized) {
                    auto r1 = std::make_shared<Rule1D>(gauss_rule(L));
                    fn = [=, &map] {
                        auto g = gram_tensorized(sig, map, *r1);
                        return Produced{{std::move(g.matrix)}, g.counters};
                    };
                }
                else {
                    auto r1 = std::make_shared<Rule1D>(gauss_rule(L));
                    auto ft = std::make_shared<FTable>(std::max(default_pmax, pr + 1));
                    fn = [=, &map] {
                        auto g = gram_simplified(sig, map, *ft, *r1);
                        return Produced{{std::move(g.matrix)}, g.counters};
                    };
                }
            }
            else if (cfg.space == "poisson") {
                fn = [=, &map] {
                    auto s = poisson_primal_element(
                        p0, dp, [](const Vec3&) { return 1.0; }, [](const Vec3&) { return 1.0; }, map, b);
                    return Produced{{std::move(s.G), std::move(s.B), MatrixXd(s.l)}, s.counters};
                };
            }
            else if (cfg.space == "maxwell") {
                fn = [=, &map] {
                    auto g = maxwell_gram(pr, map, b);
                    return Produced{{std::move(g.matrix)}, g.counters};
                };
            }
            else if (cfg.space == "acoustics") {
                UltraweakAcousticsProblem prob;
                prob.f = [](const Vec3&) { return 1.0; };
                fn = [=, &map] {
                    auto s = acoustics_ultraweak_element(prob, p0, dp, map, b);
                    return Produced{{std::move(s.G), std::move(s.B), MatrixXd(s.l)}, s.counters};
                };
            }
            else
                throw std::invalid_argument("unknown dpg problem '" + cfg.space + "'");

            Out o{b, fn(), 0.0, 0.0};
            std::vector<double> t(runs);
            for (int k = 0; k < runs; ++k) {
                const auto t0 = std::chrono::steady_clock::now();
                volatile auto keep = fn().parts.size();
                (void)keep;
                t[k] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            }
            double sum = 0.0;
            for (double x : t)
                sum += x;
            o.mean = sum / runs;
            double ss = 0.0;
            for (double x : t)
                ss += (x - o.mean) * (x - o.mean);
            o.sd = runs > 1 ? std::sqrt(ss / (runs - 1)) : 0.0;
            outs.push_back(std::move(o));
        }
        const Out* ref = nullptr;
        for (const auto& o : outs)
            if (o.b == Backend::conventional)
                ref = &o;
        if (!ref && !outs.empty())
            ref = &outs.front();
        for (const auto& o : outs) {
            BenchRecord r;
            r.p0 = p0;
            r.dp = dp;
            r.pr = pr;
            r.space = cfg.space;
            r.backend = to_string(o.b);
            r.map = cfg.map;
            r.runs = runs;
            r.mean_s = o.mean;
            r.std_s = o.sd;
            r.accum = o.prod.counters.accumulations;
            r.geom_calls = o.prod.counters.geometry_calls;
            if (outs.size() >= 2)
                r.maxdiff = max_abs_diff(o.prod, ref->prod);
            res.records.push_back(r);
        }
    }
    return res;
}

void write_csv(std::ostream& os, const std::vector<BenchRecord>& records)
{
    os << "p0,dp,pr,space,backend,map,runs,mean_s,std_s,accum,geom_calls,maxdiff\n";
    for (const auto& r : records) {
        std::string map = r.map;
        if (map.find_first_of(", \"") != std::string::npos)
            map = "\"" + map + "\"";
        os << r.p0 << ',' << r.dp << ',' << r.pr << ',' << r.space << ',' << r.backend << ',' << map << ','
           << r.runs << ',' << fmt_time(r.mean_s) << ',' << fmt_time(r.std_s) << ',' << r.accum << ','
           << r.geom_calls << ',' << (r.maxdiff ? fmt17(*r.maxdiff) : std::string()) << '\n';
    }
}

bool VerifyReport::all_passed() const
{
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

void print_report(std::ostream& os, const VerifyReport& rep)
{
    int npass = 0;
    for (const auto& c : rep.checks) {
        os << (c.passed ? "[PASS] " : "[FAIL] ") << c.name;
        if (!c.detail.empty())
            os << ": " << c.detail;
        os << '\n';
        npass += c.passed;
    }
    os << npass << "/" << rep.checks.size() << " checks passed\n";
}

namespace {

double rel_diff(const MatrixXd& a, const MatrixXd& b)
{
    const double scale = std::max(a.cwiseAbs().maxCoeff(), 1e-300);
    return (a - b).cwiseAbs().maxCoeff() / scale;
}

std::string sig_str(const SpaceSignature& s)
{
    std::ostringstream os;
    os << to_string(s.space) << "(" << s.p[0] << "," << s.p[1] << "," << s.p[2] << ")";
    return os.str();
}

} // namespace

VerifyReport verify(const VerifyConfig& cfg)
{
    if (cfg.level != "fast" && cfg.level != "full")
        throw std::invalid_argument("verify level must be fast or full");
    const bool full = cfg.level == "full";
    VerifyReport rep;
    auto run = [&](const std::string& name, const std::function<std::string(bool&)>& body) {
        CheckResult c;
        c.name = name;
        try {
            bool ok = true;
            c.detail = body(ok);
            c.passed = ok;
        }
        catch (const std::exception& e) {
            c.passed = false;
            c.detail = std::string("exception: ") + e.what();
        }
        rep.checks.push_back(c);
    };

    FTable ft(default_pmax);
    if (cfg.fault_ftable)
        ft.inject_fault(1, 1, 2, 2, -ft.entry(1, 1, 2, 2));

    run("ftable-oracle", [&](bool& ok) {
        const Rule1D r = gauss_rule(12);
        double worst = 0.0;
        for (int rr = 0; rr < 2; ++rr)
            for (int ss = 0; ss < 2; ++ss)
                for (int i = 0; i <= 10; ++i)
                    for (int j = 0; j <= 10; ++j) {
                        double q = 0.0;
                        for (int k = 0; k < r.order; ++k) {
                            const auto s = shape1_h1(11, r.nodes[k]);
                            const double a = rr ? s.dchi[i] : s.chi[i];
                            const double b = ss ? s.dchi[j] : s.chi[j];
                            q += a * b * r.weights[k];
                        }
                        worst = std::max(worst, std::abs(q - ft.entry(rr, ss, i, j)));
                    }
        ok = worst <= 1e-14;
        return "max deviation " + fmt17(worst);
    });

    run("legendre-properties", [&](bool& ok) {
        const Rule1D r = gauss_rule(12);
        double worst = 0.0;
        for (int i = 0; i <= 10; ++i)
            for (int j = 0; j <= 10; ++j) {
                double q = 0.0;
                for (int k = 0; k < r.order; ++k) {
                    const auto P = legendre_all(10, r.nodes[k]);
                    q += P.values[i] * P.values[j] * r.weights[k];
                }
                worst = std::max(worst, std::abs(q - (i == j ? 1.0 / (2 * i + 1) : 0.0)));
            }
        const auto one = legendre_all(10, 1.0);
        for (double v : one.values)
            worst = std::max(worst, std::abs(v - 1.0));
        ok = worst <= 1e-14;
        return "max deviation " + fmt17(worst);
    });

    run("l2-operation-counts", [&](bool& ok) {
        const int pmax = full ? 6 : 4;
        const auto id = ElementMap::identity();
        std::ostringstream os;
        for (int p = 2; p <= pmax; ++p) {
            const auto sig = SpaceSignature::uniform(Space::L2, p);
            const auto c = gram_conventional(sig, id, tensor_rule(p)).counters.accumulations;
            const auto t = gram_tensorized(sig, id, gauss_rule(p)).counters.accumulations;
            const std::int64_t ec = std::int64_t(std::pow(p, 6)) * (std::int64_t(std::pow(p, 3)) + 1) / 2;
            const std::int64_t h = std::int64_t(p) * (p + 1) / 2;
            const std::int64_t et = std::int64_t(p) * h * h * h;
            if (c != ec || t != et) {
                ok = false;
                os << "p=" << p << " conventional " << c << "/" << ec << " tensor " << t << "/" << et << "; ";
            }
        }
        return os.str();
    });

    std::vector<SpaceSignature> sigs;
    const int pu = full ? 6 : 3;
    for (Space s : {Space::L2, Space::H1, Space::Hdiv, Space::Hcurl}) {
        for (int p = 1; p <= pu; ++p)
            sigs.push_back(SpaceSignature::uniform(s, p));
        sigs.push_back({s, {1, 2, 3}});
        sigs.push_back({s, {2, 3, 4}});
    }
    for (const auto& mapname : preset_map_names()) {
        const ElementMap map = preset_map(mapname);
        const bool simp = classify(map) != MapClass::general;
        for (const auto& sig : sigs) {
            run("cross-backend " + sig_str(sig) + " " + mapname, [&](bool& ok) {
                const int Ld = default_rule_order(sig);
                const int L = cfg.rule.value_or(Ld);
                const auto conv = gram_conventional(sig, map, tensor_rule(L));
                const auto ts = gram_tensorized(sig, map, gauss_rule(L), LoopOrder::standard);
                const auto ta = gram_tensorized(sig, map, gauss_rule(L), LoopOrder::alternative);
                std::ostringstream os;
                const double dt = rel_diff(conv.matrix, ts.matrix);
                const double da = rel_diff(ts.matrix, ta.matrix);
                ok = dt <= 1e-12 && da <= 1e-12;
                os << "tensor " << fmt17(dt) << " alt " << fmt17(da);
                if (simp && L >= Ld) {
                    const auto sm = gram_simplified(sig, map, ft, gauss_rule(L));
                    const double ds = rel_diff(conv.matrix, sm.matrix);
                    ok = ok && ds <= 1e-12;
                    os << " simplified " << fmt17(ds);
                }
                if (!is_spd(conv.matrix)) {
                    ok = false;
                    os << " not SPD";
                }
                return os.str();
            });
        }
    }
    if (full) {
        run("cross-backend hcurl(7,7,7) trilinear", [&](bool& ok) {
            const auto sig = SpaceSignature::uniform(Space::Hcurl, 7);
            const auto map = preset_map("trilinear");
            const int L = cfg.rule.value_or(default_rule_order(sig));
            const double d = rel_diff(gram_conventional(sig, map, tensor_rule(L)).matrix,
                                      gram_tensorized(sig, map, gauss_rule(L)).matrix);
            ok = d <= 1e-12;
            return "tensor " + fmt17(d);
        });
    }

    const int p0max = full ? 3 : 2;
    for (const auto& mapname : {"identity", "trilinear"}) {
        const ElementMap map = preset_map(mapname);
        for (int p0 = 1; p0 <= p0max; ++p0)
            run("acoustics p0=" + std::to_string(p0) + " dp=2 " + mapname, [&](bool& ok) {
                UltraweakAcousticsProblem prob;
                prob.f = [](const Vec3& x) { return 1.0 + x[0] * x[1]; };
                const auto c = acoustics_ultraweak_element(prob, p0, 2, map, Backend::conventional);
                const auto t = acoustics_ultraweak_element(prob, p0, 2, map, Backend::tensorized);
                const double dg = rel_diff(c.G, t.G), db = rel_diff(c.B, t.B);
                ok = dg <= 1e-12 && db <= 1e-12 && is_spd(t.G);
                return "G " + fmt17(dg) + " B " + fmt17(db);
            });
    }

    run("poisson manufactured u=x1", [&](bool& ok) {
        std::ostringstream os;
        double worst = 0.0, res = 0.0;
        for (Backend b : {Backend::conventional, Backend::tensorized, Backend::simplified}) {
            const auto sys = poisson_primal_element(
                1, 2, [](const Vec3&) { return 1.0; }, [](const Vec3&) { return 0.0; }, ElementMap::identity(), b);
            const auto fixed = h1_boundary_dofs(1);
            Eigen::VectorXd vals(fixed.size());
            for (std::size_t k = 0; k < fixed.size(); ++k)
                vals[k] = (fixed[k] & 1) ? 1.0 : 0.0;
            const auto sol = solve_condensed(sys, fixed, vals);
            worst = std::max(worst, (sol.u - vals).cwiseAbs().maxCoeff());
            res = std::max(res, sol.free_residual);
        }
        ok = worst <= 1e-10 && res <= 1e-9;
        os << "nodal error " << fmt17(worst) << " residual " << fmt17(res);
        return os.str();
    });

    return rep;
}

} // namespace hexgram
