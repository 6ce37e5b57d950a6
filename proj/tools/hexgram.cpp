#include "hexgram/bench.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace hexgram;

namespace {

std::pair<int, int> parse_range(const std::string& s)
{
    const auto dots = s.find("..");
    if (dots == std::string::npos) {
        const int p = std::stoi(s);
        return {p, p};
    }
    return {std::stoi(s.substr(0, dots)), std::stoi(s.substr(dots + 2))};
}

std::vector<Backend> parse_backends(const std::string& s)
{
    std::vector<Backend> out;
    std::stringstream ss(s);
    for (std::string tok; std::getline(ss, tok, ',');)
        if (!tok.empty())
            out.push_back(parse_backend(tok));
    return out;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Hexahedral Gram matrix backends: benchmarks and verification"};
    app.require_subcommand(1);

    auto* bench = app.add_subcommand("bench", "time Gram or DPG element assembly and write CSV");
    std::string task = "gram", space = "h1", backends = "conventional,tensor,simplified", prange = "2..7";
    std::string map = "identity", map_file, out;
    int dp = 2, runs = 0, rule = 0;
    bench->add_option("--task", task, "gram | dpg-all")->check(CLI::IsMember({"gram", "dpg-all"}));
    bench->add_option("--space,--problem", space, "h1 | hcurl | hdiv | l2, or poisson | maxwell | acoustics");
    bench->add_option("--backend", backends, "comma-separated subset of conventional,tensor,simplified");
    bench->add_option("--p", prange, "order range, e.g. 2..7 (p_r for gram, p0 for dpg-all)");
    bench->add_option("--dp", dp, "enrichment order")->check(CLI::NonNegativeNumber);
    bench->add_option("--map", map, "map preset (identity, diagonal, affine, extrusion, trilinear) or map line");
    bench->add_option("--map-file", map_file, "map config file; the first map line is used");
    bench->add_option("--runs", runs, "timed runs (default 50 for h1/l2 Grams, 20 otherwise)")->check(CLI::PositiveNumber);
    bench->add_option("--rule", rule, "override quadrature order L")->check(CLI::Range(1, 32));
    bench->add_option("--out", out, "CSV output path (stdout if omitted)");

    auto* ver = app.add_subcommand("verify", "run the invariant suite");
    std::string level = "fast";
    int vrule = 0;
    bool fault = false;
    ver->add_option("--level", level, "fast | full")->check(CLI::IsMember({"fast", "full"}));
    ver->add_option("--rule", vrule, "override quadrature order L")->check(CLI::Range(1, 32));
    ver->add_flag("--inject-ftable-fault", fault, "flip one F-table entry before running");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*bench) {
            BenchConfig cfg;
            cfg.task = task;
            cfg.space = space;
            cfg.backends = parse_backends(backends);
            std::tie(cfg.p_first, cfg.p_last) = parse_range(prange);
            cfg.dp = dp;
            cfg.map = map;
            if (!map_file.empty()) {
                std::ifstream in(map_file);
                if (!in)
                    throw std::runtime_error("cannot open " + map_file);
                for (std::string line; std::getline(in, line);) {
                    const auto body = line.substr(0, line.find('#'));
                    if (body.find_first_not_of(" \t\r") != std::string::npos) {
                        cfg.map = body;
                        break;
                    }
                }
            }
            cfg.runs = runs;
            if (rule > 0)
                cfg.rule = rule;
            const auto res = run_bench(cfg);
            for (const auto& s : res.skipped)
                std::cerr << "skipped: " << s << '\n';
            if (out.empty())
                write_csv(std::cout, res.records);
            else {
                std::ofstream os(out);
                if (!os)
                    throw std::runtime_error("cannot write " + out);
                write_csv(os, res.records);
            }
            return 0;
        }
        VerifyConfig cfg;
        cfg.level = level;
        if (vrule > 0)
            cfg.rule = vrule;
        cfg.fault_ftable = fault;
        const auto rep = verify(cfg);
        print_report(std::cout, rep);
        return rep.all_passed() ? 0 : 1;
    }
    catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
