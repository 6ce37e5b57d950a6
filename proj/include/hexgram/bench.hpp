#pragma once

#include "hexgram/gram.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace hexgram {

struct BenchConfig {
    std::string task = "gram";   // gram | dpg-all
    std::string space = "h1";    // gram: h1 | hcurl | hdiv | l2; dpg-all: poisson | maxwell | acoustics
    std::vector<Backend> backends{Backend::conventional, Backend::tensorized, Backend::simplified};
    int p_first = 2;             // p_r for gram, p0 for dpg-all
    int p_last = 7;
    int dp = 2;
    std::string map = "identity"; // preset name, or a map line such as "diagonal 2 1 1"
    int runs = 0;                 // 0 selects the default for the task
    std::optional<int> rule;
};

struct BenchRecord {
    int p0 = 0, dp = 0, pr = 0;
    std::string space, backend, map;
    int runs = 0;
    double mean_s = 0.0, std_s = 0.0;
    std::int64_t accum = 0, geom_calls = 0;
    std::optional<double> maxdiff;
};

struct BenchResult {
    std::vector<BenchRecord> records;
    std::vector<std::string> skipped;
};

int default_runs(const BenchConfig& cfg);
BenchResult run_bench(const BenchConfig& cfg);
void write_csv(std::ostream& os, const std::vector<BenchRecord>& records);
ElementMap resolve_map(const std::string& spec);

struct VerifyConfig {
    std::string level = "fast"; // fast | full
    std::optional<int> rule;
    bool fault_ftable = false;  // flips F^{11}_{22} before the suite runs
};

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct VerifyReport {
    std::vector<CheckResult> checks;
    bool all_passed() const;
};

VerifyReport verify(const VerifyConfig& cfg);
void print_report(std::ostream& os, const VerifyReport& rep);

} // namespace hexgram
