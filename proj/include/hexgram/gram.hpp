#pragma once

#include "hexgram/geometry.hpp"
#include "hexgram/poly1d.hpp"
#include "hexgram/quadrature.hpp"
#include "hexgram/spaces.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>

namespace hexgram {

enum class Backend { conventional, tensorized, simplified };
enum class LoopOrder { standard, alternative };

std::string to_string(Backend b);
Backend parse_backend(const std::string& s);

struct Counters {
    std::int64_t accumulations = 0;     // final accumulations into matrix entries
    std::int64_t aux_accumulations = 0; // partial sums of the auxiliary arrays
    std::int64_t geometry_calls = 0;
    std::int64_t shape1_calls = 0;
    std::int64_t shape3_calls = 0;
    std::int64_t guard_skips = 0;

    Counters& operator+=(const Counters& o);
};

struct GramResult {
    Eigen::MatrixXd matrix;
    Counters counters;
};

// mass_weight scales the L2-type term, deriv_weight the gradient/curl/divergence term.
struct GramOptions {
    double mass_weight = 1.0;
    double deriv_weight = 1.0;
};

// Largest order for L2, largest order + 1 otherwise.
int default_rule_order(const SpaceSignature& sig);

GramResult gram_conventional(const SpaceSignature& sig, const ElementMap& map, const Rule3D& rule,
                             const GramOptions& opt = {});
GramResult gram_tensorized(const SpaceSignature& sig, const ElementMap& map, const Rule1D& rule,
                           LoopOrder order = LoopOrder::standard, const GramOptions& opt = {});
// Constant-Jacobian maps use F-table products only; extrusion maps integrate (xi2,xi3) with rule.
GramResult gram_simplified(const SpaceSignature& sig, const ElementMap& map, const FTable& ftable,
                           const Rule1D& rule, const GramOptions& opt = {});

// Dispatch with the default rule unless rule_order is given.
GramResult gram(const SpaceSignature& sig, const ElementMap& map, Backend backend,
                std::optional<int> rule_order = std::nullopt, const GramOptions& opt = {});

GramResult gram_block(const SpaceSignature& sig, const ElementMap& map, Backend backend, int copies);

bool is_spd(const Eigen::MatrixXd& G);

} // namespace hexgram
