#pragma once

#include "hexgram/gram.hpp"

#include <cstdint>
#include <vector>

namespace hexgram::detail {

enum class Weight : std::uint8_t { one, det, inv_det, D_det, C_inv_det, J_inv_det, Jinv };

// 1D factor chi^<deriv>_{i+shift}.
struct Factor {
    int deriv = 0;
    int shift = 0;
    bool operator==(const Factor&) const = default;
};

struct Term {
    int row_comp = 0;
    int col_comp = 0;
    std::array<Factor, 3> row{};
    std::array<Factor, 3> col{};
    Weight weight = Weight::one;
    int wr = 0, wc = 0;
    double scale = 1.0;
    int out = 0;
};

enum class Symmetry {
    none,        // rectangular, every entry
    lower,       // all (i3,j3), keep I >= J, mirror
    lower_i3,    // i3 >= j3, keep I >= J, mirror (scalar lexicographic ordering)
    full_tensor, // i_d >= j_d in every direction, expand swaps, mirror
};

struct TermSet {
    SpaceLayout rows;
    SpaceLayout cols;
    std::vector<Term> terms;
    Symmetry sym = Symmetry::lower;
    int nout = 1;
};

double weight_value(const Term& t, const JacobianData& g);

TermSet gram_terms(const SpaceSignature& sig, const GramOptions& opt);

std::vector<Eigen::MatrixXd> run_tensorized(const TermSet& ts, const ElementMap& map, const Rule1D& rule,
                                            LoopOrder order, Counters& cnt);
std::vector<Eigen::MatrixXd> run_simplified(const TermSet& ts, const ElementMap& map, const FTable& ft,
                                            const Rule1D& rule, Counters& cnt);

} // namespace hexgram::detail
