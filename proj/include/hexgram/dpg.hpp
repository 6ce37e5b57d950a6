#pragma once

#include "hexgram/gram.hpp"

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace hexgram {

using ScalarField = std::function<double(const Vec3&)>;

struct DpgOrders {
    int p0 = 1;
    int dp = 1;
    int pr = 2;
};

// Complex systems are stored in real block form: matrices [[Re, -Im],[Im, Re]], vectors [Re; Im].
// m and n count complex unknowns, so matrices are 2m x 2n in that case.
struct DpgElementSystem {
    Eigen::MatrixXd G;
    Eigen::MatrixXd B;
    Eigen::VectorXd l;
    int m = 0;
    int n = 0;
    bool complex = false;
    DpgOrders orders;
    Counters counters;
};

struct CondensedSystem {
    Eigen::MatrixXd K; // B^T G^-1 B
    Eigen::VectorXd f; // B^T G^-1 l
};

DpgOrders make_orders(int p0, int dp);

// Trial and test spaces are H1 of orders p0 and p0+dp; B and l by conventional quadrature with L = pr + 1.
DpgElementSystem poisson_primal_element(int p0, int dp, const ScalarField& k, const ScalarField& r,
                                        const ElementMap& map, Backend gram_backend = Backend::tensorized);

GramResult maxwell_gram(int pr, const ElementMap& map, Backend backend);

enum class LoadPairing { velocity, pressure };

struct UltraweakAcousticsProblem {
    double omega = 1.0;
    double alpha = 1.0;
    ScalarField f = [](const Vec3&) { return 0.0; };
    // velocity: l = (f, v . (1,1,1)); pressure: l = (f, q)
    LoadPairing pairing = LoadPairing::velocity;
};

// Test space W^pr x V^pr (q first), trial space Y^p0 x (Y^p0)^3 (p first).
// conventional assembles everything by 3D quadrature; otherwise G uses the chosen Gram backend and
// B is sum-factorized.
DpgElementSystem acoustics_ultraweak_element(const UltraweakAcousticsProblem& prob, int p0, int dp,
                                             const ElementMap& map, Backend backend);

// Real block form of the adjoint graph Gram over W^pr x V^pr.
GramResult adjoint_graph_gram(int pr, double omega, double alpha, const ElementMap& map, Backend backend,
                              bool include_mixed = true);

// Mixed block X_ik = int -(div v_i) q_k + v_i . grad q_k over the master cube (rows V^pr, columns W^pr).
Eigen::MatrixXd adjoint_mixed_block(int pr, Backend backend, Counters* cnt = nullptr);

CondensedSystem condense(const DpgElementSystem& sys);

struct ConstrainedSolve {
    Eigen::VectorXd u;
    Eigen::VectorXd s;        // G^-1 (B u - l)
    double free_residual = 0; // max |B^T s| over unconstrained rows
};

ConstrainedSolve solve_condensed(const DpgElementSystem& sys, const std::vector<int>& fixed,
                                 const Eigen::VectorXd& fixed_values);

// H1 basis functions with some index below 2 (non-bubbles).
std::vector<int> h1_boundary_dofs(int p);

} // namespace hexgram
