#pragma once

#include <span>
#include <string>
#include <vector>

#include "feop/assemble.hpp"
#include "feop/forcing.hpp"
#include "feop/network.hpp"
#include "feop/oracle.hpp"

namespace feop {

struct OptimizerConfig {
    enum class Kind { Adam, Lbfgs };
    Kind kind = Kind::Adam;
    int epochs = 20000;
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
    double stop_tol = 0.0;  // stop early once the loss drops below this
    int lbfgs_history = 10;
    double lbfgs_tol = 1e-15;
    int lbfgs_max_backtracks = 25;
};

struct TrainState {
    NetworkConfig config;
    NetworkParams params;
    std::vector<double> loss_history;  // one entry per epoch
    int epoch = 0;
    double final_loss = 0.0;
};

/// Network input for one sample: the raw omega vector, or the input field
/// sampled at the interior DOF coordinates.
std::vector<double> encode_input(const NetworkConfig& config, const ForcingSample& sample,
                                 const DofMap& dofmap, const AssembledSystem& sys);

/// All dataset inputs stacked row-wise.
Matrix encode_inputs(const NetworkConfig& config, const Dataset& ds, const DofMap& dofmap,
                     const AssembledSystem& sys);

/// Mean squared residual over the batch:
///   linear:  (1/M) sum_m |A a_m - F_m|^2
///   Burgers: (1/M) sum_m |A a_m - q(a_m) - F_m|^2, q_i = 1/2 a^T T_i a.
/// Rows of alpha_hat are the per-sample coefficient predictions.
double residual_loss(const Matrix& alpha_hat, const AssembledSystem& sys,
                     std::span<const LoadVector> loads);

/// Loss plus its gradient in the predictions: dL/da_m = (2/M) J_m^T r_m.
double residual_loss_grad(const Matrix& alpha_hat, const AssembledSystem& sys,
                          std::span<const LoadVector> loads, Matrix& dalpha);

/// Per-sample-system variants (variable-coefficient input mode).
double residual_loss(const Matrix& alpha_hat, const Dataset& ds);
double residual_loss_grad(const Matrix& alpha_hat, const Dataset& ds, Matrix& dalpha);

/// Full loss gradient in the network parameters at the given inputs.
double loss_gradient(const NetworkConfig& config, const NetworkParams& params,
                     const Matrix& inputs, const AssembledSystem& sys,
                     std::span<const LoadVector> loads, std::vector<double>& grad);

/// Direct per-sample minimizer of |A a - F|^2 via the normal equations
/// A^T A a = A^T F; the algebraic route the network is trained to match.
std::vector<double> minimize_sample_loss(const AssembledSystem& sys, const LoadVector& load);

TrainState train(const NetworkConfig& config, const AssembledSystem& sys, const Dataset& ds,
                 const DofMap& dofmap, const OptimizerConfig& opt);

/// Full coefficient field for one input: interior DOFs from the forward
/// pass, eliminated Dirichlet DOFs exactly zero, plus the trailing corrector
/// weight when the system is enriched.
struct PredictedField {
    std::vector<double> coeffs;  // over all DOFs of the dofmap
    double corrector_weight = 0.0;
    bool enriched = false;
};

PredictedField predict_solution(const NetworkConfig& config, const NetworkParams& params,
                                const AssembledSystem& sys, const DofMap& dofmap,
                                const std::vector<double>& encoded_input);

/// Text checkpoint: config snapshot, layer shapes, flat parameters (hex
/// floats, bit-exact), epoch. Loading rejects shape mismatches.
void save_checkpoint(const TrainState& state, const std::string& path);
TrainState load_checkpoint(const std::string& path);

}  // namespace feop
