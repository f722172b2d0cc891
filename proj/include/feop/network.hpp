#pragma once

#include <cstdint>
#include <vector>

#include "feop/linalg.hpp"

namespace feop {

enum class Activation { Tanh, Swish };
enum class FinalActivation { Linear, Bounded };
enum class InputEncoding { OmegaVector, FAtDofs };

struct NetworkConfig {
    InputEncoding input_encoding = InputEncoding::FAtDofs;
    std::vector<int> hidden = {128, 128, 128};
    Activation activation = Activation::Tanh;
    FinalActivation final_activation = FinalActivation::Linear;
    int input_dim = 0;
    int output_dim = 0;
    std::uint64_t init_seed = 1;
    // Encoded inputs are multiplied by this (set from the forcing family's
    // amplitude bound so sampled values land in the first activation's
    // linear range).
    double input_scale = 1.0;

    std::vector<int> layer_sizes() const;
    void validate() const;
};

/// Flat parameter vector laid out [W0 | b0 | W1 | b1 | ...] with each W
/// row-major (fan_out x fan_in); the optimizers and the checkpoint format
/// operate on the flat view.
struct NetworkParams {
    std::vector<int> sizes;
    std::vector<double> theta;
    std::vector<std::size_t> w_off;
    std::vector<std::size_t> b_off;

    int layer_count() const { return static_cast<int>(sizes.size()) - 1; }
    int fan_in(int l) const { return sizes[l]; }
    int fan_out(int l) const { return sizes[l + 1]; }
    double* w(int l) { return theta.data() + w_off[l]; }
    const double* w(int l) const { return theta.data() + w_off[l]; }
    double* b(int l) { return theta.data() + b_off[l]; }
    const double* b(int l) const { return theta.data() + b_off[l]; }

    static NetworkParams zeros(const std::vector<int>& sizes);
};

/// Uniform init scaled by 1/sqrt(fan_in), drawn from the seeded portable
/// generator.
NetworkParams init_params(const NetworkConfig& config);

/// Single-input forward pass.
std::vector<double> forward(const NetworkConfig& config, const NetworkParams& params,
                            const std::vector<double>& input);

/// Batched forward pass keeping pre-activations for backprop.
/// activations[0] = X; activations[l+1] = act(Z_l).
struct ForwardCache {
    std::vector<Matrix> pre;          // Z_l, one per layer
    std::vector<Matrix> activations;  // layer_count + 1 entries
};

const Matrix& forward_batch(const NetworkConfig& config, const NetworkParams& params,
                            const Matrix& inputs, ForwardCache& cache);

/// Reverse-mode pass: dLdY is the loss gradient at the network output
/// (M x output_dim); writes the flat parameter gradient (same layout as
/// theta) into grad.
void backward_batch(const NetworkConfig& config, const NetworkParams& params,
                    const ForwardCache& cache, const Matrix& dLdY,
                    std::vector<double>& grad);

}  // namespace feop
