#include "feop/network.hpp"

#include <cmath>
#include <stdexcept>

#include "feop/kernels.hpp"
#include "feop/rng.hpp"

namespace feop {

std::vector<int> NetworkConfig::layer_sizes() const {
    std::vector<int> sizes;
    sizes.push_back(input_dim);
    for (int h : hidden) sizes.push_back(h);
    sizes.push_back(output_dim);
    return sizes;
}

void NetworkConfig::validate() const {
    if (input_dim < 1 || output_dim < 1) {
        throw std::invalid_argument("NetworkConfig: input/output dims must be >= 1");
    }
    for (int h : hidden) {
        if (h < 1) throw std::invalid_argument("NetworkConfig: hidden widths must be >= 1");
    }
}

NetworkParams NetworkParams::zeros(const std::vector<int>& sizes) {
    NetworkParams p;
    p.sizes = sizes;
    std::size_t total = 0;
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        p.w_off.push_back(total);
        total += static_cast<std::size_t>(sizes[l + 1]) * sizes[l];
        p.b_off.push_back(total);
        total += sizes[l + 1];
    }
    p.theta.assign(total, 0.0);
    return p;
}

NetworkParams init_params(const NetworkConfig& config) {
    config.validate();
    NetworkParams p = NetworkParams::zeros(config.layer_sizes());
    Rng rng(config.init_seed);
    for (int l = 0; l < p.layer_count(); ++l) {
        const double s = 1.0 / std::sqrt(static_cast<double>(p.fan_in(l)));
        double* w = p.w(l);
        const std::size_t nw = static_cast<std::size_t>(p.fan_out(l)) * p.fan_in(l);
        for (std::size_t k = 0; k < nw; ++k) w[k] = rng.uniform(-s, s);
        double* b = p.b(l);
        for (int k = 0; k < p.fan_out(l); ++k) b[k] = rng.uniform(-s, s);
    }
    return p;
}

namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void apply_activation(Activation act, const double* z, double* a, std::size_t n) {
    if (act == Activation::Tanh) {
        for (std::size_t i = 0; i < n; ++i) a[i] = std::tanh(z[i]);
    } else {
        for (std::size_t i = 0; i < n; ++i) a[i] = z[i] * sigmoid(z[i]);
    }
}

void activation_derivative(Activation act, const double* z, double* d, std::size_t n) {
    if (act == Activation::Tanh) {
        for (std::size_t i = 0; i < n; ++i) {
            const double t = std::tanh(z[i]);
            d[i] = 1.0 - t * t;
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            const double s = sigmoid(z[i]);
            d[i] = s * (1.0 + z[i] * (1.0 - s));
        }
    }
}

// Z = A W^T + b  (A: M x in, W: out x in, Z: M x out)
void linear_layer(const Matrix& a, const double* w, const double* b, int fan_in, int fan_out,
                  Matrix& z) {
    if (z.rows != a.rows || z.cols != static_cast<std::size_t>(fan_out)) {
        z = Matrix(a.rows, fan_out);
    }
    for (std::size_t m = 0; m < a.rows; ++m) {
        double* zm = z.row(m);
        const double* am = a.row(m);
        for (int o = 0; o < fan_out; ++o) {
            zm[o] = b[o] + kernels::dot(w + static_cast<std::size_t>(o) * fan_in, am, fan_in);
        }
    }
}

}  // namespace

const Matrix& forward_batch(const NetworkConfig& config, const NetworkParams& params,
                            const Matrix& inputs, ForwardCache& cache) {
    const int layers = params.layer_count();
    if (inputs.cols != static_cast<std::size_t>(params.sizes.front())) {
        throw std::invalid_argument("forward_batch: input width mismatch");
    }
    cache.pre.resize(layers);
    cache.activations.resize(layers + 1);
    cache.activations[0] = inputs;
    for (int l = 0; l < layers; ++l) {
        linear_layer(cache.activations[l], params.w(l), params.b(l), params.fan_in(l),
                     params.fan_out(l), cache.pre[l]);
        Matrix& out = cache.activations[l + 1];
        if (out.rows != cache.pre[l].rows || out.cols != cache.pre[l].cols) {
            out = Matrix(cache.pre[l].rows, cache.pre[l].cols);
        }
        const bool last = l == layers - 1;
        if (last && config.final_activation == FinalActivation::Linear) {
            out.data = cache.pre[l].data;
        } else if (last) {
            apply_activation(Activation::Tanh, cache.pre[l].data.data(), out.data.data(),
                             out.data.size());
        } else {
            apply_activation(config.activation, cache.pre[l].data.data(), out.data.data(),
                             out.data.size());
        }
    }
    return cache.activations.back();
}

std::vector<double> forward(const NetworkConfig& config, const NetworkParams& params,
                            const std::vector<double>& input) {
    Matrix x(1, input.size());
    x.data = input;
    ForwardCache cache;
    const Matrix& y = forward_batch(config, params, x, cache);
    return y.data;
}

void backward_batch(const NetworkConfig& config, const NetworkParams& params,
                    const ForwardCache& cache, const Matrix& dLdY,
                    std::vector<double>& grad) {
    const int layers = params.layer_count();
    grad.assign(params.theta.size(), 0.0);
    Matrix delta = dLdY;  // becomes dL/dZ_l in the loop

    for (int l = layers - 1; l >= 0; --l) {
        const bool last = l == layers - 1;
        if (!(last && config.final_activation == FinalActivation::Linear)) {
            const Activation act = last ? Activation::Tanh : config.activation;
            std::vector<double> dact(delta.data.size());
            activation_derivative(act, cache.pre[l].data.data(), dact.data(), dact.size());
            for (std::size_t i = 0; i < delta.data.size(); ++i) delta.data[i] *= dact[i];
        }
        // dW_l = delta^T A_{l-1}; db_l = column sums of delta.
        const Matrix& a_prev = cache.activations[l];
        double* gw = grad.data() + params.w_off[l];
        double* gb = grad.data() + params.b_off[l];
        const int fin = params.fan_in(l);
        const int fout = params.fan_out(l);
        for (std::size_t m = 0; m < delta.rows; ++m) {
            const double* dm = delta.row(m);
            const double* am = a_prev.row(m);
            for (int o = 0; o < fout; ++o) {
                if (dm[o] != 0.0) {
                    kernels::axpy(dm[o], am, gw + static_cast<std::size_t>(o) * fin, fin);
                }
                gb[o] += dm[o];
            }
        }
        if (l > 0) {
            // dL/dA_{l-1} = delta W_l
            Matrix next(delta.rows, fin);
            for (std::size_t m = 0; m < delta.rows; ++m) {
                const double* dm = delta.row(m);
                double* nm = next.row(m);
                for (int o = 0; o < fout; ++o) {
                    if (dm[o] != 0.0) {
                        kernels::axpy(dm[o], params.w(l) + static_cast<std::size_t>(o) * fin, nm,
                                      fin);
                    }
                }
            }
            delta = std::move(next);
        }
    }
}

}  // namespace feop
