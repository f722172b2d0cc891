#include "feop/opnet.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <deque>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "feop/error.hpp"
#include "feop/kernels.hpp"

namespace feop {

std::vector<double> encode_input(const NetworkConfig& config, const ForcingSample& sample,
                                 const DofMap& dofmap, const AssembledSystem& sys) {
    if (config.input_encoding == InputEncoding::OmegaVector) {
        std::vector<double> omega = sample.omega;
        for (double& v : omega) v *= config.input_scale;
        return omega;
    }
    std::vector<double> values;
    values.reserve(sys.row_dofs.size());
    for (int dof : sys.row_dofs) {
        const auto& p = dofmap.dof_coords[dof];
        values.push_back(config.input_scale * eval_forcing(sample, p[0], p[1]));
    }
    return values;
}

Matrix encode_inputs(const NetworkConfig& config, const Dataset& ds, const DofMap& dofmap,
                     const AssembledSystem& sys) {
    const int m = ds.size();
    if (m == 0) throw std::invalid_argument("encode_inputs: empty dataset");
    std::vector<double> first = encode_input(config, ds.samples[0], dofmap, sys);
    Matrix x(m, first.size());
    std::copy(first.begin(), first.end(), x.row(0));
    for (int i = 1; i < m; ++i) {
        const std::vector<double> v = encode_input(config, ds.samples[i], dofmap, sys);
        if (v.size() != x.cols) throw std::invalid_argument("encode_inputs: ragged inputs");
        std::copy(v.begin(), v.end(), x.row(i));
    }
    if (static_cast<int>(x.cols) != config.input_dim) {
        throw std::invalid_argument("encode_inputs: encoding width " + std::to_string(x.cols) +
                                    " does not match config.input_dim " +
                                    std::to_string(config.input_dim));
    }
    return x;
}

namespace {

// r = A a - q(a) - F for one sample; returns |r|^2.
double sample_residual(const AssembledSystem& sys, const double* alpha, const LoadVector& load,
                       std::vector<double>& r) {
    const int n = sys.n();
    r.resize(n);
    sys.A.matvec(alpha, r.data());
    if (sys.has_tensor) sys.tensor.add_quadratic(alpha, r.data(), -1.0);
    for (int i = 0; i < n; ++i) r[i] -= load.f[i];
    return kernels::nrm2_sq(r.data(), n);
}

// dalpha_row = scale * J^T r with J = A - C(alpha).
void sample_grad(const AssembledSystem& sys, const double* alpha, const std::vector<double>& r,
                 double scale, double* dalpha_row) {
    const int n = sys.n();
    std::vector<double> jt_r(n);
    sys.A.matvec_transposed(r.data(), jt_r.data());
    if (sys.has_tensor) {
        const BurgersTensor& t = sys.tensor;
        for (int i = 0; i < t.n; ++i) {
            const double ri = r[i];
            if (ri == 0.0) continue;
            for (int p = t.row_ptr[i]; p < t.row_ptr[i + 1]; ++p) {
                jt_r[t.kk[p]] -= t.val[p] * alpha[t.jj[p]] * ri;
            }
        }
    }
    for (int i = 0; i < n; ++i) dalpha_row[i] = scale * jt_r[i];
}

void check_batch(const Matrix& alpha_hat, const AssembledSystem& sys, std::size_t n_loads) {
    if (alpha_hat.rows != n_loads) {
        throw std::invalid_argument("residual_loss: batch/load count mismatch");
    }
    if (alpha_hat.cols != static_cast<std::size_t>(sys.n())) {
        throw std::invalid_argument("residual_loss: prediction width mismatch");
    }
}

}  // namespace

double residual_loss(const Matrix& alpha_hat, const AssembledSystem& sys,
                     std::span<const LoadVector> loads) {
    check_batch(alpha_hat, sys, loads.size());
    double acc = 0.0;
    std::vector<double> r;
    for (std::size_t m = 0; m < loads.size(); ++m) {
        acc += sample_residual(sys, alpha_hat.row(m), loads[m], r);
    }
    return acc / static_cast<double>(loads.size());
}

double residual_loss_grad(const Matrix& alpha_hat, const AssembledSystem& sys,
                          std::span<const LoadVector> loads, Matrix& dalpha) {
    check_batch(alpha_hat, sys, loads.size());
    if (dalpha.rows != alpha_hat.rows || dalpha.cols != alpha_hat.cols) {
        dalpha = Matrix(alpha_hat.rows, alpha_hat.cols);
    }
    const double scale = 2.0 / static_cast<double>(loads.size());
    double acc = 0.0;
    std::vector<double> r;
    for (std::size_t m = 0; m < loads.size(); ++m) {
        acc += sample_residual(sys, alpha_hat.row(m), loads[m], r);
        sample_grad(sys, alpha_hat.row(m), r, scale, dalpha.row(m));
    }
    return acc / static_cast<double>(loads.size());
}

double residual_loss(const Matrix& alpha_hat, const Dataset& ds) {
    if (!ds.per_sample_systems()) {
        throw std::invalid_argument("residual_loss: dataset has no per-sample systems");
    }
    double acc = 0.0;
    std::vector<double> r;
    for (int m = 0; m < ds.size(); ++m) {
        acc += sample_residual(ds.systems[m], alpha_hat.row(m), ds.loads[m], r);
    }
    return acc / static_cast<double>(ds.size());
}

double residual_loss_grad(const Matrix& alpha_hat, const Dataset& ds, Matrix& dalpha) {
    if (!ds.per_sample_systems()) {
        throw std::invalid_argument("residual_loss_grad: dataset has no per-sample systems");
    }
    if (dalpha.rows != alpha_hat.rows || dalpha.cols != alpha_hat.cols) {
        dalpha = Matrix(alpha_hat.rows, alpha_hat.cols);
    }
    const double scale = 2.0 / static_cast<double>(ds.size());
    double acc = 0.0;
    std::vector<double> r;
    for (int m = 0; m < ds.size(); ++m) {
        acc += sample_residual(ds.systems[m], alpha_hat.row(m), ds.loads[m], r);
        sample_grad(ds.systems[m], alpha_hat.row(m), r, scale, dalpha.row(m));
    }
    return acc / static_cast<double>(ds.size());
}

double loss_gradient(const NetworkConfig& config, const NetworkParams& params,
                     const Matrix& inputs, const AssembledSystem& sys,
                     std::span<const LoadVector> loads, std::vector<double>& grad) {
    ForwardCache cache;
    const Matrix& y = forward_batch(config, params, inputs, cache);
    Matrix dy;
    const double loss = residual_loss_grad(y, sys, loads, dy);
    if (!std::isfinite(loss)) throw NumericError("loss_gradient: non-finite loss");
    backward_batch(config, params, cache, dy, grad);
    for (double g : grad) {
        if (!std::isfinite(g)) throw NumericError("loss_gradient: non-finite gradient entry");
    }
    return loss;
}

std::vector<double> minimize_sample_loss(const AssembledSystem& sys, const LoadVector& load) {
    // Normal equations A^T A x = A^T F, solved by dense LU.
    const int n = sys.n();
    const Matrix a = sys.A.to_dense();
    Matrix ata(n, n);
    matmul_atb(a, a, ata);
    std::vector<double> atf = sys.A.matvec_transposed(load.f);
    const DenseLu lu = lu_factor(std::move(ata));
    return lu_solve(lu, atf);
}

namespace {

struct BatchObjective {
    const NetworkConfig& config;
    const AssembledSystem& sys;
    const Dataset& ds;
    const Matrix& inputs;

    double loss_only(const NetworkParams& params) const {
        ForwardCache cache;
        const Matrix& y = forward_batch(config, params, inputs, cache);
        return ds.per_sample_systems()
                   ? residual_loss(y, ds)
                   : residual_loss(y, sys, std::span<const LoadVector>(ds.loads));
    }

    double loss_and_grad(const NetworkParams& params, std::vector<double>& grad) const {
        ForwardCache cache;
        const Matrix& y = forward_batch(config, params, inputs, cache);
        Matrix dy;
        double loss;
        if (ds.per_sample_systems()) {
            loss = residual_loss_grad(y, ds, dy);
        } else {
            loss = residual_loss_grad(y, sys, std::span<const LoadVector>(ds.loads), dy);
        }
        backward_batch(config, params, cache, dy, grad);
        return loss;
    }
};

void abort_on_nan(double loss, const Matrix& y, int epoch) {
    if (std::isfinite(loss)) return;
    int bad = -1;
    for (std::size_t m = 0; m < y.rows && bad < 0; ++m) {
        for (std::size_t j = 0; j < y.cols; ++j) {
            if (!std::isfinite(y(m, j))) {
                bad = static_cast<int>(m);
                break;
            }
        }
    }
    throw NumericError("train: non-finite loss at epoch " + std::to_string(epoch) +
                       ", first bad sample " + std::to_string(bad));
}

TrainState train_adam(const NetworkConfig& config, const AssembledSystem& sys,
                      const Dataset& ds, const Matrix& inputs, const OptimizerConfig& opt) {
    TrainState state;
    state.config = config;
    state.params = init_params(config);
    const std::size_t n = state.params.theta.size();
    std::vector<double> m(n, 0.0), v(n, 0.0), grad(n, 0.0);
    std::vector<double> best_theta = state.params.theta;
    double best_loss = std::numeric_limits<double>::infinity();

    ForwardCache cache;
    Matrix dy;
    for (int epoch = 0; epoch < opt.epochs; ++epoch) {
        const Matrix& y = forward_batch(config, state.params, inputs, cache);
        double loss;
        if (ds.per_sample_systems()) {
            loss = residual_loss_grad(y, ds, dy);
        } else {
            loss = residual_loss_grad(y, sys, std::span<const LoadVector>(ds.loads), dy);
        }
        abort_on_nan(loss, y, epoch);
        state.loss_history.push_back(loss);
        if (loss < best_loss) {
            best_loss = loss;
            best_theta = state.params.theta;
        }
        if (loss < opt.stop_tol) break;

        backward_batch(config, state.params, cache, dy, grad);
        const double t = static_cast<double>(epoch + 1);
        const double bc1 = 1.0 - std::pow(opt.beta1, t);
        const double bc2 = 1.0 - std::pow(opt.beta2, t);
        double* theta = state.params.theta.data();
        for (std::size_t i = 0; i < n; ++i) {
            m[i] = opt.beta1 * m[i] + (1.0 - opt.beta1) * grad[i];
            v[i] = opt.beta2 * v[i] + (1.0 - opt.beta2) * grad[i] * grad[i];
            theta[i] -= opt.lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + opt.adam_eps);
        }
    }
    state.params.theta = best_theta;
    state.final_loss = best_loss;
    state.epoch = static_cast<int>(state.loss_history.size());
    return state;
}

TrainState train_lbfgs(const NetworkConfig& config, const AssembledSystem& sys,
                       const Dataset& ds, const Matrix& inputs, const OptimizerConfig& opt) {
    TrainState state;
    state.config = config;
    state.params = init_params(config);
    const std::size_t n = state.params.theta.size();
    const BatchObjective obj{config, sys, ds, inputs};

    std::vector<double> grad(n, 0.0);
    double loss = obj.loss_and_grad(state.params, grad);
    if (!std::isfinite(loss)) throw NumericError("train: non-finite initial loss");
    std::deque<std::vector<double>> s_hist, y_hist;
    std::deque<double> rho_hist;
    std::vector<double> best_theta = state.params.theta;
    double best_loss = loss;

    for (int epoch = 0; epoch < opt.epochs; ++epoch) {
        state.loss_history.push_back(loss);
        if (loss < best_loss) {
            best_loss = loss;
            best_theta = state.params.theta;
        }
        if (loss < opt.stop_tol) break;
        double gmax = 0.0;
        for (double g : grad) gmax = std::max(gmax, std::fabs(g));
        if (gmax < opt.lbfgs_tol) break;

        // Two-loop recursion for d = -H g.
        std::vector<double> d = grad;
        std::vector<double> a_coef(s_hist.size());
        for (int i = static_cast<int>(s_hist.size()) - 1; i >= 0; --i) {
            a_coef[i] = rho_hist[i] * kernels::dot(s_hist[i].data(), d.data(), n);
            kernels::axpy(-a_coef[i], y_hist[i].data(), d.data(), n);
        }
        if (!s_hist.empty()) {
            const auto& s = s_hist.back();
            const auto& yv = y_hist.back();
            const double yy = kernels::nrm2_sq(yv.data(), n);
            if (yy > 0.0) {
                const double gamma = kernels::dot(s.data(), yv.data(), n) / yy;
                kernels::scal(gamma, d.data(), n);
            }
        }
        for (std::size_t i = 0; i < s_hist.size(); ++i) {
            const double b = rho_hist[i] * kernels::dot(y_hist[i].data(), d.data(), n);
            kernels::axpy(a_coef[i] - b, s_hist[i].data(), d.data(), n);
        }
        kernels::scal(-1.0, d.data(), n);

        // Backtracking from unit step; steepest-descent fallback.
        const std::vector<double> theta0 = state.params.theta;
        double step = 1.0;
        double new_loss = std::numeric_limits<double>::infinity();
        bool accepted = false;
        for (int bt = 0; bt < opt.lbfgs_max_backtracks; ++bt) {
            state.params.theta = theta0;
            kernels::axpy(step, d.data(), state.params.theta.data(), n);
            new_loss = obj.loss_only(state.params);
            if (std::isfinite(new_loss) && new_loss < loss) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            state.params.theta = theta0;
            kernels::axpy(-opt.lr, grad.data(), state.params.theta.data(), n);
            new_loss = obj.loss_only(state.params);
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
        }

        std::vector<double> new_grad(n, 0.0);
        new_loss = obj.loss_and_grad(state.params, new_grad);
        std::vector<double> s_vec(n), y_vec(n);
        for (std::size_t i = 0; i < n; ++i) {
            s_vec[i] = state.params.theta[i] - theta0[i];
            y_vec[i] = new_grad[i] - grad[i];
        }
        const double sy = kernels::dot(s_vec.data(), y_vec.data(), n);
        if (sy > 1e-12 * std::sqrt(kernels::nrm2_sq(s_vec.data(), n) *
                                   kernels::nrm2_sq(y_vec.data(), n))) {
            s_hist.push_back(std::move(s_vec));
            y_hist.push_back(std::move(y_vec));
            rho_hist.push_back(1.0 / sy);
            if (static_cast<int>(s_hist.size()) > opt.lbfgs_history) {
                s_hist.pop_front();
                y_hist.pop_front();
                rho_hist.pop_front();
            }
        }
        if (std::fabs(loss - new_loss) < opt.lbfgs_tol * std::max(1.0, loss)) {
            loss = new_loss;
            grad = std::move(new_grad);
            state.loss_history.push_back(loss);
            if (loss < best_loss) {
                best_loss = loss;
                best_theta = state.params.theta;
            }
            break;
        }
        loss = new_loss;
        grad = std::move(new_grad);
    }
    if (loss < best_loss) {
        best_loss = loss;
        best_theta = state.params.theta;
    }
    state.params.theta = best_theta;
    state.final_loss = best_loss;
    state.epoch = static_cast<int>(state.loss_history.size());
    return state;
}

}  // namespace

TrainState train(const NetworkConfig& config, const AssembledSystem& sys, const Dataset& ds,
                 const DofMap& dofmap, const OptimizerConfig& opt) {
    if (ds.size() == 0) throw std::invalid_argument("train: empty dataset");
    config.validate();
    if (config.output_dim != sys.n()) {
        throw std::invalid_argument("train: output_dim must match the system size");
    }
    const Matrix inputs = encode_inputs(config, ds, dofmap, sys);
    if (opt.kind == OptimizerConfig::Kind::Adam) {
        return train_adam(config, sys, ds, inputs, opt);
    }
    return train_lbfgs(config, sys, ds, inputs, opt);
}

PredictedField predict_solution(const NetworkConfig& config, const NetworkParams& params,
                                const AssembledSystem& sys, const DofMap& dofmap,
                                const std::vector<double>& encoded_input) {
    if (static_cast<int>(encoded_input.size()) != config.input_dim) {
        throw std::invalid_argument("predict_solution: encoded input width mismatch");
    }
    const std::vector<double> out = forward(config, params, encoded_input);
    PredictedField field;
    field.enriched = sys.corrector.has_value();
    field.coeffs = scatter_full(sys, dofmap, out);
    if (field.enriched) field.corrector_weight = out.back();
    return field;
}

void save_checkpoint(const TrainState& state, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::invalid_argument("save_checkpoint: cannot open " + path);
    os << "feop-checkpoint 1\n";
    os << "input_encoding "
       << (state.config.input_encoding == InputEncoding::OmegaVector ? "omega_vector"
                                                                     : "f_at_dofs")
       << '\n';
    os << "activation " << (state.config.activation == Activation::Tanh ? "tanh" : "swish")
       << '\n';
    os << "final_activation "
       << (state.config.final_activation == FinalActivation::Linear ? "linear" : "bounded")
       << '\n';
    os << "init_seed " << state.config.init_seed << '\n';
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%a", state.config.input_scale);
    os << "input_scale " << buf << '\n';
    os << "epoch " << state.epoch << '\n';
    std::snprintf(buf, sizeof(buf), "%.17g", state.final_loss);
    os << "final_loss " << buf << '\n';
    os << "sizes " << state.params.sizes.size();
    for (int s : state.params.sizes) os << ' ' << s;
    os << '\n';
    os << "params " << state.params.theta.size() << '\n';
    for (double t : state.params.theta) {
        std::snprintf(buf, sizeof(buf), "%a\n", t);
        os << buf;
    }
}

TrainState load_checkpoint(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("load_checkpoint: cannot open " + path);
    std::string line;
    int lineno = 0;
    auto expect_line = [&]() -> std::istringstream {
        if (!std::getline(is, line)) throw ParseError("load_checkpoint: truncated file", lineno);
        ++lineno;
        return std::istringstream(line);
    };
    {
        auto ss = expect_line();
        std::string magic;
        int version = 0;
        if (!(ss >> magic >> version) || magic != "feop-checkpoint" || version != 1) {
            throw ParseError("load_checkpoint: bad magic line", lineno);
        }
    }
    TrainState state;
    auto read_kv = [&](const std::string& key) -> std::string {
        auto ss = expect_line();
        std::string k, v;
        if (!(ss >> k >> v) || k != key) {
            throw ParseError("load_checkpoint: expected key '" + key + "'", lineno);
        }
        return v;
    };
    const std::string enc = read_kv("input_encoding");
    state.config.input_encoding =
        enc == "omega_vector" ? InputEncoding::OmegaVector : InputEncoding::FAtDofs;
    const std::string act = read_kv("activation");
    state.config.activation = act == "swish" ? Activation::Swish : Activation::Tanh;
    const std::string fact = read_kv("final_activation");
    state.config.final_activation =
        fact == "bounded" ? FinalActivation::Bounded : FinalActivation::Linear;
    state.config.init_seed = std::stoull(read_kv("init_seed"));
    state.config.input_scale = std::strtod(read_kv("input_scale").c_str(), nullptr);
    state.epoch = std::stoi(read_kv("epoch"));
    state.final_loss = std::stod(read_kv("final_loss"));
    {
        auto ss = expect_line();
        std::string k;
        std::size_t count = 0;
        if (!(ss >> k >> count) || k != "sizes" || count < 2) {
            throw ParseError("load_checkpoint: bad sizes line", lineno);
        }
        std::vector<int> sizes(count);
        for (auto& s : sizes) {
            if (!(ss >> s) || s < 1) throw ParseError("load_checkpoint: bad layer size", lineno);
        }
        state.params = NetworkParams::zeros(sizes);
        state.config.input_dim = sizes.front();
        state.config.output_dim = sizes.back();
        state.config.hidden.assign(sizes.begin() + 1, sizes.end() - 1);
    }
    {
        auto ss = expect_line();
        std::string k;
        std::size_t count = 0;
        if (!(ss >> k >> count) || k != "params") {
            throw ParseError("load_checkpoint: bad params line", lineno);
        }
        if (count != state.params.theta.size()) {
            throw std::invalid_argument(
                "load_checkpoint: parameter count does not match the declared shapes");
        }
        for (std::size_t i = 0; i < count; ++i) {
            if (!std::getline(is, line)) throw ParseError("load_checkpoint: truncated file", lineno);
            ++lineno;
            // Parameters are written as hex floats; strtod round-trips them
            // bit-exactly where stream extraction cannot.
            char* end = nullptr;
            state.params.theta[i] = std::strtod(line.c_str(), &end);
            if (end == line.c_str()) {
                throw ParseError("load_checkpoint: bad parameter value", lineno);
            }
        }
    }
    return state;
}

}  // namespace feop
