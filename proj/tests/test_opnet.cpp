#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "feop/error.hpp"
#include "feop/opnet.hpp"
#include "feop/quadrature.hpp"
#include "feop/rng.hpp"

using namespace feop;

namespace {

struct Setup {
    Mesh mesh;
    DofMap dofmap;
    AssembledSystem sys;
    ForcingFamily family;

    Setup(int elements, ElemOrder order, bool burgers, double eps = 0.1) {
        mesh = generate_interval_mesh(-1.0, 1.0, elements);
        dofmap = build_dofmap(mesh, order);
        ProblemSpec spec;
        spec.epsilon = eps;
        if (burgers) {
            spec.epsilon = 1.0;
            spec.nonlinearity = Nonlinearity::Burgers;
        } else {
            spec.b = [](double, double) { return std::array<double, 2>{-1.0, 0.0}; };
        }
        sys = assemble_bilinear(spec, mesh, dofmap);
    }

    Dataset dataset(int count, std::uint64_t seed) const {
        const Mesh* m = &mesh;
        const DofMap* dm = &dofmap;
        return build_dataset(family, count, seed, [m, dm](const ScalarField& f) {
            return assemble_load(*m, *dm, f, BcKind::Dirichlet0);
        });
    }

    NetworkConfig net(std::vector<int> hidden, std::uint64_t seed) const {
        NetworkConfig cfg;
        cfg.hidden = std::move(hidden);
        cfg.input_dim = sys.n();
        cfg.output_dim = sys.n();
        cfg.init_seed = seed;
        return cfg;
    }
};

double finite_diff_loss(const NetworkConfig& cfg, NetworkParams params, std::size_t idx,
                        double step, const Matrix& inputs, const AssembledSystem& sys,
                        const Dataset& ds) {
    params.theta[idx] += step;
    ForwardCache cache;
    const Matrix& y = forward_batch(cfg, params, inputs, cache);
    return residual_loss(y, sys, std::span<const LoadVector>(ds.loads));
}

}  // namespace

TEST_CASE("forward: zero parameters give zero output; determinism") {
    Setup s(6, ElemOrder::P1, false);
    const NetworkConfig cfg = s.net({8, 8}, 3);
    NetworkParams zero = NetworkParams::zeros(cfg.layer_sizes());
    const std::vector<double> input(cfg.input_dim, 0.7);
    for (double v : forward(cfg, zero, input)) CHECK(v == 0.0);

    const NetworkParams p1 = init_params(cfg);
    const NetworkParams p2 = init_params(cfg);
    CHECK(p1.theta == p2.theta);
    const std::vector<double> y1 = forward(cfg, p1, input);
    const std::vector<double> y2 = forward(cfg, p2, input);
    CHECK(y1 == y2);

    std::vector<double> bad(cfg.input_dim + 1, 0.0);
    Matrix xb(1, bad.size());
    ForwardCache cache;
    CHECK_THROWS_AS(forward_batch(cfg, p1, xb, cache), std::invalid_argument);
}

TEST_CASE("residual loss: oracle minimizer, zero prediction, integral oracle") {
    Setup s(8, ElemOrder::P1, false);
    const Dataset ds = s.dataset(4, 21);

    // Loss at the oracle coefficients is numerically zero.
    Matrix at_oracle(ds.size(), s.sys.n());
    double f_scale = 0.0;
    for (int m = 0; m < ds.size(); ++m) {
        const OracleSolution sol = solve_linear(s.sys, ds.loads[m]);
        std::copy(sol.alpha_star.begin(), sol.alpha_star.end(), at_oracle.row(m));
        for (double v : ds.loads[m].f) f_scale = std::max(f_scale, std::fabs(v));
    }
    CHECK(residual_loss(at_oracle, s.sys, std::span<const LoadVector>(ds.loads)) <=
          1e-18 * (1.0 + f_scale * f_scale));

    // Zero prediction: loss = mean |F|^2.
    Matrix zero(ds.size(), s.sys.n());
    double want = 0.0;
    for (int m = 0; m < ds.size(); ++m) {
        for (double v : ds.loads[m].f) want += v * v;
    }
    want /= ds.size();
    CHECK(residual_loss(zero, s.sys, std::span<const LoadVector>(ds.loads)) ==
          doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("residual loss matches direct quadrature of the weak-form residual") {
    // 3 interior DOFs; random predictions; brute-force B[u,phi_i] - l(phi_i).
    // Polynomial forcings keep the load quadrature exact on both routes, so
    // the comparison isolates the residual evaluation itself.
    Setup s(4, ElemOrder::P1, false);
    REQUIRE(s.sys.n() == 3);
    const std::vector<ScalarField> fs = {
        [](double x, double) { return 3.0 * x * x - x + 0.5; },
        [](double x, double) { return 1.0 - 2.0 * x * x * x; }};
    Dataset ds;
    for (const auto& f : fs) {
        ds.samples.push_back({});
        ds.loads.push_back(assemble_load(s.mesh, s.dofmap, f, BcKind::Dirichlet0));
    }
    Rng rng(17);
    Matrix alpha(ds.size(), 3);
    for (auto& v : alpha.data) v = rng.uniform(-1.0, 1.0);

    std::vector<double> pts, wts;
    gauss_legendre_01(16, pts, wts);
    auto hat = [&](int dof, double x) {
        // interior dof i sits at node i+1 of the uniform mesh
        const double h = 0.5;
        const double xc = -1.0 + (dof + 1) * h;
        const double d = std::fabs(x - xc);
        return d >= h ? 0.0 : 1.0 - d / h;
    };
    auto hat_dx = [&](int dof, double x) {
        const double h = 0.5;
        const double xc = -1.0 + (dof + 1) * h;
        if (x <= xc - h || x >= xc + h) return 0.0;
        return x < xc ? 1.0 / h : -1.0 / h;
    };
    double want = 0.0;
    for (int m = 0; m < ds.size(); ++m) {
        const ScalarField& f = fs[m];
        for (int i = 0; i < 3; ++i) {
            double residual = 0.0;
            // integrate over the whole domain with panel Gauss
            const int panels = 64;
            for (int p = 0; p < panels; ++p) {
                const double a = -1.0 + 2.0 * p / panels;
                const double w = 2.0 / panels;
                for (std::size_t q = 0; q < pts.size(); ++q) {
                    const double x = a + pts[q] * w;
                    double u_dx = 0.0;
                    for (int k = 0; k < 3; ++k) u_dx += alpha(m, k) * hat_dx(k, x);
                    double u_val = 0.0;
                    for (int k = 0; k < 3; ++k) u_val += alpha(m, k) * hat(k, x);
                    const double integrand = 0.1 * u_dx * hat_dx(i, x) +
                                             (-1.0) * u_dx * hat(i, x) -
                                             f(x, 0.0) * hat(i, x);
                    residual += wts[q] * w * integrand;
                }
            }
            want += residual * residual;
        }
    }
    want /= ds.size();
    const double got = residual_loss(alpha, s.sys, std::span<const LoadVector>(ds.loads));
    CHECK(got == doctest::Approx(want).epsilon(1e-10));
}

TEST_CASE("loss gradient scales linearly in the loads") {
    Setup s(6, ElemOrder::P1, false);
    Dataset ds = s.dataset(1, 33);
    Matrix alpha(1, s.sys.n());
    Rng rng(4);
    for (auto& v : alpha.data) v = rng.uniform(-1.0, 1.0);
    Matrix g1, g2;
    residual_loss_grad(alpha, s.sys, std::span<const LoadVector>(ds.loads), g1);
    // dL/da = 2 A^T (A a - F): doubling F shifts the gradient by -2 A^T F.
    Dataset doubled = ds;
    for (auto& v : doubled.loads[0].f) v *= 2.0;
    residual_loss_grad(alpha, s.sys, std::span<const LoadVector>(doubled.loads), g2);
    std::vector<double> atf = s.sys.A.matvec_transposed(ds.loads[0].f);
    for (int i = 0; i < s.sys.n(); ++i) {
        CHECK(g2(0, i) - g1(0, i) == doctest::Approx(-2.0 * atf[i]).epsilon(1e-10));
    }
}

TEST_CASE("analytic parameter gradients match central differences (linear, 5 DOFs)") {
    Setup s(6, ElemOrder::P1, false);
    REQUIRE(s.sys.n() == 5);
    const Dataset ds = s.dataset(3, 8);
    const NetworkConfig cfg = s.net({7, 6}, 12);
    const NetworkParams params = init_params(cfg);
    const Matrix inputs = encode_inputs(cfg, ds, s.dofmap, s.sys);

    std::vector<double> grad;
    loss_gradient(cfg, params, inputs, s.sys, std::span<const LoadVector>(ds.loads), grad);

    const double step = 1e-6;
    double g2 = 0.0, d2 = 0.0;
    for (std::size_t i = 0; i < params.theta.size(); ++i) {
        const double lp = finite_diff_loss(cfg, params, i, step, inputs, s.sys, ds);
        const double lm = finite_diff_loss(cfg, params, i, -step, inputs, s.sys, ds);
        const double fd = (lp - lm) / (2.0 * step);
        g2 += grad[i] * grad[i];
        d2 += (grad[i] - fd) * (grad[i] - fd);
    }
    CHECK(std::sqrt(d2) <= 1e-5 * std::sqrt(g2));
}

TEST_CASE("analytic parameter gradients match central differences (burgers, 5 DOFs)") {
    Setup s(6, ElemOrder::P1, true);
    REQUIRE(s.sys.n() == 5);
    REQUIRE(s.sys.has_tensor);
    const Dataset ds = s.dataset(3, 9);
    for (const Activation act : {Activation::Tanh, Activation::Swish}) {
        for (const FinalActivation fact : {FinalActivation::Linear, FinalActivation::Bounded}) {
            NetworkConfig cfg = s.net({7, 6}, 13);
            cfg.activation = act;
            cfg.final_activation = fact;
            const NetworkParams params = init_params(cfg);
            const Matrix inputs = encode_inputs(cfg, ds, s.dofmap, s.sys);
            std::vector<double> grad;
            loss_gradient(cfg, params, inputs, s.sys, std::span<const LoadVector>(ds.loads),
                          grad);
            const double step = 1e-6;
            double g2 = 0.0, d2 = 0.0;
            for (std::size_t i = 0; i < params.theta.size(); ++i) {
                const double lp = finite_diff_loss(cfg, params, i, step, inputs, s.sys, ds);
                const double lm = finite_diff_loss(cfg, params, i, -step, inputs, s.sys, ds);
                const double fd = (lp - lm) / (2.0 * step);
                g2 += grad[i] * grad[i];
                d2 += (grad[i] - fd) * (grad[i] - fd);
            }
            CHECK(std::sqrt(d2) <= 1e-5 * std::sqrt(g2));
        }
    }
}

TEST_CASE("network jacobian in one weight agrees with finite differences") {
    Setup s(6, ElemOrder::P1, false);
    NetworkConfig cfg = s.net({5}, 2);
    NetworkParams params = init_params(cfg);
    const std::vector<double> input = [&] {
        std::vector<double> v(cfg.input_dim);
        Rng rng(6);
        for (auto& x : v) x = rng.uniform(-1.0, 1.0);
        return v;
    }();
    const std::size_t idx = 7;
    const double step = 1e-6;
    NetworkParams pp = params, pm = params;
    pp.theta[idx] += step;
    pm.theta[idx] -= step;
    const std::vector<double> yp = forward(cfg, pp, input);
    const std::vector<double> ym = forward(cfg, pm, input);

    // Chain rule through a seeded output direction reproduces the same slope.
    Matrix x(1, input.size());
    x.data = input;
    ForwardCache cache;
    const Matrix& y = forward_batch(cfg, params, x, cache);
    (void)y;
    for (int out = 0; out < cfg.output_dim; ++out) {
        Matrix dy(1, cfg.output_dim);
        dy.set_zero();
        dy(0, out) = 1.0;
        std::vector<double> grad;
        backward_batch(cfg, params, cache, dy, grad);
        const double fd = (yp[out] - ym[out]) / (2.0 * step);
        CHECK(grad[idx] == doctest::Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("minimize_sample_loss recovers the oracle solution") {
    Setup s(16, ElemOrder::P2, false);
    const Dataset ds = s.dataset(20, 55);
    for (int m = 0; m < ds.size(); ++m) {
        const std::vector<double> direct = minimize_sample_loss(s.sys, ds.loads[m]);
        const OracleSolution lu = solve_linear(s.sys, ds.loads[m]);
        double num = 0.0, den = 0.0;
        for (int i = 0; i < s.sys.n(); ++i) {
            num += (direct[i] - lu.alpha_star[i]) * (direct[i] - lu.alpha_star[i]);
            den += lu.alpha_star[i] * lu.alpha_star[i];
        }
        CHECK(std::sqrt(num) <= 1e-8 * std::sqrt(den));
    }
}

TEST_CASE("training: 1-DOF problem driven to tiny loss; monotone best-so-far") {
    Setup s(2, ElemOrder::P1, false);
    REQUIRE(s.sys.n() == 1);
    const Dataset ds = s.dataset(1, 3);
    NetworkConfig cfg = s.net({8}, 5);
    OptimizerConfig opt;
    opt.epochs = 2000;
    opt.stop_tol = 1e-11;
    const TrainState state = train(cfg, s.sys, ds, s.dofmap, opt);
    CHECK(state.final_loss <= 1e-10);
    CHECK(state.final_loss <= state.loss_history.front());
    double best = state.loss_history.front();
    for (double l : state.loss_history) {
        best = std::min(best, l);
        CHECK(best <= state.loss_history.front());
    }
}

TEST_CASE("training: zero-forcing dataset collapses the loss") {
    Setup s(8, ElemOrder::P1, false);
    ForcingFamily zero_fam;
    zero_fam.m_lo = zero_fam.m_hi = 0.0;
    const Mesh* m = &s.mesh;
    const DofMap* dm = &s.dofmap;
    const Dataset ds = build_dataset(zero_fam, 4, 2, [m, dm](const ScalarField& f) {
        return assemble_load(*m, *dm, f, BcKind::Dirichlet0);
    });
    NetworkConfig cfg = s.net({8}, 6);
    OptimizerConfig opt;
    opt.epochs = 4000;
    opt.stop_tol = 1e-13;
    const TrainState state = train(cfg, s.sys, ds, s.dofmap, opt);
    CHECK(state.final_loss <= 1e-12);
}

TEST_CASE("training determinism: identical seeds give identical histories") {
    Setup s(8, ElemOrder::P1, false);
    const Dataset ds = s.dataset(6, 77);
    NetworkConfig cfg = s.net({16, 16}, 9);
    OptimizerConfig opt;
    opt.epochs = 50;
    const TrainState a = train(cfg, s.sys, ds, s.dofmap, opt);
    const TrainState b = train(cfg, s.sys, ds, s.dofmap, opt);
    REQUIRE(a.loss_history.size() == b.loss_history.size());
    for (std::size_t i = 0; i < a.loss_history.size(); ++i) {
        CHECK(a.loss_history[i] == b.loss_history[i]);
    }
    CHECK(a.params.theta == b.params.theta);
}

TEST_CASE("lbfgs optimizer reduces the loss") {
    Setup s(8, ElemOrder::P1, false);
    const Dataset ds = s.dataset(6, 31);
    NetworkConfig cfg = s.net({16}, 4);
    OptimizerConfig opt;
    opt.kind = OptimizerConfig::Kind::Lbfgs;
    opt.epochs = 150;
    const TrainState state = train(cfg, s.sys, ds, s.dofmap, opt);
    CHECK(state.final_loss < 0.05 * state.loss_history.front());
}

TEST_CASE("predicted fields vanish exactly on Dirichlet DOFs") {
    Setup s(12, ElemOrder::P2, false);
    const Dataset ds = s.dataset(1, 19);
    NetworkConfig cfg = s.net({16}, 2);
    const NetworkParams params = init_params(cfg);
    Rng rng(55);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> enc(cfg.input_dim);
        for (auto& v : enc) v = rng.uniform(-10.0, 10.0);
        const PredictedField field = predict_solution(cfg, params, s.sys, s.dofmap, enc);
        REQUIRE(field.coeffs.size() == static_cast<std::size_t>(s.dofmap.n_dofs()));
        for (int b : s.dofmap.boundary_dofs) {
            CHECK(field.coeffs[b] == 0.0);  // bit-exact
        }
    }
}

TEST_CASE("checkpoint round trip preserves parameters bit-exactly") {
    Setup s(8, ElemOrder::P1, false);
    const Dataset ds = s.dataset(4, 23);
    NetworkConfig cfg = s.net({12, 10}, 3);
    OptimizerConfig opt;
    opt.epochs = 20;
    TrainState state = train(cfg, s.sys, ds, s.dofmap, opt);
    const std::string path =
        (std::filesystem::temp_directory_path() / "feop_ckpt.txt").string();
    save_checkpoint(state, path);
    const TrainState back = load_checkpoint(path);
    CHECK(back.params.sizes == state.params.sizes);
    REQUIRE(back.params.theta.size() == state.params.theta.size());
    for (std::size_t i = 0; i < state.params.theta.size(); ++i) {
        CHECK(back.params.theta[i] == state.params.theta[i]);
    }
    CHECK(back.epoch == state.epoch);

    // Shape mismatch rejection: corrupt the parameter count.
    std::ifstream is(path);
    std::string content((std::istreambuf_iterator<char>(is)),
                        std::istreambuf_iterator<char>());
    is.close();
    const auto pos = content.find("params ");
    std::string corrupted = content.substr(0, pos) + "params 3\n0x1p+0\n0x1p+0\n0x1p+0\n";
    std::ofstream os(path);
    os << corrupted;
    os.close();
    CHECK_THROWS_AS(load_checkpoint(path), std::invalid_argument);
    std::filesystem::remove(path);
}

TEST_CASE("train rejects mismatched output width") {
    Setup s(8, ElemOrder::P1, false);
    const Dataset ds = s.dataset(2, 1);
    NetworkConfig cfg = s.net({8}, 1);
    cfg.output_dim += 1;
    OptimizerConfig opt;
    CHECK_THROWS_AS(train(cfg, s.sys, ds, s.dofmap, opt), std::invalid_argument);
}
