#include "feop/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "feop/error.hpp"

namespace feop {

namespace {

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (!std::isspace(static_cast<unsigned char>(c))) {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

std::string join_list(const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ',';
        out += items[i];
    }
    return out;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string order_name(ElemOrder o) { return o == ElemOrder::P1 ? "p1" : "p2"; }

double now_seconds() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

}  // namespace

ExperimentConfig default_config(const std::string& problem) {
    // Element counts, orders and input families follow the per-problem
    // benchmark table; sample counts and iteration budgets are desk scale.
    // The training optimizer defaults to LBFGS, the one the benchmarks were
    // run with.
    ExperimentConfig cfg;
    cfg.problem = problem;
    cfg.optimizer = "lbfgs";
    cfg.epochs = 6000;
    if (problem == "bc1") {
        cfg.elements = {24};
        cfg.order = ElemOrder::P2;
    } else if (problem == "bc2") {
        cfg.elements = {32};
        cfg.order = ElemOrder::P2;
    } else if (problem == "eq1" || problem == "eq1_cinput") {
        cfg.elements = {32};
        cfg.order = ElemOrder::P2;
        if (problem == "eq1_cinput") {
            // Variable-coefficient input: modest coefficient amplitudes.
            cfg.m_lo = 1.0;
            cfg.m_hi = 2.0;
            cfg.n_lo = 0.0;
            cfg.n_hi = std::numbers::pi;
        }
    } else if (problem == "eq2") {
        cfg.elements = {128};
        cfg.order = ElemOrder::P1;
        cfg.epsilon = 1.0;
    } else if (problem == "singular") {
        cfg.elements = {32};
        cfg.order = ElemOrder::P1;
        cfg.epsilon = 1e-5;
        cfg.eps_list = {1e-5};
        cfg.epochs = 4000;
    } else if (problem == "domain1" || problem == "domain2" || problem == "domain3") {
        cfg.elements = {8};  // rings for domain1; ignored for file meshes
        cfg.order = ElemOrder::P2;
        cfg.m_lo = 1.0;
        cfg.m_hi = 2.0;
        cfg.n_lo = 0.0;
        cfg.n_hi = std::numbers::pi;
        cfg.epochs = 4000;
    } else {
        throw std::invalid_argument("default_config: unknown problem '" + problem + "'");
    }
    return cfg;
}

namespace {

void apply_key(ExperimentConfig& cfg, const std::string& key, const std::string& value,
               int lineno) {
    auto to_int = [&](const std::string& v) {
        try {
            return std::stoi(v);
        } catch (...) {
            throw ParseError("config: integer expected for '" + key + "'", lineno);
        }
    };
    auto to_u64 = [&](const std::string& v) -> std::uint64_t {
        try {
            return std::stoull(v);
        } catch (...) {
            throw ParseError("config: integer expected for '" + key + "'", lineno);
        }
    };
    auto to_double = [&](const std::string& v) {
        try {
            return std::stod(v);
        } catch (...) {
            throw ParseError("config: number expected for '" + key + "'", lineno);
        }
    };
    if (key == "problem") {
        cfg.problem = value;
    } else if (key == "elements") {
        cfg.elements.clear();
        for (const auto& item : split_list(value)) cfg.elements.push_back(to_int(item));
    } else if (key == "order") {
        if (value == "p1" || value == "P1") {
            cfg.order = ElemOrder::P1;
        } else if (value == "p2" || value == "P2") {
            cfg.order = ElemOrder::P2;
        } else {
            throw ParseError("config: order must be p1 or p2", lineno);
        }
    } else if (key == "m_lo") {
        cfg.m_lo = to_double(value);
    } else if (key == "m_hi") {
        cfg.m_hi = to_double(value);
    } else if (key == "n_lo") {
        cfg.n_lo = to_double(value);
    } else if (key == "n_hi") {
        cfg.n_hi = to_double(value);
    } else if (key == "m_train") {
        cfg.m_train = to_int(value);
    } else if (key == "m_test") {
        cfg.m_test = to_int(value);
    } else if (key == "train_seed") {
        cfg.train_seed = to_u64(value);
    } else if (key == "test_seed") {
        cfg.test_seed = to_u64(value);
    } else if (key == "seeds") {
        cfg.seeds.clear();
        for (const auto& item : split_list(value)) cfg.seeds.push_back(to_u64(item));
    } else if (key == "epochs") {
        cfg.epochs = to_int(value);
    } else if (key == "lr") {
        cfg.lr = to_double(value);
    } else if (key == "optimizer") {
        if (value != "adam" && value != "lbfgs") {
            throw ParseError("config: optimizer must be adam or lbfgs", lineno);
        }
        cfg.optimizer = value;
    } else if (key == "hidden") {
        cfg.hidden.clear();
        for (const auto& item : split_list(value)) cfg.hidden.push_back(to_int(item));
    } else if (key == "activation") {
        if (value != "tanh" && value != "swish") {
            throw ParseError("config: activation must be tanh or swish", lineno);
        }
        cfg.activation = value;
    } else if (key == "input_encoding") {
        if (value != "f_at_dofs" && value != "omega_vector") {
            throw ParseError("config: input_encoding must be f_at_dofs or omega_vector", lineno);
        }
        cfg.input_encoding = value;
    } else if (key == "final_activation") {
        if (value != "linear" && value != "bounded") {
            throw ParseError("config: final_activation must be linear or bounded", lineno);
        }
        cfg.final_activation = value;
    } else if (key == "epsilon") {
        cfg.epsilon = to_double(value);
    } else if (key == "eps_list") {
        cfg.eps_list.clear();
        for (const auto& item : split_list(value)) cfg.eps_list.push_back(to_double(item));
    } else if (key == "mesh_file") {
        cfg.mesh_file = value;
    } else if (key == "ref_factor") {
        cfg.ref_factor = to_int(value);
    } else if (key == "oracle_mode") {
        cfg.oracle_mode = to_int(value) != 0;
    } else if (key == "stop_tol") {
        cfg.stop_tol = to_double(value);
    } else {
        throw ParseError("config: unknown key '" + key + "'", lineno);
    }
}

}  // namespace

ExperimentConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("load_config: cannot open " + path);
    std::string line;
    int lineno = 0;
    // First pass: find the problem so defaults match it.
    std::vector<std::pair<std::pair<std::string, std::string>, int>> entries;
    std::string problem = "bc1";
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::string key, eq, value;
        std::istringstream ss(line);
        if (!(ss >> key)) continue;
        if (!(ss >> eq) || eq != "=") throw ParseError("config: expected 'key = value'", lineno);
        std::getline(ss, value);
        std::size_t b = value.find_first_not_of(" \t");
        std::size_t e = value.find_last_not_of(" \t\r");
        value = b == std::string::npos ? "" : value.substr(b, e - b + 1);
        if (value.empty()) throw ParseError("config: missing value for '" + key + "'", lineno);
        if (key == "problem") problem = value;
        entries.push_back({{key, value}, lineno});
    }
    ExperimentConfig cfg = default_config(problem);
    for (const auto& [kv, ln] : entries) apply_key(cfg, kv.first, kv.second, ln);
    return cfg;
}

void save_config(const ExperimentConfig& cfg, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::invalid_argument("save_config: cannot open " + path);
    os << "problem = " << cfg.problem << '\n';
    {
        std::vector<std::string> items;
        for (int e : cfg.elements) items.push_back(std::to_string(e));
        os << "elements = " << join_list(items) << '\n';
    }
    os << "order = " << order_name(cfg.order) << '\n';
    os << "m_lo = " << fmt(cfg.m_lo) << '\n';
    os << "m_hi = " << fmt(cfg.m_hi) << '\n';
    os << "n_lo = " << fmt(cfg.n_lo) << '\n';
    os << "n_hi = " << fmt(cfg.n_hi) << '\n';
    os << "m_train = " << cfg.m_train << '\n';
    os << "m_test = " << cfg.m_test << '\n';
    os << "train_seed = " << cfg.train_seed << '\n';
    os << "test_seed = " << cfg.test_seed << '\n';
    {
        std::vector<std::string> items;
        for (auto s : cfg.seeds) items.push_back(std::to_string(s));
        os << "seeds = " << join_list(items) << '\n';
    }
    os << "epochs = " << cfg.epochs << '\n';
    os << "lr = " << fmt(cfg.lr) << '\n';
    os << "optimizer = " << cfg.optimizer << '\n';
    {
        std::vector<std::string> items;
        for (int h : cfg.hidden) items.push_back(std::to_string(h));
        os << "hidden = " << join_list(items) << '\n';
    }
    os << "activation = " << cfg.activation << '\n';
    os << "input_encoding = " << cfg.input_encoding << '\n';
    os << "final_activation = " << cfg.final_activation << '\n';
    os << "epsilon = " << fmt(cfg.epsilon) << '\n';
    {
        std::vector<std::string> items;
        for (double e : cfg.eps_list) items.push_back(fmt(e));
        os << "eps_list = " << join_list(items) << '\n';
    }
    if (!cfg.mesh_file.empty()) os << "mesh_file = " << cfg.mesh_file << '\n';
    os << "ref_factor = " << cfg.ref_factor << '\n';
    os << "oracle_mode = " << (cfg.oracle_mode ? 1 : 0) << '\n';
    os << "stop_tol = " << fmt(cfg.stop_tol) << '\n';
}

void emit_report(const Report& report, const std::string& dir) {
    std::filesystem::create_directories(dir);
    const std::string path = dir + "/report.csv";
    std::ofstream os(path);
    if (!os) throw std::invalid_argument("emit_report: cannot open " + path);
    os << join_list(report.columns) << '\n';
    for (const auto& row : report.rows) os << join_list(row) << '\n';
    if (report.slope) {
        os << "# slope " << fmt(*report.slope) << " residual " << fmt(*report.slope_residual)
           << '\n';
    }
}

std::pair<double, double> fit_loglog_slope(const std::vector<std::array<double, 2>>& pts) {
    if (pts.size() < 2) throw std::invalid_argument("fit_loglog_slope: need >= 2 points");
    double sx = 0, sy = 0;
    for (const auto& p : pts) {
        sx += std::log(p[0]);
        sy += std::log(p[1]);
    }
    const double mx = sx / pts.size();
    const double my = sy / pts.size();
    double cov = 0, var = 0;
    for (const auto& p : pts) {
        const double dx = std::log(p[0]) - mx;
        cov += dx * (std::log(p[1]) - my);
        var += dx * dx;
    }
    const double slope = cov / var;
    double ss = 0;
    for (const auto& p : pts) {
        const double pred = my + slope * (std::log(p[0]) - mx);
        const double r = std::log(p[1]) - pred;
        ss += r * r;
    }
    return {slope, std::sqrt(ss / pts.size())};
}

ProblemSetup make_problem(const ExperimentConfig& cfg, int elements_override, bool enriched) {
    ProblemSetup setup;
    setup.name = cfg.problem;
    setup.order = cfg.order;
    setup.elements = elements_override > 0 ? elements_override : cfg.elements.front();
    setup.family.m_lo = cfg.m_lo;
    setup.family.m_hi = cfg.m_hi;
    setup.family.n_lo = cfg.n_lo;
    setup.family.n_hi = cfg.n_hi;
    setup.family.dim = 1;

    ProblemSpec& spec = setup.spec;
    spec.epsilon = cfg.epsilon;

    const std::string& p = cfg.problem;
    if (p == "bc1" || p == "bc2" || p == "singular") {
        spec.b = [](double, double) { return std::array<double, 2>{-1.0, 0.0}; };
        spec.bc = p == "bc2" ? BcKind::Neumann0WithMass : BcKind::Dirichlet0;
    } else if (p == "eq1" || p == "eq1_cinput") {
        spec.b = [](double x, double) { return std::array<double, 2>{x * x + 1.0, 0.0}; };
        if (p == "eq1") spec.c = [](double x, double) { return x; };
        setup.reaction_input = p == "eq1_cinput";
        if (setup.reaction_input) setup.family.kind = InputKind::ReactionCoefficient;
    } else if (p == "eq2") {
        spec.nonlinearity = Nonlinearity::Burgers;
    } else if (p == "domain1" || p == "domain2" || p == "domain3") {
        setup.family.dim = 2;
        spec.b = [](double, double) { return std::array<double, 2>{-1.0, 0.0}; };
    } else {
        throw std::invalid_argument("make_problem: unknown problem '" + p + "'");
    }

    if (setup.family.dim == 1) {
        setup.mesh = generate_interval_mesh(-1.0, 1.0, setup.elements);
    } else if (p == "domain1") {
        setup.mesh = generate_disk_mesh(1.0, setup.elements);
    } else {
        if (cfg.mesh_file.empty()) {
            throw std::invalid_argument("make_problem: '" + p + "' needs mesh_file");
        }
        setup.mesh = load_mesh(cfg.mesh_file);
    }
    setup.dofmap = build_dofmap(setup.mesh, setup.order);

    double h = 0.0;
    for (int e = 0; e < setup.mesh.element_count(); ++e) {
        if (setup.mesh.dim == 1) {
            h = std::max(h, setup.mesh.element_measure(e));
        } else {
            const auto& el = setup.mesh.elements[e];
            for (int v = 0; v < 3; ++v) {
                const auto& a = setup.mesh.nodes[el[v]];
                const auto& b = setup.mesh.nodes[el[(v + 1) % 3]];
                h = std::max(h, std::hypot(a[0] - b[0], a[1] - b[1]));
            }
        }
    }
    setup.h = h;

    if (p == "singular" && enriched) {
        setup.basis = CorrectorBasis{spec.epsilon, convection_sign(spec)};
        setup.system = assemble_enriched(spec, setup.mesh, setup.dofmap, *setup.basis);
    } else {
        setup.system = assemble_bilinear(spec, setup.mesh, setup.dofmap);
    }
    return setup;
}

LoadVector ProblemSetup::assemble(const ScalarField& f) const {
    if (basis) return assemble_enriched_load(mesh, dofmap, *basis, f);
    return assemble_load(mesh, dofmap, f, spec.bc);
}

Dataset make_dataset(const ProblemSetup& setup, int count, std::uint64_t seed,
                     const std::string& split) {
    Dataset ds;
    if (setup.reaction_input) {
        const ProblemSpec base = setup.spec;
        const Mesh* mesh = &setup.mesh;
        const DofMap* dm = &setup.dofmap;
        ds = build_dataset_reaction(
            setup.family, count, seed, [base, mesh, dm](const ScalarField& c) {
                ProblemSpec spec = base;
                spec.c = c;
                AssembledSystem sys = assemble_bilinear(spec, *mesh, *dm);
                LoadVector load = assemble_load(*mesh, *dm, constant_field(1.0), spec.bc);
                return std::make_pair(std::move(sys), std::move(load));
            });
    } else {
        ds = build_dataset(setup.family, count, seed,
                           [&setup](const ScalarField& f) { return setup.assemble(f); });
    }
    ds.split = split;
    return ds;
}

std::vector<OracleSolution> oracle_solutions(const ProblemSetup& setup, const Dataset& ds) {
    std::vector<OracleSolution> out;
    out.reserve(ds.size());
    if (ds.per_sample_systems()) {
        for (int m = 0; m < ds.size(); ++m) out.push_back(solve_linear(ds.systems[m], ds.loads[m]));
        return out;
    }
    if (setup.spec.nonlinearity == Nonlinearity::Burgers) {
        for (int m = 0; m < ds.size(); ++m) {
            out.push_back(solve_burgers_newton(setup.system, ds.loads[m], nullptr, 1e-12, 25));
        }
        return out;
    }
    const LinearSolver solver(setup.system.A);
    for (int m = 0; m < ds.size(); ++m) {
        OracleSolution sol;
        sol.alpha_star = solver.solve(ds.loads[m].f);
        std::vector<double> r = setup.system.A.matvec(sol.alpha_star);
        double rn = 0.0;
        for (std::size_t i = 0; i < r.size(); ++i) {
            const double d = r[i] - ds.loads[m].f[i];
            rn += d * d;
        }
        sol.residual_norm = std::sqrt(rn);
        out.push_back(std::move(sol));
    }
    return out;
}

EvalStats evaluate_against_oracle(const NetworkConfig& config, const NetworkParams& params,
                                  const ProblemSetup& setup, const Dataset& ds,
                                  const std::vector<OracleSolution>& oracle) {
    const Matrix inputs = encode_inputs(config, ds, setup.dofmap, setup.system);
    ForwardCache cache;
    const Matrix& y = forward_batch(config, params, inputs, cache);
    EvalStats stats;
    std::vector<double> pred(y.cols);
    for (int m = 0; m < ds.size(); ++m) {
        std::copy(y.row(m), y.row(m) + y.cols, pred.begin());
        const double rel = l2_rel_error(pred, oracle[m].alpha_star, setup.system.mass);
        stats.mean_rel_l2 += rel;
        stats.max_rel_l2 = std::max(stats.max_rel_l2, rel);
    }
    stats.mean_rel_l2 /= std::max(1, ds.size());
    return stats;
}

NetworkConfig network_config_for(const ExperimentConfig& cfg, const ProblemSetup& setup,
                                 std::uint64_t seed) {
    NetworkConfig ncfg;
    ncfg.input_encoding = cfg.input_encoding == "omega_vector" ? InputEncoding::OmegaVector
                                                               : InputEncoding::FAtDofs;
    ncfg.hidden = cfg.hidden;
    ncfg.activation = cfg.activation == "swish" ? Activation::Swish : Activation::Tanh;
    ncfg.final_activation = cfg.final_activation == "bounded" ? FinalActivation::Bounded
                                                              : FinalActivation::Linear;
    ncfg.input_dim = ncfg.input_encoding == InputEncoding::OmegaVector
                         ? setup.family.omega_size()
                         : static_cast<int>(setup.system.row_dofs.size());
    ncfg.output_dim = setup.system.n();
    ncfg.init_seed = seed;
    if (ncfg.input_encoding == InputEncoding::FAtDofs) {
        const double amp = std::max(std::fabs(setup.family.m_lo), std::fabs(setup.family.m_hi));
        ncfg.input_scale = amp > 0.0 ? 1.0 / (2.0 * amp) : 1.0;
    }
    return ncfg;
}

OptimizerConfig optimizer_config_for(const ExperimentConfig& cfg) {
    OptimizerConfig opt;
    opt.kind = cfg.optimizer == "lbfgs" ? OptimizerConfig::Kind::Lbfgs
                                        : OptimizerConfig::Kind::Adam;
    opt.epochs = cfg.epochs;
    opt.lr = cfg.lr;
    opt.stop_tol = cfg.stop_tol;
    return opt;
}

Report run_convergence_study(const ExperimentConfig& cfg, bool network_mode,
                             const RunOptions& opts) {
    if (cfg.elements.size() < 3) {
        throw std::invalid_argument("run_convergence_study: need >= 3 element counts");
    }
    for (int k : cfg.elements) {
        if (k < 4) throw std::invalid_argument("run_convergence_study: element counts must be >= 4");
    }
    Report report;
    report.columns = {"problem", "mode",       "elements", "h",          "order",
                      "m_train", "seed",       "train_loss", "error",    "wall_time_s",
                      "status"};
    std::vector<std::array<double, 2>> pts;

    // One fixed forcing shared across resolutions in oracle mode.
    ForcingFamily fam;
    fam.m_lo = cfg.m_lo;
    fam.m_hi = cfg.m_hi;
    fam.n_lo = cfg.n_lo;
    fam.n_hi = cfg.n_hi;
    Rng rng(cfg.train_seed);
    const ForcingSample fixed = sample_forcing(fam, rng);

    for (int k : cfg.elements) {
        const double t0 = now_seconds();
        std::string status = "ok";
        double err = std::numeric_limits<double>::quiet_NaN();
        double train_loss = 0.0;
        std::uint64_t seed = cfg.seeds.empty() ? 1 : cfg.seeds.front();
        try {
            ProblemSetup setup = make_problem(cfg, k);
            if (!network_mode) {
                if (setup.mesh.dim != 1) {
                    throw std::invalid_argument(
                        "run_convergence_study: oracle mode needs a 1D problem");
                }
                const ScalarField f = forcing_field(fixed);
                const LoadVector load = setup.assemble(f);
                OracleSolution sol;
                if (setup.spec.nonlinearity == Nonlinearity::Burgers) {
                    sol = solve_burgers_newton(setup.system, load, nullptr, 1e-12, 25);
                } else {
                    sol = solve_linear(setup.system, load);
                }
                Field1D field;
                field.mesh = &setup.mesh;
                field.dofmap = &setup.dofmap;
                field.coeffs = scatter_full(setup.system, setup.dofmap, sol.alpha_star);
                const Reference1D ref =
                    refined_reference(setup.spec, f, setup.order, setup.mesh, cfg.ref_factor);
                err = l2_error_1d(field, ref, true);
            } else {
                const Dataset train_ds = make_dataset(setup, cfg.m_train, cfg.train_seed);
                const Dataset test_ds = make_dataset(setup, cfg.m_test, cfg.test_seed, "test");
                const auto oracle = oracle_solutions(setup, test_ds);
                const NetworkConfig ncfg = network_config_for(cfg, setup, seed);
                const TrainState state =
                    train(ncfg, setup.system, train_ds, setup.dofmap, optimizer_config_for(cfg));
                train_loss = state.final_loss;
                err = evaluate_against_oracle(ncfg, state.params, setup, test_ds, oracle)
                          .mean_rel_l2;
            }
            pts.push_back({static_cast<double>(k), err});
        } catch (const NumericError&) {
            status = "diverged";
        } catch (const ConvergenceError&) {
            status = "diverged";
        }
        const double wall = opts.zero_wall_time ? 0.0 : now_seconds() - t0;
        const double h = 2.0 / k;
        report.rows.push_back({cfg.problem, network_mode ? "network" : "oracle",
                               std::to_string(k), fmt(h), order_name(cfg.order),
                               std::to_string(network_mode ? cfg.m_train : 0),
                               std::to_string(seed), fmt(train_loss), fmt(err), fmt(wall),
                               status});
    }
    if (pts.size() >= 2) {
        const auto [slope, resid] = fit_loglog_slope(pts);
        report.slope = slope;
        report.slope_residual = resid;
    }
    return report;
}

Report run_benchmark(const ExperimentConfig& cfg, const RunOptions& opts) {
    Report report;
    report.columns = {"problem", "elements",   "h",           "order",      "m_train",
                      "m_test",  "seed",       "train_loss",  "train_rel_l2", "test_rel_l2",
                      "wall_time_s"};
    ProblemSetup setup = make_problem(cfg);
    const Dataset train_ds = make_dataset(setup, cfg.m_train, cfg.train_seed);
    const Dataset test_ds = make_dataset(setup, cfg.m_test, cfg.test_seed, "test");
    const auto oracle_train = oracle_solutions(setup, train_ds);
    const auto oracle_test = oracle_solutions(setup, test_ds);

    for (std::uint64_t seed : cfg.seeds) {
        const double t0 = now_seconds();
        const NetworkConfig ncfg = network_config_for(cfg, setup, seed);
        const TrainState state =
            train(ncfg, setup.system, train_ds, setup.dofmap, optimizer_config_for(cfg));
        const EvalStats train_stats =
            evaluate_against_oracle(ncfg, state.params, setup, train_ds, oracle_train);
        const EvalStats test_stats =
            evaluate_against_oracle(ncfg, state.params, setup, test_ds, oracle_test);
        const double wall = opts.zero_wall_time ? 0.0 : now_seconds() - t0;
        report.rows.push_back({cfg.problem, std::to_string(setup.elements), fmt(setup.h),
                               order_name(cfg.order), std::to_string(cfg.m_train),
                               std::to_string(cfg.m_test), std::to_string(seed),
                               fmt(state.final_loss), fmt(train_stats.mean_rel_l2),
                               fmt(test_stats.mean_rel_l2), fmt(wall)});
    }
    return report;
}

Report run_singular_study(const ExperimentConfig& cfg, const RunOptions& opts) {
    Report report;
    report.columns = {"problem", "eps",     "enriched", "elements",   "h",
                      "order",   "m_train", "m_test",   "seed",       "oracle_rel_l2",
                      "train_loss", "net_rel_l2", "wall_time_s"};
    const std::uint64_t seed = cfg.seeds.empty() ? 1 : cfg.seeds.front();

    for (double eps : cfg.eps_list) {
        ExperimentConfig cell_cfg = cfg;
        cell_cfg.epsilon = eps;

        // Layer-resolving per-sample references shared by both cells.
        ProblemSetup probe = make_problem(cell_cfg, -1, false);
        const int sign = convection_sign(probe.spec);
        const Mesh fine_mesh = layer_resolving_mesh(-1.0, 1.0, eps, sign < 0 ? -1.0 : 1.0,
                                                    std::max(1024, 8 * probe.elements));
        const DofMap fine_dm = build_dofmap(fine_mesh, ElemOrder::P2);
        const AssembledSystem fine_sys = assemble_bilinear(probe.spec, fine_mesh, fine_dm);
        const LinearSolver fine_solver(fine_sys.A);
        const Dataset fine_test =
            build_dataset(probe.family, cfg.m_test, cfg.test_seed, [&](const ScalarField& f) {
                return assemble_load(fine_mesh, fine_dm, f, probe.spec.bc);
            });
        std::vector<std::vector<double>> ref_coeffs;
        ref_coeffs.reserve(cfg.m_test);
        for (int m = 0; m < cfg.m_test; ++m) {
            ref_coeffs.push_back(
                scatter_full(fine_sys, fine_dm, fine_solver.solve(fine_test.loads[m].f)));
        }

        for (const bool enriched : {false, true}) {
            const double t0 = now_seconds();
            ProblemSetup setup = make_problem(cell_cfg, -1, enriched);
            const Dataset train_ds = make_dataset(setup, cfg.m_train, cfg.train_seed);
            const Dataset test_ds = make_dataset(setup, cfg.m_test, cfg.test_seed, "test");

            // Oracle column: mean error of the classical solve vs the
            // layer-resolving reference over the test inputs.
            const auto oracle = oracle_solutions(setup, test_ds);
            double oracle_err = 0.0;
            for (int m = 0; m < cfg.m_test; ++m) {
                Field1D field;
                field.mesh = &setup.mesh;
                field.dofmap = &setup.dofmap;
                field.coeffs = scatter_full(setup.system, setup.dofmap, oracle[m].alpha_star);
                if (enriched) {
                    field.corrector = setup.basis;
                    field.corrector_weight = oracle[m].alpha_star.back();
                }
                oracle_err += l2_error_1d(field, fine_mesh, fine_dm, ref_coeffs[m], true);
            }
            oracle_err /= std::max(1, cfg.m_test);

            const NetworkConfig ncfg = network_config_for(cell_cfg, setup, seed);
            const TrainState state = train(ncfg, setup.system, train_ds, setup.dofmap,
                                           optimizer_config_for(cell_cfg));
            double net_err = 0.0;
            for (int m = 0; m < cfg.m_test; ++m) {
                const std::vector<double> enc =
                    encode_input(ncfg, test_ds.samples[m], setup.dofmap, setup.system);
                const PredictedField pred =
                    predict_solution(ncfg, state.params, setup.system, setup.dofmap, enc);
                Field1D field;
                field.mesh = &setup.mesh;
                field.dofmap = &setup.dofmap;
                field.coeffs = pred.coeffs;
                if (pred.enriched) {
                    field.corrector = setup.basis;
                    field.corrector_weight = pred.corrector_weight;
                }
                net_err += l2_error_1d(field, fine_mesh, fine_dm, ref_coeffs[m], true);
            }
            net_err /= std::max(1, cfg.m_test);

            const double wall = opts.zero_wall_time ? 0.0 : now_seconds() - t0;
            report.rows.push_back({cfg.problem, fmt(eps), enriched ? "1" : "0",
                                   std::to_string(setup.elements), fmt(setup.h),
                                   order_name(cfg.order), std::to_string(cfg.m_train),
                                   std::to_string(cfg.m_test), std::to_string(seed),
                                   fmt(oracle_err), fmt(state.final_loss), fmt(net_err),
                                   fmt(wall)});
        }
    }
    return report;
}

}  // namespace feop
