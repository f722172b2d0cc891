#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "feop/enrichment.hpp"
#include "feop/opnet.hpp"

namespace feop {

/// One experiment definition; parseable from a `key = value` file with
/// unknown keys rejected. Defaults follow the per-problem benchmark tables
/// at desk scale (small sample counts and epoch budgets).
struct ExperimentConfig {
    std::string problem = "bc1";
    std::vector<int> elements = {24};
    ElemOrder order = ElemOrder::P2;
    double m_lo = 3.0;
    double m_hi = 5.0;
    double n_lo = 0.0;
    double n_hi = 6.283185307179586;
    int m_train = 50;
    int m_test = 200;
    std::uint64_t train_seed = 101;
    std::uint64_t test_seed = 202;
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
    int epochs = 20000;
    double lr = 1e-3;
    std::string optimizer = "adam";
    std::vector<int> hidden = {128, 128, 128};
    std::string activation = "tanh";
    std::string input_encoding = "f_at_dofs";
    std::string final_activation = "linear";
    double epsilon = 0.1;
    std::vector<double> eps_list = {1e-5};
    std::string mesh_file;
    int ref_factor = 32;
    bool oracle_mode = true;
    double stop_tol = 0.0;
};

ExperimentConfig default_config(const std::string& problem);
ExperimentConfig load_config(const std::string& path);
void save_config(const ExperimentConfig& cfg, const std::string& path);

struct Report {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    std::optional<double> slope;
    std::optional<double> slope_residual;
};

/// Writes <dir>/report.csv: one header line, data rows, and a trailing
/// `# slope ...` comment when a fit is present.
void emit_report(const Report& report, const std::string& dir);

/// Ordinary least squares on (log x, log y); returns slope and the RMS fit
/// residual. Requires at least two points.
std::pair<double, double> fit_loglog_slope(const std::vector<std::array<double, 2>>& pts);

/// A benchmark problem bound to a mesh: spec, DOFs, assembled system and the
/// matching forcing family / load assembly.
struct ProblemSetup {
    std::string name;
    ProblemSpec spec;
    Mesh mesh;
    DofMap dofmap;
    AssembledSystem system;
    ForcingFamily family;
    int elements = 0;
    ElemOrder order = ElemOrder::P1;
    double h = 0.0;
    bool reaction_input = false;
    std::optional<CorrectorBasis> basis;

    /// Load vector for one input function (corrector-augmented when the
    /// setup is enriched).
    LoadVector assemble(const ScalarField& f) const;
};

/// elements_override < 0 uses cfg.elements.front(). For `singular` the
/// enriched flag selects the corrector-augmented system.
ProblemSetup make_problem(const ExperimentConfig& cfg, int elements_override = -1,
                          bool enriched = false);

Dataset make_dataset(const ProblemSetup& setup, int count, std::uint64_t seed,
                     const std::string& split = "train");

/// Classical solves for every sample (direct or Newton depending on the
/// problem; per-sample systems in the variable-coefficient mode).
std::vector<OracleSolution> oracle_solutions(const ProblemSetup& setup, const Dataset& ds);

struct EvalStats {
    double mean_rel_l2 = 0.0;
    double max_rel_l2 = 0.0;
};

/// Mean/max relative L2 error (mass-matrix norm) of the network predictions
/// against the per-sample oracle coefficients.
EvalStats evaluate_against_oracle(const NetworkConfig& config, const NetworkParams& params,
                                  const ProblemSetup& setup, const Dataset& ds,
                                  const std::vector<OracleSolution>& oracle);

NetworkConfig network_config_for(const ExperimentConfig& cfg, const ProblemSetup& setup,
                                 std::uint64_t seed);
OptimizerConfig optimizer_config_for(const ExperimentConfig& cfg);

struct RunOptions {
    bool zero_wall_time = false;  // deterministic CSV output
};

Report run_convergence_study(const ExperimentConfig& cfg, bool network_mode,
                             const RunOptions& opts = {});
Report run_benchmark(const ExperimentConfig& cfg, const RunOptions& opts = {});
Report run_singular_study(const ExperimentConfig& cfg, const RunOptions& opts = {});

}  // namespace feop
