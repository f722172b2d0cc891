#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "feop/assemble.hpp"
#include "feop/rng.hpp"

namespace feop {

enum class InputKind { Forcing, ReactionCoefficient };

/// Trigonometric input family: amplitudes m_j uniform in [m_lo, m_hi],
/// frequencies n_j uniform in [n_lo, n_hi].
///   1D: f(x)   = m0 sin(n0 x) + m1 cos(n1 x),        omega = (m0, n0, m1, n1)
///   2D: f(x,y) = m0 sin(n0 x + n1 y) + m1 cos(n2 x + n3 y),
///       omega = (m0, m1, n0, n1, n2, n3)
struct ForcingFamily {
    int dim = 1;
    double m_lo = 3.0;
    double m_hi = 5.0;
    double n_lo = 0.0;
    double n_hi = 6.283185307179586;
    InputKind kind = InputKind::Forcing;

    void validate() const;
    int omega_size() const { return dim == 1 ? 4 : 6; }
};

struct ForcingSample {
    int dim = 1;
    std::vector<double> omega;
};

/// Draws the omega components in their listed order from the seeded stream.
ForcingSample sample_forcing(const ForcingFamily& family, Rng& rng);

double eval_forcing(const ForcingSample& sample, double x, double y = 0.0);

/// Closed-form field for assembly; copies the sample.
ScalarField forcing_field(const ForcingSample& sample);

/// Seeded sample set with precomputed load vectors. For the variable
/// reaction-coefficient mode each sample also carries its own assembled
/// system (the operator depends on omega there).
struct Dataset {
    ForcingFamily family;
    std::uint64_t seed = 0;
    std::string split = "train";
    std::vector<ForcingSample> samples;
    std::vector<LoadVector> loads;
    std::vector<AssembledSystem> systems;  // empty unless kind = ReactionCoefficient

    int size() const { return static_cast<int>(samples.size()); }
    bool per_sample_systems() const { return !systems.empty(); }
};

using LoadAssembler = std::function<LoadVector(const ScalarField&)>;
using SystemAssembler =
    std::function<std::pair<AssembledSystem, LoadVector>(const ScalarField&)>;

Dataset build_dataset(const ForcingFamily& family, int count, std::uint64_t seed,
                      const LoadAssembler& assemble);

/// Variable-coefficient mode: the sampled field enters as the reaction
/// coefficient, so A(omega) is rebuilt (and cached) per sample.
Dataset build_dataset_reaction(const ForcingFamily& family, int count, std::uint64_t seed,
                               const SystemAssembler& assemble);

/// Text round trip of the omega matrix (loads are rebuilt on import).
void save_dataset(const Dataset& ds, const std::string& path);
Dataset load_dataset(const std::string& path);
void rebuild_loads(Dataset& ds, const LoadAssembler& assemble);

}  // namespace feop
