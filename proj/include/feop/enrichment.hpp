#pragma once

#include <functional>
#include <optional>

#include "feop/assemble.hpp"
#include "feop/oracle.hpp"

namespace feop {

/// Integrate g over [xl, xr] with subintervals geometrically graded toward
/// the layer endpoint (width eps/4 at the layer, doubling outward), 10-point
/// Gauss per piece. layer_at is the domain endpoint carrying the layer.
double integrate_graded(const std::function<double(double)>& g, double xl, double xr,
                        double eps, double layer_at);

/// Base system augmented with the corrector row/column
/// (B[phi_cor, phi_i], B[phi_j, phi_cor], B[phi_cor, phi_cor]) and the
/// matching mass entries. 1D, homogeneous Dirichlet, linear problems only;
/// eps >= 0.1 sets a warning on the returned system instead of failing.
AssembledSystem assemble_enriched(const ProblemSpec& problem, const Mesh& mesh,
                                  const DofMap& dofmap, const CorrectorBasis& basis);

/// Standard load plus the trailing corrector entry l(phi_cor) = int f phi_cor.
LoadVector assemble_enriched_load(const Mesh& mesh, const DofMap& dofmap,
                                  const CorrectorBasis& basis, const ScalarField& f);

/// Interval mesh resolving an exponential boundary layer: a uniform grid
/// plus nodes geometrically graded from the layer endpoint (eps/32 doubling).
Mesh layer_resolving_mesh(double a, double b, double eps, double layer_at, int n_uniform);

struct SingularResult {
    OracleSolution solution;
    double corrector_weight = 0.0;  // 0 unless enriched
    double rel_l2_error = 0.0;      // against the layer-resolving reference
};

/// Oracle solve of the (optionally corrector-enriched) singularly perturbed
/// problem on a uniform K-element mesh over [-1,1], with the error reported
/// against a layer-resolving P2 reference.
SingularResult solve_singular(const ProblemSpec& problem, const ScalarField& f, int elements,
                              ElemOrder order, bool enriched);

/// Convection sign of the problem (decides the layer endpoint).
int convection_sign(const ProblemSpec& problem);

}  // namespace feop
