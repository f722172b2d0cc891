#pragma once

#include <optional>
#include <vector>

#include "feop/assemble.hpp"
#include "feop/rng.hpp"

namespace feop {

struct OracleSolution {
    std::vector<double> alpha_star;
    double residual_norm = 0.0;
    int newton_iters = 0;                   // 0 for linear solves
    std::vector<double> residual_history;   // Newton only
};

/// Direct factorization solve of A alpha = F; enforces the residual contract
/// |A alpha - F| <= 1e-10 (1 + |F|).
OracleSolution solve_linear(const AssembledSystem& sys, const LoadVector& load);

/// Newton iteration on r(alpha) = A alpha - q(alpha) - F with
/// q_i = 1/2 alpha^T T_i alpha and J = A - C(alpha). Initial guess defaults
/// to the linearized solve. Stops when |r| <= tol (1 + |F|).
OracleSolution solve_burgers_newton(const AssembledSystem& sys, const LoadVector& load,
                                    const std::vector<double>* init, double tol,
                                    int max_iters);

/// Extreme |eigenvalue| estimates by (inverse) power iteration; used for the
/// two-sided bound rho_min |x| <= |A x| <= rho_max |x| on symmetric systems.
double power_iteration_max(const CsrMatrix& a, Rng& rng, int max_iters = 50000,
                           double tol = 1e-13);
double power_iteration_min(const CsrMatrix& a, Rng& rng, int max_iters = 50000,
                           double tol = 1e-13);

/// Expand retained-row coefficients to the full DOF vector; eliminated
/// Dirichlet DOFs are written as exact zeros. For enriched systems the
/// trailing corrector coefficient is dropped (returned separately by callers
/// that need it).
std::vector<double> scatter_full(const AssembledSystem& sys, const DofMap& dofmap,
                                 const std::vector<double>& rows);

/// Piecewise-polynomial field over a 1D mesh (full DOF coefficients), with
/// an optional corrector-basis tail term.
struct Field1D {
    const Mesh* mesh = nullptr;
    const DofMap* dofmap = nullptr;
    std::vector<double> coeffs;
    std::optional<CorrectorBasis> corrector;
    double corrector_weight = 0.0;

    double eval(double x) const;
};

/// Pointwise evaluation on a 2D mesh (brute-force element location).
double eval_field_2d(const Mesh& mesh, const DofMap& dofmap,
                     const std::vector<double>& coeffs, double x, double y);

struct Reference1D {
    Mesh mesh;
    DofMap dofmap;
    std::vector<double> full_coeffs;
    Field1D field() const { return Field1D{&mesh, &dofmap, full_coeffs, std::nullopt, 0.0}; }
};

/// Solve the problem on the given fine 1D mesh (linear or Burgers path
/// depending on the problem spec).
Reference1D reference_solution(const ProblemSpec& problem, const ScalarField& f,
                               ElemOrder order, const Mesh& fine_mesh);

/// Convenience: uniformly refined reference on the coarse mesh's interval;
/// requires factor >= 4.
Reference1D refined_reference(const ProblemSpec& problem, const ScalarField& f,
                              ElemOrder order, const Mesh& coarse_mesh, int factor);

/// L2 error of `approx` against the reference, integrated element-by-element
/// over the reference mesh; relative to ||ref|| when `relative` is set.
double l2_error_1d(const Field1D& approx, const Reference1D& ref, bool relative);
double l2_error_1d(const Field1D& approx, const Mesh& ref_mesh, const DofMap& ref_dofmap,
                   const std::vector<double>& ref_coeffs, bool relative);

/// L2 norm of a 1D field integrated over its own mesh.
double l2_norm_1d(const Field1D& field);

}  // namespace feop
