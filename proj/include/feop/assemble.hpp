#pragma once

#include <optional>
#include <string>
#include <vector>

#include "feop/dofmap.hpp"
#include "feop/linalg.hpp"
#include "feop/mesh.hpp"
#include "feop/problem.hpp"

namespace feop {

/// Load vector over the retained DOFs; omega carries the parameters of the
/// forcing realization that produced it (empty for plain functions).
struct LoadVector {
    std::vector<double> f;
    std::vector<double> omega;
};

/// Rank-3 form T[i][j][k] = int phi_j phi_k d(phi_i)/dx grouped by test row i
/// (element-local support, so a few entries per row). Symmetric in (j,k).
struct BurgersTensor {
    int n = 0;
    std::vector<int> row_ptr{0};
    std::vector<int> jj;
    std::vector<int> kk;
    std::vector<double> val;

    /// out += scale * q(alpha) with q_i = 1/2 sum_{j,k} T[i][j][k] a_j a_k.
    void add_quadratic(const double* alpha, double* out, double scale) const;
    /// dense += scale * C(alpha) with C_ik = sum_j T[i][j][k] a_j.
    void add_contraction(const double* alpha, Matrix& dense, double scale) const;
};

/// Galerkin system over the retained DOFs (interior for Dirichlet, all DOFs
/// for Neumann): operator matrix A, the mass matrix in the same indexing,
/// and for Burgers the rank-3 tensor of the quadratic term.
struct AssembledSystem {
    CsrMatrix A;
    CsrMatrix mass;
    BurgersTensor tensor;
    bool has_tensor = false;

    std::vector<int> dof_index;  // global DOF -> row, -1 when eliminated
    std::vector<int> row_dofs;   // row -> global DOF
    double epsilon = 1.0;
    BcKind bc = BcKind::Dirichlet0;
    Nonlinearity nonlinearity = Nonlinearity::None;

    // Set when the system is corrector-enriched: the extra trailing row/col.
    std::optional<CorrectorBasis> corrector;
    std::string warning;

    int n() const { return A.n_rows; }
    /// Rows holding nodal coefficients (n() - 1 when enriched).
    int n_nodal() const { return corrector ? n() - 1 : n(); }
};

AssembledSystem assemble_bilinear(const ProblemSpec& problem, const Mesh& mesh,
                                  const DofMap& dofmap);

LoadVector assemble_load(const Mesh& mesh, const DofMap& dofmap, const ScalarField& f,
                         BcKind bc);

/// sqrt(v^T M v)
double l2_norm(const std::vector<double>& coeffs, const CsrMatrix& mass);
/// ||v - w||_M / ||w||_M; throws std::domain_error when ||w|| = 0.
double l2_rel_error(const std::vector<double>& coeffs, const std::vector<double>& ref,
                    const CsrMatrix& mass);

}  // namespace feop
