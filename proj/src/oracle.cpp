#include "feop/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "feop/basis.hpp"
#include "feop/error.hpp"
#include "feop/kernels.hpp"
#include "feop/quadrature.hpp"

namespace feop {

namespace {

double norm2(const std::vector<double>& v) {
    return std::sqrt(kernels::nrm2_sq(v.data(), v.size()));
}

}  // namespace

OracleSolution solve_linear(const AssembledSystem& sys, const LoadVector& load) {
    if (static_cast<int>(load.f.size()) != sys.n()) {
        throw std::invalid_argument("solve_linear: load length mismatch");
    }
    LinearSolver solver(sys.A);
    OracleSolution sol;
    sol.alpha_star = solver.solve(load.f);
    std::vector<double> r = sys.A.matvec(sol.alpha_star);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= load.f[i];
    sol.residual_norm = norm2(r);
    const double bound = 1e-10 * (1.0 + norm2(load.f));
    if (!(sol.residual_norm <= bound)) {
        throw NumericError("solve_linear: residual " + std::to_string(sol.residual_norm) +
                           " violates the direct-solve contract");
    }
    return sol;
}

namespace {

std::vector<double> burgers_residual(const AssembledSystem& sys, const LoadVector& load,
                                     const std::vector<double>& alpha) {
    std::vector<double> r = sys.A.matvec(alpha);
    sys.tensor.add_quadratic(alpha.data(), r.data(), -1.0);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= load.f[i];
    return r;
}

}  // namespace

OracleSolution solve_burgers_newton(const AssembledSystem& sys, const LoadVector& load,
                                    const std::vector<double>* init, double tol,
                                    int max_iters) {
    if (!sys.has_tensor) {
        throw std::invalid_argument("solve_burgers_newton: system lacks the Burgers tensor");
    }
    if (static_cast<int>(load.f.size()) != sys.n()) {
        throw std::invalid_argument("solve_burgers_newton: load length mismatch");
    }
    OracleSolution sol;
    if (init) {
        sol.alpha_star = *init;
    } else {
        // Linearized start: drop the quadratic term.
        LinearSolver lin(sys.A);
        sol.alpha_star = lin.solve(load.f);
    }
    const double target = tol * (1.0 + norm2(load.f));
    const int n = sys.n();
    for (int it = 0; it <= max_iters; ++it) {
        std::vector<double> r = burgers_residual(sys, load, sol.alpha_star);
        sol.residual_norm = norm2(r);
        sol.residual_history.push_back(sol.residual_norm);
        if (sol.residual_norm <= target) {
            sol.newton_iters = it;
            return sol;
        }
        if (it == max_iters) break;
        Matrix jac = sys.A.to_dense();
        sys.tensor.add_contraction(sol.alpha_star.data(), jac, -1.0);
        DenseLu lu;
        try {
            lu = lu_factor(std::move(jac));
        } catch (const SingularMatrixError&) {
            throw SingularMatrixError("solve_burgers_newton: singular Jacobian at iteration " +
                                      std::to_string(it));
        }
        std::vector<double> delta(n);
        lu_solve(lu, r.data(), delta.data());
        for (int i = 0; i < n; ++i) sol.alpha_star[i] -= delta[i];
    }
    throw ConvergenceError("solve_burgers_newton: no convergence after " +
                               std::to_string(max_iters) + " iterations",
                           sol.residual_norm);
}

namespace {

double rayleigh_extreme(const CsrMatrix& a, Rng& rng, int max_iters, double tol,
                        const LinearSolver* inverse) {
    const int n = a.n_rows;
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = rng.uniform(-1.0, 1.0);
    double nx = norm2(x);
    for (int i = 0; i < n; ++i) x[i] /= nx;
    double rho_prev = 0.0;
    std::vector<double> y(n);
    for (int it = 0; it < max_iters; ++it) {
        if (inverse) {
            y = inverse->solve(x);
        } else {
            a.matvec(x.data(), y.data());
        }
        const double ny = norm2(y);
        if (ny == 0.0) return 0.0;
        for (int i = 0; i < n; ++i) x[i] = y[i] / ny;
        // Rayleigh quotient of A at the current iterate.
        a.matvec(x.data(), y.data());
        const double rho = kernels::dot(x.data(), y.data(), n);
        if (it > 0 && std::fabs(rho - rho_prev) <= tol * std::fabs(rho)) return std::fabs(rho);
        rho_prev = rho;
    }
    return std::fabs(rho_prev);
}

}  // namespace

double power_iteration_max(const CsrMatrix& a, Rng& rng, int max_iters, double tol) {
    return rayleigh_extreme(a, rng, max_iters, tol, nullptr);
}

double power_iteration_min(const CsrMatrix& a, Rng& rng, int max_iters, double tol) {
    LinearSolver inv(a);
    return rayleigh_extreme(a, rng, max_iters, tol, &inv);
}

std::vector<double> scatter_full(const AssembledSystem& sys, const DofMap& dofmap,
                                 const std::vector<double>& rows) {
    std::vector<double> full(dofmap.n_dofs(), 0.0);
    const int nodal = static_cast<int>(sys.row_dofs.size());
    if (static_cast<int>(rows.size()) < nodal) {
        throw std::invalid_argument("scatter_full: coefficient vector too short");
    }
    for (int r = 0; r < nodal; ++r) full[sys.row_dofs[r]] = rows[r];
    return full;
}

double Field1D::eval(double x) const {
    const auto& nodes = mesh->nodes;
    const int n_el = mesh->element_count();
    int e = static_cast<int>(std::upper_bound(nodes.begin(), nodes.end(), x,
                                              [](double v, const std::array<double, 2>& p) {
                                                  return v < p[0];
                                              }) -
                             nodes.begin()) -
            1;
    e = std::clamp(e, 0, n_el - 1);
    const double x0 = nodes[mesh->elements[e][0]][0];
    const double h = nodes[mesh->elements[e][1]][0] - x0;
    double t = (x - x0) / h;
    t = std::clamp(t, 0.0, 1.0);
    const BasisValues bv = reference_basis(dofmap->order, 1, {t, 0.0});
    double v = 0.0;
    for (int l = 0; l < bv.count; ++l) v += coeffs[dofmap->element_dofs[e][l]] * bv.values[l];
    if (corrector) v += corrector_weight * corrector_eval(*corrector, x).value;
    return v;
}

double eval_field_2d(const Mesh& mesh, const DofMap& dofmap,
                     const std::vector<double>& coeffs, double x, double y) {
    constexpr double tol = 1e-10;
    for (int e = 0; e < mesh.element_count(); ++e) {
        const auto& el = mesh.elements[e];
        const auto& p0 = mesh.nodes[el[0]];
        const auto& p1 = mesh.nodes[el[1]];
        const auto& p2 = mesh.nodes[el[2]];
        const double det = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
        const double xi = ((x - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (y - p0[1])) / det;
        const double eta = ((p1[0] - p0[0]) * (y - p0[1]) - (x - p0[0]) * (p1[1] - p0[1])) / det;
        if (xi >= -tol && eta >= -tol && xi + eta <= 1.0 + tol) {
            const BasisValues bv = reference_basis(
                dofmap.order, 2, {std::clamp(xi, 0.0, 1.0), std::clamp(eta, 0.0, 1.0)});
            double v = 0.0;
            for (int l = 0; l < bv.count; ++l) v += coeffs[dofmap.element_dofs[e][l]] * bv.values[l];
            return v;
        }
    }
    throw std::invalid_argument("eval_field_2d: point outside the mesh");
}

Reference1D reference_solution(const ProblemSpec& problem, const ScalarField& f,
                               ElemOrder order, const Mesh& fine_mesh) {
    Reference1D ref;
    ref.mesh = fine_mesh;
    ref.dofmap = build_dofmap(ref.mesh, order);
    const AssembledSystem sys = assemble_bilinear(problem, ref.mesh, ref.dofmap);
    const LoadVector load = assemble_load(ref.mesh, ref.dofmap, f, problem.bc);
    OracleSolution sol;
    if (problem.nonlinearity == Nonlinearity::Burgers) {
        sol = solve_burgers_newton(sys, load, nullptr, 1e-12, 25);
    } else {
        sol = solve_linear(sys, load);
    }
    ref.full_coeffs = scatter_full(sys, ref.dofmap, sol.alpha_star);
    return ref;
}

Reference1D refined_reference(const ProblemSpec& problem, const ScalarField& f,
                              ElemOrder order, const Mesh& coarse_mesh, int factor) {
    if (coarse_mesh.dim != 1) {
        throw std::invalid_argument("refined_reference: 1D meshes only");
    }
    if (factor < 4) {
        throw std::invalid_argument("refined_reference: refinement factor must be >= 4");
    }
    const double a = coarse_mesh.nodes.front()[0];
    const double b = coarse_mesh.nodes.back()[0];
    const Mesh fine = generate_interval_mesh(a, b, factor * coarse_mesh.element_count());
    return reference_solution(problem, f, order, fine);
}

double l2_error_1d(const Field1D& approx, const Mesh& ref_mesh, const DofMap& ref_dofmap,
                   const std::vector<double>& ref_coeffs, bool relative) {
    const QuadratureRule rule = quadrature_rule(1, 9);
    double err2 = 0.0;
    double ref2 = 0.0;
    const int nd = ref_dofmap.dofs_per_element;
    for (int e = 0; e < ref_mesh.element_count(); ++e) {
        const double x0 = ref_mesh.nodes[ref_mesh.elements[e][0]][0];
        const double h = ref_mesh.nodes[ref_mesh.elements[e][1]][0] - x0;
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            const double t = rule.points[q][0];
            const double x = x0 + t * h;
            const BasisValues bv = reference_basis(ref_dofmap.order, 1, {t, 0.0});
            double u_ref = 0.0;
            for (int l = 0; l < nd; ++l) {
                u_ref += ref_coeffs[ref_dofmap.element_dofs[e][l]] * bv.values[l];
            }
            const double d = approx.eval(x) - u_ref;
            const double w = rule.weights[q] * h;
            err2 += w * d * d;
            ref2 += w * u_ref * u_ref;
        }
    }
    const double err = std::sqrt(err2);
    if (!relative) return err;
    if (ref2 == 0.0) throw std::domain_error("l2_error_1d: reference norm is zero");
    return err / std::sqrt(ref2);
}

double l2_error_1d(const Field1D& approx, const Reference1D& ref, bool relative) {
    return l2_error_1d(approx, ref.mesh, ref.dofmap, ref.full_coeffs, relative);
}

double l2_norm_1d(const Field1D& field) {
    const QuadratureRule rule = quadrature_rule(1, 9);
    double acc = 0.0;
    for (int e = 0; e < field.mesh->element_count(); ++e) {
        const double x0 = field.mesh->nodes[field.mesh->elements[e][0]][0];
        const double h = field.mesh->nodes[field.mesh->elements[e][1]][0] - x0;
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            const double x = x0 + rule.points[q][0] * h;
            const double v = field.eval(x);
            acc += rule.weights[q] * h * v * v;
        }
    }
    return std::sqrt(acc);
}

}  // namespace feop
