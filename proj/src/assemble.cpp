#include "feop/assemble.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

#include "feop/basis.hpp"
#include "feop/error.hpp"
#include "feop/quadrature.hpp"

namespace feop {

namespace {

constexpr int kAssemblyDegree1d = 9;
constexpr int kAssemblyDegree2d = 5;

struct ElementGeometry {
    double measure;          // length (1D) / |det J| = 2*area (2D)
    double inv_jt[2][2];     // maps reference gradients to physical ones
    std::array<double, 2> origin;
    double jac[2][2];
};

ElementGeometry element_geometry(const Mesh& mesh, int e) {
    ElementGeometry g{};
    const auto& el = mesh.elements[e];
    const auto& p0 = mesh.nodes[el[0]];
    g.origin = p0;
    if (mesh.dim == 1) {
        const double h = mesh.nodes[el[1]][0] - p0[0];
        g.measure = h;
        g.jac[0][0] = h;
        g.inv_jt[0][0] = 1.0 / h;
        return g;
    }
    const auto& p1 = mesh.nodes[el[1]];
    const auto& p2 = mesh.nodes[el[2]];
    const double j00 = p1[0] - p0[0];
    const double j10 = p1[1] - p0[1];
    const double j01 = p2[0] - p0[0];
    const double j11 = p2[1] - p0[1];
    const double det = j00 * j11 - j01 * j10;
    g.measure = det;  // positive by mesh validation
    g.jac[0][0] = j00;
    g.jac[0][1] = j01;
    g.jac[1][0] = j10;
    g.jac[1][1] = j11;
    // J^{-T} = 1/det [[j11, -j10], [-j01, j00]]
    g.inv_jt[0][0] = j11 / det;
    g.inv_jt[0][1] = -j10 / det;
    g.inv_jt[1][0] = -j01 / det;
    g.inv_jt[1][1] = j00 / det;
    return g;
}

std::array<double, 2> physical_point(const ElementGeometry& g, int dim,
                                     const std::array<double, 2>& ref) {
    if (dim == 1) return {g.origin[0] + g.jac[0][0] * ref[0], 0.0};
    return {g.origin[0] + g.jac[0][0] * ref[0] + g.jac[0][1] * ref[1],
            g.origin[1] + g.jac[1][0] * ref[0] + g.jac[1][1] * ref[1]};
}

std::array<double, 2> physical_gradient(const ElementGeometry& g, int dim,
                                        const std::array<double, 2>& ref_grad) {
    if (dim == 1) return {ref_grad[0] * g.inv_jt[0][0], 0.0};
    return {g.inv_jt[0][0] * ref_grad[0] + g.inv_jt[0][1] * ref_grad[1],
            g.inv_jt[1][0] * ref_grad[0] + g.inv_jt[1][1] * ref_grad[1]};
}

}  // namespace

void BurgersTensor::add_quadratic(const double* alpha, double* out, double scale) const {
    for (int i = 0; i < n; ++i) {
        double q = 0.0;
        for (int p = row_ptr[i]; p < row_ptr[i + 1]; ++p) {
            q += val[p] * alpha[jj[p]] * alpha[kk[p]];
        }
        out[i] += 0.5 * scale * q;
    }
}

void BurgersTensor::add_contraction(const double* alpha, Matrix& dense, double scale) const {
    for (int i = 0; i < n; ++i) {
        for (int p = row_ptr[i]; p < row_ptr[i + 1]; ++p) {
            dense(i, kk[p]) += scale * val[p] * alpha[jj[p]];
        }
    }
}

AssembledSystem assemble_bilinear(const ProblemSpec& problem, const Mesh& mesh,
                                  const DofMap& dofmap) {
    if (!(problem.epsilon > 0.0)) {
        throw std::invalid_argument("assemble_bilinear: epsilon must be positive");
    }
    if (problem.nonlinearity == Nonlinearity::Burgers && mesh.dim != 1) {
        throw std::invalid_argument("assemble_bilinear: Burgers term is 1D only");
    }

    AssembledSystem sys;
    sys.epsilon = problem.epsilon;
    sys.bc = problem.bc;
    sys.nonlinearity = problem.nonlinearity;

    const bool eliminate = problem.bc == BcKind::Dirichlet0;
    sys.dof_index.assign(dofmap.n_dofs(), -1);
    if (eliminate) {
        for (int k = 0; k < dofmap.n_interior(); ++k) {
            sys.dof_index[dofmap.interior_dofs[k]] = k;
            sys.row_dofs.push_back(dofmap.interior_dofs[k]);
        }
    } else {
        sys.row_dofs.resize(dofmap.n_dofs());
        for (int k = 0; k < dofmap.n_dofs(); ++k) {
            sys.dof_index[k] = k;
            sys.row_dofs[k] = k;
        }
    }
    const int n = static_cast<int>(sys.row_dofs.size());

    const QuadratureRule rule =
        quadrature_rule(mesh.dim, mesh.dim == 1 ? kAssemblyDegree1d : kAssemblyDegree2d);
    const double mass_shift = problem.bc == BcKind::Neumann0WithMass ? 1.0 : 0.0;

    std::vector<Triplet> a_trip, m_trip;
    std::map<std::array<int, 3>, double> tensor_entries;

    std::vector<BasisValues> basis_at(rule.points.size());
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
        basis_at[q] = reference_basis(dofmap.order, mesh.dim, rule.points[q]);
    }

    const int nd = dofmap.dofs_per_element;
    for (int e = 0; e < mesh.element_count(); ++e) {
        const ElementGeometry geom = element_geometry(mesh, e);
        const auto& ed = dofmap.element_dofs[e];
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            const auto x = physical_point(geom, mesh.dim, rule.points[q]);
            const double w = rule.weights[q] * geom.measure;
            const double a_val = problem.a ? problem.a(x[0], x[1]) : 1.0;
            if (!(a_val > 0.0)) {
                throw CoefficientError("assemble_bilinear: diffusion coefficient <= 0 at x = " +
                                       std::to_string(x[0]));
            }
            const std::array<double, 2> b_val =
                problem.b ? problem.b(x[0], x[1]) : std::array<double, 2>{0.0, 0.0};
            const double c_val = (problem.c ? problem.c(x[0], x[1]) : 0.0) + mass_shift;
            const BasisValues& bv = basis_at[q];
            std::array<std::array<double, 2>, 6> grad;
            for (int l = 0; l < nd; ++l) grad[l] = physical_gradient(geom, mesh.dim, bv.gradients[l]);

            for (int li = 0; li < nd; ++li) {
                const int gi = sys.dof_index[ed[li]];
                if (gi < 0) continue;
                for (int lk = 0; lk < nd; ++lk) {
                    const int gk = sys.dof_index[ed[lk]];
                    if (gk < 0) continue;
                    const double diff = problem.epsilon * a_val *
                                        (grad[lk][0] * grad[li][0] + grad[lk][1] * grad[li][1]);
                    const double conv = (b_val[0] * grad[lk][0] + b_val[1] * grad[lk][1]) *
                                        bv.values[li];
                    const double mass = bv.values[lk] * bv.values[li];
                    a_trip.push_back({gi, gk, w * (diff + conv + c_val * mass)});
                    m_trip.push_back({gi, gk, w * mass});
                }
            }
            if (problem.nonlinearity == Nonlinearity::Burgers) {
                for (int li = 0; li < nd; ++li) {
                    const int gi = sys.dof_index[ed[li]];
                    if (gi < 0) continue;
                    for (int lj = 0; lj < nd; ++lj) {
                        const int gj = sys.dof_index[ed[lj]];
                        if (gj < 0) continue;
                        for (int lk = 0; lk < nd; ++lk) {
                            const int gk = sys.dof_index[ed[lk]];
                            if (gk < 0) continue;
                            tensor_entries[{gi, gj, gk}] +=
                                w * bv.values[lj] * bv.values[lk] * grad[li][0];
                        }
                    }
                }
            }
        }
    }

    sys.A = CsrMatrix::from_triplets(n, n, std::move(a_trip));
    sys.mass = CsrMatrix::from_triplets(n, n, std::move(m_trip));
    if (problem.nonlinearity == Nonlinearity::Burgers) {
        sys.has_tensor = true;
        sys.tensor.n = n;
        sys.tensor.row_ptr.assign(n + 1, 0);
        for (const auto& [key, v] : tensor_entries) ++sys.tensor.row_ptr[key[0] + 1];
        for (int i = 0; i < n; ++i) sys.tensor.row_ptr[i + 1] += sys.tensor.row_ptr[i];
        sys.tensor.jj.resize(tensor_entries.size());
        sys.tensor.kk.resize(tensor_entries.size());
        sys.tensor.val.resize(tensor_entries.size());
        std::vector<int> fill(n, 0);
        for (const auto& [key, v] : tensor_entries) {
            const int pos = sys.tensor.row_ptr[key[0]] + fill[key[0]]++;
            sys.tensor.jj[pos] = key[1];
            sys.tensor.kk[pos] = key[2];
            sys.tensor.val[pos] = v;
        }
    }
    return sys;
}

LoadVector assemble_load(const Mesh& mesh, const DofMap& dofmap, const ScalarField& f,
                         BcKind bc) {
    if (!f) throw std::invalid_argument("assemble_load: null forcing");
    const bool eliminate = bc == BcKind::Dirichlet0;
    std::vector<int> dof_index(dofmap.n_dofs(), -1);
    int n = 0;
    if (eliminate) {
        for (int k = 0; k < dofmap.n_interior(); ++k) dof_index[dofmap.interior_dofs[k]] = k;
        n = dofmap.n_interior();
    } else {
        for (int k = 0; k < dofmap.n_dofs(); ++k) dof_index[k] = k;
        n = dofmap.n_dofs();
    }

    const QuadratureRule rule =
        quadrature_rule(mesh.dim, mesh.dim == 1 ? kAssemblyDegree1d : kAssemblyDegree2d);
    std::vector<BasisValues> basis_at(rule.points.size());
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
        basis_at[q] = reference_basis(dofmap.order, mesh.dim, rule.points[q]);
    }

    LoadVector load;
    load.f.assign(n, 0.0);
    const int nd = dofmap.dofs_per_element;
    for (int e = 0; e < mesh.element_count(); ++e) {
        const ElementGeometry geom = element_geometry(mesh, e);
        const auto& ed = dofmap.element_dofs[e];
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            const auto x = physical_point(geom, mesh.dim, rule.points[q]);
            const double w = rule.weights[q] * geom.measure * f(x[0], x[1]);
            for (int li = 0; li < nd; ++li) {
                const int gi = dof_index[ed[li]];
                if (gi >= 0) load.f[gi] += w * basis_at[q].values[li];
            }
        }
    }
    return load;
}

double l2_norm(const std::vector<double>& coeffs, const CsrMatrix& mass) {
    if (static_cast<int>(coeffs.size()) != mass.n_rows) {
        throw std::invalid_argument("l2_norm: size mismatch");
    }
    const std::vector<double> mv = mass.matvec(coeffs);
    double s = 0.0;
    for (std::size_t i = 0; i < coeffs.size(); ++i) s += coeffs[i] * mv[i];
    return std::sqrt(std::max(0.0, s));
}

double l2_rel_error(const std::vector<double>& coeffs, const std::vector<double>& ref,
                    const CsrMatrix& mass) {
    if (coeffs.size() != ref.size()) throw std::invalid_argument("l2_rel_error: size mismatch");
    const double denom = l2_norm(ref, mass);
    if (denom == 0.0) throw std::domain_error("l2_rel_error: reference norm is zero");
    std::vector<double> diff(coeffs.size());
    for (std::size_t i = 0; i < coeffs.size(); ++i) diff[i] = coeffs[i] - ref[i];
    return l2_norm(diff, mass) / denom;
}

}  // namespace feop
