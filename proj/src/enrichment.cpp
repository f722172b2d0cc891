#include "feop/enrichment.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "feop/basis.hpp"
#include "feop/quadrature.hpp"

namespace feop {

namespace {

constexpr double kDomainTol = 1e-12;
// exp(-d/eps) is identically zero in double beyond this many layer widths.
constexpr double kLayerExtent = 700.0;

struct NativeCorrector {
    double exp_term;    // e^{-(1+x)/eps}
    double span_decay;  // s = 1 - e^{-2/eps}
};

}  // namespace

CorrectorValue corrector_eval(const CorrectorBasis& basis, double x) {
    if (x < -1.0 - kDomainTol || x > 1.0 + kDomainTol) {
        throw std::invalid_argument("corrector_eval: x outside [-1, 1]");
    }
    // Native orientation has the layer at x = -1; mirror for b > 0.
    const double t = basis.b_sign < 0 ? x : -x;
    const double eps = basis.epsilon;
    const double e = std::exp(-(1.0 + t) / eps);
    const double s = -std::expm1(-2.0 / eps);  // 1 - e^{-2/eps}
    CorrectorValue out;
    out.value = e - (1.0 - 0.5 * s * (t + 1.0));
    out.derivative = -e / eps + 0.5 * s;
    if (basis.b_sign > 0) out.derivative = -out.derivative;
    return out;
}

double integrate_graded(const std::function<double(double)>& g, double xl, double xr,
                        double eps, double layer_at) {
    if (!(xl < xr)) throw std::invalid_argument("integrate_graded: empty interval");
    if (!(eps > 0.0)) throw std::invalid_argument("integrate_graded: eps must be positive");
    static const auto gauss = [] {
        std::vector<double> x, w;
        gauss_legendre_01(10, x, w);
        return std::make_pair(x, w);
    }();
    const std::vector<double>& gauss_x = gauss.first;
    const std::vector<double>& gauss_w = gauss.second;

    // Piece boundaries as distances from the layer endpoint.
    const double lo = std::min(std::fabs(xl - layer_at), std::fabs(xr - layer_at));
    const double hi = std::max(std::fabs(xl - layer_at), std::fabs(xr - layer_at));
    std::vector<double> cuts{lo};
    for (double d = 0.25 * eps; d < hi && d < kLayerExtent * eps; d *= 2.0) {
        if (d > lo) cuts.push_back(d);
    }
    cuts.push_back(hi);
    std::sort(cuts.begin(), cuts.end());

    const double sign = xl >= layer_at ? 1.0 : -1.0;  // direction away from the layer
    double acc = 0.0;
    for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
        double a = layer_at + sign * cuts[p];
        double b = layer_at + sign * cuts[p + 1];
        if (a > b) std::swap(a, b);
        const double w = b - a;
        if (!(w > 0.0)) continue;
        for (std::size_t q = 0; q < gauss_x.size(); ++q) {
            acc += gauss_w[q] * w * g(a + gauss_x[q] * w);
        }
    }
    return acc;
}

int convection_sign(const ProblemSpec& problem) {
    if (!problem.b) return -1;
    const double bx = problem.b(0.0, 0.0)[0];
    return bx > 0.0 ? 1 : -1;
}

namespace {

struct LocalBasis {
    const Mesh& mesh;
    const DofMap& dofmap;
    int element;
    int local;

    double x0, h;
    LocalBasis(const Mesh& m, const DofMap& dm, int e, int l)
        : mesh(m), dofmap(dm), element(e), local(l) {
        x0 = m.nodes[m.elements[e][0]][0];
        h = m.nodes[m.elements[e][1]][0] - x0;
    }
    double value(double x) const {
        const BasisValues bv = reference_basis(dofmap.order, 1, {(x - x0) / h, 0.0});
        return bv.values[local];
    }
    double deriv(double x) const {
        const BasisValues bv = reference_basis(dofmap.order, 1, {(x - x0) / h, 0.0});
        return bv.gradients[local][0] / h;
    }
};

}  // namespace

AssembledSystem assemble_enriched(const ProblemSpec& problem, const Mesh& mesh,
                                  const DofMap& dofmap, const CorrectorBasis& basis) {
    if (mesh.dim != 1) {
        throw std::invalid_argument("assemble_enriched: 2D enrichment is unsupported");
    }
    if (problem.nonlinearity != Nonlinearity::None) {
        throw std::invalid_argument("assemble_enriched: linear problems only");
    }
    if (problem.bc != BcKind::Dirichlet0) {
        throw std::invalid_argument("assemble_enriched: homogeneous Dirichlet only");
    }
    if (std::fabs(mesh.nodes.front()[0] + 1.0) > kDomainTol ||
        std::fabs(mesh.nodes.back()[0] - 1.0) > kDomainTol) {
        throw std::invalid_argument("assemble_enriched: corrector basis is defined on [-1, 1]");
    }

    AssembledSystem base = assemble_bilinear(problem, mesh, dofmap);
    const int n = base.n();
    const double layer_at = basis.b_sign < 0 ? -1.0 : 1.0;

    auto a_coef = [&problem](double x) { return problem.a ? problem.a(x, 0.0) : 1.0; };
    auto b_coef = [&problem](double x) { return problem.b ? problem.b(x, 0.0)[0] : 0.0; };
    auto c_coef = [&problem](double x) { return problem.c ? problem.c(x, 0.0) : 0.0; };
    const double eps = problem.epsilon;

    std::vector<Triplet> a_trip, m_trip;
    for (int i = 0; i < n; ++i) {
        for (int k = base.A.row_ptr[i]; k < base.A.row_ptr[i + 1]; ++k) {
            a_trip.push_back({i, base.A.col[k], base.A.val[k]});
        }
        for (int k = base.mass.row_ptr[i]; k < base.mass.row_ptr[i + 1]; ++k) {
            m_trip.push_back({i, base.mass.col[k], base.mass.val[k]});
        }
    }

    for (int e = 0; e < mesh.element_count(); ++e) {
        const double x0 = mesh.nodes[mesh.elements[e][0]][0];
        const double x1 = mesh.nodes[mesh.elements[e][1]][0];
        for (int l = 0; l < dofmap.dofs_per_element; ++l) {
            const int gi = base.dof_index[dofmap.element_dofs[e][l]];
            if (gi < 0) continue;
            const LocalBasis phi(mesh, dofmap, e, l);
            // Column N: trial = corrector, test = phi_i.
            const double col = integrate_graded(
                [&](double x) {
                    const CorrectorValue cv = corrector_eval(basis, x);
                    return eps * a_coef(x) * cv.derivative * phi.deriv(x) +
                           b_coef(x) * cv.derivative * phi.value(x) +
                           c_coef(x) * cv.value * phi.value(x);
                },
                x0, x1, basis.epsilon, layer_at);
            // Row N: trial = phi_k, test = corrector.
            const double row = integrate_graded(
                [&](double x) {
                    const CorrectorValue cv = corrector_eval(basis, x);
                    return eps * a_coef(x) * phi.deriv(x) * cv.derivative +
                           b_coef(x) * phi.deriv(x) * cv.value +
                           c_coef(x) * phi.value(x) * cv.value;
                },
                x0, x1, basis.epsilon, layer_at);
            const double mass = integrate_graded(
                [&](double x) { return corrector_eval(basis, x).value * phi.value(x); }, x0, x1,
                basis.epsilon, layer_at);
            a_trip.push_back({gi, n, col});
            a_trip.push_back({n, gi, row});
            m_trip.push_back({gi, n, mass});
            m_trip.push_back({n, gi, mass});
        }
        const double corner = integrate_graded(
            [&](double x) {
                const CorrectorValue cv = corrector_eval(basis, x);
                return eps * a_coef(x) * cv.derivative * cv.derivative +
                       b_coef(x) * cv.derivative * cv.value + c_coef(x) * cv.value * cv.value;
            },
            x0, x1, basis.epsilon, layer_at);
        const double corner_mass = integrate_graded(
            [&](double x) {
                const double v = corrector_eval(basis, x).value;
                return v * v;
            },
            x0, x1, basis.epsilon, layer_at);
        a_trip.push_back({n, n, corner});
        m_trip.push_back({n, n, corner_mass});
    }

    AssembledSystem sys;
    sys.A = CsrMatrix::from_triplets(n + 1, n + 1, std::move(a_trip));
    sys.mass = CsrMatrix::from_triplets(n + 1, n + 1, std::move(m_trip));
    sys.dof_index = base.dof_index;
    sys.row_dofs = base.row_dofs;
    sys.epsilon = base.epsilon;
    sys.bc = base.bc;
    sys.nonlinearity = base.nonlinearity;
    sys.corrector = basis;
    if (problem.epsilon >= 0.1) {
        sys.warning = "enrichment: eps >= 0.1, no strong layer to capture";
    }
    return sys;
}

LoadVector assemble_enriched_load(const Mesh& mesh, const DofMap& dofmap,
                                  const CorrectorBasis& basis, const ScalarField& f) {
    LoadVector load = assemble_load(mesh, dofmap, f, BcKind::Dirichlet0);
    const double layer_at = basis.b_sign < 0 ? -1.0 : 1.0;
    double tail = 0.0;
    for (int e = 0; e < mesh.element_count(); ++e) {
        const double x0 = mesh.nodes[mesh.elements[e][0]][0];
        const double x1 = mesh.nodes[mesh.elements[e][1]][0];
        tail += integrate_graded(
            [&](double x) { return f(x, 0.0) * corrector_eval(basis, x).value; }, x0, x1,
            basis.epsilon, layer_at);
    }
    load.f.push_back(tail);
    return load;
}

Mesh layer_resolving_mesh(double a, double b, double eps, double layer_at, int n_uniform) {
    if (!(a < b)) throw std::invalid_argument("layer_resolving_mesh: requires a < b");
    if (n_uniform < 2) throw std::invalid_argument("layer_resolving_mesh: n_uniform >= 2");
    std::vector<double> xs;
    for (int i = 0; i <= n_uniform; ++i) {
        xs.push_back(a + (b - a) * static_cast<double>(i) / n_uniform);
    }
    const double span = b - a;
    const double sign = std::fabs(layer_at - a) < std::fabs(layer_at - b) ? 1.0 : -1.0;
    const double endpoint = sign > 0 ? a : b;
    for (double d = eps / 32.0; d < std::min(kLayerExtent * eps, 0.5 * span); d *= 2.0) {
        xs.push_back(endpoint + sign * d);
    }
    std::sort(xs.begin(), xs.end());
    std::vector<double> dedup;
    for (double x : xs) {
        if (dedup.empty() || x - dedup.back() > eps / 128.0) dedup.push_back(x);
    }
    dedup.front() = a;
    dedup.back() = b;
    return interval_mesh_from_nodes(std::move(dedup));
}

SingularResult solve_singular(const ProblemSpec& problem, const ScalarField& f, int elements,
                              ElemOrder order, bool enriched) {
    const Mesh mesh = generate_interval_mesh(-1.0, 1.0, elements);
    const DofMap dofmap = build_dofmap(mesh, order);
    const int sign = convection_sign(problem);
    const CorrectorBasis basis{problem.epsilon, sign};

    SingularResult out;
    Field1D field;
    field.mesh = &mesh;
    field.dofmap = &dofmap;
    AssembledSystem sys;
    if (enriched) {
        sys = assemble_enriched(problem, mesh, dofmap, basis);
        const LoadVector load = assemble_enriched_load(mesh, dofmap, basis, f);
        out.solution = solve_linear(sys, load);
        out.corrector_weight = out.solution.alpha_star.back();
        field.corrector = basis;
        field.corrector_weight = out.corrector_weight;
    } else {
        sys = assemble_bilinear(problem, mesh, dofmap);
        const LoadVector load = assemble_load(mesh, dofmap, f, problem.bc);
        out.solution = solve_linear(sys, load);
    }
    field.coeffs = scatter_full(sys, dofmap, out.solution.alpha_star);

    const Mesh fine = layer_resolving_mesh(-1.0, 1.0, problem.epsilon,
                                           sign < 0 ? -1.0 : 1.0, std::max(1024, 8 * elements));
    const Reference1D ref = reference_solution(problem, f, ElemOrder::P2, fine);
    out.rel_l2_error = l2_error_1d(field, ref, true);
    return out;
}

}  // namespace feop
