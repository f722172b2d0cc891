#pragma once

#include <array>
#include <functional>

namespace feop {

using ScalarField = std::function<double(double, double)>;
using VectorField = std::function<std::array<double, 2>(double, double)>;

enum class BcKind { Dirichlet0, Neumann0WithMass };
enum class Nonlinearity { None, Burgers };

inline ScalarField constant_field(double v) {
    return [v](double, double) { return v; };
}

/// PDE definition: -epsilon * div(a(x) grad u) + b(x).grad u + c(x) u
/// (+ u u_x with the Burgers nonlinearity) = f. Null fields mean a = 1,
/// b = 0, c = 0. The homogeneous Neumann case adds +u to the operator
/// (effective reaction c + 1) so the system stays invertible.
struct ProblemSpec {
    double epsilon = 1.0;
    ScalarField a;
    VectorField b;
    ScalarField c;
    Nonlinearity nonlinearity = Nonlinearity::None;
    BcKind bc = BcKind::Dirichlet0;
};

/// Closed-form boundary-layer corrector on [-1,1]. The layer sits at the
/// outflow endpoint: x = -1 for b < 0 (the formula's native case); b > 0
/// mirrors the coordinate.
struct CorrectorBasis {
    double epsilon = 1e-5;
    int b_sign = -1;
};

struct CorrectorValue {
    double value = 0.0;
    double derivative = 0.0;
};

/// Corrector value and derivative at x in [-1,1]; exp(-2/eps) underflows to
/// zero for small eps, which keeps both endpoint values exact. Implemented in
/// enrichment.cpp.
CorrectorValue corrector_eval(const CorrectorBasis& basis, double x);

}  // namespace feop
