#pragma once

#include <array>
#include <vector>

namespace feop {

/// Quadrature nodes and weights on the reference simplex: the unit interval
/// [0,1] (weights sum to 1) or the unit triangle (0,0)-(1,0)-(0,1) (weights
/// sum to 1/2).
struct QuadratureRule {
    int dim = 1;
    int degree = 0;  // exact for total polynomial degree <= degree
    std::vector<std::array<double, 2>> points;
    std::vector<double> weights;
};

/// Supported degrees: 1D up to 9, triangles up to 5. Throws
/// std::invalid_argument beyond that.
QuadratureRule quadrature_rule(int dim, int degree);

/// n-point Gauss-Legendre rule on [0,1] (exact to degree 2n-1); internal
/// helper for the graded boundary-layer integrals, no degree cap.
void gauss_legendre_01(int n, std::vector<double>& points, std::vector<double>& weights);

}  // namespace feop
