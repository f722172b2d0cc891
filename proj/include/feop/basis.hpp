#pragma once

#include <array>

#include "feop/dofmap.hpp"

namespace feop {

/// Nodal basis values and reference-coordinate gradients at one point of the
/// reference simplex. Local DOF order matches DofMap::element_dofs:
/// vertices first, then the edge midpoints (1D P2: v0, v1, mid;
/// 2D P2: v0, v1, v2, m01, m12, m20).
struct BasisValues {
    int count = 0;
    std::array<double, 6> values{};
    std::array<std::array<double, 2>, 6> gradients{};
};

/// Throws std::invalid_argument when the point lies outside the reference
/// simplex (tolerance 1e-12).
BasisValues reference_basis(ElemOrder order, int dim, std::array<double, 2> local);

}  // namespace feop
