#pragma once

#include <array>
#include <vector>

#include "feop/mesh.hpp"

namespace feop {

enum class ElemOrder { P1, P2 };

/// Degree-of-freedom numbering over a mesh. P1 DOFs are the mesh nodes; P2
/// adds one DOF per unique edge (the element midpoint in 1D), keyed by the
/// sorted vertex pair so shared edges share the DOF. Boundary DOFs are the
/// boundary nodes plus, in 2D, midpoints of boundary edges. In 1D the DOFs
/// are numbered in coordinate order, which keeps assembled systems banded.
struct DofMap {
    ElemOrder order = ElemOrder::P1;
    int dim = 1;
    int dofs_per_element = 2;
    std::vector<std::array<double, 2>> dof_coords;
    std::vector<std::array<int, 6>> element_dofs;  // unused slots -1
    std::vector<char> dof_on_boundary;
    std::vector<int> interior_dofs;  // sorted
    std::vector<int> boundary_dofs;  // sorted

    int n_dofs() const { return static_cast<int>(dof_coords.size()); }
    int n_interior() const { return static_cast<int>(interior_dofs.size()); }
};

DofMap build_dofmap(const Mesh& mesh, ElemOrder order);

}  // namespace feop
