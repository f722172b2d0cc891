#include "feop/dofmap.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace feop {

namespace {

int dofs_per_element_for(ElemOrder order, int dim) {
    if (dim == 1) return order == ElemOrder::P1 ? 2 : 3;
    return order == ElemOrder::P1 ? 3 : 6;
}

}  // namespace

DofMap build_dofmap(const Mesh& mesh, ElemOrder order) {
    mesh.validate();
    DofMap dm;
    dm.order = order;
    dm.dim = mesh.dim;
    dm.dofs_per_element = dofs_per_element_for(order, mesh.dim);

    const int nn = mesh.node_count();
    dm.dof_coords.assign(mesh.nodes.begin(), mesh.nodes.end());
    dm.dof_on_boundary.assign(nn, 0);
    for (int b : mesh.boundary_nodes) dm.dof_on_boundary[b] = 1;

    dm.element_dofs.resize(mesh.element_count(), {-1, -1, -1, -1, -1, -1});
    for (int e = 0; e < mesh.element_count(); ++e) {
        for (int v = 0; v <= mesh.dim; ++v) dm.element_dofs[e][v] = mesh.elements[e][v];
    }

    if (order == ElemOrder::P2) {
        // One midpoint DOF per unique edge, keyed by the sorted vertex pair.
        std::map<std::pair<int, int>, int> edge_dof;
        auto midpoint_dof = [&](int a, int b) {
            const auto key = std::minmax(a, b);
            auto it = edge_dof.find(key);
            if (it != edge_dof.end()) return it->second;
            const int id = static_cast<int>(dm.dof_coords.size());
            dm.dof_coords.push_back({0.5 * (mesh.nodes[a][0] + mesh.nodes[b][0]),
                                     0.5 * (mesh.nodes[a][1] + mesh.nodes[b][1])});
            dm.dof_on_boundary.push_back(0);
            edge_dof.emplace(key, id);
            return id;
        };
        if (mesh.dim == 1) {
            for (int e = 0; e < mesh.element_count(); ++e) {
                const auto& el = mesh.elements[e];
                dm.element_dofs[e][2] = midpoint_dof(el[0], el[1]);
            }
        } else {
            for (int e = 0; e < mesh.element_count(); ++e) {
                const auto& el = mesh.elements[e];
                dm.element_dofs[e][3] = midpoint_dof(el[0], el[1]);
                dm.element_dofs[e][4] = midpoint_dof(el[1], el[2]);
                dm.element_dofs[e][5] = midpoint_dof(el[2], el[0]);
            }
            for (const auto& be : mesh.boundary_edges) {
                const auto key = std::minmax(be[0], be[1]);
                auto it = edge_dof.find(key);
                if (it != edge_dof.end()) dm.dof_on_boundary[it->second] = 1;
            }
        }
    }

    if (mesh.dim == 1) {
        // Renumber by coordinate so 1D systems stay banded.
        const int n = dm.n_dofs();
        std::vector<int> order_ids(n);
        std::iota(order_ids.begin(), order_ids.end(), 0);
        std::sort(order_ids.begin(), order_ids.end(), [&dm](int a, int b) {
            return dm.dof_coords[a][0] < dm.dof_coords[b][0];
        });
        std::vector<int> new_id(n);
        for (int r = 0; r < n; ++r) new_id[order_ids[r]] = r;
        std::vector<std::array<double, 2>> coords(n);
        std::vector<char> bnd(n);
        for (int i = 0; i < n; ++i) {
            coords[new_id[i]] = dm.dof_coords[i];
            bnd[new_id[i]] = dm.dof_on_boundary[i];
        }
        dm.dof_coords = std::move(coords);
        dm.dof_on_boundary = std::move(bnd);
        for (auto& ed : dm.element_dofs) {
            for (int v = 0; v < dm.dofs_per_element; ++v) ed[v] = new_id[ed[v]];
        }
    }

    for (int i = 0; i < dm.n_dofs(); ++i) {
        (dm.dof_on_boundary[i] ? dm.boundary_dofs : dm.interior_dofs).push_back(i);
    }
    return dm;
}

}  // namespace feop
