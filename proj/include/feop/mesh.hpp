#pragma once

#include <array>
#include <string>
#include <vector>

namespace feop {

/// Simplicial mesh: interval elements in 1D, triangles in 2D. Immutable
/// after construction; validate() enforces the structural invariants
/// (index ranges, positive orientation, no coincident nodes, boundary
/// consistency).
struct Mesh {
    int dim = 1;
    std::vector<std::array<double, 2>> nodes;     // y = 0 in 1D
    std::vector<std::array<int, 3>> elements;     // third index -1 in 1D
    std::vector<int> boundary_nodes;              // sorted, unique
    std::vector<std::array<int, 2>> boundary_edges;  // 2D only

    int node_count() const { return static_cast<int>(nodes.size()); }
    int element_count() const { return static_cast<int>(elements.size()); }

    /// 2D: signed triangle area; 1D: element length.
    double element_measure(int e) const;
    double domain_diameter() const;
    bool is_boundary_node(int i) const;

    void validate() const;  // throws std::invalid_argument on violation
};

Mesh generate_interval_mesh(double a, double b, int element_count);

/// Interval mesh over an explicit strictly increasing node list
/// (graded / layer-resolving meshes).
Mesh interval_mesh_from_nodes(std::vector<double> xs);

/// [-1,1]^2 split into n x n cells of two triangles each.
Mesh generate_square_mesh(int n);

/// Structured polar triangulation of a disk centered at the origin;
/// ring j holds 6j nodes, 6*rings^2 triangles in total.
Mesh generate_disk_mesh(double radius, int rings);

Mesh load_mesh(const std::string& path);
void save_mesh(const Mesh& mesh, const std::string& path);

}  // namespace feop
