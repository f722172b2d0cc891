#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <set>

#include "feop/dofmap.hpp"
#include "feop/error.hpp"
#include "feop/mesh.hpp"

using namespace feop;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

// Test-side ear-clipping triangulation for simple polygons (CCW vertex loop).
std::vector<std::array<int, 3>> ear_clip(const std::vector<std::array<double, 2>>& pts) {
    std::vector<int> ring(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) ring[i] = static_cast<int>(i);
    auto cross = [&](int a, int b, int c) {
        return (pts[b][0] - pts[a][0]) * (pts[c][1] - pts[a][1]) -
               (pts[c][0] - pts[a][0]) * (pts[b][1] - pts[a][1]);
    };
    auto inside = [&](int a, int b, int c, int p) {
        return cross(a, b, p) > 0 && cross(b, c, p) > 0 && cross(c, a, p) > 0;
    };
    std::vector<std::array<int, 3>> tris;
    while (ring.size() > 3) {
        bool clipped = false;
        for (std::size_t i = 0; i < ring.size(); ++i) {
            const int a = ring[(i + ring.size() - 1) % ring.size()];
            const int b = ring[i];
            const int c = ring[(i + 1) % ring.size()];
            if (cross(a, b, c) <= 0) continue;
            bool ear = true;
            for (int p : ring) {
                if (p != a && p != b && p != c && inside(a, b, c, p)) {
                    ear = false;
                    break;
                }
            }
            if (!ear) continue;
            tris.push_back({a, b, c});
            ring.erase(ring.begin() + i);
            clipped = true;
            break;
        }
        REQUIRE(clipped);
    }
    tris.push_back({ring[0], ring[1], ring[2]});
    return tris;
}

}  // namespace

TEST_CASE("interval mesh generator") {
    const Mesh m = generate_interval_mesh(-1.0, 1.0, 2);
    CHECK(m.node_count() == 3);
    CHECK(m.nodes[0][0] == -1.0);
    CHECK(m.nodes[1][0] == 0.0);
    CHECK(m.nodes[2][0] == 1.0);
    CHECK(m.elements[0][0] == 0);
    CHECK(m.elements[1][1] == 2);
    CHECK(m.boundary_nodes == std::vector<int>{0, 2});

    const Mesh fine = generate_interval_mesh(-1.0, 1.0, 32);
    CHECK(fine.node_count() == 33);
    CHECK(fine.element_measure(0) == doctest::Approx(1.0 / 16));

    const Mesh single = generate_interval_mesh(0.0, 1.0, 1);
    CHECK(single.element_count() == 1);
    CHECK(single.boundary_nodes.size() == 2);

    CHECK_THROWS_AS(generate_interval_mesh(0.0, 1.0, 0), std::invalid_argument);
    CHECK_THROWS_AS(generate_interval_mesh(1.0, 0.0, 4), std::invalid_argument);
}

TEST_CASE("square mesh counts and orientation") {
    const Mesh tiny = generate_square_mesh(1);
    CHECK(tiny.node_count() == 4);
    CHECK(tiny.element_count() == 2);

    const Mesh m = generate_square_mesh(2);
    CHECK(m.node_count() == 9);
    CHECK(m.element_count() == 8);
    CHECK(m.boundary_nodes.size() == 8);

    const Mesh big = generate_square_mesh(14);
    CHECK(big.element_count() == 392);
    CHECK(big.node_count() == 225);
    CHECK(big.boundary_nodes.size() == 4 * 14);
    double area = 0.0;
    for (int e = 0; e < big.element_count(); ++e) {
        CHECK(big.element_measure(e) > 0.0);
        area += big.element_measure(e);
    }
    CHECK(area == doctest::Approx(4.0));

    CHECK_THROWS_AS(generate_square_mesh(0), std::invalid_argument);
}

TEST_CASE("disk mesh: fan, boundary radius, area converges at rate 2") {
    const Mesh fan = generate_disk_mesh(1.0, 1);
    CHECK(fan.element_count() == 6);
    CHECK(fan.node_count() == 7);

    const Mesh m = generate_disk_mesh(1.0, 8);
    CHECK(m.element_count() == 6 * 64);
    for (int b : m.boundary_nodes) {
        const double r = std::hypot(m.nodes[b][0], m.nodes[b][1]);
        CHECK(std::fabs(r - 1.0) <= 1e-12);
    }

    // Triangulated area approaches pi at second order in 1/rings.
    double prev_defect = 0.0;
    for (const int rings : {4, 8, 16}) {
        const Mesh d = generate_disk_mesh(1.0, rings);
        double area = 0.0;
        for (int e = 0; e < d.element_count(); ++e) area += d.element_measure(e);
        const double defect = std::numbers::pi - area;
        CHECK(defect > 0.0);
        if (prev_defect > 0.0) CHECK(prev_defect / defect == doctest::Approx(4.0).epsilon(0.15));
        prev_defect = defect;
    }

    CHECK_THROWS_AS(generate_disk_mesh(1.0, 0), std::invalid_argument);
    CHECK_THROWS_AS(generate_disk_mesh(0.0, 3), std::invalid_argument);
}

TEST_CASE("mesh save/load round trip is lossless") {
    const std::string path = temp_path("feop_mesh_roundtrip.txt");
    const Mesh m = generate_square_mesh(2);
    save_mesh(m, path);
    const Mesh r = load_mesh(path);
    REQUIRE(r.node_count() == m.node_count());
    REQUIRE(r.element_count() == m.element_count());
    for (int i = 0; i < m.node_count(); ++i) {
        CHECK(r.nodes[i][0] == m.nodes[i][0]);
        CHECK(r.nodes[i][1] == m.nodes[i][1]);
    }
    for (int e = 0; e < m.element_count(); ++e) {
        CHECK(r.elements[e] == m.elements[e]);
    }
    CHECK(r.boundary_nodes == m.boundary_nodes);
    std::filesystem::remove(path);

    const std::string path1d = temp_path("feop_mesh_roundtrip_1d.txt");
    const Mesh m1 = generate_interval_mesh(-1.0, 1.0, 7);
    save_mesh(m1, path1d);
    const Mesh r1 = load_mesh(path1d);
    CHECK(r1.nodes == m1.nodes);
    CHECK(r1.boundary_nodes == m1.boundary_nodes);
    std::filesystem::remove(path1d);
}

TEST_CASE("polygon mesh file with the irregular eight-vertex outline loads") {
    const std::vector<std::array<double, 2>> verts = {
        {-1.0, -1.0}, {1.0, -1.0}, {1.0, 0.0},  {0.6, 0.0},
        {0.5, -0.5},  {-0.0, -0.5}, {-0.6, 1.0}, {-1.0, 1.0}};
    const auto tris = ear_clip(verts);
    const std::string path = temp_path("feop_polygon.txt");
    {
        std::ofstream os(path);
        os << "# irregular polygon\n";
        os << "2 " << verts.size() << ' ' << tris.size() << ' ' << verts.size() << "\n";
        for (const auto& v : verts) os << v[0] << ' ' << v[1] << '\n';
        for (const auto& t : tris) os << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
        for (std::size_t i = 0; i < verts.size(); ++i) {
            os << i << ' ' << (i + 1) % verts.size() << '\n';
        }
    }
    const Mesh m = load_mesh(path);
    CHECK(m.element_count() == static_cast<int>(tris.size()));
    for (const auto& v : verts) {
        bool found = false;
        for (const auto& n : m.nodes) {
            if (n[0] == v[0] && n[1] == v[1]) found = true;
        }
        CHECK(found);
    }
    std::filesystem::remove(path);
}

TEST_CASE("mesh file validation errors carry line numbers") {
    const std::string path = temp_path("feop_bad_mesh.txt");
    {
        std::ofstream os(path);
        // Second triangle has two identical vertices -> zero area.
        os << "2 4 2 4\n0 0\n1 0\n1 1\n0 1\n0 1 2\n0 2 2\n0 1\n1 2\n2 3\n3 0\n";
    }
    CHECK_THROWS_AS(load_mesh(path), ParseError);
    {
        std::ofstream os(path);
        os << "2 3 1 3\n0 0\n1 0\n0 1\n0 1 7\n0 1\n1 2\n2 0\n";
    }
    CHECK_THROWS_AS(load_mesh(path), ParseError);
    {
        std::ofstream os(path);
        os << "bogus\n";
    }
    CHECK_THROWS_AS(load_mesh(path), ParseError);
    std::filesystem::remove(path);
}

TEST_CASE("validate rejects coincident nodes") {
    Mesh m = generate_interval_mesh(0.0, 1.0, 2);
    m.nodes[1][0] = 0.0;  // collide with node 0 (also makes element 0 empty)
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);
}

TEST_CASE("dofmap: P1 and P2 counts on intervals") {
    const Mesh m = generate_interval_mesh(-1.0, 1.0, 2);
    const DofMap p1 = build_dofmap(m, ElemOrder::P1);
    CHECK(p1.n_dofs() == 3);
    CHECK(p1.n_interior() == 1);

    const DofMap p2 = build_dofmap(m, ElemOrder::P2);
    CHECK(p2.n_dofs() == 5);
    CHECK(p2.n_interior() == 3);
    // Coordinate ordering keeps 1D systems banded.
    for (int i = 0; i + 1 < p2.n_dofs(); ++i) {
        CHECK(p2.dof_coords[i][0] < p2.dof_coords[i + 1][0]);
    }
}

TEST_CASE("dofmap: P2 on a square matches the brute-force edge count") {
    const Mesh m = generate_square_mesh(2);
    const DofMap p2 = build_dofmap(m, ElemOrder::P2);
    std::set<std::pair<int, int>> edges;
    for (const auto& el : m.elements) {
        for (int v = 0; v < 3; ++v) {
            const int a = el[v];
            const int b = el[(v + 1) % 3];
            edges.insert({std::min(a, b), std::max(a, b)});
        }
    }
    CHECK(p2.n_dofs() == m.node_count() + static_cast<int>(edges.size()));
    // Boundary DOFs: 8 boundary nodes plus the midpoints of 8 boundary edges.
    CHECK(p2.boundary_dofs.size() == 16);

    // Interior/boundary partition.
    CHECK(p2.n_interior() + static_cast<int>(p2.boundary_dofs.size()) == p2.n_dofs());
    std::set<int> all(p2.interior_dofs.begin(), p2.interior_dofs.end());
    for (int b : p2.boundary_dofs) CHECK(all.insert(b).second);
    CHECK(static_cast<int>(all.size()) == p2.n_dofs());

    // Each midpoint DOF is shared by exactly the elements sharing the edge.
    std::map<int, int> midpoint_use;
    for (const auto& ed : p2.element_dofs) {
        for (int l = 3; l < 6; ++l) ++midpoint_use[ed[l]];
    }
    for (const auto& [dof, count] : midpoint_use) {
        CHECK(count <= 2);
        CHECK(count >= 1);
    }
}
