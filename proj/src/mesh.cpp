#include "feop/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

#include "feop/error.hpp"

namespace feop {

namespace {
constexpr double kCoincidenceRel = 1e-12;
}

double Mesh::element_measure(int e) const {
    const auto& el = elements[e];
    if (dim == 1) {
        return nodes[el[1]][0] - nodes[el[0]][0];
    }
    const auto& p0 = nodes[el[0]];
    const auto& p1 = nodes[el[1]];
    const auto& p2 = nodes[el[2]];
    return 0.5 * ((p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]));
}

double Mesh::domain_diameter() const {
    double lo_x = 0, hi_x = 0, lo_y = 0, hi_y = 0;
    bool first = true;
    for (const auto& p : nodes) {
        if (first) {
            lo_x = hi_x = p[0];
            lo_y = hi_y = p[1];
            first = false;
        } else {
            lo_x = std::min(lo_x, p[0]);
            hi_x = std::max(hi_x, p[0]);
            lo_y = std::min(lo_y, p[1]);
            hi_y = std::max(hi_y, p[1]);
        }
    }
    return std::hypot(hi_x - lo_x, hi_y - lo_y);
}

bool Mesh::is_boundary_node(int i) const {
    return std::binary_search(boundary_nodes.begin(), boundary_nodes.end(), i);
}

void Mesh::validate() const {
    if (dim != 1 && dim != 2) throw std::invalid_argument("mesh: dim must be 1 or 2");
    if (nodes.empty()) throw std::invalid_argument("mesh: no nodes");
    const int nn = node_count();
    const int verts = dim + 1;
    for (int e = 0; e < element_count(); ++e) {
        for (int v = 0; v < verts; ++v) {
            const int idx = elements[e][v];
            if (idx < 0 || idx >= nn) {
                throw std::invalid_argument("mesh: element " + std::to_string(e) +
                                            " references node " + std::to_string(idx));
            }
        }
        if (!(element_measure(e) > 0.0)) {
            throw std::invalid_argument("mesh: element " + std::to_string(e) +
                                        " has non-positive measure");
        }
    }
    for (int b : boundary_nodes) {
        if (b < 0 || b >= nn) throw std::invalid_argument("mesh: boundary node out of range");
    }
    // Coincidence check within 1e-12 of the domain diameter.
    const double tol = kCoincidenceRel * domain_diameter();
    std::vector<int> order(nodes.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [this](int a, int b) {
        return nodes[a][0] != nodes[b][0] ? nodes[a][0] < nodes[b][0] : nodes[a][1] < nodes[b][1];
    });
    for (std::size_t i = 0; i < order.size(); ++i) {
        for (std::size_t j = i + 1; j < order.size(); ++j) {
            const auto& p = nodes[order[i]];
            const auto& q = nodes[order[j]];
            if (q[0] - p[0] > tol) break;
            if (std::fabs(q[1] - p[1]) <= tol && std::fabs(q[0] - p[0]) <= tol) {
                throw std::invalid_argument("mesh: nodes " + std::to_string(order[i]) + " and " +
                                            std::to_string(order[j]) + " coincide");
            }
        }
    }
    if (dim == 2) {
        std::set<int> edge_nodes;
        for (const auto& be : boundary_edges) {
            if (be[0] < 0 || be[0] >= nn || be[1] < 0 || be[1] >= nn) {
                throw std::invalid_argument("mesh: boundary edge out of range");
            }
            edge_nodes.insert(be[0]);
            edge_nodes.insert(be[1]);
        }
        for (int b : boundary_nodes) {
            if (!edge_nodes.count(b)) {
                throw std::invalid_argument("mesh: boundary node " + std::to_string(b) +
                                            " not in any boundary edge");
            }
        }
    }
}

Mesh generate_interval_mesh(double a, double b, int element_count) {
    if (!(a < b)) throw std::invalid_argument("generate_interval_mesh: requires a < b");
    if (element_count < 1) throw std::invalid_argument("generate_interval_mesh: requires K >= 1");
    Mesh m;
    m.dim = 1;
    m.nodes.resize(element_count + 1);
    for (int i = 0; i <= element_count; ++i) {
        const double t = static_cast<double>(i) / element_count;
        m.nodes[i] = {a + t * (b - a), 0.0};
    }
    m.elements.resize(element_count);
    for (int e = 0; e < element_count; ++e) m.elements[e] = {e, e + 1, -1};
    m.boundary_nodes = {0, element_count};
    m.validate();
    return m;
}

Mesh interval_mesh_from_nodes(std::vector<double> xs) {
    if (xs.size() < 2) throw std::invalid_argument("interval_mesh_from_nodes: need >= 2 nodes");
    if (!std::is_sorted(xs.begin(), xs.end())) {
        throw std::invalid_argument("interval_mesh_from_nodes: nodes must be increasing");
    }
    Mesh m;
    m.dim = 1;
    m.nodes.resize(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) m.nodes[i] = {xs[i], 0.0};
    m.elements.resize(xs.size() - 1);
    for (std::size_t e = 0; e + 1 < xs.size(); ++e) {
        m.elements[e] = {static_cast<int>(e), static_cast<int>(e + 1), -1};
    }
    m.boundary_nodes = {0, static_cast<int>(xs.size()) - 1};
    m.validate();
    return m;
}

Mesh generate_square_mesh(int n) {
    if (n < 1) throw std::invalid_argument("generate_square_mesh: requires n >= 1");
    Mesh m;
    m.dim = 2;
    auto id = [n](int i, int j) { return j * (n + 1) + i; };
    m.nodes.resize((n + 1) * (n + 1));
    for (int j = 0; j <= n; ++j) {
        for (int i = 0; i <= n; ++i) {
            m.nodes[id(i, j)] = {-1.0 + 2.0 * i / n, -1.0 + 2.0 * j / n};
        }
    }
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            m.elements.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            m.elements.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    }
    for (int i = 0; i < n; ++i) {
        m.boundary_edges.push_back({id(i, 0), id(i + 1, 0)});
        m.boundary_edges.push_back({id(i + 1, n), id(i, n)});
        m.boundary_edges.push_back({id(0, i + 1), id(0, i)});
        m.boundary_edges.push_back({id(n, i), id(n, i + 1)});
    }
    std::set<int> bset;
    for (const auto& e : m.boundary_edges) {
        bset.insert(e[0]);
        bset.insert(e[1]);
    }
    m.boundary_nodes.assign(bset.begin(), bset.end());
    m.validate();
    return m;
}

Mesh generate_disk_mesh(double radius, int rings) {
    if (!(radius > 0.0)) throw std::invalid_argument("generate_disk_mesh: requires radius > 0");
    if (rings < 1) throw std::invalid_argument("generate_disk_mesh: requires rings >= 1");
    Mesh m;
    m.dim = 2;
    m.nodes.push_back({0.0, 0.0});
    std::vector<std::vector<int>> ring_ids(rings + 1);
    ring_ids[0] = {0};
    for (int j = 1; j <= rings; ++j) {
        const int count = 6 * j;
        const double r = radius * j / rings;
        for (int k = 0; k < count; ++k) {
            const double ang = 2.0 * std::numbers::pi * k / count;
            ring_ids[j].push_back(static_cast<int>(m.nodes.size()));
            m.nodes.push_back({r * std::cos(ang), r * std::sin(ang)});
        }
    }
    // Center fan.
    for (int k = 0; k < 6; ++k) {
        m.elements.push_back({0, ring_ids[1][k], ring_ids[1][(k + 1) % 6]});
    }
    // Stitch consecutive rings by merging on angle.
    for (int j = 2; j <= rings; ++j) {
        const auto& inner = ring_ids[j - 1];
        const auto& outer = ring_ids[j];
        const int mi = static_cast<int>(inner.size());
        const int mo = static_cast<int>(outer.size());
        int i = 0, o = 0;
        while (i < mi || o < mo) {
            const double next_i = (i + 1) * 2.0 * std::numbers::pi / mi;
            const double next_o = (o + 1) * 2.0 * std::numbers::pi / mo;
            if (o < mo && (i == mi || next_o <= next_i)) {
                m.elements.push_back({outer[o % mo], outer[(o + 1) % mo], inner[i % mi]});
                ++o;
            } else {
                m.elements.push_back({inner[i % mi], outer[o % mo], inner[(i + 1) % mi]});
                ++i;
            }
        }
    }
    const auto& rim = ring_ids[rings];
    for (std::size_t k = 0; k < rim.size(); ++k) {
        m.boundary_edges.push_back({rim[k], rim[(k + 1) % rim.size()]});
    }
    m.boundary_nodes = rim;
    std::sort(m.boundary_nodes.begin(), m.boundary_nodes.end());
    m.validate();
    return m;
}

namespace {

// Strips comments, returns the next content line.
bool next_line(std::istream& is, std::string& line, int& lineno) {
    while (std::getline(is, line)) {
        ++lineno;
        const auto pos = line.find('#');
        if (pos != std::string::npos) line.erase(pos);
        bool blank = true;
        for (char c : line) {
            if (!std::isspace(static_cast<unsigned char>(c))) {
                blank = false;
                break;
            }
        }
        if (!blank) return true;
    }
    return false;
}

}  // namespace

Mesh load_mesh(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("load_mesh: cannot open " + path);
    std::string line;
    int lineno = 0;
    if (!next_line(is, line, lineno)) throw ParseError("load_mesh: missing header", lineno);
    Mesh m;
    int n_nodes = 0, n_elems = 0, n_bnd = 0;
    {
        std::istringstream ss(line);
        if (!(ss >> m.dim >> n_nodes >> n_elems >> n_bnd)) {
            throw ParseError("load_mesh: bad header '" + line + "'", lineno);
        }
        if (m.dim != 1 && m.dim != 2) throw ParseError("load_mesh: dim must be 1 or 2", lineno);
        if (n_nodes <= 0 || n_elems < 0 || n_bnd < 0) {
            throw ParseError("load_mesh: bad counts in header", lineno);
        }
    }
    for (int i = 0; i < n_nodes; ++i) {
        if (!next_line(is, line, lineno)) throw ParseError("load_mesh: missing node line", lineno);
        std::istringstream ss(line);
        double x = 0, y = 0;
        if (m.dim == 1) {
            if (!(ss >> x)) throw ParseError("load_mesh: bad node coordinates", lineno);
        } else {
            if (!(ss >> x >> y)) throw ParseError("load_mesh: bad node coordinates", lineno);
        }
        m.nodes.push_back({x, y});
    }
    const int verts = m.dim + 1;
    for (int e = 0; e < n_elems; ++e) {
        if (!next_line(is, line, lineno)) throw ParseError("load_mesh: missing element line", lineno);
        std::istringstream ss(line);
        std::array<int, 3> el = {-1, -1, -1};
        for (int v = 0; v < verts; ++v) {
            if (!(ss >> el[v])) throw ParseError("load_mesh: bad element indices", lineno);
            if (el[v] < 0 || el[v] >= n_nodes) {
                throw ParseError("load_mesh: element index out of range", lineno);
            }
        }
        m.elements.push_back(el);
    }
    if (m.dim == 2) {
        std::set<int> bset;
        for (int b = 0; b < n_bnd; ++b) {
            if (!next_line(is, line, lineno)) {
                throw ParseError("load_mesh: missing boundary edge line", lineno);
            }
            std::istringstream ss(line);
            int u = 0, v = 0;
            if (!(ss >> u >> v)) throw ParseError("load_mesh: bad boundary edge", lineno);
            if (u < 0 || u >= n_nodes || v < 0 || v >= n_nodes) {
                throw ParseError("load_mesh: boundary edge index out of range", lineno);
            }
            m.boundary_edges.push_back({u, v});
            bset.insert(u);
            bset.insert(v);
        }
        m.boundary_nodes.assign(bset.begin(), bset.end());
    } else {
        std::set<int> bset;
        for (int b = 0; b < n_bnd; ++b) {
            if (!next_line(is, line, lineno)) {
                throw ParseError("load_mesh: missing boundary node line", lineno);
            }
            std::istringstream ss(line);
            int u = 0;
            if (!(ss >> u)) throw ParseError("load_mesh: bad boundary node", lineno);
            if (u < 0 || u >= n_nodes) {
                throw ParseError("load_mesh: boundary node out of range", lineno);
            }
            bset.insert(u);
        }
        m.boundary_nodes.assign(bset.begin(), bset.end());
    }
    try {
        m.validate();
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("load_mesh: ") + e.what(), lineno);
    }
    return m;
}

void save_mesh(const Mesh& m, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::invalid_argument("save_mesh: cannot open " + path);
    char buf[128];
    const int n_bnd = m.dim == 2 ? static_cast<int>(m.boundary_edges.size())
                                 : static_cast<int>(m.boundary_nodes.size());
    os << m.dim << ' ' << m.node_count() << ' ' << m.element_count() << ' ' << n_bnd << '\n';
    for (const auto& p : m.nodes) {
        if (m.dim == 1) {
            std::snprintf(buf, sizeof(buf), "%.17g\n", p[0]);
        } else {
            std::snprintf(buf, sizeof(buf), "%.17g %.17g\n", p[0], p[1]);
        }
        os << buf;
    }
    for (const auto& el : m.elements) {
        if (m.dim == 1) {
            os << el[0] << ' ' << el[1] << '\n';
        } else {
            os << el[0] << ' ' << el[1] << ' ' << el[2] << '\n';
        }
    }
    if (m.dim == 2) {
        for (const auto& be : m.boundary_edges) os << be[0] << ' ' << be[1] << '\n';
    } else {
        for (int b : m.boundary_nodes) os << b << '\n';
    }
}

}  // namespace feop
