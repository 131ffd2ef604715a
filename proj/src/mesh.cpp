#include "mesh.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

namespace phfem {

Mesh initial_cube_mesh() {
    Mesh m;
    m.coords = {
        {0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0},
        {0, 0, 1}, {1, 0, 1}, {0, 1, 1}, {1, 1, 1},
    };
    // 1-based node tuples, converted below.
    const int tets[5][4] = {
        {1, 2, 3, 5}, {5, 8, 6, 2}, {7, 3, 8, 5}, {4, 8, 3, 2}, {8, 3, 2, 5}};
    const int db[2][3] = {{7, 8, 5}, {5, 8, 6}};
    const int nb[10][3] = {{1, 5, 2}, {5, 6, 2}, {1, 3, 5}, {7, 5, 3}, {7, 3, 8},
                           {4, 8, 3}, {2, 6, 8}, {4, 2, 8}, {4, 3, 2}, {1, 2, 3}};
    for (const auto& t : tets)
        m.tetra.push_back({NodeId(t[0] - 1), NodeId(t[1] - 1), NodeId(t[2] - 1), NodeId(t[3] - 1)});
    for (const auto& f : db)
        m.dirichlet_faces.push_back({NodeId(f[0] - 1), NodeId(f[1] - 1), NodeId(f[2] - 1)});
    for (const auto& f : nb)
        m.neumann_faces.push_back({NodeId(f[0] - 1), NodeId(f[1] - 1), NodeId(f[2] - 1)});
    m.level = 0;
    return m;
}

std::array<Tri3, 4> elem_oriented_faces(const Tet4& t) {
    return {Tri3{t[0], t[1], t[2]}, Tri3{t[0], t[2], t[3]},
            Tri3{t[0], t[3], t[1]}, Tri3{t[3], t[2], t[1]}};
}

double signed_volume6(const Mesh& mesh, ElemId t) {
    const Tet4& e = mesh.tetra[t];
    const Vec3 u = mesh.coords[e[1]] - mesh.coords[e[0]];
    const Vec3 v = mesh.coords[e[2]] - mesh.coords[e[0]];
    const Vec3 w = mesh.coords[e[3]] - mesh.coords[e[0]];
    return dot(cross(u, v), w);
}

double elem_volume(const Mesh& mesh, ElemId t) { return std::fabs(signed_volume6(mesh, t)) / 6.0; }

bool elem_is_oriented(const Mesh& mesh, ElemId t) {
    // Each oriented face's outward normal must have negative dot product with
    // the vector from the face to the opposite vertex.
    const Tet4& e = mesh.tetra[t];
    const auto faces = elem_oriented_faces(e);
    for (int k = 0; k < 4; ++k) {
        const Tri3& f = faces[k];
        NodeId opp = -1;
        for (NodeId n : e)
            if (n != f[0] && n != f[1] && n != f[2]) opp = n;
        const Vec3 n = cross(mesh.coords[f[2]] - mesh.coords[f[0]],
                             mesh.coords[f[1]] - mesh.coords[f[0]]);
        if (dot(n, mesh.coords[opp] - mesh.coords[f[0]]) >= 0.0) return false;
    }
    return true;
}

void validate_orientation(const Mesh& mesh) {
    for (ElemId t = 0; t < mesh.num_elems(); ++t) {
        if (signed_volume6(mesh, t) <= 0.0)
            throw MeshError("element " + std::to_string(t + 1) +
                            " violates the orientation convention (signed 6-volume <= 0)");
        if (!elem_is_oriented(mesh, t))
            throw MeshError("element " + std::to_string(t + 1) + " has a non-outward oriented face");
    }
}

FaceGeometry face_area_and_normal(const Mesh& mesh, const Tri3& f) {
    const Vec3 n = cross(mesh.coords[f[2]] - mesh.coords[f[0]],
                         mesh.coords[f[1]] - mesh.coords[f[0]]);
    const double len = norm(n);
    if (len == 0.0)
        throw MeshError("degenerate face with collinear nodes [" + std::to_string(f[0] + 1) + " " +
                        std::to_string(f[1] + 1) + " " + std::to_string(f[2] + 1) + "]");
    return {0.5 * len, n / len};
}

Vec3 face_centroid(const Mesh& mesh, const Tri3& f) {
    return (mesh.coords[f[0]] + mesh.coords[f[1]] + mesh.coords[f[2]]) / 3.0;
}

double elem_diameter(const Mesh& mesh, ElemId t) {
    const Tet4& e = mesh.tetra[t];
    double d2 = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) {
            const Vec3 d = mesh.coords[e[i]] - mesh.coords[e[j]];
            d2 = std::max(d2, dot(d, d));
        }
    return std::sqrt(d2);
}

double mesh_diameter(const Mesh& mesh) {
    if (mesh.tetra.empty()) throw MeshError("mesh_diameter on empty mesh");
    double h = 0.0;
    for (ElemId t = 0; t < mesh.num_elems(); ++t) h = std::max(h, elem_diameter(mesh, t));
    return h;
}

std::string format_double(double v) {
    char buf[40];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

void write_mesh(std::ostream& os, const Mesh& mesh) {
    os << "COORD " << mesh.coords.size() << "\n";
    for (const Vec3& p : mesh.coords)
        os << format_double(p.x) << ' ' << format_double(p.y) << ' ' << format_double(p.z) << "\n";
    os << "TETRA " << mesh.tetra.size() << "\n";
    for (const Tet4& t : mesh.tetra)
        os << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << ' ' << t[3] + 1 << "\n";
    os << "DB " << mesh.dirichlet_faces.size() << "\n";
    for (const Tri3& f : mesh.dirichlet_faces)
        os << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << "\n";
    os << "NB " << mesh.neumann_faces.size() << "\n";
    for (const Tri3& f : mesh.neumann_faces)
        os << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << "\n";
}

void write_mesh_file(const std::string& path, const Mesh& mesh) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open '" + path + "' for writing");
    write_mesh(os, mesh);
    if (!os) throw IoError("write failure on '" + path + "'");
}

namespace {

void expect_section(std::istream& is, const char* name, std::size_t& count) {
    std::string tok;
    if (!(is >> tok) || tok != name)
        throw IoError(std::string("mesh format: expected section '") + name + "', got '" + tok + "'");
    long long n = -1;
    if (!(is >> n) || n < 0)
        throw IoError(std::string("mesh format: bad row count for section '") + name + "'");
    count = static_cast<std::size_t>(n);
}

NodeId read_index(std::istream& is, std::int64_t n_nodes) {
    long long v;
    if (!(is >> v)) throw IoError("mesh format: expected a node index");
    if (v < 1 || v > n_nodes)
        throw IoError("mesh format: node index " + std::to_string(v) + " out of range 1.." +
                      std::to_string(n_nodes));
    return static_cast<NodeId>(v - 1);
}

} // namespace

Mesh read_mesh(std::istream& is) {
    Mesh m;
    std::size_t n;
    expect_section(is, "COORD", n);
    m.coords.resize(n);
    for (Vec3& p : m.coords)
        if (!(is >> p.x >> p.y >> p.z)) throw IoError("mesh format: bad coordinate row");
    expect_section(is, "TETRA", n);
    m.tetra.resize(n);
    for (Tet4& t : m.tetra)
        for (NodeId& v : t) v = read_index(is, m.num_nodes());
    expect_section(is, "DB", n);
    m.dirichlet_faces.resize(n);
    for (Tri3& f : m.dirichlet_faces)
        for (NodeId& v : f) v = read_index(is, m.num_nodes());
    expect_section(is, "NB", n);
    m.neumann_faces.resize(n);
    for (Tri3& f : m.neumann_faces)
        for (NodeId& v : f) v = read_index(is, m.num_nodes());
    return m;
}

Mesh read_mesh_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open '" + path + "' for reading");
    return read_mesh(is);
}

} // namespace phfem
