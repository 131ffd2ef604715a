#include "refine.hpp"

#include <chrono>
#include <new>

namespace phfem {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace

std::pair<Mesh, RefinementMap> red_refine(const Mesh& mesh, const EdgeTable& edges) {
    const std::int64_t ne = mesh.num_elems();
    const std::int64_t nc = mesh.num_nodes();

    Mesh out;
    out.level = mesh.level + 1;
    out.coords = mesh.coords;
    out.coords.reserve(nc + edges.n_edges() + ne);

    RefinementMap map;
    map.midpoint_node.assign(edges.n_edges(), -1);
    map.centroid_node.assign(ne, -1);

    // New nodes in first-occurrence order: per element the centroid, then the
    // six edge midpoints not created yet.
    for (ElemId t = 0; t < ne; ++t) {
        const Tet4& e = mesh.tetra[t];
        const Vec3 ct = (mesh.coords[e[0]] + mesh.coords[e[1]] + mesh.coords[e[2]] +
                         mesh.coords[e[3]]) / 4.0;
        map.centroid_node[t] = NodeId(out.coords.size());
        out.coords.push_back(ct);
        const std::array<std::array<NodeId, 2>, 6> pairs = {
            {{e[0], e[1]}, {e[0], e[2]}, {e[0], e[3]}, {e[1], e[2]}, {e[1], e[3]}, {e[2], e[3]}}};
        for (const auto& p : pairs) {
            const EdgeId ed = edges.pair_to_edge(p[0], p[1]);
            if (map.midpoint_node[ed] < 0) {
                map.midpoint_node[ed] = NodeId(out.coords.size());
                out.coords.push_back((mesh.coords[p[0]] + mesh.coords[p[1]]) / 2.0);
            }
        }
    }

    auto mid = [&](NodeId a, NodeId b) { return map.midpoint_node[edges.pair_to_edge(a, b)]; };

    out.tetra.resize(12 * ne);
    map.parent_elem.resize(12 * ne);
    for (ElemId t = 0; t < ne; ++t) {
        const Tet4& e = mesh.tetra[t];
        const NodeId i = e[0], j = e[1], k = e[2], l = e[3];
        const NodeId ij = mid(i, j), ik = mid(i, k), il = mid(i, l);
        const NodeId jk = mid(j, k), jl = mid(j, l), kl = mid(k, l);
        const NodeId c = map.centroid_node[t];
        const Tet4 children[12] = {
            {i, ij, ik, il},  {j, jk, ij, jl},  {k, ik, jk, kl},  {l, kl, jl, il},
            {ij, ik, il, c},  {jk, ij, jl, c},  {ik, jk, kl, c},  {kl, jl, il, c},
            {ij, jk, ik, c},  {ik, kl, il, c},  {ij, il, jl, c},  {kl, jk, jl, c}};
        out.tetra[t] = children[0];
        map.parent_elem[t] = t;
        for (int q = 1; q < 12; ++q) {
            const std::int64_t row = ne + 11 * std::int64_t(t) + (q - 1);
            out.tetra[row] = children[q];
            map.parent_elem[row] = t;
        }
    }

    out.dirichlet_faces = refine_boundary_faces(mesh.dirichlet_faces, edges, map);
    out.neumann_faces = refine_boundary_faces(mesh.neumann_faces, edges, map);
    return {std::move(out), std::move(map)};
}

std::vector<Tri3> refine_boundary_faces(const std::vector<Tri3>& faces, const EdgeTable& edges,
                                        const RefinementMap& map) {
    const std::int64_t nf = static_cast<std::int64_t>(faces.size());
    std::vector<Tri3> out(4 * nf);
    auto mid = [&](NodeId a, NodeId b) -> NodeId {
        const EdgeId e = edges.pair_to_edge(a, b);
        if (e < 0 || map.midpoint_node[e] < 0)
            throw MeshError("inconsistent mesh: boundary face edge (" + std::to_string(a + 1) +
                            "," + std::to_string(b + 1) + ") is not an element edge");
        return map.midpoint_node[e];
    };
    for (std::int64_t f = 0; f < nf; ++f) {
        const NodeId n1 = faces[f][0], n2 = faces[f][1], n3 = faces[f][2];
        const NodeId m12 = mid(n1, n2), m23 = mid(n2, n3), m13 = mid(n1, n3);
        out[f] = {n1, m12, m13};
        out[nf + 3 * f + 0] = {n2, m23, m12};
        out[nf + 3 * f + 1] = {n3, m13, m23};
        out[nf + 3 * f + 2] = {m12, m23, m13};
    }
    return out;
}

Mesh refine_to_level(int level, std::vector<LevelInfo>* log) {
    if (level < 0) throw InvalidArgument("refinement level must be non-negative");
    Mesh mesh = initial_cube_mesh();
    double t_refine = 0.0;
    try {
        for (int lv = 0;; ++lv) {
            auto t0 = std::chrono::steady_clock::now();
            EdgeTable edges = num_edges(mesh);
            const double t_edges = seconds_since(t0);
            if (log) {
                LevelInfo info;
                info.level = lv;
                info.n_elems = mesh.num_elems();
                info.n_nodes = mesh.num_nodes();
                info.n_edges = edges.n_edges();
                info.timings.t_numedges = t_edges;
                info.timings.t_redrefine = t_refine;
                t0 = std::chrono::steady_clock::now();
                const EdgePairToElem e2t = edge_pairs_to_elems(mesh, edges);
                info.timings.t_edge2tetra = seconds_since(t0);
                t0 = std::chrono::steady_clock::now();
                info.n_faces = static_cast<std::int64_t>(faces_up(mesh, e2t, edges).size());
                info.timings.t_faceup = seconds_since(t0);
                log->push_back(info);
            }
            if (lv == level) break;
            t0 = std::chrono::steady_clock::now();
            mesh = red_refine(mesh, edges).first;
            t_refine = seconds_since(t0);
        }
    } catch (const std::bad_alloc&) {
        throw MeshError("out of memory while refining to level " + std::to_string(level));
    }
    return mesh;
}

} // namespace phfem
