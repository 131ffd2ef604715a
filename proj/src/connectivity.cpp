#include "connectivity.hpp"

#include <algorithm>
#include <ostream>

namespace phfem {

namespace {

inline std::uint64_t pair_key(NodeId a, NodeId b, std::int64_t n_nodes) {
    if (a > b) std::swap(a, b);
    return std::uint64_t(a) * std::uint64_t(n_nodes) + std::uint64_t(b);
}

// The six element edges in the fixed traversal order.
inline std::array<std::array<NodeId, 2>, 6> elem_edges(const Tet4& t) {
    return {{{t[0], t[1]}, {t[0], t[2]}, {t[0], t[3]}, {t[1], t[2]}, {t[1], t[3]}, {t[2], t[3]}}};
}

} // namespace

EdgeTable num_edges(const Mesh& mesh) {
    EdgeTable tab;
    tab.n_nodes = mesh.num_nodes();
    tab.edge_nodes.reserve(static_cast<std::size_t>(mesh.num_elems()) * 2);
    tab.pair_map.reserve(static_cast<std::size_t>(mesh.num_elems()) * 2);
    for (const Tet4& t : mesh.tetra) {
        for (const auto& e : elem_edges(t)) {
            NodeId a = e[0], b = e[1];
            if (a > b) std::swap(a, b);
            const std::uint64_t key = std::uint64_t(a) * std::uint64_t(tab.n_nodes) + std::uint64_t(b);
            auto [it, inserted] = tab.pair_map.try_emplace(key, EdgeId(tab.edge_nodes.size()));
            if (inserted) tab.edge_nodes.push_back({a, b});
        }
    }
    return tab;
}

ElemId EdgePairToElem::lookup(EdgeId from, EdgeId to) const {
    const std::uint64_t key = std::uint64_t(from) * std::uint64_t(n_edges) + std::uint64_t(to);
    auto it = std::lower_bound(entries.begin(), entries.end(), key,
                               [](const auto& e, std::uint64_t k) { return e.first < k; });
    return (it != entries.end() && it->first == key) ? it->second : -1;
}

EdgePairToElem edge_pairs_to_elems(const Mesh& mesh, const EdgeTable& edges) {
    EdgePairToElem map;
    map.n_edges = edges.n_edges();
    map.entries.reserve(static_cast<std::size_t>(mesh.num_elems()) * 12);
    for (ElemId m = 0; m < mesh.num_elems(); ++m) {
        for (const Tri3& f : elem_oriented_faces(mesh.tetra[m])) {
            const EdgeId exy = edges.pair_to_edge(f[0], f[1]);
            const EdgeId eyz = edges.pair_to_edge(f[1], f[2]);
            const EdgeId ezx = edges.pair_to_edge(f[2], f[0]);
            const std::uint64_t ne = std::uint64_t(map.n_edges);
            map.entries.emplace_back(std::uint64_t(eyz) * ne + std::uint64_t(exy), m);
            map.entries.emplace_back(std::uint64_t(ezx) * ne + std::uint64_t(eyz), m);
            map.entries.emplace_back(std::uint64_t(exy) * ne + std::uint64_t(ezx), m);
        }
    }
    std::sort(map.entries.begin(), map.entries.end());
    for (std::size_t i = 1; i < map.entries.size(); ++i) {
        if (map.entries[i].first == map.entries[i - 1].first)
            throw MeshError("inconsistent mesh: elements " +
                            std::to_string(map.entries[i - 1].second + 1) + " and " +
                            std::to_string(map.entries[i].second + 1) +
                            " claim the same oriented face");
    }
    return map;
}

std::vector<Tri3> faces_up(const Mesh& mesh, const EdgePairToElem& e2t, const EdgeTable& edges) {
    std::vector<Tri3> faces;
    faces.reserve(static_cast<std::size_t>(mesh.num_elems()) * 2 + 16);
    for (ElemId s = 0; s < mesh.num_elems(); ++s) {
        for (const Tri3& f : elem_oriented_faces(mesh.tetra[s])) {
            // The neighbor owning the reversed orientation registered the key
            // (e(x,y), e(y,z)); absent means boundary.
            const EdgeId exy = edges.pair_to_edge(f[0], f[1]);
            const EdgeId eyz = edges.pair_to_edge(f[1], f[2]);
            const ElemId adj = e2t.lookup(exy, eyz);
            if (adj < 0 || adj > s) faces.push_back(f);
        }
    }
    return faces;
}

namespace {

struct TriKey {
    std::uint64_t ab;
    NodeId c;
    bool operator<(const TriKey& o) const { return ab != o.ab ? ab < o.ab : c < o.c; }
    bool operator==(const TriKey& o) const { return ab == o.ab && c == o.c; }
};

TriKey tri_key(Tri3 f, std::int64_t n_nodes) {
    std::sort(f.begin(), f.end());
    return {std::uint64_t(f[0]) * std::uint64_t(n_nodes) + std::uint64_t(f[1]), f[2]};
}

bool same_cycle(const Tri3& a, const Tri3& b) {
    return (a[0] == b[0] && a[1] == b[1] && a[2] == b[2]) ||
           (a[0] == b[1] && a[1] == b[2] && a[2] == b[0]) ||
           (a[0] == b[2] && a[1] == b[0] && a[2] == b[1]);
}

std::string tri_str(const Tri3& f) {
    return "[" + std::to_string(f[0] + 1) + " " + std::to_string(f[1] + 1) + " " +
           std::to_string(f[2] + 1) + "]";
}

} // namespace

FaceTable full_face_table(const Mesh& mesh, const std::vector<Tri3>& faces) {
    FaceTable ft;
    ft.faces = faces;
    const std::int64_t nf = ft.n_faces();
    const std::int64_t n_slots = mesh.num_elems() * 4;

    std::vector<std::pair<TriKey, FaceId>> index;
    index.reserve(faces.size());
    for (FaceId f = 0; f < nf; ++f) index.emplace_back(tri_key(faces[f], mesh.num_nodes()), f);
    std::sort(index.begin(), index.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    auto find_face = [&](const Tri3& f) -> FaceId {
        const TriKey key = tri_key(f, mesh.num_nodes());
        auto it = std::lower_bound(index.begin(), index.end(), key,
                                   [](const auto& e, const TriKey& k) { return e.first < k; });
        return (it != index.end() && it->first == key) ? it->second : -1;
    };

    ft.slot_to_face.assign(n_slots, -1);
    ft.sigma.assign(n_slots, 0.0);
    ft.face_slots.assign(faces.size(), {-1, -1});
    for (ElemId t = 0; t < mesh.num_elems(); ++t) {
        const auto oriented = elem_oriented_faces(mesh.tetra[t]);
        for (int k = 0; k < 4; ++k) {
            const std::int64_t slot = 4 * std::int64_t(t) + k;
            const FaceId f = find_face(oriented[k]);
            if (f < 0)
                throw MeshError("inconsistent mesh: face " + tri_str(oriented[k]) + " of element " +
                                std::to_string(t + 1) + " matches no unique face");
            ft.slot_to_face[slot] = f;
            ft.sigma[slot] = same_cycle(oriented[k], faces[f]) ? 1.0 : -1.0;
            auto& slots = ft.face_slots[f];
            if (slots[0] < 0) slots[0] = slot;
            else if (slots[1] < 0) slots[1] = slot;
            else
                throw MeshError("inconsistent mesh: face " + tri_str(faces[f]) +
                                " is shared by more than two elements");
        }
    }

    // Classify by node-set match against the boundary lists.
    ft.face_class.assign(faces.size(), FaceClass::Interior);
    std::vector<bool> classified(faces.size(), false);
    auto classify = [&](const std::vector<Tri3>& list, FaceClass cls, const char* what) {
        for (const Tri3& bf : list) {
            const FaceId f = find_face(bf);
            if (f < 0)
                throw MeshError(std::string("inconsistent mesh: ") + what + " face " + tri_str(bf) +
                                " matches no element face");
            if (classified[f])
                throw MeshError(std::string("inconsistent mesh: boundary face ") + tri_str(bf) +
                                " listed twice");
            if (ft.face_slots[f][1] >= 0)
                throw MeshError(std::string("inconsistent mesh: ") + what + " face " + tri_str(bf) +
                                " is interior");
            classified[f] = true;
            ft.face_class[f] = cls;
        }
    };
    classify(mesh.dirichlet_faces, FaceClass::Dirichlet, "Dirichlet");
    classify(mesh.neumann_faces, FaceClass::Neumann, "Neumann");

    ft.face_area.resize(faces.size());
    ft.multiplier_index.assign(faces.size(), -1);
    std::int32_t next_row = 0;
    for (FaceId f = 0; f < nf; ++f) {
        ft.face_area[f] = face_area_and_normal(mesh, faces[f]).area;
        const bool boundary = ft.face_slots[f][1] < 0;
        if (boundary) {
            if (!classified[f])
                throw MeshError("inconsistent mesh: boundary face " + tri_str(faces[f]) +
                                " is in neither the Dirichlet nor the Neumann list");
            if (ft.sigma[ft.face_slots[f][0]] != 1.0)
                throw MeshError("inconsistent mesh: stored orientation of boundary face " +
                                tri_str(faces[f]) + " does not match its element");
        } else {
            if (ft.sigma[ft.face_slots[f][0]] + ft.sigma[ft.face_slots[f][1]] != 0.0)
                throw MeshError("inconsistent mesh: interior face " + tri_str(faces[f]) +
                                " lacks the +1/-1 orientation pairing");
        }
        switch (ft.face_class[f]) {
            case FaceClass::Interior: ++ft.n_interior; break;
            case FaceClass::Dirichlet: ++ft.n_dirichlet; break;
            case FaceClass::Neumann: ++ft.n_neumann; break;
        }
        if (ft.face_class[f] != FaceClass::Neumann) ft.multiplier_index[f] = next_row++;
    }
    return ft;
}

FaceTable build_face_table(const Mesh& mesh) {
    const EdgeTable edges = num_edges(mesh);
    const EdgePairToElem e2t = edge_pairs_to_elems(mesh, edges);
    return full_face_table(mesh, faces_up(mesh, e2t, edges));
}

void dump_edges_csv(std::ostream& os, const EdgeTable& edges) {
    os << "edge_id,node1,node2\n";
    for (EdgeId e = 0; e < edges.n_edges(); ++e)
        os << e + 1 << ',' << edges.edge_nodes[e][0] + 1 << ',' << edges.edge_nodes[e][1] + 1 << "\n";
}

void dump_faces_csv(std::ostream& os, const FaceTable& ft) {
    static const char* names[] = {"interior", "dirichlet", "neumann"};
    os << "face_id,n1,n2,n3,class\n";
    for (FaceId f = 0; f < ft.n_faces(); ++f) {
        const Tri3& t = ft.faces[f];
        os << f + 1 << ',' << t[0] + 1 << ',' << t[1] + 1 << ',' << t[2] + 1 << ','
           << names[static_cast<int>(ft.face_class[f])] << "\n";
    }
}

} // namespace phfem
