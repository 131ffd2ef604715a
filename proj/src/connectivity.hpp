#pragma once

#include <cstdint>
#include <iosfwd>
#include <unordered_map>
#include <vector>

#include "mesh.hpp"

namespace phfem {

/// Unique undirected edge enumeration.
///
/// Edges are numbered by first occurrence in the per-element sequence
/// e1=(i,j), e2=(i,k), e3=(i,l), e4=(j,k), e5=(j,l), e6=(k,l) taken element
/// by element, each pair sorted ascending.  The symmetric lookup
/// pair_to_edge(a,b) returns -1 for non-edges.
struct EdgeTable {
    std::vector<std::array<NodeId, 2>> edge_nodes; // sorted pairs, first-occurrence order
    std::unordered_map<std::uint64_t, EdgeId> pair_map;
    std::int64_t n_nodes = 0;

    std::int64_t n_edges() const { return static_cast<std::int64_t>(edge_nodes.size()); }

    EdgeId pair_to_edge(NodeId a, NodeId b) const {
        if (a == b) return -1;
        if (a > b) std::swap(a, b);
        auto it = pair_map.find(std::uint64_t(a) * std::uint64_t(n_nodes) + std::uint64_t(b));
        return it == pair_map.end() ? -1 : it->second;
    }
};

EdgeTable num_edges(const Mesh& mesh);

/// Directed edge-pair -> element lookup.
///
/// For every element m and each of its oriented faces [x y z] with edges
/// e(x,y), e(y,z), e(z,x), the keys (e(y,z),e(x,y)), (e(z,x),e(y,z)) and
/// (e(x,y),e(z,x)) map to m.  The reversed keys belong to the neighbor with
/// the opposite face orientation, so the map is not symmetric.
struct EdgePairToElem {
    // Sorted (key, elem) pairs; key packs the directed edge pair.
    std::vector<std::pair<std::uint64_t, ElemId>> entries;
    std::int64_t n_edges = 0;

    ElemId lookup(EdgeId from, EdgeId to) const;
};

EdgePairToElem edge_pairs_to_elems(const Mesh& mesh, const EdgeTable& edges);

/// Unique oriented faces, element-major in the slot order [abc], [acd],
/// [adb], [dcb].  A slot's face is emitted unless the neighbor across it has
/// a smaller element index, so each stored orientation is the lower-indexed
/// element's outward face.
std::vector<Tri3> faces_up(const Mesh& mesh, const EdgePairToElem& e2t, const EdgeTable& edges);

enum class FaceClass : std::uint8_t { Interior, Dirichlet, Neumann };

/// Per-element-slot face enumeration with orientation signs and boundary
/// classification.  Slot s = 4*t+k is local face k of element t.
struct FaceTable {
    std::vector<Tri3> faces;              // unique oriented faces
    std::vector<double> face_area;        // per face
    std::vector<FaceClass> face_class;    // per face
    std::vector<std::int32_t> multiplier_index; // per face; -1 for Neumann, else 0..L-1 in face order
    std::vector<std::array<std::int64_t, 2>> face_slots; // per face; second is -1 on the boundary

    std::vector<FaceId> slot_to_face;     // 4*nE
    std::vector<double> sigma;            // 4*nE, +1 when the slot orientation matches the stored face

    std::int64_t n_interior = 0, n_dirichlet = 0, n_neumann = 0;

    std::int64_t n_faces() const { return static_cast<std::int64_t>(faces.size()); }
    std::int64_t n_multipliers() const { return n_interior + n_dirichlet; }
};

FaceTable full_face_table(const Mesh& mesh, const std::vector<Tri3>& faces);

/// num_edges -> edge_pairs_to_elems -> faces_up -> full_face_table.
FaceTable build_face_table(const Mesh& mesh);

/// Debug CSV dumps, 1-based indices.
void dump_edges_csv(std::ostream& os, const EdgeTable& edges);
void dump_faces_csv(std::ostream& os, const FaceTable& ft);

} // namespace phfem
