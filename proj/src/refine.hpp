#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "connectivity.hpp"
#include "mesh.hpp"

namespace phfem {

/// Bookkeeping of a single red-refinement step.
struct RefinementMap {
    std::vector<NodeId> midpoint_node; // per parent EdgeId
    std::vector<NodeId> centroid_node; // per parent ElemId
    std::vector<ElemId> parent_elem;   // per child ElemId
};

/// Uniform 12-way red refinement.
///
/// One new node per unique parent edge (the midpoint) plus one per element
/// (the centroid); new nodes are numbered in first-occurrence order of the
/// per-element sequence (centroid, then the six edge midpoints).  Each parent
/// splits into 4 corner children and 8 centroid children.  Child element t of
/// the parent grid overwrites parent slot t; the remaining 11 children of
/// parent t occupy rows nE + 11*t .. nE + 11*t + 10 of the child table.
/// Boundary faces are split 4-way through their edge midpoints.
std::pair<Mesh, RefinementMap> red_refine(const Mesh& mesh, const EdgeTable& edges);

/// 4-way refinement of a boundary face list [n1 n2 n3] ->
/// [n1 m12 m13], [n2 m23 m12], [n3 m13 m23], [m12 m23 m13], laid out with
/// the first child of face f at row f and the rest interleaved with stride 3.
/// Throws MeshError when a face edge is missing from the edge table.
std::vector<Tri3> refine_boundary_faces(const std::vector<Tri3>& faces, const EdgeTable& edges,
                                        const RefinementMap& map);

/// Wall-clock seconds of the connectivity/refinement stages at one level.
struct RefineTimings {
    double t_numedges = 0.0;
    double t_edge2tetra = 0.0;
    double t_faceup = 0.0;
    double t_redrefine = 0.0; // time of the step that produced this level
};

struct LevelInfo {
    int level = 0;
    std::int64_t n_elems = 0, n_nodes = 0, n_edges = 0, n_faces = 0;
    RefineTimings timings;
};

/// Applies red_refine `level` times starting from the initial cube mesh.
/// When `log` is non-null one LevelInfo per level 0..level is appended,
/// including connectivity counts and stage timings.
Mesh refine_to_level(int level, std::vector<LevelInfo>* log = nullptr);

} // namespace phfem
