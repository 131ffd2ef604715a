#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "errors.hpp"
#include "geom.hpp"

namespace phfem {

using NodeId = std::int32_t;
using ElemId = std::int32_t;
using EdgeId = std::int32_t;
using FaceId = std::int32_t;

using Tet4 = std::array<NodeId, 4>;
using Tri3 = std::array<NodeId, 3>;

/// Tetrahedral mesh with classified boundary faces.
///
/// Every tetrahedron [a b c d] is stored so that [a b c] is an oriented face
/// (its normal points away from d); equivalently the signed 6-volume
/// det[b-a, c-a, d-a] is positive for every element.  Boundary faces are
/// 3-tuples oriented outward, i.e. each is an oriented face of exactly one
/// element.  All indices are 0-based in memory; the text format is 1-based.
struct Mesh {
    std::vector<Vec3> coords;
    std::vector<Tet4> tetra;
    std::vector<Tri3> dirichlet_faces;
    std::vector<Tri3> neumann_faces;
    int level = 0;

    std::int64_t num_nodes() const { return static_cast<std::int64_t>(coords.size()); }
    std::int64_t num_elems() const { return static_cast<std::int64_t>(tetra.size()); }
};

/// The hard-coded 8-node, 5-tetrahedron mesh of the unit cube with two
/// Dirichlet faces on the z=1 side and ten Neumann faces.
Mesh initial_cube_mesh();

/// The four oriented faces of [a b c d]: [a b c], [a c d], [a d b], [d c b].
std::array<Tri3, 4> elem_oriented_faces(const Tet4& t);

/// det[b-a, c-a, d-a]; six times the signed element volume.  This equals the
/// orientation expression (c-b)x(a-b).(d-b) and is strictly positive for
/// every element of a mesh in the stored orientation convention.
double signed_volume6(const Mesh& mesh, ElemId t);

/// Geometric element volume |signed_volume6|/6.
double elem_volume(const Mesh& mesh, ElemId t);

/// True when all four oriented faces of element t point outward.
bool elem_is_oriented(const Mesh& mesh, ElemId t);

/// Throws MeshError unless every element passes elem_is_oriented and the
/// signed 6-volumes carry a uniform (positive) sign.
void validate_orientation(const Mesh& mesh);

struct FaceGeometry {
    double area;
    Vec3 unit_normal;
};

/// Area and unit normal of an oriented face f=[x y z]: area = |(z-x)x(y-x)|/2,
/// normal along (z-x)x(y-x).  For a face stored in orientation with an
/// element the normal points out of that element.  Throws MeshError on
/// collinear nodes.
FaceGeometry face_area_and_normal(const Mesh& mesh, const Tri3& f);

Vec3 face_centroid(const Mesh& mesh, const Tri3& f);

/// Max pairwise vertex distance of element t.
double elem_diameter(const Mesh& mesh, ElemId t);

/// Max element diameter over the mesh (the h of the triangulation).
double mesh_diameter(const Mesh& mesh);

/// Plain-text mesh format: four sections COORD/TETRA/DB/NB, each introduced
/// by its name and row count, rows whitespace-separated, indices 1-based.
/// Writing then reading reproduces the mesh bit-exactly.
void write_mesh(std::ostream& os, const Mesh& mesh);
void write_mesh_file(const std::string& path, const Mesh& mesh);
Mesh read_mesh(std::istream& is);
Mesh read_mesh_file(const std::string& path);

/// Shortest decimal representation that parses back to exactly v.
std::string format_double(double v);

} // namespace phfem
