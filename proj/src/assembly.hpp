#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "connectivity.hpp"
#include "mesh.hpp"
#include "quadrature.hpp"
#include "sparse.hpp"

namespace phfem {

/// Data of the model problem -div(grad u) + u = f with u = u_D on the
/// Dirichlet boundary and grad u . n = g on the Neumann boundary.  The
/// Neumann flux callback receives the evaluation point and the outward unit
/// normal.  The exact fields are optional and used only for error analysis.
struct ProblemData {
    std::function<double(const Vec3&)> f;
    std::function<double(const Vec3&)> u_dirichlet;
    std::function<double(const Vec3&, const Vec3&)> neumann_flux;

    std::function<double(const Vec3&)> exact_u;
    std::function<Vec3(const Vec3&)> exact_grad_u;
};

/// Local vertices spanning local face k, matching the oriented-face slot
/// order [abc], [acd], [adb], [dcb].
inline constexpr int kFaceVerts[4][3] = {{0, 1, 2}, {0, 2, 3}, {0, 3, 1}, {3, 2, 1}};

struct LocalStiffnessMass {
    Mat4 k;
    Mat4 m;
    double volume;
    std::array<Vec3, 4> grads;
};

/// K(T)_ij = volume * grad(phi_i).grad(phi_j); M(T) = volume/20 * (1 + I).
/// Throws MeshError on a zero-volume element.
LocalStiffnessMass local_stiffness_mass(const Mesh& mesh, ElemId t);

/// C(T): row k = sigma_k * |F_k| * r_k with r_k = 1/3 on the vertices of
/// local face k and 0 on the opposite vertex.
Mat4 local_multiplier(const FaceTable& ft, ElemId t);

/// Quadrature used for the volume load integrals.  FaceCentroid is the
/// four-point rule at the element's face centroids with weights V/4; Gauss
/// is a conical-product rule exact for total degree 5, making the load
/// entries exact for all f of polynomial degree <= 4.
enum class LoadRule { Gauss, FaceCentroid };

std::vector<double> load_vector(const Mesh& mesh, const std::function<double(const Vec3&)>& f,
                                LoadRule rule = LoadRule::Gauss);

std::vector<double> neumann_vector(const Mesh& mesh, const FaceTable& ft,
                                   const std::function<double(const Vec3&, const Vec3&)>& g);

std::vector<double> dirichlet_vector(const Mesh& mesh, const FaceTable& ft,
                                     const std::function<double(const Vec3&)>& u_d);

/// Assembled discrete system in the broken-space DOF layout (DOF 4t+j is
/// vertex j of element t):
///
///   [ A   -C' ] [ U      ]   [ rhs           ]
///   [ -C   0  ] [ Lambda ] = [ -dirichlet_rhs ]
///
/// A = K+M is block diagonal and kept as per-element 4x4 blocks; C has one
/// row per interior or Dirichlet face.
struct LinearSystem {
    std::int64_t n = 0;
    std::int64_t l = 0;
    std::vector<Mat4> a_blocks;
    CsrMatrix c;
    std::vector<double> rhs;           // b + LN
    std::vector<double> dirichlet_rhs; // b_D

    // per element and local face: multiplier row (-1 on Neumann faces) and
    // the C(T) entry sigma*|F|/3
    std::vector<std::array<std::int32_t, 4>> slot_mrow;
    std::vector<std::array<double, 4>> slot_coef;
};

LinearSystem assemble_system(const Mesh& mesh, const FaceTable& ft, const ProblemData& problem,
                             LoadRule rule = LoadRule::Gauss);

/// Block-diagonal A as a CSR matrix.
CsrMatrix system_a_csr(const LinearSystem& sys);

} // namespace phfem
