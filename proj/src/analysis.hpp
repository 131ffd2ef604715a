#pragma once

#include <optional>
#include <string>
#include <vector>

#include "assembly.hpp"
#include "solver.hpp"

namespace phfem {

/// Problem with a known exact solution; f, u_D and g are derived from it.
struct ManufacturedProblem {
    std::string name;
    ProblemData data;
};

/// u(x,y,z) = x^2 y^2 z^2, f = -2(y^2 z^2 + x^2 z^2 + x^2 y^2) + u.
ManufacturedProblem manufactured_problem();

/// u(x,y,z) = x + 2y + 3z + 4; lies in the discrete spaces, so the method
/// reproduces it exactly (patch test).
ManufacturedProblem linear_patch_problem();

/// f = 0, u_D = 0, g = 0; the solution is identically zero.
ManufacturedProblem zero_problem();

/// Broken Y-norm of u - u_h:
/// ( sum_T |grad(u - u_h)|^2_{L2(T)} + h^-2 |u - u_h|^2_{L2(T)} )^(1/2)
/// with h the global mesh diameter and a fixed positive-weight volume rule.
double y_norm_error(const Mesh& mesh, const Solution& sol, const ProblemData& prob);

/// Mesh-dependent multiplier norm of kappa - kappa_h:
/// ( sum_T h |kappa - kappa_h|^2_{L2(dT \ Neumann)} )^(1/2), where on each
/// element face kappa = grad(u) . n_T (outward normal of that element) and
/// kappa_h = sigma(slot) * Lambda(face); face integrals use the edge-midpoint
/// rule.  Interior faces contribute from both sides.
double multiplier_norm_error(const Mesh& mesh, const FaceTable& ft, const Solution& sol,
                             const ProblemData& prob);

/// Value of u_h at a point of element t by barycentric interpolation.
/// Throws InvalidArgument if the point lies outside the element by more than
/// 1e-10 in barycentric coordinates.
double evaluate_uh(const Solution& sol, const Mesh& mesh, ElemId t, const Vec3& p);

struct ErrorReport {
    int level = 0;
    std::int64_t n_elems = 0, n_nodes = 0, n_edges = 0, n_faces = 0;
    std::int64_t n = 0, l = 0;
    double h = 0.0;
    double err_u = 0.0;
    double err_kappa = 0.0;
    std::optional<double> order_u;
    std::optional<double> order_kappa;
    SolverStats stats;
};

/// Refine / assemble / solve / measure for levels 1..max_level; orders are
/// log2 ratios of consecutive errors.
std::vector<ErrorReport> convergence_study(int max_level, const std::string& solver_name,
                                           const SolverOptions& opt = {},
                                           const ManufacturedProblem& prob = manufactured_problem(),
                                           LoadRule rule = LoadRule::Gauss);

} // namespace phfem
