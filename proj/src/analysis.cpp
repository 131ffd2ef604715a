#include "analysis.hpp"

#include <cmath>

#include "refine.hpp"

namespace phfem {

ManufacturedProblem manufactured_problem() {
    ManufacturedProblem p;
    p.name = "manufactured";
    auto u = [](const Vec3& x) { return x.x * x.x * x.y * x.y * x.z * x.z; };
    auto grad = [](const Vec3& x) {
        return Vec3{2.0 * x.x * x.y * x.y * x.z * x.z, 2.0 * x.x * x.x * x.y * x.z * x.z,
                    2.0 * x.x * x.x * x.y * x.y * x.z};
    };
    p.data.f = [u](const Vec3& x) {
        return -2.0 * (x.y * x.y * x.z * x.z + x.x * x.x * x.z * x.z + x.x * x.x * x.y * x.y) + u(x);
    };
    p.data.u_dirichlet = u;
    p.data.neumann_flux = [grad](const Vec3& x, const Vec3& n) { return dot(grad(x), n); };
    p.data.exact_u = u;
    p.data.exact_grad_u = grad;
    return p;
}

ManufacturedProblem linear_patch_problem() {
    ManufacturedProblem p;
    p.name = "linear-patch";
    auto u = [](const Vec3& x) { return x.x + 2.0 * x.y + 3.0 * x.z + 4.0; };
    const Vec3 g{1.0, 2.0, 3.0};
    p.data.f = u; // -laplace(u) = 0
    p.data.u_dirichlet = u;
    p.data.neumann_flux = [g](const Vec3&, const Vec3& n) { return dot(g, n); };
    p.data.exact_u = u;
    p.data.exact_grad_u = [g](const Vec3&) { return g; };
    return p;
}

ManufacturedProblem zero_problem() {
    ManufacturedProblem p;
    p.name = "zero";
    p.data.f = [](const Vec3&) { return 0.0; };
    p.data.u_dirichlet = [](const Vec3&) { return 0.0; };
    p.data.neumann_flux = [](const Vec3&, const Vec3&) { return 0.0; };
    p.data.exact_u = [](const Vec3&) { return 0.0; };
    p.data.exact_grad_u = [](const Vec3&) { return Vec3{}; };
    return p;
}

double y_norm_error(const Mesh& mesh, const Solution& sol, const ProblemData& prob) {
    if (!prob.exact_u || !prob.exact_grad_u)
        throw InvalidArgument("y_norm_error requires the exact solution fields");
    static const TetRule quad = tet_rule(9);
    const double h = mesh_diameter(mesh);
    const double inv_h2 = 1.0 / (h * h);
    double acc = 0.0;
    for (ElemId t = 0; t < mesh.num_elems(); ++t) {
        const Tet4& e = mesh.tetra[t];
        const Vec3 p[4] = {mesh.coords[e[0]], mesh.coords[e[1]], mesh.coords[e[2]],
                           mesh.coords[e[3]]};
        const LocalStiffnessMass local = local_stiffness_mass(mesh, t);
        Vec3 grad_uh{};
        for (int v = 0; v < 4; ++v) grad_uh += local.grads[v] * sol.u[4 * t + v];
        for (const auto& q : quad.points) {
            const Vec3 x = p[0] * q.lambda[0] + p[1] * q.lambda[1] + p[2] * q.lambda[2] +
                           p[3] * q.lambda[3];
            double uh = 0.0;
            for (int v = 0; v < 4; ++v) uh += q.lambda[v] * sol.u[4 * t + v];
            const Vec3 dg = prob.exact_grad_u(x) - grad_uh;
            const double dv = prob.exact_u(x) - uh;
            acc += local.volume * q.w * (dot(dg, dg) + inv_h2 * dv * dv);
        }
    }
    return std::sqrt(acc);
}

double multiplier_norm_error(const Mesh& mesh, const FaceTable& ft, const Solution& sol,
                             const ProblemData& prob) {
    if (!prob.exact_grad_u)
        throw InvalidArgument("multiplier_norm_error requires the exact gradient");
    const TriRule rule = tri_midpoint_rule();
    const double h = mesh_diameter(mesh);
    double acc = 0.0;
    for (ElemId t = 0; t < mesh.num_elems(); ++t) {
        const auto oriented = elem_oriented_faces(mesh.tetra[t]);
        for (int k = 0; k < 4; ++k) {
            const std::int64_t slot = 4 * std::int64_t(t) + k;
            const FaceId f = ft.slot_to_face[slot];
            if (ft.face_class[f] == FaceClass::Neumann) continue;
            // kappa as seen from this element: exact flux through its own
            // outward normal vs sigma * Lambda.
            const Tri3& tri = oriented[k];
            const FaceGeometry geom = face_area_and_normal(mesh, tri);
            const double kappa_h = ft.sigma[slot] * sol.lambda[ft.multiplier_index[f]];
            const Vec3 p0 = mesh.coords[tri[0]], p1 = mesh.coords[tri[1]], p2 = mesh.coords[tri[2]];
            for (const auto& q : rule.points) {
                const Vec3 x = p0 * q.lambda[0] + p1 * q.lambda[1] + p2 * q.lambda[2];
                const double diff = dot(prob.exact_grad_u(x), geom.unit_normal) - kappa_h;
                acc += h * geom.area * q.w * diff * diff;
            }
        }
    }
    return std::sqrt(acc);
}

double evaluate_uh(const Solution& sol, const Mesh& mesh, ElemId t, const Vec3& p) {
    const Tet4& e = mesh.tetra[t];
    const LocalStiffnessMass local = local_stiffness_mass(mesh, t);
    std::array<double, 4> lambda;
    double uh = 0.0;
    for (int v = 0; v < 4; ++v) {
        // barycentric coordinates are affine: lambda_v(x) = lambda_v(p0) + grad.(x - p0)
        const double base = v == 0 ? 1.0 : 0.0;
        lambda[v] = base + dot(local.grads[v], p - mesh.coords[e[0]]);
        if (lambda[v] < -1e-10 || lambda[v] > 1.0 + 1e-10)
            throw InvalidArgument("evaluate_uh: point outside element " + std::to_string(t + 1));
        uh += lambda[v] * sol.u[4 * t + v];
    }
    return uh;
}

std::vector<ErrorReport> convergence_study(int max_level, const std::string& solver_name,
                                           const SolverOptions& opt,
                                           const ManufacturedProblem& prob, LoadRule rule) {
    if (max_level < 1) throw InvalidArgument("convergence_study: max_level must be >= 1");
    std::vector<ErrorReport> reports;
    Mesh mesh = initial_cube_mesh();
    for (int level = 1; level <= max_level; ++level) {
        try {
            mesh = red_refine(mesh, num_edges(mesh)).first;
            const EdgeTable edges = num_edges(mesh);
            const EdgePairToElem e2t = edge_pairs_to_elems(mesh, edges);
            const std::vector<Tri3> faces = faces_up(mesh, e2t, edges);
            const FaceTable ft = full_face_table(mesh, faces);
            const LinearSystem sys = assemble_system(mesh, ft, prob.data, rule);
            const Solution sol = solve(sys, solver_name, opt);

            ErrorReport rep;
            rep.level = level;
            rep.n_elems = mesh.num_elems();
            rep.n_nodes = mesh.num_nodes();
            rep.n_edges = edges.n_edges();
            rep.n_faces = static_cast<std::int64_t>(faces.size());
            rep.n = sys.n;
            rep.l = sys.l;
            rep.h = mesh_diameter(mesh);
            rep.err_u = y_norm_error(mesh, sol, prob.data);
            rep.err_kappa = multiplier_norm_error(mesh, ft, sol, prob.data);
            rep.stats = sol.stats;
            if (!reports.empty()) {
                if (rep.err_u > 0.0 && reports.back().err_u > 0.0)
                    rep.order_u = std::log2(reports.back().err_u / rep.err_u);
                if (rep.err_kappa > 0.0 && reports.back().err_kappa > 0.0)
                    rep.order_kappa = std::log2(reports.back().err_kappa / rep.err_kappa);
            }
            reports.push_back(rep);
        } catch (const SolverError& err) {
            throw SolverError("level " + std::to_string(level) + ": " + err.what());
        }
    }
    return reports;
}

} // namespace phfem
