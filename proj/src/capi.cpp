#include "phfem.h"

#include <chrono>
#include <fstream>
#include <memory>
#include <optional>

#include "analysis.hpp"
#include "assembly.hpp"
#include "connectivity.hpp"
#include "mesh.hpp"
#include "refine.hpp"
#include "solver.hpp"
#include "vtk.hpp"

using namespace phfem;

namespace {

thread_local std::string g_last_error;

int set_error(int code, const std::string& msg) {
    g_last_error = msg;
    return code;
}

template <typename Fn>
int guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return PHFEM_OK;
    } catch (const InvalidArgument& e) {
        return set_error(PHFEM_ERR_ARGUMENT, e.what());
    } catch (const MeshError& e) {
        return set_error(PHFEM_ERR_MESH, e.what());
    } catch (const SolverError& e) {
        return set_error(PHFEM_ERR_SOLVER, e.what());
    } catch (const IoError& e) {
        return set_error(PHFEM_ERR_IO, e.what());
    } catch (const std::bad_alloc&) {
        return set_error(PHFEM_ERR_MESH, "out of memory");
    } catch (const std::exception& e) {
        return set_error(PHFEM_ERR_ARGUMENT, e.what());
    }
}

const ManufacturedProblem& builtin_problem(int id) {
    static const ManufacturedProblem manufactured = manufactured_problem();
    static const ManufacturedProblem linear = linear_patch_problem();
    static const ManufacturedProblem zero = zero_problem();
    switch (id) {
        case PHFEM_PROBLEM_MANUFACTURED: return manufactured;
        case PHFEM_PROBLEM_LINEAR: return linear;
        case PHFEM_PROBLEM_ZERO: return zero;
        default: throw InvalidArgument("unknown problem id " + std::to_string(id));
    }
}

} // namespace

// Mesh handle with lazily built connectivity, invalidated by refinement.
struct phfem_mesh {
    Mesh mesh;
    std::optional<FaceTable> facetable;
    std::optional<double> t_edges, t_e2t, t_faceup;
    std::optional<std::int64_t> n_edges;

    const FaceTable& table() {
        if (!facetable) {
            auto t0 = std::chrono::steady_clock::now();
            const EdgeTable edges = num_edges(mesh);
            t_edges = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            n_edges = edges.n_edges();
            t0 = std::chrono::steady_clock::now();
            const EdgePairToElem e2t = edge_pairs_to_elems(mesh, edges);
            t_e2t = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            t0 = std::chrono::steady_clock::now();
            std::vector<Tri3> faces = faces_up(mesh, e2t, edges);
            t_faceup = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            facetable = full_face_table(mesh, faces);
        }
        return *facetable;
    }
};

struct phfem_solution {
    std::shared_ptr<phfem_mesh> snapshot; // mesh + connectivity at solve time
    int problem = 0;
    Solution sol;
    std::string stats;
    std::optional<double> err_u, err_kappa;
};

extern "C" {

const char* phfem_last_error(void) { return g_last_error.c_str(); }

int phfem_mesh_create_cube(phfem_mesh** out) {
    return guarded([&] {
        if (!out) throw InvalidArgument("null output handle");
        *out = new phfem_mesh{initial_cube_mesh(), {}, {}, {}, {}, {}};
    });
}

int phfem_mesh_read(const char* path, phfem_mesh** out) {
    return guarded([&] {
        if (!path || !out) throw InvalidArgument("null argument");
        *out = new phfem_mesh{read_mesh_file(path), {}, {}, {}, {}, {}};
    });
}

int phfem_mesh_write(const phfem_mesh* mesh, const char* path) {
    return guarded([&] {
        if (!mesh || !path) throw InvalidArgument("null argument");
        write_mesh_file(path, mesh->mesh);
    });
}

void phfem_mesh_destroy(phfem_mesh* mesh) { delete mesh; }

int phfem_mesh_refine(phfem_mesh* mesh, phfem_refine_times* times) {
    return guarded([&] {
        if (!mesh) throw InvalidArgument("null mesh");
        const auto t0 = std::chrono::steady_clock::now();
        mesh->mesh = red_refine(mesh->mesh, num_edges(mesh->mesh)).first;
        mesh->facetable.reset();
        mesh->t_edges.reset();
        mesh->t_e2t.reset();
        mesh->t_faceup.reset();
        mesh->n_edges.reset();
        if (times) {
            *times = {};
            times->t_redrefine =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        }
    });
}

int phfem_mesh_level(const phfem_mesh* mesh) { return mesh ? mesh->mesh.level : -1; }

int phfem_mesh_counts(const phfem_mesh* mesh, int64_t* n_elems, int64_t* n_nodes,
                      int64_t* n_edges, int64_t* n_faces, phfem_refine_times* times) {
    return guarded([&] {
        if (!mesh) throw InvalidArgument("null mesh");
        auto* m = const_cast<phfem_mesh*>(mesh);
        if (n_elems) *n_elems = m->mesh.num_elems();
        if (n_nodes) *n_nodes = m->mesh.num_nodes();
        if (n_edges || n_faces || times) {
            const FaceTable& ft = m->table();
            if (n_edges) *n_edges = *m->n_edges;
            if (n_faces) *n_faces = ft.n_faces();
            if (times) {
                *times = {};
                times->t_numedges = *m->t_edges;
                times->t_edge2tetra = *m->t_e2t;
                times->t_faceup = *m->t_faceup;
            }
        }
    });
}

int phfem_mesh_system_dims(const phfem_mesh* mesh, int64_t* n, int64_t* l) {
    return guarded([&] {
        if (!mesh) throw InvalidArgument("null mesh");
        auto* m = const_cast<phfem_mesh*>(mesh);
        if (n) *n = 4 * m->mesh.num_elems();
        if (l) *l = m->table().n_multipliers();
    });
}

int phfem_mesh_diameter(const phfem_mesh* mesh, double* h) {
    return guarded([&] {
        if (!mesh || !h) throw InvalidArgument("null argument");
        *h = mesh_diameter(mesh->mesh);
    });
}

int phfem_mesh_dump_connectivity(const phfem_mesh* mesh, const char* edges_csv_path,
                                 const char* faces_csv_path) {
    return guarded([&] {
        if (!mesh) throw InvalidArgument("null mesh");
        auto* m = const_cast<phfem_mesh*>(mesh);
        if (edges_csv_path) {
            std::ofstream os(edges_csv_path);
            if (!os) throw IoError(std::string("cannot open '") + edges_csv_path + "'");
            dump_edges_csv(os, num_edges(m->mesh));
        }
        if (faces_csv_path) {
            std::ofstream os(faces_csv_path);
            if (!os) throw IoError(std::string("cannot open '") + faces_csv_path + "'");
            dump_faces_csv(os, m->table());
        }
    });
}

int phfem_solve(const phfem_mesh* mesh, int problem, const char* solver, int workers,
                double tol, phfem_solution** out) {
    return guarded([&] {
        if (!mesh || !solver || !out) throw InvalidArgument("null argument");
        const ManufacturedProblem& prob = builtin_problem(problem);
        auto snapshot = std::make_shared<phfem_mesh>(*const_cast<phfem_mesh*>(mesh));
        const FaceTable& ft = snapshot->table();
        const LinearSystem sys = assemble_system(snapshot->mesh, ft, prob.data);
        SolverOptions opt;
        if (tol > 0.0) opt.tol = tol;
        opt.workers = workers > 0 ? workers : 1;
        auto sol = std::make_unique<phfem_solution>();
        sol->snapshot = snapshot;
        sol->problem = problem;
        sol->sol = solve(sys, solver, opt);
        sol->stats = stats_json(sol->sol.stats);
        *out = sol.release();
    });
}

void phfem_solution_destroy(phfem_solution* sol) { delete sol; }

int phfem_solution_values(const phfem_solution* sol, const double** u, int64_t* n,
                          const double** lambda, int64_t* l) {
    return guarded([&] {
        if (!sol) throw InvalidArgument("null solution");
        if (u) *u = sol->sol.u.data();
        if (n) *n = static_cast<int64_t>(sol->sol.u.size());
        if (lambda) *lambda = sol->sol.lambda.data();
        if (l) *l = static_cast<int64_t>(sol->sol.lambda.size());
    });
}

int phfem_solution_stats_json(const phfem_solution* sol, const char** json) {
    return guarded([&] {
        if (!sol || !json) throw InvalidArgument("null argument");
        *json = sol->stats.c_str();
    });
}

int phfem_solution_errors(const phfem_solution* sol, double* err_u, double* err_kappa) {
    return guarded([&] {
        if (!sol) throw InvalidArgument("null solution");
        auto* s = const_cast<phfem_solution*>(sol);
        const ProblemData& data = builtin_problem(s->problem).data;
        if (!s->err_u) s->err_u = y_norm_error(s->snapshot->mesh, s->sol, data);
        if (!s->err_kappa)
            s->err_kappa = multiplier_norm_error(s->snapshot->mesh, s->snapshot->table(), s->sol, data);
        if (err_u) *err_u = *s->err_u;
        if (err_kappa) *err_kappa = *s->err_kappa;
    });
}

int phfem_solution_write(const phfem_solution* sol, const char* u_path, const char* lambda_path) {
    return guarded([&] {
        if (!sol) throw InvalidArgument("null solution");
        auto write_vec = [](const char* path, const std::vector<double>& v) {
            if (!path) return;
            std::ofstream os(path);
            if (!os) throw IoError(std::string("cannot open '") + path + "'");
            for (double x : v) os << format_double(x) << "\n";
            if (!os) throw IoError(std::string("write failure on '") + path + "'");
        };
        write_vec(u_path, sol->sol.u);
        write_vec(lambda_path, sol->sol.lambda);
    });
}

int phfem_export_vtk(const phfem_mesh* mesh, const phfem_solution* sol, const char* path,
                     int with_point_data) {
    return guarded([&] {
        if (!mesh || !path) throw InvalidArgument("null argument");
        export_vtk(path, mesh->mesh, sol ? &sol->sol : nullptr, with_point_data != 0);
    });
}

int phfem_export_multiplier_vtk(const phfem_solution* sol, const char* path) {
    return guarded([&] {
        if (!sol || !path) throw InvalidArgument("null argument");
        export_multiplier_vtk(path, sol->snapshot->mesh, sol->snapshot->table(), sol->sol);
    });
}

int phfem_dump_system(const phfem_mesh* mesh, int problem, const char* directory) {
    return guarded([&] {
        if (!mesh || !directory) throw InvalidArgument("null argument");
        auto* m = const_cast<phfem_mesh*>(mesh);
        const LinearSystem sys = assemble_system(m->mesh, m->table(), builtin_problem(problem).data);
        const std::string dir(directory);
        auto open = [](const std::string& path) {
            std::ofstream os(path);
            if (!os) throw IoError("cannot open '" + path + "'");
            return os;
        };
        {
            auto os = open(dir + "/a.txt");
            dump_matrix_coo(os, system_a_csr(sys));
        }
        {
            auto os = open(dir + "/c.txt");
            dump_matrix_coo(os, sys.c);
        }
        {
            auto os = open(dir + "/rhs.txt");
            for (double v : sys.rhs) os << format_double(v) << "\n";
        }
        {
            auto os = open(dir + "/bd.txt");
            for (double v : sys.dirichlet_rhs) os << format_double(v) << "\n";
        }
    });
}

} // extern "C"
