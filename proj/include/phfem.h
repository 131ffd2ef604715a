/* phfem - tetrahedral red refinement and lowest-order primal hybrid FEM
 * for the reaction-diffusion problem -div(grad u) + u = f on the unit cube
 * with mixed Dirichlet/Neumann boundary conditions.
 *
 * C interface of the shared library.  All functions return PHFEM_OK on
 * success or a status code; phfem_last_error() describes the most recent
 * failure on the calling thread.  Handles are opaque and must be released
 * with their destroy function.
 */
#ifndef PHFEM_H
#define PHFEM_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct phfem_mesh phfem_mesh;
typedef struct phfem_solution phfem_solution;

enum phfem_status {
    PHFEM_OK = 0,
    PHFEM_ERR_ARGUMENT = 1,
    PHFEM_ERR_MESH = 2,
    PHFEM_ERR_SOLVER = 3,
    PHFEM_ERR_IO = 4
};

/* Built-in problem data sets. */
enum phfem_problem {
    PHFEM_PROBLEM_MANUFACTURED = 0, /* u = x^2 y^2 z^2 */
    PHFEM_PROBLEM_LINEAR = 1,       /* u = x + 2y + 3z + 4 (patch test) */
    PHFEM_PROBLEM_ZERO = 2          /* f = u_D = g = 0 */
};

/* Message of the last error raised on this thread; empty string if none. */
const char* phfem_last_error(void);

/* --- meshes ------------------------------------------------------------- */

/* The initial 8-node, 5-tetrahedron mesh of the unit cube. */
int phfem_mesh_create_cube(phfem_mesh** out);

/* Plain-text mesh format (sections COORD/TETRA/DB/NB, 1-based indices). */
int phfem_mesh_read(const char* path, phfem_mesh** out);
int phfem_mesh_write(const phfem_mesh* mesh, const char* path);

void phfem_mesh_destroy(phfem_mesh* mesh);

/* Wall-clock seconds of the connectivity and refinement stages. */
typedef struct phfem_refine_times {
    double t_numedges;
    double t_edge2tetra;
    double t_faceup;
    double t_redrefine;
} phfem_refine_times;

/* One uniform 12-way red refinement, in place.  When `times` is non-null it
 * receives the duration of the refinement step (the connectivity fields are
 * set by phfem_mesh_counts). */
int phfem_mesh_refine(phfem_mesh* mesh, phfem_refine_times* times);

int phfem_mesh_level(const phfem_mesh* mesh);

/* Element/node/edge/face counts; any output pointer may be null.  Edge and
 * face counts trigger connectivity construction; `times` (optional) receives
 * its stage timings. */
int phfem_mesh_counts(const phfem_mesh* mesh, int64_t* n_elems, int64_t* n_nodes,
                      int64_t* n_edges, int64_t* n_faces, phfem_refine_times* times);

/* Discrete system dimensions: N = 4*nE primal dofs and L multiplier rows
 * (interior + Dirichlet faces). */
int phfem_mesh_system_dims(const phfem_mesh* mesh, int64_t* n, int64_t* l);

/* Max element diameter. */
int phfem_mesh_diameter(const phfem_mesh* mesh, double* h);

/* Connectivity debug dumps as CSV files; either path may be null to skip. */
int phfem_mesh_dump_connectivity(const phfem_mesh* mesh, const char* edges_csv_path,
                                 const char* faces_csv_path);

/* --- solving ------------------------------------------------------------ */

/* Assembles and solves the primal hybrid system for a built-in problem.
 * solver is "direct", "schur" or "schur-parallel"; tol <= 0 selects the
 * default 1e-10. */
int phfem_solve(const phfem_mesh* mesh, int problem, const char* solver, int workers,
                double tol, phfem_solution** out);

void phfem_solution_destroy(phfem_solution* sol);

/* Borrowed views of the coefficient vectors; valid until the solution is
 * destroyed. */
int phfem_solution_values(const phfem_solution* sol, const double** u, int64_t* n,
                          const double** lambda, int64_t* l);

/* Solver statistics as a JSON object (solver, n, l, iterations, residual,
 * seconds, workers, peak_dim).  The string is owned by the solution. */
int phfem_solution_stats_json(const phfem_solution* sol, const char** json);

/* Errors against the problem's exact solution: broken Y-norm of u - u_h and
 * mesh-dependent h-norm of kappa - kappa_h. */
int phfem_solution_errors(const phfem_solution* sol, double* err_u, double* err_kappa);

/* One coefficient per line, shortest round-trip decimal form. */
int phfem_solution_write(const phfem_solution* sol, const char* u_path, const char* lambda_path);

/* --- export ------------------------------------------------------------- */

/* Legacy ASCII VTK unstructured grid (cell type 10).  `sol` may be null;
 * with a solution, u_h element means are written as CELL_DATA and, when
 * with_point_data is nonzero, a nodal average as POINT_DATA. */
int phfem_export_vtk(const phfem_mesh* mesh, const phfem_solution* sol, const char* path,
                     int with_point_data);

/* Multiplier faces as a VTK triangle mesh (cell type 5) with Lambda values. */
int phfem_export_multiplier_vtk(const phfem_solution* sol, const char* path);

/* Coordinate-format dumps (1-based, row-major) of K+M, C, rhs and b_D into
 * the given directory as a.txt, c.txt, rhs.txt, bd.txt. */
int phfem_dump_system(const phfem_mesh* mesh, int problem, const char* directory);

#ifdef __cplusplus
}
#endif

#endif /* PHFEM_H */
