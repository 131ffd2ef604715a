// Command line driver for the phfem shared library.  Subcommands:
//   refine       per-level mesh files and a connectivity/refinement CSV
//   solve        one level: solution vectors, stats JSON, optional VTK
//   convergence  error table CSV over a range of levels
//   bench        solver timing comparison CSV
//
// Exit codes: 0 ok, 2 configuration error, 3 mesh error, 4 solver error,
// 1 I/O or other failure.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "phfem.h"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitMesh = 3;
constexpr int kExitSolver = 4;
constexpr int kExitOther = 1;
constexpr int kLevelCap = 6;

int exit_code_for(int status) {
    switch (status) {
        case PHFEM_OK: return 0;
        case PHFEM_ERR_ARGUMENT: return kExitConfig;
        case PHFEM_ERR_MESH: return kExitMesh;
        case PHFEM_ERR_SOLVER: return kExitSolver;
        default: return kExitOther;
    }
}

[[noreturn]] void fail(int status, const std::string& stage) {
    std::cerr << "phfem: " << stage << ": " << phfem_last_error() << "\n";
    std::exit(exit_code_for(status));
}

void check(int status, const std::string& stage) {
    if (status != PHFEM_OK) fail(status, stage);
}

struct MeshGuard {
    phfem_mesh* m = nullptr;
    ~MeshGuard() { phfem_mesh_destroy(m); }
};

struct SolutionGuard {
    phfem_solution* s = nullptr;
    ~SolutionGuard() { phfem_solution_destroy(s); }
};

std::string fmt(double v, const char* spec = "%.10g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::ofstream open_csv(const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os) {
        std::cerr << "phfem: cannot open '" << path.string() << "' for writing\n";
        std::exit(kExitOther);
    }
    return os;
}

struct Options {
    int levels = 1;
    std::string solver = "schur";
    int workers = 4;
    double tol = 1e-10;
    std::string out = "out";
    bool vtk = false;
    bool vtk_point_data = false;
    bool dump_matrices = false;
    bool force = false;
};

void check_common(const Options& opt) {
    if (opt.solver != "direct" && opt.solver != "schur" && opt.solver != "schur-parallel") {
        std::cerr << "phfem: unknown solver '" << opt.solver
                  << "' (expected direct|schur|schur-parallel)\n";
        std::exit(kExitConfig);
    }
    if (opt.levels < 0 || (opt.levels > kLevelCap && !opt.force)) {
        std::cerr << "phfem: level " << opt.levels << " outside 0.." << kLevelCap
                  << " (use --force to override)\n";
        std::exit(kExitConfig);
    }
    std::filesystem::create_directories(opt.out);
}

int problem_id(const std::string& name) {
    if (name == "manufactured") return PHFEM_PROBLEM_MANUFACTURED;
    if (name == "linear") return PHFEM_PROBLEM_LINEAR;
    if (name == "zero") return PHFEM_PROBLEM_ZERO;
    std::cerr << "phfem: unknown problem '" << name << "' (expected manufactured|linear|zero)\n";
    std::exit(kExitConfig);
}

void cmd_refine(const Options& opt) {
    check_common(opt);
    MeshGuard mesh;
    check(phfem_mesh_create_cube(&mesh.m), "create mesh");
    auto csv = open_csv(std::filesystem::path(opt.out) / "refine.csv");
    csv << "level,nE,nC,nEd,nF,t_faceup,t_numedges,t_edge2tetra,t_redrefine\n";
    phfem_refine_times refine_times{};
    for (int level = 0; level <= opt.levels; ++level) {
        if (level > 0) check(phfem_mesh_refine(mesh.m, &refine_times), "refine");
        int64_t ne, nc, ned, nf;
        phfem_refine_times conn_times{};
        check(phfem_mesh_counts(mesh.m, &ne, &nc, &ned, &nf, &conn_times), "connectivity");
        csv << level << ',' << ne << ',' << nc << ',' << ned << ',' << nf << ','
            << fmt(conn_times.t_faceup, "%.4f") << ',' << fmt(conn_times.t_numedges, "%.4f") << ','
            << fmt(conn_times.t_edge2tetra, "%.4f") << ',' << fmt(refine_times.t_redrefine, "%.4f")
            << "\n";
        const auto path = std::filesystem::path(opt.out) / ("mesh_level_" + std::to_string(level) + ".txt");
        check(phfem_mesh_write(mesh.m, path.string().c_str()), "write mesh");
        if (opt.vtk) {
            const auto vtk = std::filesystem::path(opt.out) / ("mesh_level_" + std::to_string(level) + ".vtk");
            check(phfem_export_vtk(mesh.m, nullptr, vtk.string().c_str(), 0), "export vtk");
        }
    }
    std::cout << "wrote " << opt.levels + 1 << " mesh levels and refine.csv to " << opt.out << "\n";
}

void cmd_solve(const Options& opt, const std::string& problem) {
    check_common(opt);
    const int prob = problem_id(problem);
    MeshGuard mesh;
    check(phfem_mesh_create_cube(&mesh.m), "create mesh");
    for (int level = 0; level < opt.levels; ++level)
        check(phfem_mesh_refine(mesh.m, nullptr), "refine");

    SolutionGuard sol;
    check(phfem_solve(mesh.m, prob, opt.solver.c_str(), opt.workers, opt.tol, &sol.s), "solve");

    const std::filesystem::path out(opt.out);
    check(phfem_solution_write(sol.s, (out / "u.txt").string().c_str(),
                               (out / "lambda.txt").string().c_str()),
          "write solution");
    const char* stats = nullptr;
    check(phfem_solution_stats_json(sol.s, &stats), "stats");
    {
        std::ofstream os(out / "stats.json");
        os << stats << "\n";
    }
    if (opt.vtk) {
        check(phfem_export_vtk(mesh.m, sol.s, (out / "solution.vtk").string().c_str(),
                               opt.vtk_point_data ? 1 : 0),
              "export vtk");
        check(phfem_export_multiplier_vtk(sol.s, (out / "multipliers.vtk").string().c_str()),
              "export multiplier vtk");
    }
    if (opt.dump_matrices)
        check(phfem_dump_system(mesh.m, prob, opt.out.c_str()), "dump matrices");
    std::cout << stats << "\n";
}

void cmd_convergence(const Options& opt, const std::string& problem) {
    check_common(opt);
    if (opt.levels < 1) {
        std::cerr << "phfem: convergence needs at least one level\n";
        std::exit(kExitConfig);
    }
    const int prob = problem_id(problem);
    MeshGuard mesh;
    check(phfem_mesh_create_cube(&mesh.m), "create mesh");
    auto csv = open_csv(std::filesystem::path(opt.out) / "convergence.csv");
    csv << "level,nE,nC,nEd,nF,N,L,h,err_u_Y,order_u,err_kappa_h,order_kappa,solver,seconds\n";
    double prev_u = 0.0, prev_kappa = 0.0;
    for (int level = 1; level <= opt.levels; ++level) {
        check(phfem_mesh_refine(mesh.m, nullptr), "refine");
        int64_t ne, nc, ned, nf, n, l;
        check(phfem_mesh_counts(mesh.m, &ne, &nc, &ned, &nf, nullptr), "connectivity");
        check(phfem_mesh_system_dims(mesh.m, &n, &l), "system dims");
        double h = 0.0;
        check(phfem_mesh_diameter(mesh.m, &h), "diameter");

        SolutionGuard sol;
        check(phfem_solve(mesh.m, prob, opt.solver.c_str(), opt.workers, opt.tol, &sol.s), "solve");
        double err_u = 0.0, err_kappa = 0.0;
        check(phfem_solution_errors(sol.s, &err_u, &err_kappa), "errors");
        const char* stats_str = nullptr;
        check(phfem_solution_stats_json(sol.s, &stats_str), "stats");
        const auto stats = nlohmann::json::parse(stats_str);

        csv << level << ',' << ne << ',' << nc << ',' << ned << ',' << nf << ',' << n << ',' << l
            << ',' << fmt(h) << ',' << fmt(err_u);
        if (level > 1 && err_u > 0.0 && prev_u > 0.0)
            csv << ',' << fmt(std::log2(prev_u / err_u));
        else
            csv << ',';
        csv << ',' << fmt(err_kappa);
        if (level > 1 && err_kappa > 0.0 && prev_kappa > 0.0)
            csv << ',' << fmt(std::log2(prev_kappa / err_kappa));
        else
            csv << ',';
        csv << ',' << stats["solver"].get<std::string>() << ','
            << fmt(stats["seconds"].get<double>(), "%.4f") << "\n";
        std::cout << "level " << level << ": err_u_Y=" << fmt(err_u, "%.4f")
                  << " err_kappa_h=" << fmt(err_kappa, "%.4f") << "\n";
        prev_u = err_u;
        prev_kappa = err_kappa;
    }
    std::cout << "wrote convergence.csv to " << opt.out << "\n";
}

void cmd_bench(const Options& opt, const std::string& problem) {
    check_common(opt);
    const int prob = problem_id(problem);
    MeshGuard mesh;
    check(phfem_mesh_create_cube(&mesh.m), "create mesh");
    auto csv = open_csv(std::filesystem::path(opt.out) / "bench.csv");
    csv << "level,N,L,t_direct,t_schur_parallel,t_schur\n";
    // warm-up pass at level 1 so first-touch costs are excluded
    bool warmed = false;
    for (int level = 1; level <= opt.levels; ++level) {
        check(phfem_mesh_refine(mesh.m, nullptr), "refine");
        int64_t n, l;
        check(phfem_mesh_system_dims(mesh.m, &n, &l), "system dims");
        auto run = [&](const char* solver, int workers) {
            SolutionGuard sol;
            check(phfem_solve(mesh.m, prob, solver, workers, opt.tol, &sol.s), solver);
            const char* stats_str = nullptr;
            check(phfem_solution_stats_json(sol.s, &stats_str), "stats");
            return nlohmann::json::parse(stats_str)["seconds"].get<double>();
        };
        if (!warmed) {
            run("schur", 1);
            warmed = true;
        }
        const double t_direct = run("direct", 1);
        const double t_par = run("schur-parallel", opt.workers);
        const double t_schur = run("schur", 1);
        csv << level << ',' << n << ',' << l << ',' << fmt(t_direct, "%.4f") << ','
            << fmt(t_par, "%.4f") << ',' << fmt(t_schur, "%.4f") << "\n";
        std::cout << "level " << level << ": direct " << fmt(t_direct, "%.4f") << "s, schur-parallel "
                  << fmt(t_par, "%.4f") << "s, schur " << fmt(t_schur, "%.4f") << "s\n";
    }
    std::cout << "wrote bench.csv to " << opt.out << "\n";
}

// Values from --config are defaults; explicit flags win.
void apply_config(const std::string& path, CLI::App* cmd, Options& opt) {
    std::ifstream is(path);
    if (!is) {
        std::cerr << "phfem: cannot read config file '" << path << "'\n";
        std::exit(kExitConfig);
    }
    nlohmann::json cfg;
    try {
        is >> cfg;
    } catch (const std::exception& e) {
        std::cerr << "phfem: bad config file: " << e.what() << "\n";
        std::exit(kExitConfig);
    }
    auto unset = [&](const char* flag) {
        const CLI::Option* o = cmd->get_option_no_throw(flag);
        return o && o->count() == 0;
    };
    if (cfg.contains("levels") && unset("--levels")) opt.levels = cfg["levels"].get<int>();
    if (cfg.contains("solver") && unset("--solver")) opt.solver = cfg["solver"].get<std::string>();
    if (cfg.contains("workers") && unset("--workers")) opt.workers = cfg["workers"].get<int>();
    if (cfg.contains("tol") && unset("--tol")) opt.tol = cfg["tol"].get<double>();
    if (cfg.contains("out") && unset("--out")) opt.out = cfg["out"].get<std::string>();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tetrahedral red refinement and primal hybrid FEM on the unit cube"};
    app.require_subcommand(1);

    Options opt;
    std::string problem = "manufactured";
    std::string config;

    auto add_common = [&](CLI::App* cmd, bool with_solver) {
        cmd->add_option("-l,--levels", opt.levels, "Refinement level (cap " +
                        std::to_string(kLevelCap) + " without --force)");
        cmd->add_option("--out", opt.out, "Output directory (default: out)");
        cmd->add_option("--config", config, "JSON config file; flags take precedence");
        cmd->add_flag("--force", opt.force, "Allow levels beyond the cap");
        cmd->add_flag("--vtk", opt.vtk, "Write legacy VTK files");
        if (with_solver) {
            cmd->add_option("--solver", opt.solver, "direct | schur | schur-parallel (default: schur)");
            cmd->add_option("--workers", opt.workers, "Workers for schur-parallel (default: 4)");
            cmd->add_option("--tol", opt.tol, "Relative residual tolerance (default: 1e-10)");
            cmd->add_option("--problem", problem, "manufactured | linear | zero");
        }
        return cmd;
    };

    CLI::App* refine = add_common(app.add_subcommand("refine", "Refine the cube mesh"), false);
    CLI::App* solve = add_common(app.add_subcommand("solve", "Solve at one level"), true);
    solve->add_flag("--vtk-point-data", opt.vtk_point_data, "Also write nodal-average point data");
    solve->add_flag("--dump-matrices", opt.dump_matrices, "Dump assembled operators as text");
    CLI::App* conv = add_common(app.add_subcommand("convergence", "Error table over levels"), true);
    CLI::App* bench = add_common(app.add_subcommand("bench", "Solver timing comparison"), true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    CLI::App* active = refine->parsed() ? refine : solve->parsed() ? solve
                       : conv->parsed() ? conv : bench;
    if (!config.empty()) apply_config(config, active, opt);

    if (refine->parsed()) cmd_refine(opt);
    else if (solve->parsed()) cmd_solve(opt, problem);
    else if (conv->parsed()) cmd_convergence(opt, problem);
    else if (bench->parsed()) cmd_bench(opt, problem);
    return 0;
}
