#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#ifndef PHFEM_CLI_PATH
#error "PHFEM_CLI_PATH must be defined"
#endif

namespace {

namespace fs = std::filesystem;

struct TempDir {
    fs::path path;
    TempDir() {
        std::string tmpl = (fs::temp_directory_path() / "phfem_cli_XXXXXX").string();
        REQUIRE(mkdtemp(tmpl.data()) != nullptr);
        path = tmpl;
    }
    ~TempDir() { fs::remove_all(path); }
};

int run(const std::string& args) {
    const std::string cmd = std::string(PHFEM_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::string> read_lines(const fs::path& p) {
    std::ifstream is(p);
    REQUIRE(is.good());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(is, line)) lines.push_back(line);
    return lines;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string tok;
    while (std::getline(is, tok, sep)) out.push_back(tok);
    return out;
}

// structural check of a legacy VTK unstructured grid
void check_vtk(const fs::path& p, long want_points, long want_cells, int want_type) {
    std::ifstream is(p);
    REQUIRE(is.good());
    std::string line;
    std::getline(is, line);
    REQUIRE(line == "# vtk DataFile Version 3.0");
    std::getline(is, line); // title
    std::getline(is, line);
    REQUIRE(line == "ASCII");
    std::getline(is, line);
    REQUIRE(line == "DATASET UNSTRUCTURED_GRID");
    std::string tok, type;
    long n = 0;
    is >> tok >> n >> type;
    REQUIRE(tok == "POINTS");
    REQUIRE(n == want_points);
    for (long i = 0; i < 3 * n; ++i) {
        double v;
        REQUIRE((is >> v));
    }
    long cells = 0, total = 0;
    is >> tok >> cells >> total;
    REQUIRE(tok == "CELLS");
    REQUIRE(cells == want_cells);
    for (long c = 0; c < cells; ++c) {
        long npts;
        REQUIRE((is >> npts));
        REQUIRE(total >= npts + 1);
        for (long i = 0; i < npts; ++i) {
            long idx;
            REQUIRE((is >> idx));
            REQUIRE(idx >= 0);
            REQUIRE(idx < n);
        }
        total -= npts + 1;
    }
    REQUIRE(total == 0);
    is >> tok >> cells;
    REQUIRE(tok == "CELL_TYPES");
    for (long c = 0; c < cells; ++c) {
        int t;
        REQUIRE((is >> t));
        REQUIRE(t == want_type);
    }
}

} // namespace

TEST_CASE("refine command writes mesh levels and the counts table") {
    TempDir dir;
    REQUIRE(run("refine -l 2 --out " + dir.path.string()) == 0);
    const auto lines = read_lines(dir.path / "refine.csv");
    REQUIRE(lines.size() == 4);
    CHECK(lines[0] == "level,nE,nC,nEd,nF,t_faceup,t_numedges,t_edge2tetra,t_redrefine");
    CHECK(split(lines[1], ',')[1] == "5");
    CHECK(split(lines[2], ',')[1] == "60");
    CHECK(split(lines[3], ',')[1] == "720");
    CHECK(split(lines[3], ',')[4] == "1536");
    for (int lv = 0; lv <= 2; ++lv)
        CHECK(fs::exists(dir.path / ("mesh_level_" + std::to_string(lv) + ".txt")));
}

TEST_CASE("solve command emits stats, vectors and VTK files") {
    TempDir dir;
    REQUIRE(run("solve -l 1 --solver schur --vtk --vtk-point-data --dump-matrices --out " +
                dir.path.string()) == 0);
    CHECK(read_lines(dir.path / "u.txt").size() == 240);
    CHECK(read_lines(dir.path / "lambda.txt").size() == 104);
    const auto stats = read_lines(dir.path / "stats.json");
    REQUIRE(stats.size() == 1);
    CHECK(stats[0].find("\"solver\":\"schur\"") != std::string::npos);
    CHECK(stats[0].find("\"n\":240") != std::string::npos);
    CHECK(stats[0].find("\"l\":104") != std::string::npos);
    check_vtk(dir.path / "solution.vtk", 31, 60, 10);
    check_vtk(dir.path / "multipliers.vtk", 31, 104, 5);
    for (const char* name : {"a.txt", "c.txt", "rhs.txt", "bd.txt"})
        CHECK(fs::exists(dir.path / name));
}

TEST_CASE("initial mesh VTK matches the reference counts") {
    TempDir dir;
    REQUIRE(run("refine -l 0 --vtk --out " + dir.path.string()) == 0);
    check_vtk(dir.path / "mesh_level_0.vtk", 8, 5, 10);
}

TEST_CASE("convergence command writes the combined table") {
    TempDir dir;
    REQUIRE(run("convergence -l 2 --solver schur --out " + dir.path.string()) == 0);
    const auto lines = read_lines(dir.path / "convergence.csv");
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] ==
          "level,nE,nC,nEd,nF,N,L,h,err_u_Y,order_u,err_kappa_h,order_kappa,solver,seconds");
    const auto row1 = split(lines[1], ',');
    REQUIRE(row1.size() == 14);
    CHECK(row1[5] == "240");
    CHECK(row1[6] == "104");
    CHECK(row1[9].empty());  // no order at the first level
    const auto row2 = split(lines[2], ',');
    CHECK(row2[5] == "2880");
    CHECK(row2[6] == "1376");
    CHECK(!row2[9].empty());

    SUBCASE("numeric columns are deterministic across runs") {
        TempDir dir2;
        REQUIRE(run("convergence -l 2 --solver schur --out " + dir2.path.string()) == 0);
        const auto lines2 = read_lines(dir2.path / "convergence.csv");
        REQUIRE(lines2.size() == lines.size());
        for (std::size_t i = 1; i < lines.size(); ++i) {
            auto a = split(lines[i], ','), b = split(lines2[i], ',');
            a.pop_back(); // timings excepted
            b.pop_back();
            CHECK(a == b);
        }
    }
}

TEST_CASE("bench command emits the comparison table") {
    TempDir dir;
    REQUIRE(run("bench -l 1 --out " + dir.path.string()) == 0);
    const auto lines = read_lines(dir.path / "bench.csv");
    REQUIRE(lines.size() == 2);
    CHECK(lines[0] == "level,N,L,t_direct,t_schur_parallel,t_schur");
    const auto row = split(lines[1], ',');
    REQUIRE(row.size() == 6);
    CHECK(row[1] == "240");
    CHECK(row[2] == "104");
}

TEST_CASE("exit codes") {
    TempDir dir;
    CHECK(run("solve -l 1 --solver cholesky --out " + dir.path.string()) == 2);
    CHECK(run("solve -l 9 --out " + dir.path.string()) == 2);   // beyond cap without --force
    CHECK(run("frobnicate") == 2);                              // unknown subcommand
    CHECK(run("solve -l 1 --problem nope --out " + dir.path.string()) == 2);
}

TEST_CASE("config file provides defaults, flags win") {
    TempDir dir;
    {
        std::ofstream cfg(dir.path / "cfg.json");
        cfg << R"({"levels": 2, "solver": "schur", "out": ")" << (dir.path / "from_cfg").string()
            << R"("})";
    }
    REQUIRE(run("refine --config " + (dir.path / "cfg.json").string()) == 0);
    CHECK(fs::exists(dir.path / "from_cfg" / "mesh_level_2.txt"));

    REQUIRE(run("refine --config " + (dir.path / "cfg.json").string() + " -l 1 --out " +
                (dir.path / "flagged").string()) == 0);
    CHECK(fs::exists(dir.path / "flagged" / "mesh_level_1.txt"));
    CHECK(!fs::exists(dir.path / "flagged" / "mesh_level_2.txt"));
}
