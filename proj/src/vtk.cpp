#include "vtk.hpp"

#include <fstream>

namespace phfem {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open '" + path + "' for writing");
    return os;
}

void write_points(std::ostream& os, const Mesh& mesh) {
    os << "# vtk DataFile Version 3.0\n"
       << "phfem level " << mesh.level << "\n"
       << "ASCII\n"
       << "DATASET UNSTRUCTURED_GRID\n"
       << "POINTS " << mesh.coords.size() << " double\n";
    for (const Vec3& p : mesh.coords)
        os << format_double(p.x) << ' ' << format_double(p.y) << ' ' << format_double(p.z) << "\n";
}

} // namespace

void export_vtk(const std::string& path, const Mesh& mesh, const Solution* sol, bool point_data) {
    std::ofstream os = open_out(path);
    write_points(os, mesh);
    os << "CELLS " << mesh.tetra.size() << ' ' << 5 * mesh.tetra.size() << "\n";
    for (const Tet4& t : mesh.tetra) os << "4 " << t[0] << ' ' << t[1] << ' ' << t[2] << ' ' << t[3] << "\n";
    os << "CELL_TYPES " << mesh.tetra.size() << "\n";
    for (std::size_t i = 0; i < mesh.tetra.size(); ++i) os << "10\n";
    if (!sol) return;

    os << "CELL_DATA " << mesh.tetra.size() << "\n"
       << "SCALARS u_mean double 1\nLOOKUP_TABLE default\n";
    for (ElemId t = 0; t < mesh.num_elems(); ++t) {
        const double mean = (sol->u[4 * t] + sol->u[4 * t + 1] + sol->u[4 * t + 2] +
                             sol->u[4 * t + 3]) / 4.0;
        os << format_double(mean) << "\n";
    }
    if (point_data) {
        // Averaging the broken coefficients smooths inter-element jumps.
        std::vector<double> sum(mesh.coords.size(), 0.0);
        std::vector<int> count(mesh.coords.size(), 0);
        for (ElemId t = 0; t < mesh.num_elems(); ++t)
            for (int v = 0; v < 4; ++v) {
                sum[mesh.tetra[t][v]] += sol->u[4 * t + v];
                count[mesh.tetra[t][v]]++;
            }
        os << "POINT_DATA " << mesh.coords.size() << "\n"
           << "SCALARS u_nodal_average double 1\nLOOKUP_TABLE default\n";
        for (std::size_t n = 0; n < mesh.coords.size(); ++n)
            os << format_double(count[n] ? sum[n] / count[n] : 0.0) << "\n";
    }
    if (!os) throw IoError("write failure on '" + path + "'");
}

void export_multiplier_vtk(const std::string& path, const Mesh& mesh, const FaceTable& ft,
                           const Solution& sol) {
    std::ofstream os = open_out(path);
    write_points(os, mesh);
    const std::int64_t nl = ft.n_multipliers();
    os << "CELLS " << nl << ' ' << 4 * nl << "\n";
    for (FaceId f = 0; f < ft.n_faces(); ++f) {
        if (ft.multiplier_index[f] < 0) continue;
        const Tri3& tri = ft.faces[f];
        os << "3 " << tri[0] << ' ' << tri[1] << ' ' << tri[2] << "\n";
    }
    os << "CELL_TYPES " << nl << "\n";
    for (std::int64_t i = 0; i < nl; ++i) os << "5\n";
    os << "CELL_DATA " << nl << "\n"
       << "SCALARS lambda double 1\nLOOKUP_TABLE default\n";
    for (FaceId f = 0; f < ft.n_faces(); ++f) {
        if (ft.multiplier_index[f] < 0) continue;
        os << format_double(sol.lambda[ft.multiplier_index[f]]) << "\n";
    }
    if (!os) throw IoError("write failure on '" + path + "'");
}

} // namespace phfem
