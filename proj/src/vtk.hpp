#pragma once

#include <string>

#include "connectivity.hpp"
#include "mesh.hpp"
#include "solver.hpp"

namespace phfem {

/// Legacy ASCII VTK unstructured grid of the tetrahedra (cell type 10).
/// With a solution, u_h is written as CELL_DATA element means; the broken
/// field has no single nodal value, so a POINT_DATA nodal average is opt-in.
void export_vtk(const std::string& path, const Mesh& mesh, const Solution* sol = nullptr,
                bool point_data = false);

/// Companion triangle mesh (cell type 5) of the multiplier faces with Lambda
/// as CELL_DATA.
void export_multiplier_vtk(const std::string& path, const Mesh& mesh, const FaceTable& ft,
                           const Solution& sol);

} // namespace phfem
