#include "assembly.hpp"

#include <cmath>

namespace phfem {

LocalStiffnessMass local_stiffness_mass(const Mesh& mesh, ElemId t) {
    const Tet4& e = mesh.tetra[t];
    const Vec3 p0 = mesh.coords[e[0]];
    const Vec3 d1 = mesh.coords[e[1]] - p0;
    const Vec3 d2 = mesh.coords[e[2]] - p0;
    const Vec3 d3 = mesh.coords[e[3]] - p0;
    const double det = dot(cross(d1, d2), d3);
    if (det == 0.0)
        throw MeshError("degenerate element " + std::to_string(t + 1) + " (zero volume)");

    LocalStiffnessMass out;
    out.volume = std::fabs(det) / 6.0;
    // Barycentric gradients via the cofactor rows of [d1 d2 d3]^-1.
    const Vec3 g1 = cross(d2, d3) / det;
    const Vec3 g2 = cross(d3, d1) / det;
    const Vec3 g3 = cross(d1, d2) / det;
    out.grads[1] = g1;
    out.grads[2] = g2;
    out.grads[3] = g3;
    out.grads[0] = (g1 + g2 + g3) * -1.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            out.k[i][j] = out.volume * dot(out.grads[i], out.grads[j]);
            out.m[i][j] = out.volume / 20.0 * (i == j ? 2.0 : 1.0);
        }
    return out;
}

Mat4 local_multiplier(const FaceTable& ft, ElemId t) {
    Mat4 c = mat4_zero();
    for (int k = 0; k < 4; ++k) {
        const std::int64_t slot = 4 * std::int64_t(t) + k;
        const FaceId f = ft.slot_to_face[slot];
        const double entry = ft.sigma[slot] * ft.face_area[f] / 3.0;
        for (int v : kFaceVerts[k]) c[k][v] = entry;
    }
    return c;
}

std::vector<double> load_vector(const Mesh& mesh, const std::function<double(const Vec3&)>& f,
                                LoadRule rule) {
    const std::int64_t ne = mesh.num_elems();
    std::vector<double> b(4 * ne, 0.0);
    if (rule == LoadRule::FaceCentroid) {
        for (ElemId t = 0; t < ne; ++t) {
            const Tet4& e = mesh.tetra[t];
            const double vol = elem_volume(mesh, t);
            double fc[4];
            for (int k = 0; k < 4; ++k) {
                const Vec3 ct = (mesh.coords[e[kFaceVerts[k][0]]] + mesh.coords[e[kFaceVerts[k][1]]] +
                                 mesh.coords[e[kFaceVerts[k][2]]]) / 3.0;
                fc[k] = f(ct);
            }
            for (int k = 0; k < 4; ++k)
                for (int v : kFaceVerts[k]) b[4 * t + v] += vol / 12.0 * fc[k];
        }
        return b;
    }
    static const TetRule quad = tet_rule(5);
    for (ElemId t = 0; t < ne; ++t) {
        const Tet4& e = mesh.tetra[t];
        const double vol = elem_volume(mesh, t);
        const Vec3 p[4] = {mesh.coords[e[0]], mesh.coords[e[1]], mesh.coords[e[2]],
                           mesh.coords[e[3]]};
        for (const auto& q : quad.points) {
            const Vec3 x = p[0] * q.lambda[0] + p[1] * q.lambda[1] + p[2] * q.lambda[2] +
                           p[3] * q.lambda[3];
            const double fw = vol * q.w * f(x);
            for (int v = 0; v < 4; ++v) b[4 * t + v] += fw * q.lambda[v];
        }
    }
    return b;
}

std::vector<double> neumann_vector(const Mesh& mesh, const FaceTable& ft,
                                   const std::function<double(const Vec3&, const Vec3&)>& g) {
    std::vector<double> ln(ft.slot_to_face.size(), 0.0);
    for (FaceId f = 0; f < ft.n_faces(); ++f) {
        if (ft.face_class[f] != FaceClass::Neumann) continue;
        const std::int64_t slot = ft.face_slots[f][0]; // unique by the boundary invariant
        const ElemId t = ElemId(slot / 4);
        const int k = int(slot % 4);
        const FaceGeometry geom = face_area_and_normal(mesh, ft.faces[f]);
        const double gc = g(face_centroid(mesh, ft.faces[f]), geom.unit_normal);
        for (int v : kFaceVerts[k]) ln[4 * std::int64_t(t) + v] += geom.area * gc / 3.0;
    }
    return ln;
}

std::vector<double> dirichlet_vector(const Mesh& mesh, const FaceTable& ft,
                                     const std::function<double(const Vec3&)>& u_d) {
    std::vector<double> bd(ft.n_multipliers(), 0.0);
    for (FaceId f = 0; f < ft.n_faces(); ++f) {
        if (ft.face_class[f] != FaceClass::Dirichlet) continue;
        bd[ft.multiplier_index[f]] = ft.face_area[f] * u_d(face_centroid(mesh, ft.faces[f]));
    }
    return bd;
}

LinearSystem assemble_system(const Mesh& mesh, const FaceTable& ft, const ProblemData& problem,
                             LoadRule rule) {
    const std::int64_t ne = mesh.num_elems();
    LinearSystem sys;
    sys.n = 4 * ne;
    sys.l = ft.n_multipliers();

    sys.a_blocks.resize(ne);
    sys.slot_mrow.resize(ne);
    sys.slot_coef.resize(ne);
    Triplets ct;
    ct.reserve(static_cast<std::size_t>(ne) * 12);
    for (ElemId t = 0; t < ne; ++t) {
        const LocalStiffnessMass local = local_stiffness_mass(mesh, t);
        sys.a_blocks[t] = mat4_add(local.k, local.m);
        for (int k = 0; k < 4; ++k) {
            const std::int64_t slot = 4 * std::int64_t(t) + k;
            const FaceId f = ft.slot_to_face[slot];
            sys.slot_mrow[t][k] = ft.multiplier_index[f];
            sys.slot_coef[t][k] = ft.sigma[slot] * ft.face_area[f] / 3.0;
            if (sys.slot_mrow[t][k] < 0) continue;
            for (int v : kFaceVerts[k])
                ct.add(sys.slot_mrow[t][k], std::int32_t(4 * t + v), sys.slot_coef[t][k]);
        }
    }
    sys.c = CsrMatrix::from_triplets(sys.l, sys.n, ct);

    sys.rhs = load_vector(mesh, problem.f, rule);
    const std::vector<double> ln = neumann_vector(mesh, ft, problem.neumann_flux);
    for (std::int64_t i = 0; i < sys.n; ++i) sys.rhs[i] += ln[i];
    sys.dirichlet_rhs = dirichlet_vector(mesh, ft, problem.u_dirichlet);
    return sys;
}

CsrMatrix system_a_csr(const LinearSystem& sys) {
    Triplets t;
    t.reserve(sys.a_blocks.size() * 16);
    for (std::size_t e = 0; e < sys.a_blocks.size(); ++e)
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                t.add(std::int64_t(4 * e + i), std::int32_t(4 * e + j), sys.a_blocks[e][i][j]);
    return CsrMatrix::from_triplets(sys.n, sys.n, t);
}

} // namespace phfem
