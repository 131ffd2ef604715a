#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "analysis.hpp"
#include "assembly.hpp"
#include "refine.hpp"

using namespace phfem;

namespace {

Mesh reference_tetra() {
    Mesh m;
    m.coords = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    m.tetra = {{0, 1, 2, 3}};
    m.neumann_faces = {{0, 1, 2}, {0, 2, 3}, {0, 3, 1}, {3, 2, 1}};
    return m;
}

Mesh skew_tetra() {
    Mesh m;
    m.coords = {{0, 0, 0}, {1, 0.1, 0}, {-0.2, 1, 0.05}, {0.1, -0.1, 1.3}};
    m.tetra = {{0, 1, 2, 3}};
    m.neumann_faces = {{0, 1, 2}, {0, 2, 3}, {0, 3, 1}, {3, 2, 1}};
    return m;
}

double factorial(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

// integral over T of a barycentric monomial prod lambda_i^(e_i)
double bary_moment(const std::array<int, 4>& e, double volume) {
    double num = 1.0;
    for (int v = 0; v < 4; ++v) num *= factorial(e[v]);
    return 6.0 * volume * num / factorial(e[0] + e[1] + e[2] + e[3] + 3);
}

// barycentric coordinates on element 0 of a one-element mesh
std::array<double, 4> barycentric(const Mesh& m, const Vec3& x) {
    const LocalStiffnessMass loc = local_stiffness_mass(m, 0);
    std::array<double, 4> lam;
    for (int v = 0; v < 4; ++v)
        lam[v] = (v == 0 ? 1.0 : 0.0) + dot(loc.grads[v], x - m.coords[m.tetra[0][0]]);
    return lam;
}

} // namespace

TEST_CASE("local stiffness and mass on the reference tetrahedron") {
    const Mesh m = reference_tetra();
    const LocalStiffnessMass loc = local_stiffness_mass(m, 0);
    CHECK(loc.volume == doctest::Approx(1.0 / 6.0));

    const double k_expected[4][4] = {
        {3, -1, -1, -1}, {-1, 1, 0, 0}, {-1, 0, 1, 0}, {-1, 0, 0, 1}};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            CHECK(loc.k[i][j] == doctest::Approx(k_expected[i][j] / 6.0).epsilon(1e-14));

    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            CHECK(loc.m[i][j] == doctest::Approx((i == j ? 2.0 : 1.0) / 120.0).epsilon(1e-14));
}

TEST_CASE("stiffness row sums vanish on every element") {
    Mesh m = red_refine(initial_cube_mesh(), num_edges(initial_cube_mesh())).first;
    for (ElemId t = 0; t < m.num_elems(); ++t) {
        const LocalStiffnessMass loc = local_stiffness_mass(m, t);
        for (int i = 0; i < 4; ++i) {
            double s = loc.k[i][0] + loc.k[i][1] + loc.k[i][2] + loc.k[i][3];
            REQUIRE(std::fabs(s) <= 1e-12);
        }
    }
}

TEST_CASE("degenerate element is rejected") {
    Mesh m;
    m.coords = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0.5, 0.5, 0}};
    m.tetra = {{0, 1, 2, 3}};
    CHECK_THROWS_AS(local_stiffness_mass(m, 0), MeshError);
}

TEST_CASE("local multiplier matrix") {
    const Mesh m = initial_cube_mesh();
    const FaceTable ft = build_face_table(m);

    SUBCASE("boundary slot with unit-half area") {
        // element 1 slot 1 is the Neumann face [1 2 3], area 1/2, sigma +1
        const Mat4 c = local_multiplier(ft, 0);
        CHECK(c[0][0] == doctest::Approx(1.0 / 6.0));
        CHECK(c[0][1] == doctest::Approx(1.0 / 6.0));
        CHECK(c[0][2] == doctest::Approx(1.0 / 6.0));
        CHECK(c[0][3] == 0.0);
    }
    SUBCASE("interior face rows from both slots negate on shared vertices") {
        // face {8,3,2} is slot 4 of element 4 and slot 1 of element 5
        const Mat4 c4 = local_multiplier(ft, 3);
        const Mat4 c5 = local_multiplier(ft, 4);
        for (NodeId node : {7, 2, 1}) {
            int v4 = -1, v5 = -1;
            for (int v = 0; v < 4; ++v) {
                if (m.tetra[3][v] == node) v4 = v;
                if (m.tetra[4][v] == node) v5 = v;
            }
            CHECK(c4[3][v4] == doctest::Approx(-c5[0][v5]).epsilon(1e-14));
            CHECK(c4[3][v4] != 0.0);
        }
    }
    SUBCASE("row magnitudes sum to the face area") {
        for (ElemId t = 0; t < m.num_elems(); ++t) {
            const Mat4 c = local_multiplier(ft, t);
            for (int k = 0; k < 4; ++k) {
                double s = 0.0;
                for (int v = 0; v < 4; ++v) s += std::fabs(c[k][v]);
                CHECK(s == doctest::Approx(ft.face_area[ft.slot_to_face[4 * t + k]]).epsilon(1e-14));
            }
        }
    }
}

TEST_CASE("load vector: constant f gives V/4 per vertex under both rules") {
    const Mesh m = reference_tetra();
    auto one = [](const Vec3&) { return 1.0; };
    for (LoadRule rule : {LoadRule::Gauss, LoadRule::FaceCentroid}) {
        const std::vector<double> b = load_vector(m, one, rule);
        for (double v : b) CHECK(v == doctest::Approx(1.0 / 24.0).epsilon(1e-14));
    }
}

TEST_CASE("face-centroid load rule reproduces the V/12 pattern") {
    const Mesh m = reference_tetra();
    auto f = [](const Vec3& p) { return p.x; };
    const std::vector<double> b = load_vector(m, f, LoadRule::FaceCentroid);
    CHECK(b[0] == doctest::Approx(1.0 / 108.0).epsilon(1e-14));
    CHECK(b[1] == doctest::Approx(1.0 / 72.0).epsilon(1e-14));
    CHECK(b[2] == doctest::Approx(1.0 / 108.0).epsilon(1e-14));
    CHECK(b[3] == doctest::Approx(1.0 / 108.0).epsilon(1e-14));
}

TEST_CASE("Gauss load rule integrates f phi_j exactly for polynomial f up to degree 4") {
    const Mesh m = skew_tetra();
    const double vol = elem_volume(m, 0);
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> coef(-2.0, 2.0);

    // random barycentric quadratic f = sum q_ij lambda_i lambda_j (+ linear)
    double q[4][4], lin[4];
    for (int i = 0; i < 4; ++i) {
        lin[i] = coef(rng);
        for (int j = 0; j < 4; ++j) q[i][j] = coef(rng);
    }
    auto f = [&](const Vec3& x) {
        const auto lam = barycentric(m, x);
        double s = 0.0;
        for (int i = 0; i < 4; ++i) {
            s += lin[i] * lam[i];
            for (int j = 0; j < 4; ++j) s += q[i][j] * lam[i] * lam[j];
        }
        return s;
    };
    const std::vector<double> b = load_vector(m, f, LoadRule::Gauss);
    for (int v = 0; v < 4; ++v) {
        double exact = 0.0;
        for (int i = 0; i < 4; ++i) {
            std::array<int, 4> e{};
            e[i] += 1;
            e[v] += 1;
            exact += lin[i] * bary_moment(e, vol);
            for (int j = 0; j < 4; ++j) {
                std::array<int, 4> e2{};
                e2[i] += 1;
                e2[j] += 1;
                e2[v] += 1;
                exact += q[i][j] * bary_moment(e2, vol);
            }
        }
        REQUIRE(b[v] == doctest::Approx(exact).epsilon(1e-13));
    }

    SUBCASE("quartic barycentric monomial is still exact") {
        auto f4 = [&](const Vec3& x) {
            const auto lam = barycentric(m, x);
            return lam[0] * lam[0] * lam[1] * lam[1];
        };
        const std::vector<double> b4 = load_vector(m, f4, LoadRule::Gauss);
        for (int v = 0; v < 4; ++v) {
            std::array<int, 4> e{2, 2, 0, 0};
            e[v] += 1;
            CHECK(b4[v] == doctest::Approx(bary_moment(e, vol)).epsilon(1e-13));
        }
    }
    SUBCASE("the face-centroid rule is not exact for linear f") {
        auto flin = [&](const Vec3& x) { return barycentric(m, x)[0]; };
        const std::vector<double> bfc = load_vector(m, flin, LoadRule::FaceCentroid);
        const std::array<int, 4> e{2, 0, 0, 0};
        CHECK(std::fabs(bfc[0] - bary_moment(e, vol)) > 1e-4 * vol);
    }
}

TEST_CASE("load vector on the level-1 mesh agrees with a higher-order evaluation") {
    const Mesh m = red_refine(initial_cube_mesh(), num_edges(initial_cube_mesh())).first;
    const ProblemData prob = manufactured_problem().data;
    const std::vector<double> b = load_vector(m, prob.f, LoadRule::Gauss);

    // degree-9 rule as reference; the default rule truncates only the
    // degree > 5 part of the integrand
    static const TetRule fine = tet_rule(9);
    std::vector<double> ref(b.size(), 0.0);
    for (ElemId t = 0; t < m.num_elems(); ++t) {
        const Tet4& e = m.tetra[t];
        const double vol = elem_volume(m, t);
        for (const auto& q : fine.points) {
            Vec3 x{};
            for (int v = 0; v < 4; ++v) x += m.coords[e[v]] * q.lambda[v];
            const double fw = vol * q.w * prob.f(x);
            for (int v = 0; v < 4; ++v) ref[4 * t + v] += fw * q.lambda[v];
        }
    }
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) {
        num += (b[i] - ref[i]) * (b[i] - ref[i]);
        den += ref[i] * ref[i];
    }
    CHECK(std::sqrt(num / den) <= 1e-5);
}

TEST_CASE("neumann vector") {
    const Mesh m = initial_cube_mesh();
    const FaceTable ft = build_face_table(m);

    SUBCASE("zero flux gives a zero vector") {
        const auto ln = neumann_vector(m, ft, [](const Vec3&, const Vec3&) { return 0.0; });
        for (double v : ln) CHECK(v == 0.0);
    }
    SUBCASE("unit flux distributes area thirds") {
        const auto ln = neumann_vector(m, ft, [](const Vec3&, const Vec3&) { return 1.0; });
        double total = 0.0;
        for (double v : ln) total += v;
        CHECK(total == doctest::Approx(5.0).epsilon(1e-14)); // ten faces of area 1/2
    }
    SUBCASE("manufactured flux against a direct face loop") {
        const ProblemData prob = manufactured_problem().data;
        const auto ln = neumann_vector(m, ft, prob.neumann_flux);
        std::vector<double> ref(ln.size(), 0.0);
        for (const Tri3& f : m.neumann_faces) {
            const auto geom = face_area_and_normal(m, f);
            const double g = prob.neumann_flux(face_centroid(m, f), geom.unit_normal);
            ElemId owner = -1;
            int local = -1;
            for (ElemId t = 0; t < m.num_elems() && owner < 0; ++t) {
                const auto faces = elem_oriented_faces(m.tetra[t]);
                for (int k = 0; k < 4 && owner < 0; ++k) {
                    std::array<NodeId, 3> a = faces[k], bnodes = f;
                    std::sort(a.begin(), a.end());
                    std::sort(bnodes.begin(), bnodes.end());
                    if (a == bnodes) {
                        owner = t;
                        local = k;
                    }
                }
            }
            REQUIRE(owner >= 0);
            for (int v : kFaceVerts[local]) ref[4 * owner + v] += geom.area * g / 3.0;
        }
        for (std::size_t i = 0; i < ln.size(); ++i) CHECK(ln[i] == doctest::Approx(ref[i]).epsilon(1e-13));
    }
}

TEST_CASE("dirichlet vector") {
    const Mesh m = initial_cube_mesh();
    const FaceTable ft = build_face_table(m);

    SUBCASE("zero and constant traces") {
        const auto z = dirichlet_vector(m, ft, [](const Vec3&) { return 0.0; });
        for (double v : z) CHECK(v == 0.0);
        const auto one = dirichlet_vector(m, ft, [](const Vec3&) { return 1.0; });
        double nonzero = 0;
        for (FaceId f = 0; f < ft.n_faces(); ++f)
            if (ft.face_class[f] == FaceClass::Dirichlet) {
                CHECK(one[ft.multiplier_index[f]] == doctest::Approx(ft.face_area[f]));
                ++nonzero;
            } else if (ft.multiplier_index[f] >= 0) {
                CHECK(one[ft.multiplier_index[f]] == 0.0);
            }
        CHECK(nonzero == 2);
    }
    SUBCASE("x^2 y^2 z^2 trace on both faces evaluates to 2/81") {
        // both Dirichlet faces lie on z=1 with centroid values 4/81 and area 1/2
        const auto bd = dirichlet_vector(m, ft, manufactured_problem().data.u_dirichlet);
        int seen = 0;
        for (FaceId f = 0; f < ft.n_faces(); ++f)
            if (ft.face_class[f] == FaceClass::Dirichlet) {
                CHECK(bd[ft.multiplier_index[f]] == doctest::Approx(2.0 / 81.0).epsilon(1e-14));
                ++seen;
            }
        CHECK(seen == 2);
    }
}

TEST_CASE("assembled system dimensions and structure") {
    Mesh m = red_refine(initial_cube_mesh(), num_edges(initial_cube_mesh())).first;
    const FaceTable ft = build_face_table(m);
    const LinearSystem sys = assemble_system(m, ft, manufactured_problem().data);
    CHECK(sys.n == 240);
    CHECK(sys.l == 104);

    SUBCASE("A blocks equal K+M and are symmetric") {
        for (ElemId t = 0; t < m.num_elems(); ++t) {
            const LocalStiffnessMass loc = local_stiffness_mass(m, t);
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) {
                    CHECK(sys.a_blocks[t][i][j] == doctest::Approx(loc.k[i][j] + loc.m[i][j]));
                    CHECK(sys.a_blocks[t][i][j] == doctest::Approx(sys.a_blocks[t][j][i]));
                }
        }
    }
    SUBCASE("C rows carry 3 (boundary) or 6 (interior) entries") {
        int three = 0, six = 0;
        for (std::int64_t r = 0; r < sys.c.n_rows; ++r) {
            const std::int64_t nnz = sys.c.row_ptr[r + 1] - sys.c.row_ptr[r];
            if (nnz == 3) ++three;
            else if (nnz == 6) ++six;
            else FAIL("row with ", nnz, " entries");
        }
        CHECK(three == 8);   // Dirichlet rows at level 1
        CHECK(six == 96);    // interior rows
    }
    SUBCASE("C annihilates conforming functions vanishing on the Dirichlet boundary") {
        std::mt19937 rng(11);
        std::uniform_real_distribution<double> val(-1.0, 1.0);
        std::vector<double> nodal(m.num_nodes());
        for (double& v : nodal) v = val(rng);
        for (const Tri3& f : m.dirichlet_faces)
            for (NodeId n : f) nodal[n] = 0.0;
        std::vector<double> u(sys.n);
        double u_inf = 0.0;
        for (ElemId t = 0; t < m.num_elems(); ++t)
            for (int v = 0; v < 4; ++v) {
                u[4 * t + v] = nodal[m.tetra[t][v]];
                u_inf = std::max(u_inf, std::fabs(u[4 * t + v]));
            }
        std::vector<double> cu(sys.l);
        sys.c.multiply(u, cu);
        for (double v : cu) REQUIRE(std::fabs(v) <= 1e-12 * u_inf);
    }
    SUBCASE("the saddle block operator is exactly symmetric") {
        Triplets t;
        const CsrMatrix a = system_a_csr(sys);
        for (std::int64_t r = 0; r < a.n_rows; ++r)
            for (std::int64_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k)
                t.add(r, a.col[k], a.val[k]);
        for (std::int64_t r = 0; r < sys.c.n_rows; ++r)
            for (std::int64_t k = sys.c.row_ptr[r]; k < sys.c.row_ptr[r + 1]; ++k) {
                t.add(sys.n + r, sys.c.col[k], -sys.c.val[k]);
                t.add(sys.c.col[k], std::int32_t(sys.n + r), -sys.c.val[k]);
            }
        const CsrMatrix block = CsrMatrix::from_triplets(sys.n + sys.l, sys.n + sys.l, t);
        CHECK(block.symmetry_gap() == 0.0);
    }
}

TEST_CASE("A blocks are symmetric positive definite") {
    // unpivoted Cholesky succeeds iff the block is SPD
    auto spd = [](const Mat4& a) {
        Mat4 l{};
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j <= i; ++j) {
                double s = a[i][j];
                for (int k = 0; k < j; ++k) s -= l[i][k] * l[j][k];
                if (i == j) {
                    if (s <= 0.0) return false;
                    l[i][i] = std::sqrt(s);
                } else {
                    l[i][j] = s / l[j][j];
                }
            }
        return true;
    };
    Mesh m = initial_cube_mesh();
    for (int level = 0; level <= 2; ++level) {
        const FaceTable ft = build_face_table(m);
        const LinearSystem sys = assemble_system(m, ft, zero_problem().data);
        for (const Mat4& block : sys.a_blocks) REQUIRE(spd(block));
        if (level < 2) m = red_refine(m, num_edges(m)).first;
    }
}

TEST_CASE("level-2 system dimensions") {
    Mesh m = initial_cube_mesh();
    for (int i = 0; i < 2; ++i) m = red_refine(m, num_edges(m)).first;
    const FaceTable ft = build_face_table(m);
    const LinearSystem sys = assemble_system(m, ft, zero_problem().data);
    CHECK(sys.n == 2880);
    CHECK(sys.l == 1376);
}

TEST_CASE("load quadrature is exact for Cartesian polynomials up to degree two") {
    const Mesh m = red_refine(initial_cube_mesh(), num_edges(initial_cube_mesh())).first;
    auto f = [](const Vec3& p) {
        return 0.3 + 1.2 * p.x - 0.7 * p.y + 2.1 * p.z + 0.9 * p.x * p.y - 1.4 * p.y * p.z +
               0.5 * p.x * p.x + 0.8 * p.z * p.z;
    };
    const std::vector<double> b = load_vector(m, f, LoadRule::Gauss);
    // reference: validated degree-9 rule (exact for the degree-3 integrand)
    static const TetRule fine = tet_rule(9);
    double max_rel = 0.0;
    for (ElemId t = 0; t < m.num_elems(); ++t) {
        const Tet4& e = m.tetra[t];
        const double vol = elem_volume(m, t);
        for (int v = 0; v < 4; ++v) {
            double exact = 0.0;
            for (const auto& q : fine.points) {
                Vec3 x{};
                for (int w = 0; w < 4; ++w) x += m.coords[e[w]] * q.lambda[w];
                exact += vol * q.w * f(x) * q.lambda[v];
            }
            max_rel = std::max(max_rel, std::fabs(b[4 * t + v] - exact) / std::fabs(exact));
        }
    }
    CHECK(max_rel <= 1e-12);
}

TEST_CASE("coordinate dump is 1-based and row-major sorted") {
    const Mesh m = initial_cube_mesh();
    const FaceTable ft = build_face_table(m);
    const LinearSystem sys = assemble_system(m, ft, zero_problem().data);
    std::ostringstream os;
    dump_matrix_coo(os, sys.c);
    std::istringstream is(os.str());
    std::int64_t r, c, prev_r = 0, prev_c = 0;
    double v;
    std::size_t rows = 0;
    while (is >> r >> c >> v) {
        CHECK(r >= 1);
        CHECK(c >= 1);
        REQUIRE((r > prev_r || (r == prev_r && c > prev_c)));
        prev_r = r;
        prev_c = c;
        ++rows;
    }
    CHECK(rows == static_cast<std::size_t>(sys.c.nnz()));
}
