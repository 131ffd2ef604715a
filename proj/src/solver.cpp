#include "solver.hpp"

#include <chrono>
#include <cmath>
#include <sstream>
#include <thread>

namespace phfem {

namespace {

// Runs fn(t) for t in [0, count) over `workers` threads on contiguous chunks.
void parallel_for(std::int64_t count, int workers, const std::function<void(std::int64_t)>& fn) {
    if (workers <= 1 || count < 2 * workers) {
        for (std::int64_t t = 0; t < count; ++t) fn(t);
        return;
    }
    std::vector<std::thread> pool;
    const std::int64_t chunk = (count + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const std::int64_t begin = w * chunk;
        const std::int64_t end = std::min(count, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([begin, end, &fn] {
            for (std::int64_t t = begin; t < end; ++t) fn(t);
        });
    }
    for (auto& th : pool) th.join();
}

// Local C(T) column vectors: c_r[p] = coef_r for p on local face r, zero on
// Neumann faces (their multiplier rows do not exist).
std::array<std::array<double, 4>, 4> local_c_rows(const LinearSystem& sys, std::int64_t t) {
    std::array<std::array<double, 4>, 4> c{};
    for (int r = 0; r < 4; ++r) {
        if (sys.slot_mrow[t][r] < 0) continue;
        for (int v : kFaceVerts[r]) c[r][v] = sys.slot_coef[t][r];
    }
    return c;
}

// Relative residual of the full block system and the constraint residual;
// fills the corresponding stats fields and enforces the solve tolerance.
void verify_solution(const LinearSystem& sys, Solution& sol, double tol) {
    std::vector<double> r1(sys.n, 0.0);
    for (std::size_t t = 0; t < sys.a_blocks.size(); ++t)
        for (int i = 0; i < 4; ++i) {
            double s = 0.0;
            for (int j = 0; j < 4; ++j) s += sys.a_blocks[t][i][j] * sol.u[4 * t + j];
            r1[4 * t + i] = s - sys.rhs[4 * t + i];
        }
    std::vector<double> ctl(sys.n, 0.0);
    sys.c.multiply_transpose(sol.lambda, ctl);
    for (std::int64_t i = 0; i < sys.n; ++i) r1[i] -= ctl[i];

    std::vector<double> r2(sys.l, 0.0);
    sys.c.multiply(sol.u, r2);
    double bd_inf = 0.0, r2_inf = 0.0;
    for (std::int64_t i = 0; i < sys.l; ++i) {
        bd_inf = std::max(bd_inf, std::fabs(sys.dirichlet_rhs[i]));
        r2[i] -= sys.dirichlet_rhs[i];
        r2_inf = std::max(r2_inf, std::fabs(r2[i]));
    }
    const double rhs_norm = std::hypot(norm2(sys.rhs), norm2(sys.dirichlet_rhs));
    const double res_norm = std::hypot(norm2(r1), norm2(r2));
    sol.stats.residual = rhs_norm > 0.0 ? res_norm / rhs_norm : res_norm;
    sol.stats.constraint_residual = r2_inf / (1.0 + bd_inf);
    const bool ok = sol.stats.residual <= tol && norm2(r1) <= tol * std::max(norm2(sys.rhs), 1e-300)
                    && norm2(r2) <= tol * (1.0 + norm2(sys.dirichlet_rhs));
    if (!ok) {
        std::ostringstream os;
        os << "solver '" << sol.stats.method << "' missed the residual target: "
           << sol.stats.residual << " > " << tol;
        throw SolverError(os.str());
    }
}

CgOptions inner_cg_options(const LinearSystem& sys, const SolverOptions& opt) {
    CgOptions cg;
    cg.tol = opt.tol; // relative stop on the reduced system
    // The constraint residual of the block system equals the inner residual,
    // so also require an absolute level below the block tolerance.
    cg.abs_tol = 0.2 * opt.tol * std::hypot(norm2(sys.rhs), norm2(sys.dirichlet_rhs));
    cg.max_iter = opt.max_iter > 0 ? opt.max_iter : 10 * std::max<std::int64_t>(sys.l, 1);
    return cg;
}

} // namespace

SchurSystem build_schur(const LinearSystem& sys, int workers) {
    const std::int64_t ne = static_cast<std::int64_t>(sys.a_blocks.size());
    SchurSystem schur;
    schur.a_factor.resize(ne);

    // Per-element 4x4 Schur blocks into preallocated slots; the global
    // scatter below runs in element order, so the result does not depend on
    // the worker count.
    std::vector<std::array<double, 16>> s_loc(ne);
    std::vector<std::array<double, 4>> r_loc(ne);
    std::atomic<std::int64_t> first_singular{-1};
    parallel_for(ne, workers, [&](std::int64_t t) {
        const Mat4Lu lu = Mat4Lu::factor(sys.a_blocks[t]);
        if (lu.singular) {
            s_loc[t].fill(0.0);
            r_loc[t].fill(0.0);
            std::int64_t expected = -1;
            first_singular.compare_exchange_strong(expected, t);
            return;
        }
        schur.a_factor[t] = lu;
        const auto c = local_c_rows(sys, t);
        std::array<std::array<double, 4>, 4> ainv_c;
        for (int r = 0; r < 4; ++r) ainv_c[r] = lu.solve(c[r]);
        const std::array<double, 4> b = {sys.rhs[4 * t + 0], sys.rhs[4 * t + 1],
                                         sys.rhs[4 * t + 2], sys.rhs[4 * t + 3]};
        const std::array<double, 4> ainv_b = lu.solve(b);
        for (int r = 0; r < 4; ++r) {
            double rb = 0.0;
            for (int p = 0; p < 4; ++p) rb += c[r][p] * ainv_b[p];
            r_loc[t][r] = rb;
            for (int q = 0; q < 4; ++q) {
                double s = 0.0;
                for (int p = 0; p < 4; ++p) s += c[r][p] * ainv_c[q][p];
                s_loc[t][4 * r + q] = s;
            }
        }
    });
    if (first_singular >= 0)
        throw MeshError("degenerate element block " + std::to_string(first_singular + 1));

    Triplets st;
    st.reserve(ne * 16);
    schur.rhs_neg = sys.dirichlet_rhs; // b_D - C A^-1 B
    for (std::int64_t t = 0; t < ne; ++t)
        for (int r = 0; r < 4; ++r) {
            const std::int32_t row = sys.slot_mrow[t][r];
            if (row < 0) continue;
            schur.rhs_neg[row] -= r_loc[t][r];
            for (int q = 0; q < 4; ++q) {
                const std::int32_t colq = sys.slot_mrow[t][q];
                if (colq < 0) continue;
                st.add(row, colq, s_loc[t][4 * r + q]);
            }
        }
    schur.s_neg = CsrMatrix::from_triplets(sys.l, sys.l, st);
    return schur;
}

Solution solve_schur_parallel(const LinearSystem& sys, int workers, const SolverOptions& opt) {
    if (workers < 1) throw InvalidArgument("workers must be >= 1");
    const auto t0 = std::chrono::steady_clock::now();
    Solution sol;
    sol.stats.method = workers > 1 ? "schur-parallel" : "schur";
    sol.stats.n = sys.n;
    sol.stats.l = sys.l;
    sol.stats.workers = workers;
    sol.stats.peak_dim = sys.l;

    const SchurSystem schur = build_schur(sys, workers);
    sol.lambda.assign(sys.l, 0.0);
    const CgResult cg = pcg_jacobi(schur.s_neg, schur.rhs_neg, sol.lambda, inner_cg_options(sys, opt));
    sol.stats.iterations = cg.iterations;
    if (!cg.converged)
        throw SolverError("schur: conjugate gradients stalled at relative residual " +
                          std::to_string(cg.rel_residual) + " after " +
                          std::to_string(cg.iterations) + " iterations");

    // Element-local recovery U(T) = A(T)^-1 (B(T) + C(T)' Lambda(T)).
    const std::int64_t ne = static_cast<std::int64_t>(sys.a_blocks.size());
    sol.u.assign(sys.n, 0.0);
    parallel_for(ne, workers, [&](std::int64_t t) {
        std::array<double, 4> rhs = {sys.rhs[4 * t + 0], sys.rhs[4 * t + 1], sys.rhs[4 * t + 2],
                                     sys.rhs[4 * t + 3]};
        for (int r = 0; r < 4; ++r) {
            const std::int32_t row = sys.slot_mrow[t][r];
            if (row < 0) continue;
            for (int v : kFaceVerts[r]) rhs[v] += sys.slot_coef[t][r] * sol.lambda[row];
        }
        const auto x = schur.a_factor[t].solve(rhs);
        for (int v = 0; v < 4; ++v) sol.u[4 * t + v] = x[v];
    });

    verify_solution(sys, sol, opt.tol);
    sol.stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return sol;
}

Solution solve_schur(const LinearSystem& sys, const SolverOptions& opt) {
    return solve_schur_parallel(sys, 1, opt);
}

Solution solve_direct(const LinearSystem& sys, const SolverOptions& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    Solution sol;
    sol.stats.method = "direct";
    sol.stats.n = sys.n;
    sol.stats.l = sys.l;
    sol.stats.workers = 1;
    sol.stats.peak_dim = sys.n + sys.l;

    // Global exact elimination of the block-diagonal primal block.
    Triplets it;
    it.reserve(sys.a_blocks.size() * 16);
    for (std::size_t e = 0; e < sys.a_blocks.size(); ++e) {
        const Mat4Lu lu = Mat4Lu::factor(sys.a_blocks[e]);
        if (lu.singular)
            throw MeshError("degenerate element block " + std::to_string(e + 1));
        const Mat4 inv = lu.inverse();
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                it.add(std::int64_t(4 * e + i), std::int32_t(4 * e + j), inv[i][j]);
    }
    const CsrMatrix ainv = CsrMatrix::from_triplets(sys.n, sys.n, it);
    const CsrMatrix ct = sys.c.transpose();
    const CsrMatrix w = spgemm(ainv, ct);
    const CsrMatrix s_neg = spgemm(sys.c, w); // C A^-1 C', SPD

    std::vector<double> ainv_b(sys.n);
    ainv.multiply(sys.rhs, ainv_b);
    std::vector<double> rhs_neg(sys.l);
    sys.c.multiply(ainv_b, rhs_neg);
    for (std::int64_t i = 0; i < sys.l; ++i) rhs_neg[i] = sys.dirichlet_rhs[i] - rhs_neg[i];

    sol.lambda.assign(sys.l, 0.0);
    const CgResult cg = pcg_jacobi(s_neg, rhs_neg, sol.lambda, inner_cg_options(sys, opt));
    sol.stats.iterations = cg.iterations;
    if (!cg.converged)
        throw SolverError("direct: inner solve stalled at relative residual " +
                          std::to_string(cg.rel_residual));

    std::vector<double> tmp(sys.n);
    ct.multiply(sol.lambda, tmp);
    for (std::int64_t i = 0; i < sys.n; ++i) tmp[i] += sys.rhs[i];
    sol.u.assign(sys.n, 0.0);
    for (std::size_t e = 0; e < sys.a_blocks.size(); ++e) {
        const Mat4Lu lu = Mat4Lu::factor(sys.a_blocks[e]);
        const auto x = lu.solve({tmp[4 * e], tmp[4 * e + 1], tmp[4 * e + 2], tmp[4 * e + 3]});
        for (int v = 0; v < 4; ++v) sol.u[4 * e + v] = x[v];
    }

    verify_solution(sys, sol, opt.tol);
    sol.stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return sol;
}

Solution solve(const LinearSystem& sys, const std::string& method, const SolverOptions& opt) {
    if (method == "direct") return solve_direct(sys, opt);
    if (method == "schur") return solve_schur_parallel(sys, 1, opt);
    if (method == "schur-parallel") return solve_schur_parallel(sys, std::max(opt.workers, 1), opt);
    throw InvalidArgument("unknown solver '" + method + "' (expected direct|schur|schur-parallel)");
}

std::string stats_json(const SolverStats& s) {
    std::ostringstream os;
    os.precision(17);
    os << "{\"solver\":\"" << s.method << "\",\"n\":" << s.n << ",\"l\":" << s.l
       << ",\"iterations\":" << s.iterations << ",\"residual\":" << s.residual
       << ",\"constraint_residual\":" << s.constraint_residual << ",\"seconds\":" << s.seconds
       << ",\"workers\":" << s.workers << ",\"peak_dim\":" << s.peak_dim << "}";
    return os.str();
}

} // namespace phfem
