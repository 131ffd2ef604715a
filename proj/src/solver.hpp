#pragma once

#include <string>

#include "assembly.hpp"

namespace phfem {

struct SolverOptions {
    double tol = 1e-10;         // relative residual on the block system
    int workers = 1;
    std::int64_t max_iter = -1; // inner CG cap; defaults to 10 * L
};

struct SolverStats {
    std::string method;
    std::int64_t n = 0;
    std::int64_t l = 0;
    std::int64_t iterations = 0;
    double residual = 0.0;            // relative residual of the block system
    double constraint_residual = 0.0; // max |(C U - b_D)_r| / (1 + |b_D|_inf)
    double seconds = 0.0;
    int workers = 1;
    std::int64_t peak_dim = 0;        // largest linear system the method works on
};

struct Solution {
    std::vector<double> u;      // N primal coefficients, broken P1
    std::vector<double> lambda; // L multipliers, one per interior/Dirichlet face
    SolverStats stats;
};

/// Schur complement of the primal block, assembled element by element:
/// s_neg = C A^-1 C' (the negated Schur matrix, SPD) and
/// rhs_neg = b_D - C A^-1 B, so that s_neg * Lambda = rhs_neg.
struct SchurSystem {
    CsrMatrix s_neg;
    std::vector<double> rhs_neg;
    std::vector<Mat4Lu> a_factor; // per-element factorization, reused for recovery
};

SchurSystem build_schur(const LinearSystem& sys, int workers = 1);

/// Element-local Schur complement solve; `workers` parallelizes the local
/// block computations and the primal recovery with a deterministic merge, so
/// results are identical for any worker count.
Solution solve_schur_parallel(const LinearSystem& sys, int workers, const SolverOptions& opt = {});
Solution solve_schur(const LinearSystem& sys, const SolverOptions& opt = {});

/// Monolithic route: assembles global A, A^-1 and C, eliminates the primal
/// block with global sparse products and solves the reduced SPD system.
/// Algebraically solves the full (N+L) block system; serves as the
/// cross-check for the element-local Schur path.
Solution solve_direct(const LinearSystem& sys, const SolverOptions& opt = {});

/// Dispatch by solver name: "direct" | "schur" | "schur-parallel".
Solution solve(const LinearSystem& sys, const std::string& method, const SolverOptions& opt = {});

std::string stats_json(const SolverStats& stats);

} // namespace phfem
