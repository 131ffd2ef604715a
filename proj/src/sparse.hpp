#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace phfem {

/// Coordinate-format accumulator; duplicate entries are summed when the
/// triplets are compressed.
struct Triplets {
    std::vector<std::int64_t> row;
    std::vector<std::int32_t> col;
    std::vector<double> val;

    void add(std::int64_t r, std::int32_t c, double v) {
        row.push_back(r);
        col.push_back(c);
        val.push_back(v);
    }
    void reserve(std::size_t n) {
        row.reserve(n);
        col.reserve(n);
        val.reserve(n);
    }
};

struct CsrMatrix {
    std::int64_t n_rows = 0, n_cols = 0;
    std::vector<std::int64_t> row_ptr;
    std::vector<std::int32_t> col;
    std::vector<double> val;

    std::int64_t nnz() const { return static_cast<std::int64_t>(col.size()); }

    static CsrMatrix from_triplets(std::int64_t rows, std::int64_t cols, const Triplets& t);

    void multiply(std::span<const double> x, std::span<double> y) const;           // y = A x
    void multiply_transpose(std::span<const double> x, std::span<double> y) const; // y = A' x
    std::vector<double> diagonal() const;
    CsrMatrix transpose() const;

    double max_abs() const;
    /// max_ij |A_ij - A_ji|; requires a square matrix.
    double symmetry_gap() const;
};

/// C = A * B by row-wise accumulation; output columns sorted ascending.
CsrMatrix spgemm(const CsrMatrix& a, const CsrMatrix& b);

/// Row/col/value text dump, 1-based, sorted row-major.
void dump_matrix_coo(std::ostream& os, const CsrMatrix& a);

struct CgOptions {
    double tol = 1e-10;            // relative residual stop
    double abs_tol = 0.0;          // if > 0, also require |r|_2 <= abs_tol
    std::int64_t max_iter = -1;    // defaults to 10 * n
};

struct CgResult {
    std::int64_t iterations = 0;
    double rel_residual = 0.0;
    bool converged = false;
};

/// Conjugate gradients with diagonal preconditioning for SPD systems.
CgResult pcg_jacobi(const CsrMatrix& a, std::span<const double> b, std::span<double> x,
                    const CgOptions& opt = {});

double norm2(std::span<const double> v);

} // namespace phfem
