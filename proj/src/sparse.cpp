#include "sparse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "errors.hpp"

namespace phfem {

CsrMatrix CsrMatrix::from_triplets(std::int64_t rows, std::int64_t cols, const Triplets& t) {
    const std::size_t nnz_in = t.val.size();
    std::vector<std::int64_t> order(nnz_in);
    std::iota(order.begin(), order.end(), 0);
    // stable sort keeps insertion order within duplicates, so summation is
    // deterministic
    std::stable_sort(order.begin(), order.end(), [&](std::int64_t a, std::int64_t b) {
        return t.row[a] != t.row[b] ? t.row[a] < t.row[b] : t.col[a] < t.col[b];
    });
    CsrMatrix m;
    m.n_rows = rows;
    m.n_cols = cols;
    m.row_ptr.assign(rows + 1, 0);
    m.col.reserve(nnz_in);
    m.val.reserve(nnz_in);
    std::int64_t prev_row = -1;
    std::int32_t prev_col = -1;
    for (std::int64_t idx : order) {
        const std::int64_t r = t.row[idx];
        const std::int32_t c = t.col[idx];
        if (r == prev_row && c == prev_col) {
            m.val.back() += t.val[idx];
        } else {
            m.col.push_back(c);
            m.val.push_back(t.val[idx]);
            m.row_ptr[r + 1]++;
            prev_row = r;
            prev_col = c;
        }
    }
    for (std::int64_t r = 0; r < rows; ++r) m.row_ptr[r + 1] += m.row_ptr[r];
    return m;
}

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const {
    for (std::int64_t r = 0; r < n_rows; ++r) {
        double s = 0.0;
        for (std::int64_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) s += val[k] * x[col[k]];
        y[r] = s;
    }
}

void CsrMatrix::multiply_transpose(std::span<const double> x, std::span<double> y) const {
    std::fill(y.begin(), y.end(), 0.0);
    for (std::int64_t r = 0; r < n_rows; ++r)
        for (std::int64_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) y[col[k]] += val[k] * x[r];
}

std::vector<double> CsrMatrix::diagonal() const {
    std::vector<double> d(n_rows, 0.0);
    for (std::int64_t r = 0; r < n_rows; ++r)
        for (std::int64_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
            if (col[k] == r) d[r] += val[k];
    return d;
}

CsrMatrix CsrMatrix::transpose() const {
    CsrMatrix t;
    t.n_rows = n_cols;
    t.n_cols = n_rows;
    t.row_ptr.assign(n_cols + 1, 0);
    t.col.resize(col.size());
    t.val.resize(val.size());
    for (std::int32_t c : col) t.row_ptr[c + 1]++;
    for (std::int64_t r = 0; r < t.n_rows; ++r) t.row_ptr[r + 1] += t.row_ptr[r];
    std::vector<std::int64_t> next(t.row_ptr.begin(), t.row_ptr.end() - 1);
    for (std::int64_t r = 0; r < n_rows; ++r)
        for (std::int64_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
            const std::int64_t pos = next[col[k]]++;
            t.col[pos] = static_cast<std::int32_t>(r);
            t.val[pos] = val[k];
        }
    return t;
}

double CsrMatrix::max_abs() const {
    double m = 0.0;
    for (double v : val) m = std::max(m, std::fabs(v));
    return m;
}

double CsrMatrix::symmetry_gap() const {
    if (n_rows != n_cols) throw InvalidArgument("symmetry_gap requires a square matrix");
    const CsrMatrix t = transpose();
    double gap = 0.0;
    for (std::int64_t r = 0; r < n_rows; ++r) {
        std::int64_t ka = row_ptr[r], kb = t.row_ptr[r];
        const std::int64_t ea = row_ptr[r + 1], eb = t.row_ptr[r + 1];
        while (ka < ea || kb < eb) {
            const std::int32_t ca = ka < ea ? col[ka] : std::int32_t(n_cols);
            const std::int32_t cb = kb < eb ? t.col[kb] : std::int32_t(n_cols);
            if (ca == cb) {
                gap = std::max(gap, std::fabs(val[ka] - t.val[kb]));
                ++ka;
                ++kb;
            } else if (ca < cb) {
                gap = std::max(gap, std::fabs(val[ka]));
                ++ka;
            } else {
                gap = std::max(gap, std::fabs(t.val[kb]));
                ++kb;
            }
        }
    }
    return gap;
}

CsrMatrix spgemm(const CsrMatrix& a, const CsrMatrix& b) {
    if (a.n_cols != b.n_rows) throw InvalidArgument("spgemm: dimension mismatch");
    CsrMatrix c;
    c.n_rows = a.n_rows;
    c.n_cols = b.n_cols;
    c.row_ptr.assign(a.n_rows + 1, 0);
    std::vector<double> acc(b.n_cols, 0.0);
    std::vector<std::int32_t> marked;
    for (std::int64_t r = 0; r < a.n_rows; ++r) {
        marked.clear();
        for (std::int64_t ka = a.row_ptr[r]; ka < a.row_ptr[r + 1]; ++ka) {
            const std::int32_t mid = a.col[ka];
            const double av = a.val[ka];
            for (std::int64_t kb = b.row_ptr[mid]; kb < b.row_ptr[mid + 1]; ++kb) {
                const std::int32_t cc = b.col[kb];
                if (acc[cc] == 0.0 &&
                    std::find(marked.begin(), marked.end(), cc) == marked.end())
                    marked.push_back(cc);
                acc[cc] += av * b.val[kb];
            }
        }
        std::sort(marked.begin(), marked.end());
        for (std::int32_t cc : marked) {
            c.col.push_back(cc);
            c.val.push_back(acc[cc]);
            acc[cc] = 0.0;
        }
        c.row_ptr[r + 1] = static_cast<std::int64_t>(c.col.size());
    }
    return c;
}

void dump_matrix_coo(std::ostream& os, const CsrMatrix& a) {
    for (std::int64_t r = 0; r < a.n_rows; ++r)
        for (std::int64_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k)
            os << r + 1 << ' ' << a.col[k] + 1 << ' ' << a.val[k] << "\n";
}

double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

CgResult pcg_jacobi(const CsrMatrix& a, std::span<const double> b, std::span<double> x,
                    const CgOptions& opt) {
    const std::int64_t n = a.n_rows;
    std::fill(x.begin(), x.end(), 0.0);
    const double bnorm = norm2(b);
    if (bnorm == 0.0) return {0, 0.0, true};

    const std::int64_t max_iter = opt.max_iter > 0 ? opt.max_iter : 10 * n;
    const double stop = opt.abs_tol > 0.0 ? std::min(opt.tol * bnorm, opt.abs_tol)
                                          : opt.tol * bnorm;
    std::vector<double> d = a.diagonal();
    for (double& v : d) v = v != 0.0 ? 1.0 / v : 1.0;

    std::vector<double> r(b.begin(), b.end());
    std::vector<double> z(n), p(n), q(n);
    for (std::int64_t i = 0; i < n; ++i) z[i] = d[i] * r[i];
    p = z;
    double rz = 0.0;
    for (std::int64_t i = 0; i < n; ++i) rz += r[i] * z[i];

    CgResult res;
    res.rel_residual = 1.0;
    for (std::int64_t it = 1; it <= max_iter; ++it) {
        a.multiply(p, q);
        double pq = 0.0;
        for (std::int64_t i = 0; i < n; ++i) pq += p[i] * q[i];
        if (pq <= 0.0) throw SolverError("pcg: operator is not positive definite");
        const double alpha = rz / pq;
        for (std::int64_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        res.iterations = it;
        const double rnorm = norm2(r);
        res.rel_residual = rnorm / bnorm;
        if (rnorm <= stop) {
            res.converged = true;
            break;
        }
        double rz_new = 0.0;
        for (std::int64_t i = 0; i < n; ++i) {
            z[i] = d[i] * r[i];
            rz_new += r[i] * z[i];
        }
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::int64_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    return res;
}

} // namespace phfem
