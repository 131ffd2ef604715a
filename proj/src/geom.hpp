#pragma once

#include <array>
#include <cmath>

namespace phfem {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3() = default;
    Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    bool operator==(const Vec3& o) const { return x == o.x && y == o.y && z == o.z; }
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

using Mat4 = std::array<std::array<double, 4>, 4>;

inline Mat4 mat4_zero() { return Mat4{}; }

inline Mat4 mat4_add(const Mat4& a, const Mat4& b) {
    Mat4 r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r[i][j] = a[i][j] + b[i][j];
    return r;
}

// LU factorization with partial pivoting of a 4x4 matrix. The factored form
// is reused for the many per-element solves of the Schur path.
struct Mat4Lu {
    Mat4 lu{};
    std::array<int, 4> perm{};
    bool singular = false;

    static Mat4Lu factor(const Mat4& a) {
        Mat4Lu f;
        f.lu = a;
        for (int i = 0; i < 4; ++i) f.perm[i] = i;
        for (int col = 0; col < 4; ++col) {
            int piv = col;
            double best = std::fabs(f.lu[col][col]);
            for (int r = col + 1; r < 4; ++r) {
                double v = std::fabs(f.lu[r][col]);
                if (v > best) { best = v; piv = r; }
            }
            if (best == 0.0) { f.singular = true; return f; }
            if (piv != col) {
                std::swap(f.lu[piv], f.lu[col]);
                std::swap(f.perm[piv], f.perm[col]);
            }
            for (int r = col + 1; r < 4; ++r) {
                double m = f.lu[r][col] / f.lu[col][col];
                f.lu[r][col] = m;
                for (int c = col + 1; c < 4; ++c) f.lu[r][c] -= m * f.lu[col][c];
            }
        }
        return f;
    }

    std::array<double, 4> solve(const std::array<double, 4>& b) const {
        std::array<double, 4> y{};
        for (int i = 0; i < 4; ++i) {
            double s = b[perm[i]];
            for (int j = 0; j < i; ++j) s -= lu[i][j] * y[j];
            y[i] = s;
        }
        std::array<double, 4> x{};
        for (int i = 3; i >= 0; --i) {
            double s = y[i];
            for (int j = i + 1; j < 4; ++j) s -= lu[i][j] * x[j];
            x[i] = s / lu[i][i];
        }
        return x;
    }

    Mat4 inverse() const {
        Mat4 inv{};
        for (int c = 0; c < 4; ++c) {
            std::array<double, 4> e{};
            e[c] = 1.0;
            auto col = solve(e);
            for (int r = 0; r < 4; ++r) inv[r][c] = col[r];
        }
        return inv;
    }
};

} // namespace phfem
