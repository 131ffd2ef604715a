#pragma once

#include <array>
#include <vector>

namespace phfem {

/// Gauss-Legendre rule on [0,1]; exact for polynomials of degree <= 2n-1.
struct QuadRule1d {
    std::vector<double> x;
    std::vector<double> w;
};

QuadRule1d gauss_legendre(int n);

/// Quadrature on the reference tetrahedron, stored in barycentric form with
/// weights normalized to sum to one: integral over a physical element T is
/// volume(T) * sum_q w_q f(x_q) with x_q = sum_i lambda_i p_i.
struct TetRule {
    struct Point {
        std::array<double, 4> lambda;
        double w;
    };
    std::vector<Point> points;
    int exact_degree = 0;
};

/// Conical-product (collapsed coordinate) rule built from Gauss-Legendre
/// points; all weights positive.  Exact for total degree <= `degree`.
TetRule tet_rule(int degree);

/// Edge-midpoint rule on a triangle: three points, weights 1/3 (times area);
/// exact for polynomials of degree <= 2.
struct TriRule {
    struct Point {
        std::array<double, 3> lambda;
        double w;
    };
    std::array<Point, 3> points;
};

TriRule tri_midpoint_rule();

} // namespace phfem
