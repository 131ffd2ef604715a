#include "quadrature.hpp"

#include <cmath>

#include "errors.hpp"

namespace phfem {

QuadRule1d gauss_legendre(int n) {
    if (n < 1) throw InvalidArgument("gauss_legendre: n must be positive");
    QuadRule1d rule;
    rule.x.resize(n);
    rule.w.resize(n);
    // Newton iteration on P_n over [-1,1], then shift to [0,1].
    for (int i = 0; i < n; ++i) {
        double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = t;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (t * p1 - p0) / (t * t - 1.0);
            const double dt = p1 / dp;
            t -= dt;
            if (std::fabs(dt) < 1e-15) break;
        }
        rule.x[n - 1 - i] = 0.5 * (1.0 + t);
        rule.w[n - 1 - i] = 1.0 / ((1.0 - t * t) * dp * dp);
    }
    return rule;
}

TetRule tet_rule(int degree) {
    if (degree < 1) throw InvalidArgument("tet_rule: degree must be positive");
    // A monomial of total degree d becomes, under the collapsed map
    // x=u, y=v(1-u), z=w(1-u)(1-v) with Jacobian (1-u)^2(1-v), a separable
    // polynomial of 1D degree at most d+2, so n points give exactness for
    // total degree 2n-3.
    const int n = (degree + 3 + 1) / 2;
    const QuadRule1d g = gauss_legendre(n);
    TetRule rule;
    rule.exact_degree = 2 * n - 3;
    rule.points.reserve(static_cast<std::size_t>(n) * n * n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c) {
                const double u = g.x[a], v = g.x[b], w = g.x[c];
                const double x = u;
                const double y = v * (1.0 - u);
                const double z = w * (1.0 - u) * (1.0 - v);
                const double jac = (1.0 - u) * (1.0 - u) * (1.0 - v);
                TetRule::Point p;
                p.lambda = {1.0 - x - y - z, x, y, z};
                // reference volume is 1/6; normalize so weights sum to 1
                p.w = 6.0 * g.w[a] * g.w[b] * g.w[c] * jac;
                rule.points.push_back(p);
            }
    return rule;
}

TriRule tri_midpoint_rule() {
    TriRule r;
    r.points[0] = {{0.5, 0.5, 0.0}, 1.0 / 3.0};
    r.points[1] = {{0.0, 0.5, 0.5}, 1.0 / 3.0};
    r.points[2] = {{0.5, 0.0, 0.5}, 1.0 / 3.0};
    return r;
}

} // namespace phfem
