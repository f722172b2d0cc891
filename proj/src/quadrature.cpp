#include "feop/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace feop {

void gauss_legendre_01(int n, std::vector<double>& points, std::vector<double>& weights) {
    if (n < 1) throw std::invalid_argument("gauss_legendre_01: n >= 1 required");
    points.assign(n, 0.0);
    weights.assign(n, 0.0);
    // Newton iteration on the Legendre polynomial from the Chebyshev guess.
    for (int k = 0; k < n; ++k) {
        double x = std::cos(std::numbers::pi * (k + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= n; ++j) {
                const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        // One clean evaluation of P_n' at the converged root for the weight.
        double p0 = 1.0, p1 = x;
        for (int j = 2; j <= n; ++j) {
            const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        // Map [-1,1] -> [0,1].
        points[n - 1 - k] = 0.5 * (x + 1.0);
        weights[n - 1 - k] = 0.5 * w;
    }
}

namespace {

QuadratureRule triangle_rule(int degree) {
    QuadratureRule r;
    r.dim = 2;
    if (degree <= 1) {
        r.degree = 1;
        r.points = {{1.0 / 3.0, 1.0 / 3.0}};
        r.weights = {0.5};
    } else if (degree == 2) {
        // Edge-midpoint rule.
        r.degree = 2;
        r.points = {{0.5, 0.0}, {0.0, 0.5}, {0.5, 0.5}};
        r.weights = {1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0};
    } else if (degree == 3) {
        r.degree = 3;
        r.points = {{1.0 / 3.0, 1.0 / 3.0}, {0.2, 0.2}, {0.6, 0.2}, {0.2, 0.6}};
        r.weights = {-27.0 / 96.0, 25.0 / 96.0, 25.0 / 96.0, 25.0 / 96.0};
    } else if (degree <= 5) {
        // Seven-point degree-5 rule.
        r.degree = 5;
        const double s15 = std::sqrt(15.0);
        const double a1 = (6.0 - s15) / 21.0;
        const double a2 = (6.0 + s15) / 21.0;
        const double w0 = 9.0 / 80.0;
        const double w1 = (155.0 - s15) / 2400.0;
        const double w2 = (155.0 + s15) / 2400.0;
        r.points = {{1.0 / 3.0, 1.0 / 3.0},
                    {a1, a1}, {1.0 - 2.0 * a1, a1}, {a1, 1.0 - 2.0 * a1},
                    {a2, a2}, {1.0 - 2.0 * a2, a2}, {a2, 1.0 - 2.0 * a2}};
        r.weights = {w0, w1, w1, w1, w2, w2, w2};
    } else {
        throw std::invalid_argument("quadrature_rule: triangle degree > 5 unsupported");
    }
    return r;
}

}  // namespace

QuadratureRule quadrature_rule(int dim, int degree) {
    if (degree < 0) throw std::invalid_argument("quadrature_rule: negative degree");
    if (dim == 1) {
        if (degree > 9) throw std::invalid_argument("quadrature_rule: 1D degree > 9 unsupported");
        const int n = degree / 2 + 1;
        std::vector<double> pts, wts;
        gauss_legendre_01(n, pts, wts);
        QuadratureRule r;
        r.dim = 1;
        r.degree = 2 * n - 1;
        for (int i = 0; i < n; ++i) {
            r.points.push_back({pts[i], 0.0});
            r.weights.push_back(wts[i]);
        }
        return r;
    }
    if (dim == 2) return triangle_rule(degree);
    throw std::invalid_argument("quadrature_rule: dim must be 1 or 2");
}

}  // namespace feop
