#include "adsholo/numerics.hpp"

#include <cmath>
#include <numbers>

#include "adsholo/errors.hpp"

namespace adsholo::numerics {

Quadrature gauss_legendre(int n, double a, double b) {
    if (n < 1) throw Error(ErrorCode::InvalidInput, "quadrature needs at least one node");
    Quadrature q{Vec(n), Vec(n)};
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (b + a);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1.0;
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // recompute derivative at the converged root
        double p0 = 1.0;
        double p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        if (n == 1) p0 = 1.0;
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const int idx = n - 1 - i;
        q.nodes(idx) = mid + half * x;
        q.weights(idx) = half * 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return q;
}

Vec fornberg_weights(double x0, std::span<const double> nodes, int order) {
    const int n = static_cast<int>(nodes.size());
    if (n <= order) throw Error(ErrorCode::InvalidInput, "stencil too small for derivative order");
    // c(j, k): weight of node j for derivative k
    Mat c = Mat::Zero(n, order + 1);
    double c1 = 1.0;
    double c4 = nodes[0] - x0;
    c(0, 0) = 1.0;
    for (int i = 1; i < n; ++i) {
        const int mn = std::min(i, order);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = nodes[i] - x0;
        for (int j = 0; j < i; ++j) {
            const double c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k) {
                    c(i, k) = c1 * (k * c(i - 1, k - 1) - c5 * c(i - 1, k)) / c2;
                }
                c(i, 0) = -c1 * c5 * c(i - 1, 0) / c2;
            }
            for (int k = mn; k >= 1; --k) {
                c(j, k) = (c4 * c(j, k) - k * c(j, k - 1)) / c3;
            }
            c(j, 0) = c4 * c(j, 0) / c3;
        }
        c1 = c2;
    }
    return c.col(order);
}

Vec gegenbauer(int count, double lambda, double s) {
    Vec c(std::max(count, 0));
    if (count <= 0) return c;
    c(0) = 1.0;
    if (count > 1) c(1) = 2.0 * lambda * s;
    for (int n = 2; n < count; ++n) {
        c(n) = (2.0 * s * (n + lambda - 1.0) * c(n - 1) - (n + 2.0 * lambda - 2.0) * c(n - 2)) / n;
    }
    return c;
}

double gegenbauer_log_norm_sq(int k, double lambda) {
    // pi 2^{1-2 lambda} Gamma(k + 2 lambda) / (k! (k + lambda) Gamma(lambda)^2)
    return std::log(std::numbers::pi) + (1.0 - 2.0 * lambda) * std::log(2.0) + std::lgamma(k + 2.0 * lambda) -
           std::lgamma(k + 1.0) - std::log(k + lambda) - 2.0 * std::lgamma(lambda);
}

double gegenbauer_log_at_one(int k, double lambda) {
    return std::lgamma(k + 2.0 * lambda) - std::lgamma(k + 1.0) - std::lgamma(2.0 * lambda);
}

double bump(double u, double steepness) {
    const double a = 1.0 - u * u;
    if (a <= 0.0) return 0.0;
    return std::exp(steepness * (1.0 - 1.0 / a));
}

double neville(std::span<const double> xs, std::span<const double> ys, double x) {
    const std::size_t n = xs.size();
    if (n == 0 || ys.size() != n) throw Error(ErrorCode::InputShape, "neville: mismatched samples");
    std::vector<double> p(ys.begin(), ys.end());
    for (std::size_t level = 1; level < n; ++level) {
        for (std::size_t i = 0; i + level < n; ++i) {
            p[i] = ((x - xs[i + level]) * p[i] + (xs[i] - x) * p[i + 1]) / (xs[i] - xs[i + level]);
        }
    }
    return p[0];
}

} // namespace adsholo::numerics
