#pragma once

#include <span>
#include <vector>

#include "adsholo/linalg.hpp"

namespace adsholo::numerics {

struct Quadrature {
    Vec nodes;
    Vec weights;
};

/// n-point Gauss-Legendre rule on [a, b], nodes increasing.
Quadrature gauss_legendre(int n, double a, double b);

/// Finite-difference weights for the `order`-th derivative at x0 using the
/// given nodes (Fornberg's recursion; nodes need not be uniform).
Vec fornberg_weights(double x0, std::span<const double> nodes, int order);

/// Gegenbauer polynomials C_0^{(lambda)}(s) .. C_{count-1}^{(lambda)}(s).
Vec gegenbauer(int count, double lambda, double s);

/// log of the L2 norm squared of C_k^{(lambda)} for the weight (1 - s^2)^{lambda - 1/2}.
double gegenbauer_log_norm_sq(int k, double lambda);

/// log C_k^{(lambda)}(1)
double gegenbauer_log_at_one(int k, double lambda);

/// Smooth compactly supported profile exp(c (1 - 1/(1 - u^2))) on |u| < 1, zero outside.
/// c = 1 is the textbook mollifier. Its edge varies faster than a 512-point grid can
/// follow at radii below ~0.6; c = 4 (kResolvedSteepness) stays resolved down to ~0.3.
double bump(double u, double steepness = 1.0);

inline constexpr double kResolvedSteepness = 4.0;

/// Polynomial (Neville) extrapolation of samples (xs, ys) to x.
double neville(std::span<const double> xs, std::span<const double> ys, double x);

} // namespace adsholo::numerics
