#pragma once

#include <functional>
#include <span>

namespace darkbeam::quad {

struct Result
{
    double value = 0.0;
    double error = 0.0;
};

/**
 * Adaptive Gauss-Kronrod (61-point) integration of f over [a, b] to the
 * requested relative tolerance. Interior breakpoints (kinks of the
 * integrand) split the range so each panel is smooth; points outside
 * (a, b) are ignored. a > b integrates with the usual sign flip.
 */
Result integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol, std::span<const double> breakpoints = {});

} // namespace darkbeam::quad
