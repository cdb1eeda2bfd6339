#pragma once

#include <cstddef>
#include <functional>

namespace kklab {

/// Globally adaptive Gauss-Kronrod (15/31-point) quadrature of f on [a, b].
/// Bisects the interval with the largest error estimate until the summed
/// estimate drops below rel_tol * |result| (or the rounding floor), or
/// `max_intervals` is reached.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-14, std::size_t max_intervals = 4096);

}  // namespace kklab
