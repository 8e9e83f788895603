#pragma once

#include <functional>
#include <span>

namespace spdc::quadrature {

struct Result {
    double value = 0.0;
    double abs_error = 0.0;
    int intervals = 0;
};

// Globally adaptive 15-point Gauss-Kronrod integration.
//
// `breakpoints` must be sorted and contain at least the two end points; every
// sub-interval between consecutive breakpoints is integrated separately so that
// kinks and narrow peaks of the integrand can be placed on interval borders.
// The interval with the largest error estimate is bisected until the summed
// error estimate drops below `abs_tol`. Throws NumericalError carrying the
// achieved error if `max_intervals` is exhausted first.
Result integrate(const std::function<double(double)>& f,
                 std::span<const double> breakpoints, double abs_tol,
                 int max_intervals = 20000);

Result integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol, int max_intervals = 20000);

}  // namespace spdc::quadrature
