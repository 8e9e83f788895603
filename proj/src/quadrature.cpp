#include "spdc/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <string>
#include <vector>

#include "spdc/errors.hpp"

namespace spdc::quadrature {
namespace {

// Kronrod abscissae (positive half) and weights; odd indices are the 7-point
// Gauss nodes. Values from QUADPACK qk15.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a;
    double b;
    double value;
    double error;
    bool operator<(const Segment& other) const { return error < other.error; }
};

Segment gauss_kronrod(const std::function<double(double)>& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = fc * kWgk[7];
    double gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const double pair = f(center - dx) + f(center + dx);
        kronrod += kWgk[j] * pair;
        if (j % 2 == 1) gauss += kWg[j / 2] * pair;
    }
    kronrod *= half;
    gauss *= half;
    return {a, b, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace

Result integrate(const std::function<double(double)>& f,
                 std::span<const double> breakpoints, double abs_tol,
                 int max_intervals) {
    if (breakpoints.size() < 2) throw ValidationError("quadrature needs at least two end points");
    if (!(abs_tol > 0.0)) throw ValidationError("quadrature tolerance must be positive");

    std::priority_queue<Segment> queue;
    double total = 0.0;
    double error = 0.0;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        const double a = breakpoints[i];
        const double b = breakpoints[i + 1];
        if (b < a) throw ValidationError("quadrature breakpoints must be sorted");
        if (b == a) continue;
        Segment s = gauss_kronrod(f, a, b);
        total += s.value;
        error += s.error;
        queue.push(s);
    }

    int intervals = static_cast<int>(queue.size());
    while (error > abs_tol) {
        if (intervals >= max_intervals || queue.empty()) {
            throw NumericalError("quadrature did not converge: achieved error " +
                                     std::to_string(error) + " > tolerance " +
                                     std::to_string(abs_tol),
                                 error);
        }
        const Segment worst = queue.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            throw NumericalError("quadrature interval underflow at x = " + std::to_string(mid), error);
        }
        queue.pop();
        const Segment left = gauss_kronrod(f, worst.a, mid);
        const Segment right = gauss_kronrod(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        queue.push(left);
        queue.push(right);
        ++intervals;
    }

    // The running sums accumulate cancellation noise; recompute from the leaves.
    total = 0.0;
    error = 0.0;
    while (!queue.empty()) {
        total += queue.top().value;
        error += queue.top().error;
        queue.pop();
    }
    return {total, error, intervals};
}

Result integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol, int max_intervals) {
    const std::array<double, 2> ends{a, b};
    return integrate(f, ends, abs_tol, max_intervals);
}

}  // namespace spdc::quadrature
