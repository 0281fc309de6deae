#pragma once

#include <cmath>
#include <cstddef>

namespace sdc::detail {

// Bisection for a sign change of f on [lo, hi]. Returns the midpoint of the
// final bracket. Stops when the bracket is narrower than tol or can no longer
// be split in double precision.
template <class F>
double bisect(F&& f, double lo, double hi, double tol = 0.0, std::size_t max_iter = 200)
{
    double f_lo = f(lo);
    for (std::size_t i = 0; i < max_iter; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi || (hi - lo) <= tol) {
            break;
        }
        const double f_mid = f(mid);
        if (f_mid == 0.0) {
            return mid;
        }
        if ((f_mid < 0.0) == (f_lo < 0.0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Narrows [inside, outside] onto the boundary of a predicate. inside must
// satisfy pred, outside must not; the two may be in either order.
template <class Pred>
double bisect_boundary(Pred&& pred, double inside, double outside, std::size_t max_iter = 200)
{
    for (std::size_t i = 0; i < max_iter; ++i) {
        const double mid = 0.5 * (inside + outside);
        if (mid == inside || mid == outside) {
            break;
        }
        if (pred(mid)) {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    return 0.5 * (inside + outside);
}

} // namespace sdc::detail
