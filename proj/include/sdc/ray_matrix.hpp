#pragma once

#include <cmath>
#include <initializer_list>
#include <span>
#include <string>

#include "sdc/error.hpp"

namespace sdc {

// Paraxial 2x2 ray-transfer matrix acting on (height mm, angle rad).
// b carries mm, c carries 1/mm.
struct RayMatrix
{
    double a = 1.0;
    double b = 0.0;
    double c = 0.0;
    double d = 1.0;

    static constexpr RayMatrix identity() { return {}; }

    constexpr double determinant() const { return a * d - b * c; }
    constexpr double trace() const { return a + d; }

    // Exact for unit-determinant matrices.
    constexpr RayMatrix inverse_unimodular() const { return {d, -b, -c, a}; }

    constexpr RayMatrix operator-() const { return {-a, -b, -c, -d}; }

    friend constexpr RayMatrix operator*(const RayMatrix& lhs, const RayMatrix& rhs)
    {
        return {lhs.a * rhs.a + lhs.b * rhs.c,
                lhs.a * rhs.b + lhs.b * rhs.d,
                lhs.c * rhs.a + lhs.d * rhs.c,
                lhs.c * rhs.b + lhs.d * rhs.d};
    }

    friend constexpr bool operator==(const RayMatrix&, const RayMatrix&) = default;
};

// Free-space drift of length d (mm). Negative lengths are accepted for algebra.
constexpr RayMatrix translation(double d)
{
    return {1.0, d, 0.0, 1.0};
}

inline RayMatrix thin_lens(double f)
{
    if (f == 0.0 || !std::isfinite(f)) {
        throw InvalidParameter("thin_lens: focal length must be finite and nonzero");
    }
    return {1.0, 0.0, -1.0 / f, 1.0};
}

constexpr RayMatrix plane_mirror()
{
    return RayMatrix::identity();
}

// Product of the elements in beam-propagation order: the first element is
// traversed first, so it ends up rightmost in the matrix product.
inline RayMatrix compose(std::span<const RayMatrix> beam_order)
{
    if (beam_order.empty()) {
        throw InvalidParameter("compose: empty element list");
    }
    RayMatrix total = beam_order.front();
    for (auto it = beam_order.begin() + 1; it != beam_order.end(); ++it) {
        total = *it * total;
    }
    return total;
}

inline RayMatrix compose(std::initializer_list<RayMatrix> beam_order)
{
    return compose(std::span<const RayMatrix>(beam_order.begin(), beam_order.size()));
}

// Lens-mirror retroreflector seen from the lens focal plane: drift f, lens f,
// drift d to the mirror and back, lens f, drift f. d == f is the plain
// cat's-eye and returns exactly -I.
inline RayMatrix retroreflector(double f, double d)
{
    const RayMatrix lens = thin_lens(f);
    if (d == f) {
        return -RayMatrix::identity();
    }
    return compose({translation(f), lens, translation(d), plane_mirror(), translation(d), lens,
                    translation(f)});
}

// Equivalent focal length f^2 / (d - f) of a focusing retroreflector.
inline double retroreflector_equivalent_focal(double f, double d)
{
    if (f == 0.0) {
        throw InvalidParameter("retroreflector_equivalent_focal: zero focal length");
    }
    if (d == f) {
        throw InvalidParameter("retroreflector_equivalent_focal: d == f has no finite equivalent lens");
    }
    return f * f / (d - f);
}

// Pupil-to-pupil matrix of the L3-L4 telescope: f3 ahead of L3 to f4 behind L4.
inline RayMatrix telescope(double f3, double f4, double dt)
{
    if (f3 == 0.0 || f4 == 0.0) {
        throw InvalidParameter("telescope: focal lengths must be nonzero");
    }
    return compose({translation(f3), thin_lens(f3), translation(dt), thin_lens(f4), translation(f4)});
}

inline double telescope_magnification(double f3, double f4)
{
    if (f3 == 0.0) {
        throw InvalidParameter("telescope_magnification: f3 must be nonzero");
    }
    return f4 / f3;
}

} // namespace sdc
