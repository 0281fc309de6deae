#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

#include "sdc/cavity.hpp"
#include "sdc/error.hpp"
#include "sdc/ray_matrix.hpp"

namespace sdc {

// Nd:YVO4 emission line, in mm.
inline constexpr double kDefaultWavelength = 1.064e-3;

// Complex Gaussian beam parameter q (mm) with its wavelength (mm).
struct BeamParam
{
    std::complex<double> q;
    double wavelength = kDefaultWavelength;

    std::complex<double> inverse() const { return 1.0 / q; }

    bool is_physical() const { return wavelength > 0.0 && inverse().imag() < 0.0; }

    // 1/e^2 intensity radius of the TEM00 mode.
    double radius() const
    {
        const double im = inverse().imag();
        if (!(im < 0.0)) {
            throw InvalidParameter("BeamParam::radius: Im(1/q) must be negative");
        }
        return std::sqrt(-wavelength / (std::numbers::pi * im));
    }

    // Wavefront curvature radius; infinite for a flat wavefront.
    double curvature_radius() const
    {
        const double re = inverse().real();
        return re == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / re;
    }
};

inline BeamParam abcd_transform(const BeamParam& in, const RayMatrix& m)
{
    const std::complex<double> den = m.c * in.q + m.d;
    if (den == 0.0) {
        throw SingularTransform("abcd_transform: C q + D vanishes");
    }
    return {(m.a * in.q + m.b) / den, in.wavelength};
}

struct ModeSolution
{
    BeamParam q0;        // at M1
    double g = 0.0;
    double w00_at_m1 = 0.0;
    RayMatrix round_trip;
};

// Relative tolerance on det(M) = 1 accepted by the mode solver.
inline constexpr double kDeterminantTolerance = 1e-8;

// Self-consistent TEM00 mode of a round-trip matrix, keeping the root with
// Im(1/q0) < 0.
inline ModeSolution self_consistent_mode(const RayMatrix& m, double wavelength = kDefaultWavelength)
{
    if (!(wavelength > 0.0)) {
        throw InvalidParameter("self_consistent_mode: wavelength must be positive");
    }
    const double scale = std::max({1.0, std::abs(m.a * m.d), std::abs(m.b * m.c)});
    if (!(std::abs(m.determinant() - 1.0) <= kDeterminantTolerance * scale)) {
        throw InvalidParameter("self_consistent_mode: round-trip determinant is not 1");
    }
    const double g = 0.5 * m.trace();
    if (!(std::abs(g) < 1.0)) {
        throw UnstableResonator("self_consistent_mode: |g| = " + std::to_string(std::abs(g)) + " >= 1");
    }
    if (m.b == 0.0) {
        throw DegenerateImaging("self_consistent_mode: B0 = 0, mode radius undefined");
    }
    const double disc = std::sqrt(4.0 - m.trace() * m.trace());
    const std::complex<double> inv_q(-(m.a - m.d) / (2.0 * m.b), -disc / (2.0 * std::abs(m.b)));

    ModeSolution mode;
    mode.q0 = {1.0 / inv_q, wavelength};
    mode.g = g;
    mode.w00_at_m1 = std::sqrt(2.0 * wavelength * std::abs(m.b) / (std::numbers::pi * disc));
    mode.round_trip = m;
    return mode;
}

inline ModeSolution self_consistent_mode(const CavityGeometry& geom, double wavelength = kDefaultWavelength)
{
    return self_consistent_mode(round_trip_matrix(geom), wavelength);
}

// Same radius written through g; kept separate so both forms can be checked.
inline double mode_radius_from_g(double wavelength, double b0, double g)
{
    return std::sqrt(wavelength * std::abs(b0) / (std::numbers::pi * std::sqrt(1.0 - g * g)));
}

inline double mode_radius_at(const SegmentLayout& layout, const ModeSolution& mode, double z)
{
    return abcd_transform(mode.q0, propagation_matrix_to(layout, z)).radius();
}

inline double mode_radius_at(const CavityGeometry& geom, const ModeSolution& mode, double z)
{
    return mode_radius_at(segment_layout(geom), mode, z);
}

// Multimode beam radius for a constant beam propagation factor M^2.
inline double multimode_radius(double w00, double m_squared)
{
    if (!(m_squared >= 1.0)) {
        throw InvalidParameter("multimode_radius: M^2 must be >= 1");
    }
    return std::sqrt(m_squared) * w00;
}

struct ProfilePoint
{
    double z = 0.0;
    double w = 0.0;
};

// Beam radius sampled uniformly over [0, total path]. Radii are scaled by
// sqrt(M^2); M^2 = 1 gives the TEM00 radius.
inline std::vector<ProfilePoint> beam_profile(const CavityGeometry& geom, double wavelength,
                                              std::size_t samples, double m_squared = 1.0)
{
    if (samples < 2) {
        throw InvalidParameter("beam_profile: need at least 2 samples");
    }
    const ModeSolution mode = self_consistent_mode(geom, wavelength);
    const SegmentLayout layout = segment_layout(geom);
    const double total = layout.total_length();
    std::vector<ProfilePoint> out;
    out.reserve(samples);
    for (std::size_t i = 0; i < samples; ++i) {
        const double z = i + 1 == samples ? total : total * static_cast<double>(i) / static_cast<double>(samples - 1);
        out.push_back({z, multimode_radius(mode_radius_at(layout, mode, z), m_squared)});
    }
    return out;
}

} // namespace sdc
