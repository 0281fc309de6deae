#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sdc/error.hpp"
#include "sdc/ray_matrix.hpp"

namespace sdc {

// Adjustable cavity parameters: five distances followed by four focal lengths.
enum class Param { d1, d2, dg, dt, dw, f1, f2, f3, f4 };

inline constexpr std::array<Param, 5> kDistanceParams = {Param::d1, Param::d2, Param::dg, Param::dt,
                                                         Param::dw};
inline constexpr std::array<Param, 4> kFocalParams = {Param::f1, Param::f2, Param::f3, Param::f4};
inline constexpr std::array<Param, 9> kAllParams = {Param::d1, Param::d2, Param::dg, Param::dt, Param::dw,
                                                    Param::f1, Param::f2, Param::f3, Param::f4};

constexpr std::string_view to_string(Param p)
{
    switch (p) {
    case Param::d1: return "d1";
    case Param::d2: return "d2";
    case Param::dg: return "dg";
    case Param::dt: return "dt";
    case Param::dw: return "dw";
    case Param::f1: return "f1";
    case Param::f2: return "f2";
    case Param::f3: return "f3";
    case Param::f4: return "f4";
    }
    return "?";
}

inline std::optional<Param> parse_param(std::string_view name)
{
    for (Param p : kAllParams) {
        if (to_string(p) == name) {
            return p;
        }
    }
    return std::nullopt;
}

constexpr bool is_distance(Param p)
{
    return static_cast<int>(p) < static_cast<int>(Param::f1);
}

// Telescope-based spatially distributed cavity. All lengths in mm.
//
//   M1 --d1-- L1 --dg-- L3 --dt-- L4 --(f4 + dw + f2)-- L2 --d2-- M2
//
// The gain medium sits in the shared pupil of L1 and L3. dw is measured
// between the transmitter pupil (f4 behind L4) and the receiver pupil
// (f2 in front of L2). Defaults are the reference design.
struct CavityGeometry
{
    double d1 = 30.0;
    double d2 = 30.0;
    double dg = 55.0;
    double dt = 85.4;
    double dw = 6000.0;
    double f1 = 30.0;
    double f2 = 30.0;
    double f3 = 25.0;
    double f4 = 60.0;

    // dg expressed as f1 + f3 + delta_dg.
    static CavityGeometry with_deviation(CavityGeometry base, double delta_dg)
    {
        base.dg = base.f1 + base.f3 + delta_dg;
        return base;
    }

    double delta_dg() const { return dg - (f1 + f3); }

    // Free-space run from L4 to L2.
    double link_length() const { return f4 + dw + f2; }

    double total_path() const { return d1 + dg + dt + link_length() + d2; }

    double magnification() const { return f4 / f3; }

    double& operator[](Param p)
    {
        switch (p) {
        case Param::d1: return d1;
        case Param::d2: return d2;
        case Param::dg: return dg;
        case Param::dt: return dt;
        case Param::dw: return dw;
        case Param::f1: return f1;
        case Param::f2: return f2;
        case Param::f3: return f3;
        case Param::f4: return f4;
        }
        throw InvalidParameter("unknown parameter");
    }

    double operator[](Param p) const { return const_cast<CavityGeometry&>(*this)[p]; }

    CavityGeometry with(Param p, double value) const
    {
        CavityGeometry copy = *this;
        copy[p] = value;
        return copy;
    }

    // Scales every focal length and the element spacings by s; dw is kept.
    CavityGeometry scaled(double s) const
    {
        CavityGeometry copy = *this;
        for (Param p : kAllParams) {
            if (p != Param::dw) {
                copy[p] *= s;
            }
        }
        return copy;
    }

    void validate() const
    {
        for (Param p : kFocalParams) {
            const double f = (*this)[p];
            if (f == 0.0 || !std::isfinite(f)) {
                throw InvalidParameter(std::string("focal length ") + std::string(to_string(p)) +
                                       " must be finite and nonzero");
            }
        }
        for (Param p : kDistanceParams) {
            const double v = (*this)[p];
            if (!(v >= 0.0) || !std::isfinite(v)) {
                throw InvalidParameter(std::string("distance ") + std::string(to_string(p)) +
                                       " must be finite and non-negative");
            }
        }
    }

    friend bool operator==(const CavityGeometry&, const CavityGeometry&) = default;
};

namespace detail {

// Round trip without validation; used on perturbed geometries inside the
// Monte Carlo loop where negative spacings are legitimate algebra.
inline RayMatrix round_trip_unchecked(const CavityGeometry& g)
{
    const RayMatrix l1{1.0, 0.0, -1.0 / g.f1, 1.0};
    const RayMatrix l2{1.0, 0.0, -1.0 / g.f2, 1.0};
    const RayMatrix l3{1.0, 0.0, -1.0 / g.f3, 1.0};
    const RayMatrix l4{1.0, 0.0, -1.0 / g.f4, 1.0};
    const double link = g.link_length();
    return compose({plane_mirror(), translation(g.d1), l1, translation(g.dg), l3, translation(g.dt), l4,
                    translation(link), l2, translation(g.d2), plane_mirror(), translation(g.d2), l2,
                    translation(link), l4, translation(g.dt), l3, translation(g.dg), l1, translation(g.d1)});
}

inline double g_unchecked(const CavityGeometry& g)
{
    return 0.5 * round_trip_unchecked(g).trace();
}

} // namespace detail

// Round trip starting and ending at M1, in beam order: reflect at M1, out to
// M2, reflect, back to M1.
inline RayMatrix round_trip_matrix(const CavityGeometry& geom)
{
    geom.validate();
    return detail::round_trip_unchecked(geom);
}

struct Segment
{
    double length = 0.0;
    std::optional<double> lens_focal; // lens closing the segment; empty at M2
};

struct SegmentLayout
{
    std::vector<Segment> segments;
    std::vector<double> starts; // z_k: cumulative distance from M1 to the start of segment k

    double total_length() const
    {
        return segments.empty() ? 0.0 : starts.back() + segments.back().length;
    }
};

inline SegmentLayout segment_layout(const CavityGeometry& geom)
{
    geom.validate();
    SegmentLayout layout;
    layout.segments = {{geom.d1, geom.f1},
                       {geom.dg, geom.f3},
                       {geom.dt, geom.f4},
                       {geom.link_length(), geom.f2},
                       {geom.d2, std::nullopt}};
    double z = 0.0;
    for (const Segment& s : layout.segments) {
        layout.starts.push_back(z);
        z += s.length;
    }
    return layout;
}

// One-way matrix from M1 (z = 0) to the plane z along the unfolded path.
// At a lens plane the result is taken just before the lens.
inline RayMatrix propagation_matrix_to(const SegmentLayout& layout, double z)
{
    const double total = layout.total_length();
    if (!(z >= 0.0 && z <= total)) {
        throw OutOfDomain("propagation_matrix_to: z = " + std::to_string(z) + " outside [0, " +
                          std::to_string(total) + "]");
    }
    RayMatrix m = RayMatrix::identity();
    std::size_t k = 0;
    while (k + 1 < layout.segments.size() && z > layout.starts[k + 1]) {
        const Segment& s = layout.segments[k];
        m = translation(s.length) * m;
        if (s.lens_focal) {
            m = thin_lens(*s.lens_focal) * m;
        }
        ++k;
    }
    return translation(z - layout.starts[k]) * m;
}

inline RayMatrix propagation_matrix_to(const CavityGeometry& geom, double z)
{
    return propagation_matrix_to(segment_layout(geom), z);
}

// Gain medium plane: the pupil f1 behind L1.
inline double gain_plane(const CavityGeometry& geom)
{
    return geom.d1 + geom.f1;
}

// Named element planes along the unfolded M1 -> M2 path.
struct ElementPlanes
{
    double m1 = 0.0;
    double l1 = 0.0;
    double gain = 0.0;
    double l3 = 0.0;
    double l4 = 0.0;
    double l2 = 0.0;
    double m2 = 0.0;
};

inline ElementPlanes element_planes(const CavityGeometry& geom)
{
    ElementPlanes p;
    p.l1 = geom.d1;
    p.gain = gain_plane(geom);
    p.l3 = geom.d1 + geom.dg;
    p.l4 = p.l3 + geom.dt;
    p.l2 = p.l4 + geom.link_length();
    p.m2 = p.l2 + geom.d2;
    return p;
}

} // namespace sdc
