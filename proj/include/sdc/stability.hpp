#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sdc/cavity.hpp"
#include "sdc/detail/bisect.hpp"
#include "sdc/detail/parallel.hpp"
#include "sdc/error.hpp"

namespace sdc {

// Half the trace of the round trip; the cavity is stable for |g| < 1.
inline double g_parameter(const CavityGeometry& geom)
{
    return 0.5 * round_trip_matrix(geom).trace();
}

inline bool is_stable(double g)
{
    return std::abs(g) < 1.0;
}

struct SearchRange
{
    double lo = 0.0;
    double hi = 0.0;
};

// Default bracketing windows around the nominal design: for dt, +-20 around
// the ideal-spacing g = 0 value f3 + f4 + f4^2/(2 dw), widened by the stable
// width f4^2/dw at short range; f1 +- 10 for d1; analogous windows elsewhere.
inline SearchRange default_search_range(const CavityGeometry& geom, Param p)
{
    switch (p) {
    case Param::dt: {
        const double span = geom.dw > 0.0 ? geom.f4 * geom.f4 / geom.dw : 0.0;
        const double centre = geom.f3 + geom.f4 + 0.5 * span;
        const double half = 20.0 + span;
        return {std::max(0.0, centre - half), centre + half};
    }
    case Param::d1: return {geom.f1 - 10.0, geom.f1 + 10.0};
    case Param::d2: return {geom.f2 - 10.0, geom.f2 + 10.0};
    case Param::dg: return {std::max(0.0, geom.f1 + geom.f3 - 20.0), geom.f1 + geom.f3 + 20.0};
    case Param::dw: return {0.0, 2.0 * std::max(geom.dw, 1000.0)};
    default: break;
    }
    const double v = geom[p];
    return {v - 0.5 * std::abs(v), v + 0.5 * std::abs(v)};
}

// Number of coarse pre-scan cells used to bracket boundaries.
inline constexpr std::size_t kPrescanCells = 2000;

struct StableInterval
{
    Param param = Param::dt;
    double lower = 0.0;
    double upper = 0.0;
    double width = 0.0;
    double g_at_lower = 0.0; // +-1 unless the interval is truncated at the search range
    double g_at_upper = 0.0;
    bool multiple = false;   // other disjoint stable intervals exist in the range
    bool truncated = false;  // interval runs into the search range edge
};

namespace detail {

struct ScanSample
{
    double x;
    double g;
};

inline bool sample_stable(const ScanSample& s)
{
    return is_stable(s.g);
}

// Coarse scan of g(param) on [lo, hi] plus the nominal value. Cells where g
// jumps from >= 1 to <= -1 (or back) hide a band narrower than the grid
// step; the zero of g inside such a cell is added as an extra sample.
inline std::vector<ScanSample> prescan(const CavityGeometry& geom, Param p, double lo, double hi,
                                       std::size_t cells)
{
    auto g_at = [&](double x) { return detail::g_unchecked(geom.with(p, x)); };
    std::vector<ScanSample> samples;
    samples.reserve(cells + 2);
    for (std::size_t i = 0; i <= cells; ++i) {
        const double x = i == cells ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(cells);
        samples.push_back({x, g_at(x)});
    }
    const double nominal = geom[p];
    if (nominal > lo && nominal < hi) {
        samples.push_back({nominal, g_at(nominal)});
        std::sort(samples.begin(), samples.end(), [](const ScanSample& a, const ScanSample& b) { return a.x < b.x; });
    }
    std::vector<ScanSample> out;
    out.reserve(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (i > 0) {
            const ScanSample& a = samples[i - 1];
            const ScanSample& b = samples[i];
            if ((a.g >= 1.0 && b.g <= -1.0) || (a.g <= -1.0 && b.g >= 1.0)) {
                const double root = bisect(g_at, a.x, b.x);
                out.push_back({root, g_at(root)});
            }
        }
        out.push_back(samples[i]);
    }
    return out;
}

struct Run
{
    std::size_t first;
    std::size_t last;
};

inline std::vector<Run> stable_runs(const std::vector<ScanSample>& s)
{
    std::vector<Run> runs;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!sample_stable(s[i])) {
            continue;
        }
        if (!runs.empty() && runs.back().last + 1 == i) {
            runs.back().last = i;
        } else {
            runs.push_back({i, i});
        }
    }
    return runs;
}

} // namespace detail

// Contiguous stable interval of one parameter, all others fixed. Among
// several disjoint intervals in [lo, hi] the one holding the stable point
// nearest the nominal value is returned and `multiple` is set.
inline StableInterval stable_interval(const CavityGeometry& geom, Param p, double lo, double hi)
{
    geom.validate();
    if (!(lo < hi)) {
        throw InvalidParameter("stable_interval: empty search range");
    }
    const auto samples = detail::prescan(geom, p, lo, hi, kPrescanCells);
    const auto runs = detail::stable_runs(samples);
    if (runs.empty()) {
        throw NoStableRegion("stable_interval: no stable " + std::string(to_string(p)) + " in [" +
                             std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    const double nominal = geom[p];
    auto distance = [&](const detail::Run& r) {
        const double a = samples[r.first].x;
        const double b = samples[r.last].x;
        if (nominal >= a && nominal <= b) {
            return 0.0;
        }
        return std::min(std::abs(nominal - a), std::abs(nominal - b));
    };
    const detail::Run best = *std::min_element(runs.begin(), runs.end(), [&](const auto& a, const auto& b) {
        return distance(a) < distance(b);
    });

    auto stable_at = [&](double x) { return is_stable(detail::g_unchecked(geom.with(p, x))); };
    StableInterval iv;
    iv.param = p;
    iv.multiple = runs.size() > 1;
    if (best.first == 0) {
        iv.lower = samples.front().x;
        iv.truncated = true;
    } else {
        iv.lower = detail::bisect_boundary(stable_at, samples[best.first].x, samples[best.first - 1].x);
    }
    if (best.last + 1 == samples.size()) {
        iv.upper = samples.back().x;
        iv.truncated = true;
    } else {
        iv.upper = detail::bisect_boundary(stable_at, samples[best.last].x, samples[best.last + 1].x);
    }
    iv.width = iv.upper - iv.lower;
    iv.g_at_lower = detail::g_unchecked(geom.with(p, iv.lower));
    iv.g_at_upper = detail::g_unchecked(geom.with(p, iv.upper));
    return iv;
}

inline StableInterval stable_interval(const CavityGeometry& geom, Param p)
{
    const SearchRange r = default_search_range(geom, p);
    return stable_interval(geom, p, r.lo, r.hi);
}

// Value of p inside its stable interval at which g = 0.
inline double solve_g_zero(const CavityGeometry& geom, Param p, double lo, double hi)
{
    const StableInterval iv = stable_interval(geom, p, lo, hi);
    auto g_at = [&](double x) { return detail::g_unchecked(geom.with(p, x)); };
    if (iv.g_at_lower * iv.g_at_upper < 0.0) {
        return detail::bisect(g_at, iv.lower, iv.upper);
    }
    // Both ends on the same side: look for an interior sign change.
    double prev_x = iv.lower;
    double prev_g = iv.g_at_lower;
    for (std::size_t i = 1; i <= kPrescanCells; ++i) {
        const double x = iv.lower + iv.width * static_cast<double>(i) / static_cast<double>(kPrescanCells);
        const double gx = g_at(x);
        if (gx == 0.0) {
            return x;
        }
        if ((gx < 0.0) != (prev_g < 0.0)) {
            return detail::bisect(g_at, prev_x, x);
        }
        prev_x = x;
        prev_g = gx;
    }
    throw NoSolution("solve_g_zero: g does not change sign inside the stable interval of " +
                     std::string(to_string(p)));
}

inline double solve_g_zero(const CavityGeometry& geom, Param p)
{
    const SearchRange r = default_search_range(geom, p);
    return solve_g_zero(geom, p, r.lo, r.hi);
}

// Geometry with dt moved to its g = 0 value.
inline CavityGeometry retune_dt(const CavityGeometry& geom)
{
    return geom.with(Param::dt, solve_g_zero(geom, Param::dt));
}

struct Axis
{
    Param param = Param::d1;
    double lo = 0.0;
    double hi = 1.0;
    std::size_t count = 2;

    std::vector<double> grid() const
    {
        if (count < 2 || !(lo < hi)) {
            throw InvalidParameter("Axis: need count >= 2 and lo < hi");
        }
        std::vector<double> v(count);
        for (std::size_t i = 0; i < count; ++i) {
            v[i] = i + 1 == count ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
        }
        return v;
    }
};

inline constexpr double kMapDisplayClamp = 1.5;

// g over a Cartesian grid, row-major in y: value(ix, iy) = g[iy * nx + ix].
struct StabilityMap
{
    Param x_param = Param::d1;
    Param y_param = Param::dt;
    std::vector<double> x_grid;
    std::vector<double> y_grid;
    std::vector<double> g_values;

    double at(std::size_t ix, std::size_t iy) const { return g_values[iy * x_grid.size() + ix]; }

    // Value clamped to [-1.5, 1.5] for plotting, plus whether it was clipped.
    double display(std::size_t ix, std::size_t iy) const
    {
        return std::clamp(at(ix, iy), -kMapDisplayClamp, kMapDisplayClamp);
    }
    bool out_of_range(std::size_t ix, std::size_t iy) const { return std::abs(at(ix, iy)) > kMapDisplayClamp; }
};

inline StabilityMap stability_map(const CavityGeometry& geom, const Axis& x, const Axis& y, unsigned threads = 0)
{
    geom.validate();
    if (x.param == y.param) {
        throw InvalidParameter("stability_map: axes must use different parameters");
    }
    StabilityMap map;
    map.x_param = x.param;
    map.y_param = y.param;
    map.x_grid = x.grid();
    map.y_grid = y.grid();
    const std::size_t nx = map.x_grid.size();
    map.g_values.assign(nx * map.y_grid.size(), 0.0);
    detail::parallel_for(map.y_grid.size(), threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t iy = begin; iy < end; ++iy) {
            CavityGeometry g = geom.with(y.param, map.y_grid[iy]);
            for (std::size_t ix = 0; ix < nx; ++ix) {
                g[x.param] = map.x_grid[ix];
                map.g_values[iy * nx + ix] = detail::g_unchecked(g);
            }
        }
    });
    return map;
}

// Three-parameter grid, index (ix, iy, iz) -> g[(iz * ny + iy) * nx + ix].
struct StabilityGrid3
{
    Axis x, y, z;
    std::vector<double> x_grid, y_grid, z_grid;
    std::vector<double> g_values;
};

inline StabilityGrid3 stability_grid3(const CavityGeometry& geom, const Axis& x, const Axis& y, const Axis& z,
                                      unsigned threads = 0)
{
    geom.validate();
    if (x.param == y.param || x.param == z.param || y.param == z.param) {
        throw InvalidParameter("stability_grid3: axes must use different parameters");
    }
    StabilityGrid3 out{x, y, z, x.grid(), y.grid(), z.grid(), {}};
    const std::size_t nx = out.x_grid.size();
    const std::size_t ny = out.y_grid.size();
    out.g_values.assign(nx * ny * out.z_grid.size(), 0.0);
    detail::parallel_for(out.z_grid.size(), threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t iz = begin; iz < end; ++iz) {
            CavityGeometry g = geom.with(z.param, out.z_grid[iz]);
            for (std::size_t iy = 0; iy < ny; ++iy) {
                g[y.param] = out.y_grid[iy];
                for (std::size_t ix = 0; ix < nx; ++ix) {
                    g[x.param] = out.x_grid[ix];
                    out.g_values[(iz * ny + iy) * nx + ix] = detail::g_unchecked(g);
                }
            }
        }
    });
    return out;
}

struct DistanceSweepOptions
{
    bool retune_dt = true;               // move dt to g = 0 at every distance first
    std::optional<SearchRange> range;    // defaults to default_search_range
    unsigned threads = 0;
};

struct WidthPoint
{
    double dw = 0.0;
    std::optional<StableInterval> interval; // empty when no stable region exists
};

inline std::vector<WidthPoint> width_vs_distance(const CavityGeometry& geom, Param p, std::span<const double> dw_values,
                                                 const DistanceSweepOptions& opt = {})
{
    std::vector<WidthPoint> out(dw_values.size());
    detail::parallel_for(dw_values.size(), opt.threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            out[i].dw = dw_values[i];
            try {
                CavityGeometry g = geom.with(Param::dw, dw_values[i]);
                if (opt.retune_dt) {
                    g = retune_dt(g);
                }
                const SearchRange r = opt.range.value_or(default_search_range(g, p));
                out[i].interval = stable_interval(g, p, r.lo, r.hi);
            } catch (const Error&) {
                out[i].interval.reset();
            }
        }
    });
    return out;
}

} // namespace sdc
