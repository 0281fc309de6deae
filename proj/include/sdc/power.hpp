#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "sdc/cavity.hpp"
#include "sdc/detail/parallel.hpp"
#include "sdc/error.hpp"
#include "sdc/gaussian.hpp"
#include "sdc/stability.hpp"

namespace sdc {

// Unit normalization at the API boundary. Division by exact powers of ten
// keeps the common decimal inputs correctly rounded.
constexpr double w_per_m2_to_w_per_mm2(double v)
{
    return v / 1e6;
}
constexpr double m_to_mm(double v)
{
    return v * 1e3;
}
constexpr double mm_to_m(double v)
{
    return v / 1e3;
}

// Gain medium and pump. Lengths in mm, intensity in W/mm^2.
struct GainSpec
{
    double i_sat = w_per_m2_to_w_per_mm2(1.1976e7); // Nd:YVO4
    double a_g = 2.5;
    double l_g = 1.0;
    double eta_c = 0.439;
    double p_in = 65.0;
    std::optional<double> z_g; // gain plane; defaults to d1 + f1 of the cavity

    static GainSpec from_si(double i_sat_w_per_m2, double a_g_m, double l_g_m, double eta_c, double p_in_w)
    {
        return {w_per_m2_to_w_per_mm2(i_sat_w_per_m2), m_to_mm(a_g_m), m_to_mm(l_g_m), eta_c, p_in_w, std::nullopt};
    }

    double volume() const { return std::numbers::pi * a_g * a_g * l_g; }

    void validate() const
    {
        if (!(i_sat > 0.0 && a_g > 0.0 && l_g > 0.0 && eta_c > 0.0 && p_in >= 0.0)) {
            throw InvalidParameter("GainSpec: i_sat, a_g, l_g, eta_c must be positive and p_in non-negative");
        }
    }
};

// Number of AR-coated surfaces crossed on each path.
struct ArCounts
{
    int output = 7;   // gain medium -> outside through M2
    int side1 = 6;    // gain medium -> M1 -> gain medium
    int side2 = 14;   // gain medium -> M2 -> gain medium
};

struct LossBudget
{
    double t_ar = 0.995;
    double r_m1 = 0.999;
    double r_m2 = 0.95;
    double alpha_air = 1e-4; // 1/m
    ArCounts ar_counts;

    void validate() const
    {
        if (!(t_ar > 0.0 && t_ar <= 1.0)) {
            throw InvalidParameter("LossBudget: t_ar must be in (0, 1]");
        }
        if (!(r_m1 > 0.0 && r_m1 < 1.0 && r_m2 > 0.0 && r_m2 < 1.0)) {
            throw InvalidParameter("LossBudget: mirror reflectivities must be in (0, 1)");
        }
        if (!(alpha_air >= 0.0)) {
            throw InvalidParameter("LossBudget: alpha_air must be non-negative");
        }
    }
};

// Gaussian clipping by the gain aperture: 1 - exp(-2 (a_g / w)^2).
inline double diffraction_factor(double a_g, double w_at_gain)
{
    if (!(a_g > 0.0 && w_at_gain > 0.0)) {
        throw InvalidParameter("diffraction_factor: radii must be positive");
    }
    const double ratio = a_g / w_at_gain;
    return -std::expm1(-2.0 * ratio * ratio);
}

struct EquivalentParams
{
    double t_2o = 0.0; // gain medium -> output through M2
    double r_1 = 0.0;  // round trip gain medium -> M1 -> gain medium
    double r_2 = 0.0;  // round trip gain medium -> M2 -> gain medium
};

inline double air_transmission(double alpha_air_per_m, double dw_mm)
{
    return std::exp(-alpha_air_per_m * mm_to_m(dw_mm));
}

inline EquivalentParams equivalent_params(const LossBudget& b, double t_diff1, double t_diff2, double dw_mm)
{
    if (!(dw_mm >= 0.0)) {
        throw InvalidParameter("equivalent_params: dw must be non-negative");
    }
    const double t_air = air_transmission(b.alpha_air, dw_mm);
    const double t_m2 = 1.0 - b.r_m2;
    EquivalentParams e;
    e.t_2o = std::pow(b.t_ar, b.ar_counts.output) * t_air * t_m2;
    e.r_1 = t_diff1 * std::pow(b.t_ar, b.ar_counts.side1) * b.r_m1;
    e.r_2 = t_diff2 * std::pow(b.t_ar, b.ar_counts.side2) * t_air * b.r_m2;
    return e;
}

// Rigrod steady-state output through M2, clamped at 0 below threshold.
inline double output_power(const GainSpec& gain, const EquivalentParams& e)
{
    gain.validate();
    if (!(e.r_1 > 0.0 && e.r_1 <= 1.0 && e.r_2 > 0.0 && e.r_2 <= 1.0)) {
        return 0.0;
    }
    const double area = std::numbers::pi * gain.a_g * gain.a_g;
    const double rr = std::sqrt(e.r_1 * e.r_2);
    const double pump_term = gain.l_g * gain.eta_c * gain.p_in / (gain.i_sat * gain.volume());
    const double bracket = pump_term - std::log(1.0 / rr);
    if (!(bracket > 0.0)) {
        return 0.0;
    }
    const double prefactor = e.t_2o * area * gain.i_sat / ((1.0 + std::sqrt(e.r_2 / e.r_1)) * (1.0 - rr));
    return prefactor * bracket;
}

struct PowerSweepOptions
{
    bool retune = true;                   // move dt to g = 0
    std::optional<double> design_dw;      // retune once at this distance instead of per point
    double m_squared = 1.0;
    double wavelength = kDefaultWavelength;
    unsigned threads = 0;
};

struct PowerPoint
{
    double dw = 0.0;
    double dt = 0.0;
    double g = 0.0;
    double w_gain = std::numeric_limits<double>::quiet_NaN();
    double t_diff = std::numeric_limits<double>::quiet_NaN();
    double p_out = 0.0;
    bool stable = false;
};

// Full chain at one geometry: mode -> radius at gain plane -> T_diff -> P_out.
inline PowerPoint evaluate_power(const CavityGeometry& geom, const GainSpec& gain, const LossBudget& budget,
                                 double m_squared = 1.0, double wavelength = kDefaultWavelength)
{
    PowerPoint pt;
    pt.dw = geom.dw;
    pt.dt = geom.dt;
    pt.g = g_parameter(geom);
    if (!is_stable(pt.g)) {
        return pt;
    }
    try {
        const ModeSolution mode = self_consistent_mode(geom, wavelength);
        const double z = gain.z_g.value_or(gain_plane(geom));
        pt.w_gain = multimode_radius(mode_radius_at(geom, mode, z), m_squared);
    } catch (const DegenerateImaging&) {
        return pt;
    }
    pt.stable = true;
    pt.t_diff = diffraction_factor(gain.a_g, pt.w_gain);
    pt.p_out = output_power(gain, equivalent_params(budget, pt.t_diff, pt.t_diff, geom.dw));
    return pt;
}

inline std::vector<PowerPoint> power_vs_distance(const CavityGeometry& geom_template, const GainSpec& gain,
                                                 const LossBudget& budget, std::span<const double> dw_values,
                                                 const PowerSweepOptions& opt = {})
{
    gain.validate();
    budget.validate();
    CavityGeometry base = geom_template;
    if (opt.retune && opt.design_dw) {
        base = retune_dt(base.with(Param::dw, *opt.design_dw));
    }
    std::vector<PowerPoint> out(dw_values.size());
    detail::parallel_for(dw_values.size(), opt.threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            CavityGeometry g = base.with(Param::dw, dw_values[i]);
            try {
                if (opt.retune && !opt.design_dw) {
                    g = retune_dt(g);
                }
                out[i] = evaluate_power(g, gain, budget, opt.m_squared, opt.wavelength);
            } catch (const Error&) {
                out[i] = PowerPoint{};
                out[i].dw = dw_values[i];
                out[i].dt = g.dt;
                out[i].g = std::numeric_limits<double>::quiet_NaN();
            }
        }
    });
    return out;
}

// Largest sampled dw with P_out > 0; nullopt if none.
inline std::optional<double> max_powered_distance(std::span<const PowerPoint> sweep)
{
    std::optional<double> best;
    for (const PowerPoint& p : sweep) {
        if (p.p_out > 0.0 && (!best || p.dw > *best)) {
            best = p.dw;
        }
    }
    return best;
}

struct SurfacePoint
{
    double a_g = 0.0;
    double m_tel = 0.0;
    double p_out = 0.0;
    bool stable = false;
};

// P_out over (a_g, M_tel) at fixed dw. f3 is held, f4 = M_tel * f3, and dt
// is retuned to g = 0 for each magnification. Rows are ordered m_tel-major.
inline std::vector<SurfacePoint> power_surface(const CavityGeometry& geom_template, const GainSpec& gain,
                                               const LossBudget& budget, double dw, std::span<const double> a_g_values,
                                               std::span<const double> m_tel_values, const PowerSweepOptions& opt = {})
{
    gain.validate();
    budget.validate();
    std::vector<SurfacePoint> out(a_g_values.size() * m_tel_values.size());
    detail::parallel_for(m_tel_values.size(), opt.threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t im = begin; im < end; ++im) {
            const double m_tel = m_tel_values[im];
            CavityGeometry g = geom_template;
            g.f4 = m_tel * g.f3;
            g.dw = dw;
            std::optional<double> w_gain;
            try {
                g = retune_dt(g);
                const ModeSolution mode = self_consistent_mode(g, opt.wavelength);
                w_gain = multimode_radius(mode_radius_at(g, mode, gain.z_g.value_or(gain_plane(g))), opt.m_squared);
            } catch (const Error&) {
                w_gain.reset();
            }
            for (std::size_t ia = 0; ia < a_g_values.size(); ++ia) {
                SurfacePoint& pt = out[im * a_g_values.size() + ia];
                pt.a_g = a_g_values[ia];
                pt.m_tel = m_tel;
                if (!w_gain) {
                    continue;
                }
                GainSpec gs = gain;
                gs.a_g = a_g_values[ia];
                const double t_diff = diffraction_factor(gs.a_g, *w_gain);
                pt.stable = true;
                pt.p_out = output_power(gs, equivalent_params(budget, t_diff, t_diff, dw));
            }
        }
    });
    return out;
}

} // namespace sdc
