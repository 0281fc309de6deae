#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "sdc/cavity.hpp"
#include "sdc/detail/parallel.hpp"
#include "sdc/detail/rng.hpp"
#include "sdc/error.hpp"
#include "sdc/stability.hpp"

namespace sdc {

inline constexpr std::uint64_t kDefaultSeed = 20240521;

struct ToleranceSpec
{
    double tau_f_star = 0.0;     // fixed focal-length tolerance, mm
    double lower = 0.0;          // binary-search bounds for tau_d, mm
    double upper = 10.0;
    std::size_t samples_n = 10000;
    std::size_t iterations_i = 30;
    std::uint64_t seed = kDefaultSeed;
    unsigned threads = 0;        // 0: hardware concurrency; never changes the result

    void validate() const
    {
        if (!(lower >= 0.0 && lower < upper)) {
            throw InvalidParameter("ToleranceSpec: need 0 <= lower < upper");
        }
        if (!(tau_f_star >= 0.0)) {
            throw InvalidParameter("ToleranceSpec: tau_f_star must be non-negative");
        }
        if (samples_n < 1 || iterations_i < 1) {
            throw InvalidParameter("ToleranceSpec: samples and iterations must be >= 1");
        }
    }
};

enum class ToleranceMethod { bmc, linear };

constexpr const char* to_string(ToleranceMethod m)
{
    return m == ToleranceMethod::bmc ? "bmc" : "linear";
}

// |dg/dp| for all nine parameters, indexed by Param.
struct Sensitivities
{
    std::array<double, 9> values{};

    double operator[](Param p) const { return values[static_cast<std::size_t>(p)]; }
    double& operator[](Param p) { return values[static_cast<std::size_t>(p)]; }

    double distance_sum() const
    {
        double s = 0.0;
        for (Param p : kDistanceParams) {
            s += (*this)[p];
        }
        return s;
    }

    double focal_sum() const
    {
        double s = 0.0;
        for (Param p : kFocalParams) {
            s += (*this)[p];
        }
        return s;
    }
};

struct ToleranceResult
{
    double tau_d_max = 0.0;
    double g_max_at_result = 0.0;
    ToleranceMethod method = ToleranceMethod::bmc;
    std::optional<Sensitivities> sensitivities; // linear method only
    std::uint64_t seed = 0;
    double final_lower = 0.0;  // bmc: binary-search bracket after the last iteration
    double final_upper = 0.0;
    bool zero_budget = false;  // linear: focal tolerance alone exhausts stability
    bool unbounded = false;    // linear: no distance sensitivity at all
    std::string diagnostic;
};

// Finite-difference step for parameter value v. g is quadratic in every
// distance, so the central difference is exact there and a wide step only
// reduces roundoff; for focal lengths the truncation error is ~(h/f)^2.
inline double sensitivity_step(double v)
{
    return std::max(1e-2, 1e-5 * std::abs(v));
}

// Central differences of g with respect to every parameter.
inline Sensitivities sensitivities(const CavityGeometry& geom)
{
    geom.validate();
    Sensitivities s;
    for (Param p : kAllParams) {
        const double v = geom[p];
        const double h = sensitivity_step(v);
        const double gp = detail::g_unchecked(geom.with(p, v + h));
        const double gm = detail::g_unchecked(geom.with(p, v - h));
        s[p] = std::abs(gp - gm) / (2.0 * h);
    }
    return s;
}

// Largest |g| over n joint uniform perturbations: every distance within
// +-tau_d, every focal length within +-tau_f. Sample k of `iteration` always
// draws from the same stream, so the result is independent of threads.
inline double sample_g_max(const CavityGeometry& geom, double tau_d, double tau_f, std::size_t n,
                           std::uint64_t seed, std::uint64_t iteration, unsigned threads = 0)
{
    std::vector<double> partial(detail::chunk_count(n, threads), 0.0);
    detail::parallel_chunks(n, threads, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
        double local = 0.0;
        for (std::size_t k = begin; k < end; ++k) {
            detail::SampleStream rng(seed, iteration, k);
            CavityGeometry g = geom;
            for (Param p : kDistanceParams) {
                g[p] += rng.symmetric(tau_d);
            }
            for (Param p : kFocalParams) {
                g[p] += rng.symmetric(tau_f);
            }
            const double a = std::abs(detail::g_unchecked(g));
            // NaN counts as unstable.
            local = std::isnan(a) ? std::numeric_limits<double>::infinity() : std::max(local, a);
        }
        partial[chunk] = local;
    });
    return *std::max_element(partial.begin(), partial.end());
}

// Binary-search Monte Carlo: bisect tau_d on [lower, upper]; a trial value
// is accepted when the largest sampled |g| stays <= 1.
inline ToleranceResult bmc_tolerance(const CavityGeometry& geom, const ToleranceSpec& spec)
{
    spec.validate();
    geom.validate();
    const double g0 = detail::g_unchecked(geom);
    if (!is_stable(g0)) {
        throw UnstableResonator("bmc_tolerance: nominal geometry is unstable (|g| = " + std::to_string(std::abs(g0)) +
                                ")");
    }
    double lo = spec.lower;
    double hi = spec.upper;
    double tau = lo;
    double g_last = 0.0;
    std::optional<double> g_accepted;
    for (std::size_t it = 0; it < spec.iterations_i; ++it) {
        tau = 0.5 * (lo + hi);
        g_last = sample_g_max(geom, tau, spec.tau_f_star, spec.samples_n, spec.seed, it, spec.threads);
        if (g_last <= 1.0) {
            lo = tau;
            g_accepted = g_last;
        } else {
            hi = tau;
        }
    }
    ToleranceResult r;
    r.method = ToleranceMethod::bmc;
    r.tau_d_max = tau;
    r.g_max_at_result = g_accepted.value_or(g_last);
    r.seed = spec.seed;
    r.final_lower = lo;
    r.final_upper = hi;
    if (!g_accepted) {
        r.diagnostic = "no trial tolerance was accepted; focal tolerance alone may exceed the stable region";
    }
    return r;
}

// (1 - |g| - S_f tau_f) / S_d with the given nominal g and sensitivities.
inline ToleranceResult linear_tolerance(double g_nominal, const Sensitivities& s, double tau_f_star)
{
    ToleranceResult r;
    r.method = ToleranceMethod::linear;
    r.sensitivities = s;
    const double budget = 1.0 - std::abs(g_nominal) - s.focal_sum() * tau_f_star;
    const double s_d = s.distance_sum();
    if (!(budget > 0.0)) {
        r.zero_budget = true;
        r.tau_d_max = 0.0;
        r.diagnostic = "focal tolerance alone exhausts the stable region (1 - |g| - S_f tau_f = " +
                       std::to_string(budget) + ")";
        return r;
    }
    if (s_d == 0.0) {
        r.unbounded = true;
        r.tau_d_max = std::numeric_limits<double>::infinity();
        r.diagnostic = "g is insensitive to every distance parameter";
        return r;
    }
    r.tau_d_max = budget / s_d;
    return r;
}

inline ToleranceResult linear_tolerance(const CavityGeometry& geom, double tau_f_star)
{
    const double g0 = g_parameter(geom);
    if (!is_stable(g0)) {
        throw UnstableResonator("linear_tolerance: nominal geometry is unstable (|g| = " +
                                std::to_string(std::abs(g0)) + ")");
    }
    return linear_tolerance(g0, sensitivities(geom), tau_f_star);
}

} // namespace sdc
