#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sdc/stability.hpp"

using sdc::CavityGeometry;
using sdc::Param;

namespace {

oracle::Geometry to_oracle(const CavityGeometry& g)
{
    return {g.d1, g.d2, g.dg, g.dt, g.dw, g.f1, g.f2, g.f3, g.f4};
}

CavityGeometry random_geometry(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> f(15.0, 100.0);
    std::uniform_real_distribution<double> off(-0.05, 0.05);
    std::uniform_real_distribution<double> dw(2000.0, 30000.0);
    CavityGeometry g;
    g.f1 = f(rng);
    g.f2 = f(rng);
    g.f3 = f(rng);
    g.f4 = f(rng);
    g.d1 = g.f1 + off(rng);
    g.d2 = g.f2 + off(rng);
    g.dg = g.f1 + g.f3 + off(rng);
    g.dw = dw(rng);
    g.dt = g.f3 + g.f4;
    return sdc::retune_dt(g);
}

} // namespace

TEST(Stability, DefaultG)
{
    EXPECT_NEAR(sdc::g_parameter(CavityGeometry{}), -1.0 / 3.0, 1e-12);
    EXPECT_NEAR(sdc::g_parameter(CavityGeometry{}.with(Param::dt, 85.05)), 5.0 / 6.0, 1e-12);
    EXPECT_TRUE(sdc::is_stable(0.999));
    EXPECT_FALSE(sdc::is_stable(1.0));
    EXPECT_FALSE(sdc::is_stable(-1.0));
    EXPECT_FALSE(sdc::is_stable(std::nan("")));
}

TEST(Stability, DefaultDtInterval)
{
    // g = 1 + 2 dw (85 - dt) / 3600 at 6 m: stable for 85.0 < dt < 85.6.
    const sdc::StableInterval iv = sdc::stable_interval(CavityGeometry{}, Param::dt);
    EXPECT_NEAR(iv.lower, 85.0, 1e-9);
    EXPECT_NEAR(iv.upper, 85.6, 1e-9);
    EXPECT_NEAR(iv.width, 0.6, 1e-9);
    EXPECT_NEAR(iv.g_at_lower, 1.0, 1e-7);
    EXPECT_NEAR(iv.g_at_upper, -1.0, 1e-7);
    EXPECT_FALSE(iv.multiple);
    EXPECT_FALSE(iv.truncated);
}

TEST(Stability, DefaultD1Interval)
{
    // Width (f1 f4 / f3)^2 / dw at ideal spacing.
    const sdc::StableInterval iv = sdc::stable_interval(CavityGeometry{}, Param::d1);
    EXPECT_NEAR(iv.width, std::pow(30.0 * 60.0 / 25.0, 2) / 6000.0, 1e-7);
}

TEST(Stability, EndpointsSitOnTheBoundaries)
{
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 20; ++trial) {
        const CavityGeometry g = random_geometry(rng);
        for (Param p : {Param::dt, Param::d1, Param::d2, Param::dg}) {
            const sdc::StableInterval iv = sdc::stable_interval(g, p);
            if (iv.truncated) {
                continue;
            }
            EXPECT_NEAR(std::abs(iv.g_at_lower), 1.0, 1e-7);
            EXPECT_NEAR(std::abs(iv.g_at_upper), 1.0, 1e-7);
        }
    }
}

TEST(Stability, IntervalInteriorIsStable)
{
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const CavityGeometry g = random_geometry(rng);
        const sdc::StableInterval iv = sdc::stable_interval(g, Param::dt);
        for (int k = 0; k < 100; ++k) {
            const double x = iv.lower + iv.width * (0.001 + 0.998 * u(rng));
            EXPECT_LT(std::abs(sdc::g_parameter(g.with(Param::dt, x))), 1.0);
        }
    }
}

TEST(Stability, WidthMatchesGridScanOracle)
{
    std::mt19937_64 rng(47);
    for (int trial = 0; trial < 20; ++trial) {
        const CavityGeometry g = random_geometry(rng);
        const sdc::SearchRange r = sdc::default_search_range(g, Param::dt);
        const sdc::StableInterval iv = sdc::stable_interval(g, Param::dt, r.lo, r.hi);
        const double ref = oracle::grid_scan_width(to_oracle(g), 3, r.lo, r.hi, g.dt, 1e-4);
        EXPECT_NEAR(iv.width, ref, 2e-4) << "trial " << trial;
    }
}

TEST(Stability, TruncatedAtSearchEdges)
{
    const sdc::StableInterval iv = sdc::stable_interval(CavityGeometry{}, Param::dt, 85.2, 85.4);
    EXPECT_TRUE(iv.truncated);
    EXPECT_EQ(iv.lower, 85.2);
    EXPECT_EQ(iv.upper, 85.4);
}

TEST(Stability, NoStableRegion)
{
    EXPECT_THROW(sdc::stable_interval(CavityGeometry{}, Param::dt, 70.0, 80.0), sdc::NoStableRegion);
    EXPECT_THROW(sdc::stable_interval(CavityGeometry{}, Param::dt, 80.0, 80.0), sdc::InvalidParameter);
}

TEST(Stability, BandNarrowerThanPrescanCellIsFound)
{
    // At 100 km the dt band is 3600 / 1e8 mm wide, far below the 0.02 mm cell.
    const CavityGeometry g = CavityGeometry{}.with(Param::dw, 1e8);
    const sdc::StableInterval iv = sdc::stable_interval(g, Param::dt);
    EXPECT_NEAR(iv.width, 3.6e-5, 1e-10);
    EXPECT_NEAR(iv.lower, 85.0, 1e-9);
}

TEST(Stability, SeveralRunsAreFlagged)
{
    using sdc::detail::ScanSample;
    const std::vector<ScanSample> s = {{0, 2}, {1, 0.5}, {2, 0.1}, {3, 3}, {4, -0.2}, {5, -3}};
    const auto runs = sdc::detail::stable_runs(s);
    ASSERT_EQ(runs.size(), 2u);
    EXPECT_EQ(runs[0].first, 1u);
    EXPECT_EQ(runs[0].last, 2u);
    EXPECT_EQ(runs[1].first, 4u);
}

TEST(Stability, NearestRunToNominalIsChosen)
{
    // g is quadratic in dg here and has two stable runs in [0, 200]:
    // roughly [33.9, 42.4] and [67.5, 76.0].
    CavityGeometry g;
    g.d1 = 56.76;
    g.d2 = 55.1;
    g.dt = 91.45;
    g.dw = 100.0;
    auto around = [&](double dg) { return sdc::stable_interval(g.with(Param::dg, dg), Param::dg, 0.0, 200.0); };

    const sdc::StableInterval first = around(38.0);
    EXPECT_TRUE(first.multiple);
    EXPECT_NEAR(first.lower, 33.9, 0.1);
    EXPECT_NEAR(first.upper, 42.4, 0.1);

    const sdc::StableInterval second = around(70.0);
    EXPECT_TRUE(second.multiple);
    EXPECT_NEAR(second.lower, 67.5, 0.1);
    EXPECT_NEAR(second.upper, 76.0, 0.1);

    // Unstable nominal between the runs: the closer run wins.
    const sdc::StableInterval between = around(50.0);
    EXPECT_EQ(between.lower, first.lower);
    EXPECT_EQ(between.upper, first.upper);
}

TEST(SolveGZero, DefaultDesign)
{
    EXPECT_NEAR(sdc::solve_g_zero(CavityGeometry{}, Param::dt), 85.3, 1e-9);
    const CavityGeometry retuned = sdc::retune_dt(CavityGeometry{});
    EXPECT_NEAR(sdc::g_parameter(retuned), 0.0, 1e-9);
}

TEST(SolveGZero, LongRangeDesign)
{
    CavityGeometry g;
    g.f4 = 100.0;
    g.dt = 125.0;
    EXPECT_NEAR(sdc::solve_g_zero(g.with(Param::dw, 25000.0), Param::dt), 125.2, 1e-9);
    EXPECT_NEAR(sdc::solve_g_zero(g.with(Param::dw, 50000.0), Param::dt), 125.1, 1e-9);
}

TEST(SolveGZero, BracketedByFineGrid)
{
    std::mt19937_64 rng(53);
    for (int trial = 0; trial < 20; ++trial) {
        const CavityGeometry g = random_geometry(rng);
        const double root = sdc::solve_g_zero(g, Param::dt);
        const double below = oracle::g_param(to_oracle(g.with(Param::dt, root - 1e-5)));
        const double above = oracle::g_param(to_oracle(g.with(Param::dt, root + 1e-5)));
        EXPECT_LT(below * above, 0.0);
    }
}

TEST(SolveGZero, NoSignChange)
{
    EXPECT_THROW(sdc::solve_g_zero(CavityGeometry{}, Param::dt, 85.0, 85.2), sdc::NoSolution);
}

TEST(Map, TinyGridIsFourEvaluations)
{
    const CavityGeometry g;
    const auto map = sdc::stability_map(g, {Param::d1, 29.0, 31.0, 2}, {Param::dt, 85.1, 85.5, 2});
    ASSERT_EQ(map.g_values.size(), 4u);
    for (std::size_t iy = 0; iy < 2; ++iy) {
        for (std::size_t ix = 0; ix < 2; ++ix) {
            CavityGeometry h = g;
            h.d1 = map.x_grid[ix];
            h.dt = map.y_grid[iy];
            EXPECT_EQ(map.at(ix, iy), sdc::g_parameter(h));
        }
    }
}

TEST(Map, BitIdenticalAcrossThreadCounts)
{
    const CavityGeometry g;
    const sdc::Axis x{Param::d1, 25.0, 35.0, 120};
    const sdc::Axis y{Param::dt, 80.0, 90.0, 97};
    const auto serial = sdc::stability_map(g, x, y, 1);
    for (unsigned threads : {2u, 3u, 8u, 0u}) {
        EXPECT_EQ(sdc::stability_map(g, x, y, threads).g_values, serial.g_values);
    }
}

TEST(Map, DisplayClamp)
{
    const auto map = sdc::stability_map(CavityGeometry{}, {Param::d1, 25.0, 35.0, 3}, {Param::dt, 80.0, 90.0, 3});
    EXPECT_TRUE(map.out_of_range(0, 0));
    EXPECT_EQ(std::abs(map.display(0, 0)), sdc::kMapDisplayClamp);
    EXPECT_THROW(sdc::stability_map(CavityGeometry{}, {Param::d1, 0, 1, 2}, {Param::d1, 0, 1, 2}),
                 sdc::InvalidParameter);
    EXPECT_THROW((sdc::Axis{Param::d1, 0, 1, 1}.grid()), sdc::InvalidParameter);
}

TEST(Map, ThreeParameterGrid)
{
    const CavityGeometry g;
    const auto grid = sdc::stability_grid3(g, {Param::d1, 29, 31, 3}, {Param::dt, 85, 86, 4}, {Param::dg, 54, 56, 5}, 3);
    ASSERT_EQ(grid.g_values.size(), 60u);
    CavityGeometry h = g;
    h.d1 = grid.x_grid[2];
    h.dt = grid.y_grid[1];
    h.dg = grid.z_grid[4];
    EXPECT_EQ(grid.g_values[(4 * 4 + 1) * 3 + 2], sdc::g_parameter(h));
}

TEST(WidthSweep, InverseInDistance)
{
    const std::vector<double> dws = {1000.0, 2000.0, 4000.0, 8000.0};
    const auto pts = sdc::width_vs_distance(CavityGeometry{}, Param::dt, dws);
    ASSERT_EQ(pts.size(), dws.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        ASSERT_TRUE(pts[i].interval.has_value());
        EXPECT_NEAR(pts[i].interval->width, 3600.0 / dws[i], 1e-8);
        if (i > 0) {
            EXPECT_NEAR(pts[i - 1].interval->width / pts[i].interval->width, 2.0, 0.02 * 2.0);
        }
    }
}

TEST(WidthSweep, LargerFocalScaleWidensRegion)
{
    const std::vector<double> dws = {1e6};
    const double w1 = sdc::width_vs_distance(CavityGeometry{}, Param::dt, dws)[0].interval->width;
    const double w2 = sdc::width_vs_distance(CavityGeometry{}.scaled(2.0), Param::dt, dws)[0].interval->width;
    const double w3 = sdc::width_vs_distance(CavityGeometry{}.scaled(3.0), Param::dt, dws)[0].interval->width;
    EXPECT_LT(w1, w2);
    EXPECT_LT(w2, w3);
    EXPECT_NEAR(w1, 0.0036, 1e-6);
    EXPECT_NEAR(w3, 0.0324, 1e-5);
}

TEST(WidthSweep, MissingRegionIsRecordedAsAbsent)
{
    sdc::DistanceSweepOptions opt;
    opt.retune_dt = false;
    opt.range = sdc::SearchRange{70.0, 80.0};
    const std::vector<double> dws = {6000.0};
    const auto pts = sdc::width_vs_distance(CavityGeometry{}, Param::dt, dws, opt);
    EXPECT_FALSE(pts[0].interval.has_value());
}
