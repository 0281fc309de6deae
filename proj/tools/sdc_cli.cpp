// Command-line front end: loads a run config, runs one sweep and writes
// CSV or JSON plus a run manifest.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sdc/sdc.hpp"

namespace {

using nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitIo = 4;

class IoError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

struct CommonArgs
{
    std::string config_path;
    std::string out;
    std::string format;
    std::optional<std::uint64_t> seed;
    unsigned threads = 0;
};

struct SweepArgs
{
    std::vector<double> dw;                // mm
    std::vector<double> dw_range;          // lo hi count
    double scale = 1.0;
    bool no_retune = false;
    std::optional<double> design_dw;

    std::vector<double> distances(double fallback) const
    {
        if (!dw_range.empty()) {
            if (dw_range.size() != 3 || dw_range[2] < 2) {
                throw sdc::InvalidParameter("--dw-range needs LO HI COUNT with COUNT >= 2");
            }
            sdc::Axis axis{sdc::Param::dw, dw_range[0], dw_range[1], static_cast<std::size_t>(dw_range[2])};
            return axis.grid();
        }
        if (!dw.empty()) {
            return dw;
        }
        return {fallback};
    }
};

void add_common(CLI::App* cmd, CommonArgs& args)
{
    cmd->add_option("--config", args.config_path, "key=value run config (missing keys use defaults)");
    cmd->add_option("--out", args.out, "output file (default: stdout)");
    cmd->add_option("--format", args.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--seed", args.seed, "Monte Carlo seed (overrides config)");
    cmd->add_option("--threads", args.threads, "worker threads, 0 = all cores (never changes results)");
}

void add_sweep(CLI::App* cmd, SweepArgs& args)
{
    cmd->add_option("--dw", args.dw, "working distances in mm, comma separated")->delimiter(',');
    cmd->add_option("--dw-range", args.dw_range, "LO HI COUNT: uniform distances in mm")->expected(3);
    cmd->add_option("--scale", args.scale, "scale every focal length and spacing (dw kept)");
}

sdc::RunConfig resolve_config(const CommonArgs& args)
{
    sdc::RunConfig cfg = args.config_path.empty() ? sdc::parse_config_string("", "<defaults>")
                                                  : sdc::load_config(args.config_path);
    if (!cfg.defaulted.empty()) {
        std::clog << "sdc: defaults used for";
        for (const auto& key : cfg.defaulted) {
            std::clog << ' ' << key;
        }
        std::clog << '\n';
    }
    if (args.seed) {
        cfg.tolerance.seed = *args.seed;
    }
    if (!args.format.empty()) {
        cfg.format = args.format == "json" ? sdc::OutputFormat::json : sdc::OutputFormat::csv;
    }
    if (!args.out.empty()) {
        cfg.path = args.out;
    }
    cfg.tolerance.threads = args.threads;
    return cfg;
}

bool was_defaulted(const sdc::RunConfig& cfg, const std::string& key)
{
    return std::find(cfg.defaulted.begin(), cfg.defaulted.end(), key) != cfg.defaulted.end();
}

sdc::CavityGeometry scaled_geometry(sdc::RunConfig& cfg, double scale)
{
    if (!(scale > 0.0)) {
        throw sdc::InvalidParameter("--scale must be positive");
    }
    sdc::CavityGeometry g = cfg.geometry.scaled(scale);
    if (was_defaulted(cfg, "tau_f_star")) {
        cfg.tolerance.tau_f_star = 0.01 * std::max({g.f1, g.f2, g.f3, g.f4});
    }
    return g;
}

ordered_json geometry_json(const sdc::CavityGeometry& g)
{
    ordered_json j;
    for (sdc::Param p : sdc::kAllParams) {
        j[std::string(sdc::to_string(p))] = g[p];
    }
    return j;
}

ordered_json manifest_json(const sdc::RunConfig& cfg, const std::string& command, const ordered_json& args,
                           const sdc::CavityGeometry& geometry)
{
    ordered_json m;
    m["tool"] = "sdc";
    m["command"] = command;
    m["arguments"] = args;
    m["geometry"] = geometry_json(geometry);
    m["gain"] = {{"i_sat_w_per_mm2", cfg.gain.i_sat}, {"a_g", cfg.gain.a_g},   {"l_g", cfg.gain.l_g},
                 {"eta_c", cfg.gain.eta_c},             {"p_in", cfg.gain.p_in}, {"m_squared", cfg.m_squared}};
    m["loss"] = {{"t_ar", cfg.loss.t_ar},
                 {"r_m1", cfg.loss.r_m1},
                 {"r_m2", cfg.loss.r_m2},
                 {"alpha_air_per_m", cfg.loss.alpha_air},
                 {"ar_counts", {cfg.loss.ar_counts.output, cfg.loss.ar_counts.side1, cfg.loss.ar_counts.side2}}};
    m["tolerance"] = {{"tau_f_star", cfg.tolerance.tau_f_star}, {"n", cfg.tolerance.samples_n},
                      {"i", cfg.tolerance.iterations_i},        {"lo", cfg.tolerance.lower},
                      {"hi", cfg.tolerance.upper},              {"seed", cfg.tolerance.seed}};
    m["wavelength_mm"] = sdc::kDefaultWavelength;
    m["defaulted_keys"] = cfg.defaulted;
    return m;
}

void emit(const sdc::RunConfig& cfg, const sdc::Table& table, const ordered_json& manifest)
{
    auto write = [&](std::ostream& os) {
        if (cfg.format == sdc::OutputFormat::json) {
            sdc::write_json(os, table);
        } else {
            sdc::write_csv(os, table);
        }
    };
    if (cfg.path.empty()) {
        write(std::cout);
        return;
    }
    std::ofstream out(cfg.path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write " + cfg.path);
    }
    write(out);
    std::ofstream man(cfg.path + ".manifest.json", std::ios::binary);
    if (!man) {
        throw IoError("cannot write " + cfg.path + ".manifest.json");
    }
    man << manifest.dump(2) << '\n';
}

sdc::Param param_arg(const std::string& name)
{
    const auto p = sdc::parse_param(name);
    if (!p) {
        throw sdc::InvalidParameter("unknown parameter '" + name + "'");
    }
    return *p;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Stability, mode, tolerance and power analysis for telescope-based distributed cavities"};
    app.require_subcommand(1);

    CommonArgs common;

    auto* cmd_g = app.add_subcommand("g", "stability parameter and round-trip matrix");
    add_common(cmd_g, common);

    struct MapArgs
    {
        std::string x = "d1", y = "dt", z;
        std::vector<double> x_range{25.0, 35.0}, y_range{80.0, 90.0}, z_range;
        std::size_t nx = 200, ny = 200, nz = 20;
    } map_args;
    auto* cmd_map = app.add_subcommand("map", "g over a 2-D (or 3-D with --z) parameter grid");
    add_common(cmd_map, common);
    cmd_map->add_option("--x", map_args.x, "x parameter")->capture_default_str();
    cmd_map->add_option("--y", map_args.y, "y parameter")->capture_default_str();
    cmd_map->add_option("--z", map_args.z, "optional z parameter");
    cmd_map->add_option("--x-range", map_args.x_range, "LO HI")->expected(2);
    cmd_map->add_option("--y-range", map_args.y_range, "LO HI")->expected(2);
    cmd_map->add_option("--z-range", map_args.z_range, "LO HI")->expected(2);
    cmd_map->add_option("--nx", map_args.nx)->capture_default_str();
    cmd_map->add_option("--ny", map_args.ny)->capture_default_str();
    cmd_map->add_option("--nz", map_args.nz)->capture_default_str();

    SweepArgs sweep;
    std::string width_param = "dt";
    std::vector<double> search_range;
    auto* cmd_width = app.add_subcommand("width", "stable-interval width versus working distance");
    add_common(cmd_width, common);
    add_sweep(cmd_width, sweep);
    cmd_width->add_option("--param", width_param, "adjusted parameter")->capture_default_str();
    cmd_width->add_option("--range", search_range, "LO HI search window in mm")->expected(2);
    cmd_width->add_flag("--no-retune", sweep.no_retune, "keep dt as configured instead of g = 0");

    auto* cmd_dtstar = app.add_subcommand("dtstar", "dt giving g = 0 versus working distance");
    add_common(cmd_dtstar, common);
    add_sweep(cmd_dtstar, sweep);

    std::size_t samples = 200;
    auto* cmd_profile = app.add_subcommand("profile", "TEM00 radius along the cavity");
    add_common(cmd_profile, common);
    cmd_profile->add_option("--samples", samples)->capture_default_str();

    std::string method = "both";
    auto* cmd_tol = app.add_subcommand("tolerance", "maximum acceptable distance tolerance versus distance");
    add_common(cmd_tol, common);
    add_sweep(cmd_tol, sweep);
    cmd_tol->add_option("--method", method)->check(CLI::IsMember({"bmc", "linear", "both"}))->capture_default_str();
    cmd_tol->add_flag("--no-retune", sweep.no_retune, "keep dt as configured instead of g = 0");

    auto* cmd_power = app.add_subcommand("power", "output power versus working distance");
    add_common(cmd_power, common);
    add_sweep(cmd_power, sweep);
    cmd_power->add_option("--design-dw", sweep.design_dw, "retune dt once, at this distance in mm");
    cmd_power->add_flag("--no-retune", sweep.no_retune, "keep dt as configured");

    double surface_dw = 100000.0;
    std::vector<double> a_g_values{0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0};
    std::vector<double> m_tel_values{2.0, 3.0, 4.0, 5.0, 6.0};
    auto* cmd_surface = app.add_subcommand("surface", "output power over gain radius and magnification");
    add_common(cmd_surface, common);
    cmd_surface->add_option("--dw", surface_dw, "working distance in mm")->capture_default_str();
    cmd_surface->add_option("--a-g", a_g_values, "gain radii in mm")->delimiter(',');
    cmd_surface->add_option("--m-tel", m_tel_values, "telescope magnifications")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        sdc::RunConfig cfg = resolve_config(common);
        const unsigned threads = common.threads;
        sdc::Table table;
        ordered_json args;

        if (cmd_g->parsed()) {
            const sdc::RayMatrix m = sdc::round_trip_matrix(cfg.geometry);
            const double g = 0.5 * m.trace();
            const bool stable = sdc::is_stable(g);
            if (cfg.format == sdc::OutputFormat::json) {
                table.columns = {"g", "verdict", "A", "B", "C", "D"};
                table.rows.push_back({g, std::string(stable ? "stable" : "unstable"), m.a, m.b, m.c, m.d});
                emit(cfg, table, manifest_json(cfg, "g", args, cfg.geometry));
            } else {
                std::ostringstream os;
                os << "g = " << sdc::format_double(g) << '\n'
                   << "verdict: " << (stable ? "stable" : "unstable") << '\n'
                   << "round trip:\n"
                   << "  " << sdc::format_double(m.a) << ' ' << sdc::format_double(m.b) << '\n'
                   << "  " << sdc::format_double(m.c) << ' ' << sdc::format_double(m.d) << '\n';
                if (cfg.path.empty()) {
                    std::cout << os.str();
                } else {
                    std::ofstream out(cfg.path, std::ios::binary);
                    if (!out) {
                        throw IoError("cannot write " + cfg.path);
                    }
                    out << os.str();
                }
            }
            return kExitOk;
        }

        if (cmd_map->parsed()) {
            const sdc::Axis x{param_arg(map_args.x), map_args.x_range.at(0), map_args.x_range.at(1), map_args.nx};
            const sdc::Axis y{param_arg(map_args.y), map_args.y_range.at(0), map_args.y_range.at(1), map_args.ny};
            args = {{"x", map_args.x}, {"x_range", map_args.x_range}, {"nx", map_args.nx},
                    {"y", map_args.y}, {"y_range", map_args.y_range}, {"ny", map_args.ny}};
            if (map_args.z.empty()) {
                const auto map = sdc::stability_map(cfg.geometry, x, y, threads);
                table.columns = {"x_mm", "y_mm", "g"};
                for (std::size_t iy = 0; iy < map.y_grid.size(); ++iy) {
                    for (std::size_t ix = 0; ix < map.x_grid.size(); ++ix) {
                        table.rows.push_back({map.x_grid[ix], map.y_grid[iy], map.at(ix, iy)});
                    }
                }
            } else {
                if (map_args.z_range.size() != 2) {
                    throw sdc::InvalidParameter("--z needs --z-range LO HI");
                }
                const sdc::Axis z{param_arg(map_args.z), map_args.z_range[0], map_args.z_range[1], map_args.nz};
                args["z"] = map_args.z;
                args["z_range"] = map_args.z_range;
                args["nz"] = map_args.nz;
                const auto grid = sdc::stability_grid3(cfg.geometry, x, y, z, threads);
                table.columns = {"x_mm", "y_mm", "z_mm", "g"};
                const std::size_t nx = grid.x_grid.size();
                const std::size_t ny = grid.y_grid.size();
                for (std::size_t iz = 0; iz < grid.z_grid.size(); ++iz) {
                    for (std::size_t iy = 0; iy < ny; ++iy) {
                        for (std::size_t ix = 0; ix < nx; ++ix) {
                            table.rows.push_back({grid.x_grid[ix], grid.y_grid[iy], grid.z_grid[iz],
                                                  grid.g_values[(iz * ny + iy) * nx + ix]});
                        }
                    }
                }
            }
            emit(cfg, table, manifest_json(cfg, "map", args, cfg.geometry));
            return kExitOk;
        }

        if (cmd_width->parsed()) {
            const sdc::CavityGeometry geom = scaled_geometry(cfg, sweep.scale);
            const auto dws = sweep.distances(geom.dw);
            sdc::DistanceSweepOptions opt;
            opt.retune_dt = !sweep.no_retune;
            opt.threads = threads;
            if (!search_range.empty()) {
                opt.range = sdc::SearchRange{search_range.at(0), search_range.at(1)};
            }
            const auto points = sdc::width_vs_distance(geom, param_arg(width_param), dws, opt);
            table.columns = {"dw_mm", "lower_mm", "upper_mm", "width_mm"};
            const double nan = std::numeric_limits<double>::quiet_NaN();
            for (const auto& p : points) {
                if (p.interval) {
                    table.rows.push_back({p.dw, p.interval->lower, p.interval->upper, p.interval->width});
                } else {
                    table.rows.push_back({p.dw, nan, nan, nan});
                }
            }
            args = {{"param", width_param}, {"dw", dws}, {"scale", sweep.scale}, {"retune", !sweep.no_retune}};
            if (opt.range) {
                args["range"] = search_range;
            }
            emit(cfg, table, manifest_json(cfg, "width", args, geom));
            return kExitOk;
        }

        if (cmd_dtstar->parsed()) {
            const sdc::CavityGeometry geom = scaled_geometry(cfg, sweep.scale);
            const auto dws = sweep.distances(geom.dw);
            table.columns = {"dw_mm", "dt_star_mm"};
            for (double dw : dws) {
                double dt = std::numeric_limits<double>::quiet_NaN();
                try {
                    dt = sdc::solve_g_zero(geom.with(sdc::Param::dw, dw), sdc::Param::dt);
                } catch (const sdc::Error&) {
                }
                table.rows.push_back({dw, dt});
            }
            args = {{"dw", dws}, {"scale", sweep.scale}};
            emit(cfg, table, manifest_json(cfg, "dtstar", args, geom));
            return kExitOk;
        }

        if (cmd_profile->parsed()) {
            const auto profile = sdc::beam_profile(cfg.geometry, sdc::kDefaultWavelength, samples);
            table.columns = {"z_mm", "w00_mm"};
            for (const auto& p : profile) {
                table.rows.push_back({p.z, p.w});
            }
            args = {{"samples", samples}};
            emit(cfg, table, manifest_json(cfg, "profile", args, cfg.geometry));
            return kExitOk;
        }

        if (cmd_tol->parsed()) {
            const sdc::CavityGeometry geom = scaled_geometry(cfg, sweep.scale);
            const auto dws = sweep.distances(geom.dw);
            table.columns = {"dw_mm", "tau_d_max_mm", "method", "seed"};
            const auto seed = static_cast<std::int64_t>(cfg.tolerance.seed);
            const double nan = std::numeric_limits<double>::quiet_NaN();
            for (double dw : dws) {
                std::optional<sdc::CavityGeometry> g;
                try {
                    g = geom.with(sdc::Param::dw, dw);
                    if (!sweep.no_retune) {
                        g = sdc::retune_dt(*g);
                    }
                } catch (const sdc::Error&) {
                    g.reset();
                }
                auto run = [&](const char* name, auto&& fn) {
                    double tau = nan;
                    if (g) {
                        try {
                            tau = fn(*g).tau_d_max;
                        } catch (const sdc::Error&) {
                        }
                    }
                    table.rows.push_back({dw, tau, std::string(name), seed});
                };
                if (method != "linear") {
                    run("bmc", [&](const sdc::CavityGeometry& gg) { return sdc::bmc_tolerance(gg, cfg.tolerance); });
                }
                if (method != "bmc") {
                    run("linear", [&](const sdc::CavityGeometry& gg) {
                        return sdc::linear_tolerance(gg, cfg.tolerance.tau_f_star);
                    });
                }
            }
            args = {{"dw", dws}, {"scale", sweep.scale}, {"method", method}, {"retune", !sweep.no_retune}};
            emit(cfg, table, manifest_json(cfg, "tolerance", args, geom));
            return kExitOk;
        }

        if (cmd_power->parsed()) {
            const sdc::CavityGeometry geom = scaled_geometry(cfg, sweep.scale);
            const auto dws = sweep.distances(geom.dw);
            sdc::PowerSweepOptions opt;
            opt.retune = !sweep.no_retune;
            opt.design_dw = sweep.design_dw;
            opt.m_squared = cfg.m_squared;
            opt.threads = threads;
            const auto points = sdc::power_vs_distance(geom, cfg.gain, cfg.loss, dws, opt);
            table.columns = {"dw_mm", "dt_mm", "g", "w00_gain_mm", "t_diff", "p_out_w"};
            for (const auto& p : points) {
                table.rows.push_back({p.dw, p.dt, p.g, p.w_gain, p.t_diff, p.p_out});
            }
            args = {{"dw", dws}, {"scale", sweep.scale}, {"retune", opt.retune}};
            if (opt.design_dw) {
                args["design_dw"] = *opt.design_dw;
            }
            emit(cfg, table, manifest_json(cfg, "power", args, geom));
            return kExitOk;
        }

        if (cmd_surface->parsed()) {
            sdc::PowerSweepOptions opt;
            opt.m_squared = cfg.m_squared;
            opt.threads = threads;
            const auto points = sdc::power_surface(cfg.geometry, cfg.gain, cfg.loss, surface_dw, a_g_values,
                                                   m_tel_values, opt);
            table.columns = {"a_g_mm", "m_tel", "p_out_w"};
            for (const auto& p : points) {
                table.rows.push_back({p.a_g, p.m_tel, p.p_out});
            }
            args = {{"dw", surface_dw}, {"a_g", a_g_values}, {"m_tel", m_tel_values}};
            emit(cfg, table, manifest_json(cfg, "surface", args, cfg.geometry));
            return kExitOk;
        }
    } catch (const sdc::ConfigError& e) {
        std::cerr << "sdc: config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const IoError& e) {
        std::cerr << "sdc: " << e.what() << '\n';
        return kExitIo;
    } catch (const sdc::Error& e) {
        std::cerr << "sdc: " << e.what() << '\n';
        return kExitNumeric;
    }
    return kExitUsage;
}
