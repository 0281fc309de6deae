#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <type_traits>
#include <vector>

#include "sdc/cavity.hpp"
#include "sdc/error.hpp"
#include "sdc/power.hpp"
#include "sdc/tolerance.hpp"

namespace sdc {

class ConfigError : public Error
{
public:
    ConfigError(std::string origin, std::size_t line, const std::string& message)
        : Error(origin + (line ? ":" + std::to_string(line) : std::string()) + ": " + message)
        , line_(line)
    {
    }

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

enum class OutputFormat { csv, json };

// Everything a CLI run needs, resolved from a flat key=value file. Keys
// absent from the file keep the reference-design defaults and are listed
// in `defaulted`.
struct RunConfig
{
    CavityGeometry geometry;
    GainSpec gain;
    double m_squared = 1.0;
    LossBudget loss;
    ToleranceSpec tolerance;
    OutputFormat format = OutputFormat::csv;
    std::string path;

    std::vector<std::string> defaulted;
};

namespace detail {

inline std::string_view trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <class T>
std::optional<T> parse_number(std::string_view s)
{
    T value{};
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (!s.empty() && s.front() == '+') {
        ++first;
    }
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
        return std::nullopt;
    }
    return value;
}

} // namespace detail

inline const std::vector<std::string>& config_keys()
{
    static const std::vector<std::string> keys = {
        "d1",     "d2",  "dg",    "delta_dg", "dt",    "dw",         "f1", "f2", "f3", "f4",
        "i_sat",  "a_g", "l_g",   "eta_c",    "p_in",  "m_squared",  "t_ar", "r_m1", "r_m2", "alpha_air",
        "tau_f_star", "n", "i", "seed", "lo", "hi", "format", "path"};
    return keys;
}

inline RunConfig parse_config(std::istream& in, const std::string& origin = "<config>")
{
    std::map<std::string, std::pair<std::string, std::size_t>> entries;
    std::string raw;
    std::size_t line_no = 0;
    const auto& known = config_keys();
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = detail::trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(origin, line_no, "expected key = value");
        }
        const std::string key(detail::trim(line.substr(0, eq)));
        const std::string value(detail::trim(line.substr(eq + 1)));
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw ConfigError(origin, line_no, "unknown key '" + key + "'");
        }
        if (value.empty()) {
            throw ConfigError(origin, line_no, "missing value for '" + key + "'");
        }
        if (entries.count(key)) {
            throw ConfigError(origin, line_no, "duplicate key '" + key + "'");
        }
        entries[key] = {value, line_no};
    }
    if (entries.count("dg") && entries.count("delta_dg")) {
        throw ConfigError(origin, entries["delta_dg"].second, "dg and delta_dg are mutually exclusive");
    }

    RunConfig cfg;
    auto number = [&](const std::string& key, double& target) {
        const auto it = entries.find(key);
        if (it == entries.end()) {
            cfg.defaulted.push_back(key);
            return;
        }
        const auto v = detail::parse_number<double>(it->second.first);
        if (!v) {
            throw ConfigError(origin, it->second.second, "'" + key + "' is not a number: " + it->second.first);
        }
        target = *v;
    };
    auto integer = [&](const std::string& key, auto& target) {
        using T = std::remove_reference_t<decltype(target)>;
        const auto it = entries.find(key);
        if (it == entries.end()) {
            cfg.defaulted.push_back(key);
            return;
        }
        const auto v = detail::parse_number<T>(it->second.first);
        if (!v) {
            throw ConfigError(origin, it->second.second,
                              "'" + key + "' is not a non-negative integer: " + it->second.first);
        }
        target = *v;
    };

    CavityGeometry& g = cfg.geometry;
    number("d1", g.d1);
    number("d2", g.d2);
    number("dt", g.dt);
    number("dw", g.dw);
    number("f1", g.f1);
    number("f2", g.f2);
    number("f3", g.f3);
    number("f4", g.f4);
    if (entries.count("delta_dg")) {
        double delta = 0.0;
        number("delta_dg", delta);
        g = CavityGeometry::with_deviation(g, delta);
    } else if (entries.count("dg")) {
        number("dg", g.dg);
    } else {
        // Ideal spacing for whatever focal lengths were given.
        g.dg = g.f1 + g.f3;
        cfg.defaulted.push_back("dg");
    }

    double i_sat_si = 1.1976e7;
    number("i_sat", i_sat_si);
    cfg.gain.i_sat = w_per_m2_to_w_per_mm2(i_sat_si);
    number("a_g", cfg.gain.a_g);
    number("l_g", cfg.gain.l_g);
    number("eta_c", cfg.gain.eta_c);
    number("p_in", cfg.gain.p_in);
    number("m_squared", cfg.m_squared);

    number("t_ar", cfg.loss.t_ar);
    number("r_m1", cfg.loss.r_m1);
    number("r_m2", cfg.loss.r_m2);
    number("alpha_air", cfg.loss.alpha_air);

    // tau_f_star defaults to 1 % of the largest focal length.
    if (entries.count("tau_f_star")) {
        number("tau_f_star", cfg.tolerance.tau_f_star);
    } else {
        cfg.tolerance.tau_f_star = 0.01 * std::max({g.f1, g.f2, g.f3, g.f4});
        cfg.defaulted.push_back("tau_f_star");
    }
    integer("n", cfg.tolerance.samples_n);
    integer("i", cfg.tolerance.iterations_i);
    integer("seed", cfg.tolerance.seed);
    number("lo", cfg.tolerance.lower);
    number("hi", cfg.tolerance.upper);

    if (const auto it = entries.find("format"); it != entries.end()) {
        if (it->second.first == "csv") {
            cfg.format = OutputFormat::csv;
        } else if (it->second.first == "json") {
            cfg.format = OutputFormat::json;
        } else {
            throw ConfigError(origin, it->second.second, "format must be csv or json");
        }
    } else {
        cfg.defaulted.push_back("format");
    }
    if (const auto it = entries.find("path"); it != entries.end()) {
        cfg.path = it->second.first;
    } else {
        cfg.defaulted.push_back("path");
    }

    try {
        g.validate();
        cfg.gain.validate();
        cfg.loss.validate();
        cfg.tolerance.validate();
        if (!(cfg.m_squared >= 1.0)) {
            throw InvalidParameter("m_squared must be >= 1");
        }
    } catch (const InvalidParameter& e) {
        throw ConfigError(origin, 0, e.what());
    }
    return cfg;
}

inline RunConfig parse_config_string(const std::string& text, const std::string& origin = "<string>")
{
    std::istringstream in(text);
    return parse_config(in, origin);
}

inline RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(path, 0, "cannot open config file");
    }
    return parse_config(in, path);
}

} // namespace sdc
