// INI-style experiment configuration: [section] headers with key = value
// lines, '#' or ';' comments. Lookups are tracked so a subcommand can reject
// any key it did not consume, catching typos instead of ignoring them.

#pragma once

#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

#include "ratetip/basins.hpp"
#include "ratetip/ecosystem.hpp"
#include "ratetip/normal_forms.hpp"
#include "ratetip/ode.hpp"
#include "ratetip/shifts.hpp"
#include "ratetip/tipping.hpp"

namespace ratetip {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class Config {
public:
    static Config parse(const std::string& text) {
        Config cfg;
        cfg.raw_ = text;
        std::istringstream in(text);
        std::string line;
        std::string section;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const std::string t = strip(line);
            if (t.empty() || t[0] == '#' || t[0] == ';') continue;
            if (t.front() == '[') {
                if (t.back() != ']')
                    throw ConfigError("line " + std::to_string(lineno) + ": unterminated section");
                section = strip(t.substr(1, t.size() - 2));
                if (section.empty())
                    throw ConfigError("line " + std::to_string(lineno) + ": empty section name");
                cfg.sections_.insert(section);
                continue;
            }
            const auto eq = t.find('=');
            if (eq == std::string::npos)
                throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
            if (section.empty())
                throw ConfigError("line " + std::to_string(lineno) + ": key outside any section");
            const std::string key = strip(t.substr(0, eq));
            const std::string value = strip(t.substr(eq + 1));
            if (key.empty())
                throw ConfigError("line " + std::to_string(lineno) + ": empty key");
            if (!cfg.values_.emplace(section + "." + key, value).second)
                throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" +
                                  section + "." + key + "'");
        }
        return cfg;
    }

    const std::string& raw() const { return raw_; }

    bool has_section(const std::string& s) const { return sections_.count(s) > 0; }

    bool has(const std::string& section, const std::string& key) const {
        return values_.count(section + "." + key) > 0;
    }

    std::string get_string(const std::string& section, const std::string& key) const {
        const auto it = values_.find(section + "." + key);
        if (it == values_.end())
            throw ConfigError("missing required key '" + section + "." + key + "'");
        consumed_.insert(it->first);
        return it->second;
    }

    std::string get_string_or(const std::string& section, const std::string& key,
                              const std::string& fallback) const {
        return has(section, key) ? get_string(section, key) : fallback;
    }

    double get_double(const std::string& section, const std::string& key) const {
        return to_double(section + "." + key, get_string(section, key));
    }

    double get_double_or(const std::string& section, const std::string& key,
                         double fallback) const {
        return has(section, key) ? get_double(section, key) : fallback;
    }

    long get_long(const std::string& section, const std::string& key) const {
        const std::string v = get_string(section, key);
        std::size_t pos = 0;
        long out = 0;
        try {
            out = std::stol(v, &pos);
        } catch (const std::exception&) {
            throw ConfigError("key '" + section + "." + key + "': '" + v + "' is not an integer");
        }
        if (pos != v.size())
            throw ConfigError("key '" + section + "." + key + "': '" + v + "' is not an integer");
        return out;
    }

    long get_long_or(const std::string& section, const std::string& key, long fallback) const {
        return has(section, key) ? get_long(section, key) : fallback;
    }

    bool get_bool_or(const std::string& section, const std::string& key, bool fallback) const {
        if (!has(section, key)) return fallback;
        const std::string v = get_string(section, key);
        if (v == "true" || v == "1" || v == "yes") return true;
        if (v == "false" || v == "0" || v == "no") return false;
        throw ConfigError("key '" + section + "." + key + "': '" + v + "' is not a boolean");
    }

    /// Fail on any key that was never read by the subcommand.
    void reject_unconsumed() const {
        for (const auto& [k, v] : values_)
            if (!consumed_.count(k)) throw ConfigError("unknown key '" + k + "'");
    }

private:
    static std::string strip(const std::string& s) {
        std::size_t a = s.find_first_not_of(" \t\r");
        if (a == std::string::npos) return "";
        std::size_t b = s.find_last_not_of(" \t\r");
        return s.substr(a, b - a + 1);
    }

    double to_double(const std::string& fullkey, const std::string& v) const {
        std::size_t pos = 0;
        double out = 0.0;
        try {
            out = std::stod(v, &pos);
        } catch (const std::exception&) {
            throw ConfigError("key '" + fullkey + "': '" + v + "' is not a number");
        }
        if (pos != v.size())
            throw ConfigError("key '" + fullkey + "': '" + v + "' is not a number");
        return out;
    }

    std::string raw_;
    std::set<std::string> sections_;
    std::map<std::string, std::string> values_;
    mutable std::set<std::string> consumed_;
};

// ---------------------------------------------------------------------------
// Section loaders shared by the CLI subcommands
// ---------------------------------------------------------------------------

inline ModelParams load_ecosystem_params(const Config& cfg) {
    ModelParams p;
    p.r = cfg.get_double("model", "r");
    p.m = cfg.get_double("model", "m");
    p.C = cfg.get_double_or("model", "C", p.C);
    p.a = cfg.get_double_or("model", "a", p.a);
    p.b = cfg.get_double("model", "b");
    p.b_c = cfg.get_double("model", "b_c");
    p.E = cfg.get_double_or("model", "E", p.E);
    p.c_max = cfg.get_double_or("model", "c_max", p.c_max);
    p.validate();
    return p;
}

inline IntegratorConfig load_solver(const Config& cfg, const IntegratorConfig& defaults) {
    IntegratorConfig c = defaults;
    if (!cfg.has_section("solver")) return c;
    c.abs_tol = cfg.get_double_or("solver", "abs_tol", c.abs_tol);
    c.rel_tol = cfg.get_double_or("solver", "rel_tol", c.rel_tol);
    c.h_init = cfg.get_double_or("solver", "h_init", c.h_init);
    c.h_max = cfg.get_double_or("solver", "h_max", c.h_max);
    c.max_steps = cfg.get_long_or("solver", "max_steps", c.max_steps);
    c.validate();
    return c;
}

/// Shift section: keys shape, base, delta, eps, c, tau, target, delta_rel.
/// `base` may be omitted, in which case the target parameter of the model
/// section is used. Returns the shift spec plus the start-time closeness.
struct ShiftConfig {
    ShiftSpec spec;
    double delta_rel = 1e-3;
};

/// `require_magnitude_rate` is false for grid sweeps, where delta and eps
/// come from the [grid] section and the shift acts as a template.
inline ShiftConfig load_shift(const Config& cfg, double default_base_r, double default_base_m,
                              bool require_magnitude_rate = true,
                              const std::string& default_target = "r") {
    ShiftConfig out;
    out.spec.shape = shift_shape_from_name(cfg.get_string("shift", "shape"));
    out.spec.target = shift_target_from_name(cfg.get_string_or("shift", "target", default_target));
    const double fallback_base = out.spec.target == ShiftTarget::m ? default_base_m
                                                                   : default_base_r;
    out.spec.base = cfg.get_double_or("shift", "base", fallback_base);
    if (require_magnitude_rate) {
        out.spec.magnitude = cfg.get_double("shift", "delta");
        out.spec.rate = cfg.get_double("shift", "eps");
    } else {
        out.spec.magnitude = cfg.get_double_or("shift", "delta", 1.0);
        out.spec.rate = cfg.get_double_or("shift", "eps", 1.0);
    }
    out.spec.c = cfg.get_double_or("shift", "c", 1.0);
    out.spec.tau = cfg.get_double_or("shift", "tau", 0.0);
    out.delta_rel = cfg.get_double_or("shift", "delta_rel", 1e-3);
    out.spec.validate();
    return out;
}

inline GridAxis load_axis(const Config& cfg, const std::string& section,
                          const std::string& prefix, const GridAxis& defaults) {
    GridAxis ax = defaults;
    ax.lo = cfg.get_double_or(section, prefix + "_lo", ax.lo);
    ax.hi = cfg.get_double_or(section, prefix + "_hi", ax.hi);
    const long n = cfg.get_long_or(section, prefix + "_n", static_cast<long>(ax.n));
    if (n < 1) throw ConfigError("key '" + section + "." + prefix + "_n': must be >= 1");
    ax.n = static_cast<std::size_t>(n);
    const std::string scale =
        cfg.get_string_or(section, prefix + "_scale", ax.log ? "log" : "linear");
    if (scale == "log")
        ax.log = true;
    else if (scale == "linear")
        ax.log = false;
    else
        throw ConfigError("key '" + section + "." + prefix + "_scale': expected linear or log");
    if (ax.log && !(ax.lo > 0.0))
        throw ConfigError("key '" + section + "." + prefix + "_lo': log axis requires > 0");
    if (!(ax.hi >= ax.lo)) throw ConfigError("key '" + section + "." + prefix + "_hi': hi < lo");
    return ax;
}

} // namespace ratetip
