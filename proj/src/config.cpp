#include "wflow/config.hpp"

#include "wflow/errors.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <vector>

namespace wflow {

namespace {

struct Key {
    const char* name;
    const char* help;
    std::function<std::string(const RunConfig&)> get;
    std::function<void(RunConfig&, const std::string&)> set;
};

std::string trim(const std::string& s)
{
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& v)
{
    double out = 0.0;
    const auto* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || ptr != end) throw ConfigError("key '" + key + "': not a number: '" + v + "'");
    return out;
}

int parse_int(const std::string& key, const std::string& v)
{
    int out = 0;
    const auto* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || ptr != end) throw ConfigError("key '" + key + "': not an integer: '" + v + "'");
    return out;
}

template <class T>
Key num(const char* name, const char* help, T RunConfig::*member)
{
    return {name, help, [member](const RunConfig& c) { return format_double(c.*member); },
            [member, name](RunConfig& c, const std::string& v) { c.*member = parse_double(name, v); }};
}

template <class S>
Key sub_num(const char* name, const char* help, S RunConfig::*outer, double S::*member)
{
    return {name, help, [=](const RunConfig& c) { return format_double(c.*outer.*member); },
            [=](RunConfig& c, const std::string& v) { c.*outer.*member = parse_double(name, v); }};
}

template <class S>
Key sub_int(const char* name, const char* help, S RunConfig::*outer, int S::*member)
{
    return {name, help, [=](const RunConfig& c) { return std::to_string(c.*outer.*member); },
            [=](RunConfig& c, const std::string& v) { c.*outer.*member = parse_int(name, v); }};
}

const std::vector<Key>& keys()
{
    static const std::vector<Key> table = {
        sub_num("physics.hbar", "reduced Planck constant", &RunConfig::physics, &PhysicsConfig::hbar),
        sub_num("physics.mass", "particle mass", &RunConfig::physics, &PhysicsConfig::mass),
        sub_num("physics.alpha", "well asymmetry, |alpha| < 1", &RunConfig::physics, &PhysicsConfig::alpha),
        sub_num("physics.delta_e", "energy gap between the two lowest states", &RunConfig::physics,
                &PhysicsConfig::delta_e),
        sub_num("physics.e0", "ground-state energy offset", &RunConfig::physics, &PhysicsConfig::e0),
        {"state", "superposition | ground | excited", [](const RunConfig& c) { return to_string(c.state); },
         [](RunConfig& c, const std::string& v) {
             try {
                 c.state = state_kind_from_string(v);
             } catch (const std::exception&) {
                 throw ConfigError("key 'state': unknown state '" + v + "'");
             }
         }},
        sub_num("grid.x_min", "lower position bound", &RunConfig::grid, &PhaseSpaceGrid::x_min),
        sub_num("grid.x_max", "upper position bound", &RunConfig::grid, &PhaseSpaceGrid::x_max),
        sub_num("grid.p_min", "lower momentum bound", &RunConfig::grid, &PhaseSpaceGrid::p_min),
        sub_num("grid.p_max", "upper momentum bound", &RunConfig::grid, &PhaseSpaceGrid::p_max),
        sub_int("grid.nx", "position samples", &RunConfig::grid, &PhaseSpaceGrid::nx),
        sub_int("grid.np", "momentum samples (even)", &RunConfig::grid, &PhaseSpaceGrid::np),
        sub_num("grid.y_half_width", "half width of the transform window in y", &RunConfig::grid,
                &PhaseSpaceGrid::y_half_width),
        sub_int("grid.ny", "transform intervals in y (even)", &RunConfig::grid, &PhaseSpaceGrid::ny),
        sub_int("flow.l_max", "highest series index", &RunConfig::flow, &FlowOptions::l_max),
        sub_num("flow.eps_rel", "relative series stopping tolerance", &RunConfig::flow, &FlowOptions::eps_rel),
        num("topology.refinement_radius", "stagnation point localisation radius", &RunConfig::refinement_radius),
        num("topology.winding_tolerance", "allowed distance of a winding sum from an integer",
            &RunConfig::winding_tolerance),
        num("time.t0_periods", "window start, in tunnelling periods", &RunConfig::t0_periods),
        num("time.t1_periods", "window end, in tunnelling periods", &RunConfig::t1_periods),
        num("time.dt_periods", "frame step, in tunnelling periods", &RunConfig::dt_periods),
        sub_num("region.x_min", "topology region lower x", &RunConfig::region, &Region::x_min),
        sub_num("region.x_max", "topology region upper x", &RunConfig::region, &Region::x_max),
        sub_num("region.p_min", "topology region lower p", &RunConfig::region, &Region::p_min),
        sub_num("region.p_max", "topology region upper p", &RunConfig::region, &Region::p_max),
        num("topology.iso_level", "|J|^2 level for iso-contour export", &RunConfig::iso_level),
        {"current.samples", "time samples per period for the barrier current",
         [](const RunConfig& c) { return std::to_string(c.current_samples); },
         [](RunConfig& c, const std::string& v) { c.current_samples = parse_int("current.samples", v); }},
        num("loop.cx", "audit ellipse centre x", &RunConfig::loop_cx),
        num("loop.cp", "audit ellipse centre p", &RunConfig::loop_cp),
        num("loop.ax", "audit ellipse semi-axis in x", &RunConfig::loop_ax),
        num("loop.ap", "audit ellipse semi-axis in p", &RunConfig::loop_ap),
        num("loop.half_window_periods", "audit times lie within this many periods of a period boundary",
            &RunConfig::loop_half_window_periods),
        {"output.dir", "output directory", [](const RunConfig& c) { return c.output_dir; },
         [](RunConfig& c, const std::string& v) { c.output_dir = v; }},
        {"output.format", "csv | json", [](const RunConfig& c) { return c.format; },
         [](RunConfig& c, const std::string& v) { c.format = v; }},
    };
    return table;
}

}  // namespace

std::string format_double(double v)
{
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) throw ConfigError("cannot format number");
    return {buf, ptr};
}

void RunConfig::validate() const
{
    physics.validate();
    grid.validate(physics.hbar);
    if (flow.l_max < 0) throw ConfigError("flow.l_max must be non-negative");
    if (!(flow.eps_rel > 0.0)) throw ConfigError("flow.eps_rel must be positive");
    if (!(refinement_radius > 0.0)) throw ConfigError("topology.refinement_radius must be positive");
    if (!(winding_tolerance > 0.0 && winding_tolerance < 0.5)) {
        throw ConfigError("topology.winding_tolerance must lie in (0, 0.5)");
    }
    if (!(t1_periods > t0_periods)) throw ConfigError("time.t1_periods must exceed time.t0_periods");
    if (!(dt_periods > 0.0) || dt_periods > 1.0 / 200.0) {
        throw ConfigError("time.dt_periods must lie in (0, 1/200]");
    }
    if (!(region.x_max > region.x_min) || !(region.p_max > region.p_min)) {
        throw ConfigError("region bounds must satisfy min < max");
    }
    if (!(iso_level > 0.0)) throw ConfigError("topology.iso_level must be positive");
    if (current_samples < 8) throw ConfigError("current.samples must be at least 8");
    if (!(loop_ax > 0.0 && loop_ap > 0.0)) throw ConfigError("loop semi-axes must be positive");
    if (format != "csv" && format != "json") throw ConfigError("output.format must be csv or json");
    if (output_dir.empty()) throw ConfigError("output.dir must not be empty");
}

RunConfig parse_config(const std::string& text)
{
    RunConfig cfg;
    std::map<std::string, const Key*> index;
    for (const auto& k : keys()) index[k.name] = &k;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = index.find(key);
        if (it == index.end()) throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        it->second->set(cfg, value);
    }
    return cfg;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string write_config(const RunConfig& cfg)
{
    std::string out;
    for (const auto& k : keys()) out += std::string(k.name) + " = " + k.get(cfg) + "\n";
    return out;
}

std::string config_hash(const RunConfig& cfg)
{
    RunConfig keyed = cfg;
    keyed.output_dir.clear();
    const std::string text = write_config(keyed);
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr);
    static const char* hex = "0123456789abcdef";
    std::string s;
    for (unsigned int i = 0; i < len; ++i) {
        s += hex[digest[i] >> 4];
        s += hex[digest[i] & 0xF];
    }
    return s;
}

std::string config_schema()
{
    const RunConfig defaults;
    std::string out;
    for (const auto& k : keys()) out += "# " + std::string(k.help) + "\n" + k.name + " = " + k.get(defaults) + "\n";
    return out;
}

}  // namespace wflow
