#include "wflow/commands.hpp"
#include "wflow/errors.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

namespace {

struct Flags {
    std::string config_path;
    std::optional<std::string> time;
    std::optional<std::string> out;
    std::optional<double> iso;
    std::optional<std::string> format;
};

void add_common(CLI::App* cmd, Flags& flags)
{
    cmd->add_option("--config", flags.config_path, "configuration file (key = value)");
    cmd->add_option("--out", flags.out, "output directory");
    cmd->add_option("--format", flags.format, "output format")->check(CLI::IsMember({"csv", "json"}));
}

wflow::RunConfig resolve(const Flags& flags, bool defer_grid_check)
{
    wflow::RunConfig cfg = flags.config_path.empty() ? wflow::RunConfig{} : wflow::load_config(flags.config_path);
    if (flags.out) cfg.output_dir = *flags.out;
    if (flags.iso) cfg.iso_level = *flags.iso;
    if (flags.format) cfg.format = *flags.format;
    try {
        cfg.validate();
    } catch (const wflow::GridInsufficient&) {
        if (!defer_grid_check) throw;
    }
    return cfg;
}

int report(const wflow::CommandResult& r)
{
    for (const auto& f : r.files) std::cout << f << "\n";
    if (!r.message.empty()) {
        (r.code == wflow::ExitCode::success ? std::cout : std::cerr) << r.message << (r.message.ends_with('\n') ? "" : "\n");
    }
    return static_cast<int>(r.code);
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Wigner phase-space flow of a double-well tunnelling state"};
    app.set_version_flag("--version", std::string(wflow::kToolName) + " " + wflow::kToolVersion);
    app.require_subcommand(1);
    Flags flags;

    auto* fields = app.add_subcommand("fields", "export W, J_x, J_p, |J|^2 and direction at one time");
    add_common(fields, flags);
    fields->add_option("--time", flags.time, "time: absolute, '0.25T' or 'T/4' (default T/4)");

    auto* current = app.add_subcommand("current", "barrier current over one period with sinusoid fit");
    add_common(current, flags);

    auto* topology = app.add_subcommand("topology", "stagnation-point tracking, events and iso-contours");
    add_common(topology, flags);
    topology->add_option("--time", flags.time, "iso-contour snapshot time (default T/4)");
    topology->add_option("--iso", flags.iso, "|J|^2 iso-contour level");

    auto* verify = app.add_subcommand("verify", "run the invariant and acceptance suite");
    add_common(verify, flags);
    bool quick = false;
    verify->add_flag("--quick", quick, "skip the grid-doubling study and time tracking");

    auto* schema = app.add_subcommand("schema", "print the configuration keys and defaults");
    auto* dump = app.add_subcommand("config", "print the effective configuration");
    dump->add_option("--config", flags.config_path, "configuration file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : static_cast<int>(wflow::ExitCode::config_error);
    }

    try {
        if (schema->parsed()) {
            std::cout << wflow::config_schema();
            return 0;
        }
        const wflow::RunConfig cfg = resolve(flags, verify->parsed());
        if (dump->parsed()) {
            std::cout << wflow::write_config(cfg);
            return 0;
        }
        const double T = cfg.physics.period();
        const double t = flags.time ? wflow::parse_time(*flags.time, T) : 0.25 * T;
        if (fields->parsed()) return report(wflow::cmd_fields(cfg, t));
        if (current->parsed()) return report(wflow::cmd_current(cfg));
        if (topology->parsed()) return report(wflow::cmd_topology(cfg, t));
        if (verify->parsed()) {
            wflow::VerifyOptions opts;
            opts.refinement_study = !quick;
            opts.tracking = !quick;
            return report(wflow::cmd_verify(cfg, opts, &std::cerr));
        }
    } catch (const wflow::GridInsufficient& e) {
        std::cerr << "grid-insufficient: " << e.what() << "\n";
        return static_cast<int>(wflow::ExitCode::config_error);
    } catch (const wflow::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return static_cast<int>(wflow::ExitCode::config_error);
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return static_cast<int>(wflow::ExitCode::non_convergence);
    }
    return 0;
}
