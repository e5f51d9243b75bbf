#pragma once

#include "wflow/flow.hpp"
#include "wflow/grid.hpp"
#include "wflow/physics.hpp"
#include "wflow/states.hpp"
#include "wflow/topology.hpp"

#include <iosfwd>
#include <string>

namespace wflow {

inline constexpr const char* kToolName = "wflow";
inline constexpr const char* kToolVersion = "1.0.0";

/// Everything a run needs. Times are stored in units of the tunnelling period
/// so that the defaults follow changes of the energy gap.
struct RunConfig {
    PhysicsConfig physics;
    PhaseSpaceGrid grid;
    FlowOptions flow;
    StateKind state = StateKind::superposition;

    double refinement_radius = 1e-4;
    double winding_tolerance = 0.05;

    double t0_periods = 0.0;
    double t1_periods = 1.1;
    double dt_periods = 0.002;

    Region region;
    double iso_level = 3e-5;
    int current_samples = 64;

    /// Fixed loop (ellipse) used for the charge audit around the pair that
    /// annihilates and re-forms near the barrier.
    double loop_cx = 0.17;
    double loop_cp = 0.0;
    double loop_ax = 0.38;
    double loop_ap = 0.09;
    /// The audit runs at frame times within this many periods of a period boundary.
    double loop_half_window_periods = 0.2;

    std::string output_dir = "wflow_out";
    std::string format = "csv";

    /// Throws ConfigError (or GridInsufficient for an unresolvable y-lattice).
    void validate() const;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Flat "key = value" text; '#' starts a comment. Unknown keys and malformed
/// values raise ConfigError. Keys absent from the text keep their defaults.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Canonical serialisation: every key, fixed order, shortest round-trip numbers.
std::string write_config(const RunConfig& cfg);

/// SHA-256 (hex) of the canonical serialisation, output directory excluded.
std::string config_hash(const RunConfig& cfg);

/// Documentation of every key: name, default and meaning.
std::string config_schema();

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

}  // namespace wflow
