#pragma once

#include "wflow/config.hpp"
#include "wflow/verify.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace wflow {

enum class ExitCode : int {
    success = 0,
    verification_failed = 1,
    config_error = 2,
    non_convergence = 3,
};

struct CommandResult {
    ExitCode code = ExitCode::success;
    std::vector<std::string> files;
    std::string message;
};

/// Parses a time: "0.25T" (periods), "T/4", "T" or an absolute value.
double parse_time(const std::string& text, double period);

/// Field snapshot at time t: W, J_x, J_p, |J|^2 and the direction angle, plus a metadata sidecar.
CommandResult cmd_fields(const RunConfig& cfg, double t);

/// Barrier current over one period with a sinusoid fit.
CommandResult cmd_current(const RunConfig& cfg);

/// Tracking over the configured window, events, charge audits and |J|^2 iso-contours at snapshot_t.
CommandResult cmd_topology(const RunConfig& cfg, double snapshot_t);

/// Invariant suite; writes a JSON report and a text summary.
CommandResult cmd_verify(const RunConfig& cfg, const VerifyOptions& options = {}, std::ostream* progress = nullptr);

}  // namespace wflow
