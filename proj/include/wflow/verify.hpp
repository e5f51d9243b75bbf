#pragma once

#include "wflow/config.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace wflow {

/// One measured quantity against its tolerance.
struct Check {
    std::string id;
    std::string description;
    double measured = 0.0;
    double tolerance = 0.0;
    std::string relation;  ///< "<", "<=", ">", ">=", "=="
    bool passed = false;
    std::string note;
};

struct VerifyReport {
    std::vector<Check> checks;

    [[nodiscard]] bool passed() const;
    [[nodiscard]] std::size_t failures() const;
    /// One line per check.
    [[nodiscard]] std::string summary() const;
};

struct VerifyOptions {
    /// Continuity self-convergence needs a second basis at twice the resolution.
    bool refinement_study = true;
    /// Frame-by-frame tracking over the configured time window.
    bool tracking = true;
    std::uint64_t seed = 0x5eed;
};

/// Runs the invariant suite for a configuration. Computation errors other than
/// configuration problems are reported as failed checks, never thrown.
VerifyReport run_verification(const RunConfig& cfg, const VerifyOptions& options = {},
                              const std::function<void(const Check&)>& on_check = {});

/// Builds a check, evaluating the relation.
Check make_check(std::string id, std::string description, double measured, std::string relation, double tolerance,
                 std::string note = {});

}  // namespace wflow
