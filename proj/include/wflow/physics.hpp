#pragma once

#include <numbers>

namespace wflow {

/// Physical constants and Caticha potential parameters.
struct PhysicsConfig {
    double hbar = 1.0;
    double mass = 0.5;
    double alpha = 0.5;    ///< asymmetry of the double well
    double delta_e = 0.5;  ///< gap between the two lowest levels
    double e0 = 0.0;       ///< ground-state energy; enters V only additively

    /// Throws ConfigError unless hbar, mass and delta_e are positive and finite.
    void validate() const;

    /// Tunnelling period T = 2*pi*hbar/delta_e.
    [[nodiscard]] double period() const { return 2.0 * std::numbers::pi * hbar / delta_e; }

    friend bool operator==(const PhysicsConfig&, const PhysicsConfig&) = default;
};

}  // namespace wflow
