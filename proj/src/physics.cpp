#include "wflow/physics.hpp"

#include "wflow/errors.hpp"

#include <cmath>

namespace wflow {

void PhysicsConfig::validate() const
{
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!positive(hbar)) throw ConfigError("hbar must be positive");
    if (!positive(mass)) throw ConfigError("mass must be positive");
    if (!positive(delta_e)) throw ConfigError("delta_e must be positive");
    if (!std::isfinite(alpha) || !std::isfinite(e0)) throw ConfigError("alpha and e0 must be finite");
}

}  // namespace wflow
