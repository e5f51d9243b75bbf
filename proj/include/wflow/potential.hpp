#pragma once

#include "wflow/jet.hpp"
#include "wflow/physics.hpp"

#include <string>
#include <vector>

namespace wflow {

/// Highest derivative order carried by potential jets. The default flow
/// truncation (l_max = 20) needs odd derivatives up to order 41.
inline constexpr int kDefaultMaxJetOrder = 41;

/// A smooth one-dimensional potential with Taylor expansions of arbitrary order.
class Potential {
public:
    explicit Potential(int max_order) : max_order_(max_order) {}
    virtual ~Potential() = default;

    [[nodiscard]] virtual double value(double x) const = 0;
    /// Normalised Taylor coefficients V^(k)(x)/k! for k = 0..order.
    /// Throws UnsupportedOrder if order exceeds max_order().
    [[nodiscard]] virtual Jet taylor(double x, int order) const = 0;
    [[nodiscard]] virtual std::string name() const = 0;

    [[nodiscard]] int max_order() const { return max_order_; }

protected:
    void check_order(int order) const;

private:
    int max_order_;
};

/// Caticha's asymmetric double well:
///   V = 1 + E0 + 3/2 dE - dE a sinh 2x
///       + cosh^2 x (dE^2/4 a sinh 2x - dE^2/4 - 2 dE) + dE^2/4 (a^2 + 1) cosh^4 x
class CatichaPotential final : public Potential {
public:
    explicit CatichaPotential(const PhysicsConfig& cfg, int max_order = kDefaultMaxJetOrder);

    [[nodiscard]] double value(double x) const override;
    [[nodiscard]] Jet taylor(double x, int order) const override;
    [[nodiscard]] std::string name() const override { return "caticha"; }

    [[nodiscard]] const PhysicsConfig& config() const { return cfg_; }

private:
    PhysicsConfig cfg_;
};

/// V = m omega^2 x^2 / 2. Its third and higher derivatives vanish identically.
class HarmonicPotential final : public Potential {
public:
    HarmonicPotential(double mass, double omega, int max_order = kDefaultMaxJetOrder);

    [[nodiscard]] double value(double x) const override;
    [[nodiscard]] Jet taylor(double x, int order) const override;
    [[nodiscard]] std::string name() const override { return "harmonic"; }

    [[nodiscard]] double omega() const { return omega_; }

private:
    double mass_;
    double omega_;
};

/// Caticha potential value. Throws DomainOverflow when cosh^4 x overflows.
double eval_potential(double x, const PhysicsConfig& cfg);

/// order-th derivative of V at x, exact to round-off via jet arithmetic.
double potential_derivative(double x, int order, const Potential& potential);

enum class ExtremumKind { minimum, maximum };

struct Extremum {
    double x;
    ExtremumKind kind;
};

/// All sign changes of V' on [x_lo, x_hi], bracketed by a uniform pre-scan and
/// bisected to |dx| < 1e-8. Kind follows the sign of V''.
std::vector<Extremum> find_extrema(double x_lo, double x_hi, const Potential& potential,
                                   double scan_step = 1e-3);

/// Left well minimum, barrier top and right well minimum of a double well.
struct WellLandmarks {
    double left_minimum;
    double barrier;
    double right_minimum;
};

/// Picks the outermost minima and the maximum between them. Throws Error if
/// the interval does not contain a min-max-min pattern.
WellLandmarks locate_landmarks(const Potential& potential, double x_lo = -4.0, double x_hi = 3.0);

}  // namespace wflow
