#include "wflow/errors.hpp"
#include "wflow/potential.hpp"

#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

using namespace wflow;

namespace {

double richardson(const std::function<double(double)>& f, double x, double h)
{
    const auto d = [&](double s) { return (f(x + s) - f(x - s)) / (2.0 * s); };
    return (4.0 * d(0.5 * h) - d(h)) / 3.0;
}

/// V = E0 + u'' + u'^2 with u = log psi0 of the closed-form ground state.
double potential_from_ground_state(double x, const PhysicsConfig& c)
{
    const double q = c.delta_e / 4.0;
    const double a = c.alpha;
    const double u1 = std::tanh(x) - q * (std::sinh(2.0 * x) + a + a * std::cosh(2.0 * x));
    const double u2 = 1.0 / (std::cosh(x) * std::cosh(x)) - q * (2.0 * std::cosh(2.0 * x) + 2.0 * a * std::sinh(2.0 * x));
    return c.e0 + u2 + u1 * u1;
}

}  // namespace

TEST_CASE("jet arithmetic")
{
    const Jet x = Jet::variable(0.3, 8);
    const Jet e = exp(x);
    for (int k = 0; k <= 8; ++k) CHECK(e.derivative(k) == doctest::Approx(std::exp(0.3)).epsilon(1e-14));

    const auto [s, c] = sinh_cosh(2.0 * x);
    const Jet one = c * c - s * s;
    CHECK(one[0] == doctest::Approx(1.0).epsilon(1e-14));
    for (int k = 1; k <= 8; ++k) CHECK(std::abs(one[k]) < 1e-9 * std::pow(2.0, k));

    const Jet prod = (x * x) * x;
    CHECK(prod.derivative(3) == doctest::Approx(6.0));
    CHECK(prod.derivative(4) == 0.0);

    const Jet shortj = Jet::variable(0.3, 3);
    CHECK((x * shortj).order() == 3);
    CHECK(factorial(5) == 120.0);
}

TEST_CASE("potential matches the ground-state construction")
{
    PhysicsConfig cfg;
    const CatichaPotential pot(cfg);
    for (double x = -3.0; x <= 2.5; x += 0.37) {
        CHECK(pot.value(x) == doctest::Approx(potential_from_ground_state(x, cfg)).epsilon(1e-12));
        CHECK(eval_potential(x, cfg) == doctest::Approx(pot.value(x)).epsilon(1e-15));
    }
}

TEST_CASE("jet derivatives agree with Richardson differences")
{
    const CatichaPotential pot(PhysicsConfig{});
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-3.0, 2.5);
    for (int s = 0; s < 40; ++s) {
        const double x = u(rng);
        for (int n = 1; n <= 5; ++n) {
            const double jet = potential_derivative(x, n, pot);
            const double fd = richardson([&](double z) { return potential_derivative(z, n - 1, pot); }, x, 1e-3);
            CHECK(std::abs(jet - fd) <= 1e-6 * std::max(1.0, std::abs(jet)));
        }
    }
}

TEST_CASE("well landmarks")
{
    const CatichaPotential pot(PhysicsConfig{});
    const auto m = locate_landmarks(pot, -4.0, 3.0);
    CHECK(std::abs(m.left_minimum - -2.095) < 0.005);
    CHECK(std::abs(m.barrier - -0.258) < 0.005);
    CHECK(std::abs(m.right_minimum - 1.514) < 0.005);
    CHECK(std::abs(potential_derivative(m.barrier, 1, pot)) < 1e-6);
    CHECK(potential_derivative(m.barrier, 2, pot) < 0.0);
    CHECK(potential_derivative(m.left_minimum, 2, pot) > 0.0);

    const auto ext = find_extrema(-4.0, 3.0, pot);
    REQUIRE(ext.size() == 3);
    CHECK(ext[0].kind == ExtremumKind::minimum);
    CHECK(ext[1].kind == ExtremumKind::maximum);
    CHECK(ext[2].kind == ExtremumKind::minimum);
}

TEST_CASE("energy offset only shifts the value")
{
    PhysicsConfig a;
    PhysicsConfig b;
    b.e0 = -3.25;
    const CatichaPotential pa(a);
    const CatichaPotential pb(b);
    CHECK(pb.value(0.4) - pa.value(0.4) == doctest::Approx(-3.25));
    for (int n = 1; n <= 7; ++n) CHECK(potential_derivative(0.4, n, pa) == potential_derivative(0.4, n, pb));
}

TEST_CASE("harmonic potential has no third derivative")
{
    const HarmonicPotential h(1.0, 2.0);
    CHECK(h.value(1.5) == doctest::Approx(0.5 * 4.0 * 2.25));
    CHECK(potential_derivative(0.7, 2, h) == doctest::Approx(4.0));
    for (int n = 3; n <= 9; ++n) CHECK(potential_derivative(0.7, n, h) == 0.0);
    CHECK_THROWS_AS(HarmonicPotential(-1.0, 1.0), ConfigError);
}

TEST_CASE("potential error paths")
{
    const CatichaPotential pot(PhysicsConfig{}, 9);
    CHECK_THROWS_AS((void)pot.taylor(0.0, 10), UnsupportedOrder);
    CHECK_THROWS_AS((void)eval_potential(400.0, PhysicsConfig{}), DomainOverflow);
    CHECK_THROWS_AS((void)find_extrema(1.0, 0.0, pot), ConfigError);
    const HarmonicPotential h(1.0, 1.0);
    CHECK_THROWS_AS((void)locate_landmarks(h, -2.0, 2.0), Error);
}
