#include "wflow/potential.hpp"

#include "wflow/errors.hpp"

#include <cmath>
#include <string>

namespace wflow {

void Potential::check_order(int order) const
{
    if (order < 0 || order > max_order_) {
        throw UnsupportedOrder("derivative order " + std::to_string(order) + " exceeds jet capacity " +
                               std::to_string(max_order_));
    }
}

CatichaPotential::CatichaPotential(const PhysicsConfig& cfg, int max_order) : Potential(max_order), cfg_(cfg)
{
    cfg_.validate();
}

double CatichaPotential::value(double x) const
{
    const double a = cfg_.alpha;
    const double de = cfg_.delta_e;
    const double q = 0.25 * de * de;
    const double c = std::cosh(x);
    const double c2 = c * c;
    const double s2 = std::sinh(2.0 * x);
    const double v = 1.0 + cfg_.e0 + 1.5 * de - de * a * s2 + c2 * (q * a * s2 - q - 2.0 * de) +
                     q * (a * a + 1.0) * c2 * c2;
    if (!std::isfinite(v)) throw DomainOverflow("Caticha potential overflows at x = " + std::to_string(x));
    return v;
}

Jet CatichaPotential::taylor(double x, int order) const
{
    check_order(order);
    const double a = cfg_.alpha;
    const double de = cfg_.delta_e;
    const double q = 0.25 * de * de;

    const Jet arg = Jet::variable(x, order);
    const Jet s2 = sinh(2.0 * arg);
    const Jet c = cosh(arg);
    const Jet c2 = c * c;
    const Jet c4 = c2 * c2;

    Jet v = (-de * a) * s2 + c2 * ((q * a) * s2 - (q + 2.0 * de)) + (q * (a * a + 1.0)) * c4;
    v += 1.0 + cfg_.e0 + 1.5 * de;
    if (!v.all_finite()) throw DomainOverflow("Caticha potential jet overflows at x = " + std::to_string(x));
    return v;
}

HarmonicPotential::HarmonicPotential(double mass, double omega, int max_order)
    : Potential(max_order), mass_(mass), omega_(omega)
{
    if (!(mass > 0.0) || !(omega > 0.0)) throw ConfigError("harmonic potential needs positive mass and omega");
}

double HarmonicPotential::value(double x) const { return 0.5 * mass_ * omega_ * omega_ * x * x; }

Jet HarmonicPotential::taylor(double x, int order) const
{
    check_order(order);
    const Jet arg = Jet::variable(x, order);
    return (0.5 * mass_ * omega_ * omega_) * (arg * arg);
}

double eval_potential(double x, const PhysicsConfig& cfg) { return CatichaPotential(cfg, 0).value(x); }

double potential_derivative(double x, int order, const Potential& potential)
{
    return potential.taylor(x, order).derivative(order);
}

namespace {

double slope(const Potential& potential, double x) { return potential.taylor(x, 1)[1]; }

}  // namespace

std::vector<Extremum> find_extrema(double x_lo, double x_hi, const Potential& potential, double scan_step)
{
    if (!(x_lo < x_hi)) throw ConfigError("find_extrema needs x_lo < x_hi");
    std::vector<Extremum> out;
    const auto steps = static_cast<long>(std::ceil((x_hi - x_lo) / scan_step));
    double a = x_lo;
    double fa = slope(potential, a);
    for (long i = 1; i <= steps; ++i) {
        const double b = (i == steps) ? x_hi : x_lo + static_cast<double>(i) * scan_step;
        const double fb = slope(potential, b);
        if (fa == 0.0 || (fa < 0.0) != (fb < 0.0)) {
            double lo = a;
            double hi = b;
            double flo = fa;
            while (hi - lo >= 1e-8) {
                const double mid = 0.5 * (lo + hi);
                const double fm = slope(potential, mid);
                if ((fm < 0.0) == (flo < 0.0) && fm != 0.0) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            const double x = 0.5 * (lo + hi);
            const double curvature = potential.taylor(x, 2)[2];
            const bool duplicate = !out.empty() && std::abs(out.back().x - x) < 2.0 * scan_step;
            if (!duplicate) {
                out.push_back({x, curvature > 0.0 ? ExtremumKind::minimum : ExtremumKind::maximum});
            }
        }
        a = b;
        fa = fb;
    }
    return out;
}

WellLandmarks locate_landmarks(const Potential& potential, double x_lo, double x_hi)
{
    const auto extrema = find_extrema(x_lo, x_hi, potential);
    const Extremum* left = nullptr;
    const Extremum* right = nullptr;
    for (const auto& e : extrema) {
        if (e.kind != ExtremumKind::minimum) continue;
        if (left == nullptr) left = &e;
        right = &e;
    }
    if (left == nullptr || left == right) throw Error("no double-well minima found in the search interval");
    for (const auto& e : extrema) {
        if (e.kind == ExtremumKind::maximum && e.x > left->x && e.x < right->x) {
            return {left->x, e.x, right->x};
        }
    }
    throw Error("no barrier maximum between the well minima");
}

}  // namespace wflow
