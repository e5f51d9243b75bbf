#include "wflow/states.hpp"

#include "wflow/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>
#include <sstream>

namespace wflow {

std::string to_string(StateKind kind)
{
    switch (kind) {
    case StateKind::superposition: return "superposition";
    case StateKind::ground: return "ground";
    case StateKind::excited: return "excited";
    }
    return "unknown";
}

StateKind state_kind_from_string(const std::string& name)
{
    if (name == "superposition") return StateKind::superposition;
    if (name == "ground" || name == "psi0") return StateKind::ground;
    if (name == "excited" || name == "psi1") return StateKind::excited;
    throw ConfigError("unknown state '" + name + "' (expected superposition, ground or excited)");
}

SuperpositionWeights superposition_weights(double t, double delta_e, double hbar)
{
    const double theta = delta_e * t / hbar;
    return {0.5, 0.5, -std::cos(theta), -std::sin(theta), t};
}

SuperpositionWeights state_weights(StateKind kind, double t, double delta_e, double hbar)
{
    switch (kind) {
    case StateKind::ground: return {1.0, 0.0, 0.0, 0.0, t};
    case StateKind::excited: return {0.0, 1.0, 0.0, 0.0, t};
    case StateKind::superposition: break;
    }
    return superposition_weights(t, delta_e, hbar);
}

double EigenstatePair::period() const { return 2.0 * std::numbers::pi * hbar() / gap(); }

std::complex<double> EigenstatePair::wavefunction(double x, double t, StateKind kind) const
{
    switch (kind) {
    case StateKind::ground: return psi0(x);
    case StateKind::excited: return psi1(x);
    case StateKind::superposition: break;
    }
    const double theta = gap() * t / hbar();
    const std::complex<double> phase = std::polar(1.0, -theta);
    return (psi0(x) - psi1(x) * phase) / std::numbers::sqrt2;
}

double EigenstatePair::position_density(double x, double t, StateKind kind) const
{
    const double a = psi0(x);
    const double b = psi1(x);
    switch (kind) {
    case StateKind::ground: return a * a;
    case StateKind::excited: return b * b;
    case StateKind::superposition: break;
    }
    const double theta = gap() * t / hbar();
    return 0.5 * a * a + 0.5 * b * b - std::cos(theta) * a * b;
}

double EigenstatePair::probability_current(double x, double t, StateKind kind) const
{
    if (kind != StateKind::superposition) return 0.0;
    const double theta = gap() * t / hbar();
    const double wronskian = psi0(x) * dpsi1(x) - dpsi0(x) * psi1(x);
    return 0.5 * hbar() / mass() * std::sin(theta) * wronskian;
}

double integrate(const std::function<double(double)>& f, double lo, double hi, double tol)
{
    using boost::math::quadrature::gauss_kronrod;
    return gauss_kronrod<double, 61>::integrate(f, lo, hi, 15, tol);
}

double eigenstate_overlap(const EigenstatePair& states)
{
    const auto [lo, hi] = states.support();
    return integrate([&](double x) { return states.psi0(x) * states.psi1(x); }, lo, hi);
}

double eigenstate_norm(const EigenstatePair& states, int n)
{
    const auto [lo, hi] = states.support();
    if (n == 0) return integrate([&](double x) { return states.psi0(x) * states.psi0(x); }, lo, hi);
    return integrate([&](double x) { return states.psi1(x) * states.psi1(x); }, lo, hi);
}

// ---------------------------------------------------------------------------
// Caticha eigenstates

CatichaEigenstates::CatichaEigenstates(const PhysicsConfig& cfg, int max_jet_order)
    : cfg_(cfg), potential_(cfg, max_jet_order)
{
    if (std::abs(cfg.alpha) >= 1.0) {
        throw InvalidAsymmetry("|alpha| must be < 1 for normalisable Caticha eigenstates");
    }
    const double units = cfg.hbar * cfg.hbar / (2.0 * cfg.mass);
    if (std::abs(units - 1.0) > 1e-12) {
        throw ConfigError("Caticha closed-form eigenstates require hbar^2/(2m) = 1");
    }
    const auto [lo, hi] = support();
    const double n0 = integrate([this](double x) { return shape(x) * shape(x); }, lo, hi);
    const double n1 = integrate(
        [this](double x) {
            const double f = (cfg_.alpha + std::tanh(x)) * shape(x);
            return f * f;
        },
        lo, hi);
    norm0_ = 1.0 / std::sqrt(n0);
    norm1_ = 1.0 / std::sqrt(n1);
}

double CatichaEigenstates::shape(double x) const
{
    const double a = cfg_.alpha;
    const double ax = std::abs(x);
    const double log_cosh = ax + std::log1p(std::exp(-2.0 * ax)) - std::numbers::ln2;
    // cosh^2 x + (a/2) sinh 2x = [(1+a) e^{2x} + (1-a) e^{-2x} + 2] / 4
    const double bracket = 0.25 * ((1.0 + a) * std::exp(2.0 * x) + (1.0 - a) * std::exp(-2.0 * x) + 2.0) + a * x;
    return std::exp(log_cosh - 0.25 * cfg_.delta_e * bracket);
}

double CatichaEigenstates::log_shape_slope(double x) const
{
    const double a = cfg_.alpha;
    return std::tanh(x) - 0.25 * cfg_.delta_e * (std::sinh(2.0 * x) + a + a * std::cosh(2.0 * x));
}

double CatichaEigenstates::psi0(double x) const { return norm0_ * shape(x); }

double CatichaEigenstates::psi1(double x) const { return norm1_ * (cfg_.alpha + std::tanh(x)) * shape(x); }

double CatichaEigenstates::dpsi0(double x) const
{
    const double s = shape(x);
    if (s == 0.0) return 0.0;
    return norm0_ * s * log_shape_slope(x);
}

double CatichaEigenstates::dpsi1(double x) const
{
    const double s = shape(x);
    if (s == 0.0) return 0.0;
    const double sech = 1.0 / std::cosh(x);
    return norm1_ * s * (sech * sech + (cfg_.alpha + std::tanh(x)) * log_shape_slope(x));
}

std::string CatichaEigenstates::description() const
{
    std::ostringstream os;
    os.precision(17);
    os << "Caticha eigenstates (alpha=" << cfg_.alpha << ", delta_e=" << cfg_.delta_e << ", norm0=" << norm0_
       << ", norm1=" << norm1_ << ", both normalisation constants positive)";
    return os.str();
}

// ---------------------------------------------------------------------------
// Harmonic eigenstates

HarmonicEigenstates::HarmonicEigenstates(double hbar, double mass, double omega, int max_jet_order)
    : hbar_(hbar), mass_(mass), omega_(omega), width_(std::sqrt(hbar / (mass * omega))),
      potential_(mass, omega, max_jet_order)
{
    if (!(hbar > 0.0)) throw ConfigError("hbar must be positive");
}

double HarmonicEigenstates::psi0(double x) const
{
    const double u = x / width_;
    return std::exp(-0.5 * u * u) / std::sqrt(width_ * std::sqrt(std::numbers::pi));
}

double HarmonicEigenstates::psi1(double x) const { return std::numbers::sqrt2 * (x / width_) * psi0(x); }

double HarmonicEigenstates::dpsi0(double x) const { return -x / (width_ * width_) * psi0(x); }

double HarmonicEigenstates::dpsi1(double x) const
{
    const double u = x / width_;
    return std::numbers::sqrt2 / width_ * (1.0 - u * u) * psi0(x);
}

std::pair<double, double> HarmonicEigenstates::support() const { return {-10.0 * width_, 10.0 * width_}; }

std::string HarmonicEigenstates::description() const
{
    std::ostringstream os;
    os.precision(17);
    os << "harmonic eigenstates (omega=" << omega_ << ", width=" << width_ << ")";
    return os.str();
}

// ---------------------------------------------------------------------------

std::vector<std::complex<double>> momentum_wavefunction(const EigenstatePair& states, std::span<const double> p,
                                                        double t, StateKind kind, int x_samples)
{
    const auto [lo, hi] = states.support();
    const double dx = (hi - lo) / (x_samples - 1);
    std::vector<std::complex<double>> psi(static_cast<std::size_t>(x_samples));
    std::vector<double> xs(psi.size());
    for (int i = 0; i < x_samples; ++i) {
        xs[static_cast<std::size_t>(i)] = lo + i * dx;
        psi[static_cast<std::size_t>(i)] = states.wavefunction(xs[static_cast<std::size_t>(i)], t, kind);
    }
    // end points carry negligible density, so plain sums are the trapezoid rule
    const double hbar = states.hbar();
    const double scale = dx / std::sqrt(2.0 * std::numbers::pi * hbar);
    std::vector<std::complex<double>> phi(p.size());
    for (std::size_t k = 0; k < p.size(); ++k) {
        std::complex<double> acc = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) acc += psi[i] * std::polar(1.0, -p[k] * xs[i] / hbar);
        phi[k] = acc * scale;
    }
    if (p.size() >= 2) {
        const double dp = (p.back() - p.front()) / static_cast<double>(p.size() - 1);
        double mass = 0.0;
        for (std::size_t k = 0; k < p.size(); ++k) {
            const double w = (k == 0 || k + 1 == p.size()) ? 0.5 : 1.0;
            mass += w * std::norm(phi[k]);
        }
        mass *= dp;
        if (1.0 - mass > 1e-4) {
            throw GridInsufficient("momentum lattice holds only " + std::to_string(mass) +
                                   " of the momentum probability");
        }
    }
    return phi;
}

}  // namespace wflow
