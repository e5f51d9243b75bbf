#pragma once

#include "wflow/physics.hpp"
#include "wflow/potential.hpp"

#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace wflow {

/// Which pure state of the two-level subspace is being analysed.
///   superposition:  Psi = (psi0 e^{-i E0 t} - psi1 e^{-i (E0 + dE) t}) / sqrt 2
///   ground/excited: the stationary eigenstates psi0 / psi1
enum class StateKind { superposition, ground, excited };

std::string to_string(StateKind kind);
StateKind state_kind_from_string(const std::string& name);

/// Coefficients of rho(a, b; t) in the real eigenfunction products:
///   rho = w00 psi0 psi0 + w11 psi1 psi1 + w_re (cross, even) + w_im (cross, odd).
/// W(t) = w00 W00 + w11 W11 + w_re W01_re + w_im W01_im.
struct SuperpositionWeights {
    double w00;
    double w11;
    double w_re;
    double w_im;
    double t;
};

/// Weights of the balanced superposition: (1/2, 1/2, -cos(dE t/hbar), -sin(dE t/hbar)).
SuperpositionWeights superposition_weights(double t, double delta_e, double hbar);
/// Weights for any StateKind; stationary states have constant weights.
SuperpositionWeights state_weights(StateKind kind, double t, double delta_e, double hbar);

/// The two lowest eigenstates of a potential, real and normalised.
///
/// Sign convention: both normalisation constants are positive, so psi0 > 0
/// everywhere and psi1 is positive to the right of its node.
class EigenstatePair {
public:
    virtual ~EigenstatePair() = default;

    [[nodiscard]] virtual double psi0(double x) const = 0;
    [[nodiscard]] virtual double psi1(double x) const = 0;
    [[nodiscard]] virtual double dpsi0(double x) const = 0;
    [[nodiscard]] virtual double dpsi1(double x) const = 0;

    [[nodiscard]] virtual const Potential& potential() const = 0;
    [[nodiscard]] virtual double hbar() const = 0;
    [[nodiscard]] virtual double mass() const = 0;
    [[nodiscard]] virtual double ground_energy() const = 0;
    [[nodiscard]] virtual double gap() const = 0;
    /// Interval outside which both densities are negligible (< 1e-30).
    [[nodiscard]] virtual std::pair<double, double> support() const = 0;
    [[nodiscard]] virtual std::string description() const = 0;

    [[nodiscard]] double period() const;

    /// Psi(x; t) for the given state, global phase e^{-i E0 t/hbar} dropped.
    [[nodiscard]] std::complex<double> wavefunction(double x, double t, StateKind kind) const;
    /// |Psi(x;t)|^2 from the real-function algebra: 1/2 psi0^2 + 1/2 psi1^2 - cos(theta) psi0 psi1.
    [[nodiscard]] double position_density(double x, double t, StateKind kind) const;
    /// (hbar/m) Im(Psi* dPsi/dx); for the superposition (hbar/2m) sin(theta) (psi0 psi1' - psi0' psi1).
    [[nodiscard]] double probability_current(double x, double t, StateKind kind) const;
};

/// psi0 = N0 cosh(x) exp[-(dE/4)(cosh^2 x + a x + (a/2) sinh 2x)],  psi1 = N1 (a + tanh x) psi0 / N0.
///
/// Exact eigenstates of CatichaPotential when hbar^2/(2m) = 1 (the construction's
/// units); other hbar, m combinations are rejected with ConfigError.
class CatichaEigenstates final : public EigenstatePair {
public:
    explicit CatichaEigenstates(const PhysicsConfig& cfg, int max_jet_order = kDefaultMaxJetOrder);

    [[nodiscard]] double psi0(double x) const override;
    [[nodiscard]] double psi1(double x) const override;
    [[nodiscard]] double dpsi0(double x) const override;
    [[nodiscard]] double dpsi1(double x) const override;

    [[nodiscard]] const Potential& potential() const override { return potential_; }
    [[nodiscard]] double hbar() const override { return cfg_.hbar; }
    [[nodiscard]] double mass() const override { return cfg_.mass; }
    [[nodiscard]] double ground_energy() const override { return cfg_.e0; }
    [[nodiscard]] double gap() const override { return cfg_.delta_e; }
    [[nodiscard]] std::pair<double, double> support() const override { return {-6.0, 5.0}; }
    [[nodiscard]] std::string description() const override;

    [[nodiscard]] double norm0() const { return norm0_; }
    [[nodiscard]] double norm1() const { return norm1_; }
    /// Node of psi1: x* = -atanh(alpha).
    [[nodiscard]] double node() const { return -std::atanh(cfg_.alpha); }

private:
    /// Unnormalised ground-state shape, evaluated in log space so that both
    /// tails underflow to zero instead of producing inf * 0.
    [[nodiscard]] double shape(double x) const;
    [[nodiscard]] double log_shape_slope(double x) const;

    PhysicsConfig cfg_;
    CatichaPotential potential_;
    double norm0_ = 1.0;
    double norm1_ = 1.0;
};

/// Ground and first excited state of V = m omega^2 x^2 / 2.
class HarmonicEigenstates final : public EigenstatePair {
public:
    HarmonicEigenstates(double hbar, double mass, double omega, int max_jet_order = kDefaultMaxJetOrder);

    [[nodiscard]] double psi0(double x) const override;
    [[nodiscard]] double psi1(double x) const override;
    [[nodiscard]] double dpsi0(double x) const override;
    [[nodiscard]] double dpsi1(double x) const override;

    [[nodiscard]] const Potential& potential() const override { return potential_; }
    [[nodiscard]] double hbar() const override { return hbar_; }
    [[nodiscard]] double mass() const override { return mass_; }
    [[nodiscard]] double ground_energy() const override { return 0.5 * hbar_ * omega_; }
    [[nodiscard]] double gap() const override { return hbar_ * omega_; }
    [[nodiscard]] std::pair<double, double> support() const override;
    [[nodiscard]] std::string description() const override;

private:
    double hbar_;
    double mass_;
    double omega_;
    double width_;  ///< sqrt(hbar / (m omega))
    HarmonicPotential potential_;
};

/// Integral of f over [lo, hi] by adaptive Gauss-Kronrod quadrature.
double integrate(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-14);

/// Overlap <psi0|psi1> on the support interval.
double eigenstate_overlap(const EigenstatePair& states);
/// Integral of psi_n^2 on the support interval (n = 0 or 1).
double eigenstate_norm(const EigenstatePair& states, int n);

/// phi(p; t) = (2 pi hbar)^{-1/2} int Psi(x; t) e^{-i p x/hbar} dx on the given momenta,
/// evaluated as a direct discrete transform over a uniform x-lattice of the support.
///
/// Throws GridInsufficient when the momenta, treated as a uniform lattice, hold
/// less than 1 - 1e-4 of the probability (leakage).
std::vector<std::complex<double>> momentum_wavefunction(const EigenstatePair& states, std::span<const double> p,
                                                        double t, StateKind kind = StateKind::superposition,
                                                        int x_samples = 8192);

}  // namespace wflow
