#pragma once

#include "wflow/grid.hpp"
#include "wflow/states.hpp"
#include "wflow/wigner.hpp"

#include <span>
#include <vector>

namespace wflow {

struct FlowOptions {
    int l_max = 20;
    double eps_rel = 1e-8;

    friend bool operator==(const FlowOptions&, const FlowOptions&) = default;
};

/// Wigner flow J = (J_x, J_p) sampled on the grid at one instant.
struct FlowField {
    PhaseSpaceGrid grid;
    double t = 0.0;
    double mass = 1.0;
    Field2D w;
    Field2D jx;
    Field2D jp;
    /// Per x-column: highest series index l whose term was still significant.
    std::vector<int> terms_used;
    /// Per x-column: stopping rule met before l_max.
    std::vector<bool> column_converged;
    bool converged = true;
    /// Max over columns of (last evaluated term) / max|J_p| in that column.
    double truncation_defect = 0.0;
    /// Max over the grid of |term l|, l = 0..(highest evaluated).
    std::vector<double> term_max;

    [[nodiscard]] int max_terms_used() const;
    /// |J|^2 on the grid.
    [[nodiscard]] Field2D magnitude_squared() const;
    /// Flow direction angle atan2(J_p, J_x).
    [[nodiscard]] Field2D direction() const;
};

/// Evaluates
///   J_x = (p/m) W,
///   J_p = -sum_l (-1)^l (hbar/2)^{2l} / (2l+1)! d^{2l}W/dp^{2l} d^{2l+1}V/dx^{2l+1},
/// with the series truncated per x-column once two consecutive terms fall
/// below eps_rel times the running column maximum of |J_p|.
class FlowEngine {
public:
    /// Throws UnsupportedOrder when l_max exceeds the basis stacks or the potential's jet capacity.
    FlowEngine(const WignerBasisFields& basis, const EigenstatePair& states, FlowOptions options = {});

    [[nodiscard]] FlowField at(double t) const;

    [[nodiscard]] const WignerBasisFields& basis() const { return *basis_; }
    [[nodiscard]] const EigenstatePair& states() const { return *states_; }
    [[nodiscard]] const FlowOptions& options() const { return options_; }
    /// (-1)^l (hbar/2)^{2l} V^(2l+1)(x_i) / (2l+1)! for column i.
    [[nodiscard]] double series_coefficient(int i, int l) const;

private:
    const WignerBasisFields* basis_;
    const EigenstatePair* states_;
    FlowOptions options_;
    std::vector<double> coeff_;  ///< nx * (l_max + 1), column-major in l
};

FlowField flow_field(const WignerBasisFields& basis, const EigenstatePair& states, double t,
                     FlowOptions options = {});

struct ContinuityResidual {
    Field2D residual;  ///< zero outside the evaluated interior
    double rms = 0.0;
    double max_abs = 0.0;
    int samples = 0;
};

/// dW/dt + dJ_x/dx + dJ_p/dp with fourth-order central differences, excluding
/// a four-point boundary band; statistics over points with |W| > 1e-6 max|W|.
ContinuityResidual continuity_residual(const WignerBasisFields& basis, const FlowField& flow);

/// Integral of J_x over the grid momenta on the column through an arbitrary x.
double probability_current_x(const WignerBasisFields& basis, const EigenstatePair& states, double t, double x);

/// Profile over the grid momenta of the integral of J_p over x.
std::vector<double> probability_current_p(const FlowField& flow);

/// Least-squares fit y ~ A sin(2 pi t / T + phi0) with T free (Brent search
/// within +-20% of the guess) and A >= 0.
struct SinusoidFit {
    double amplitude = 0.0;
    double period = 0.0;
    double phase = 0.0;         ///< wrapped to (-pi, pi]
    double max_residual = 0.0;  ///< max |y - fit|
    double rms_residual = 0.0;
};

SinusoidFit fit_sinusoid(std::span<const double> t, std::span<const double> y, double period_guess);

/// Direct evaluation of (W, J_x, J_p) at arbitrary phase-space points by
/// quadrature over the y-lattice, without the grid transform.
///
/// Exact mode sums the series in closed form: inside the y-integral the odd
/// derivative series collapses to [V(x+y) - V(x-y)] / (2y). Truncated mode
/// keeps terms l = 0..L, matching FlowEngine at a fixed order.
class PointFlowEvaluator {
public:
    enum class Mode { exact, truncated };

    PointFlowEvaluator(const EigenstatePair& states, StateKind state, const PhaseSpaceGrid& grid,
                       Mode mode = Mode::exact, int truncation = 20);

    struct Sample {
        double w;
        double jx;
        double jp;
    };

    [[nodiscard]] Sample operator()(double x, double p, double t) const;

private:
    const EigenstatePair* states_;
    StateKind state_;
    Mode mode_;
    int truncation_;
    double dy_;
    int nyh_;
};

}  // namespace wflow
