#pragma once

#include "wflow/grid.hpp"
#include "wflow/states.hpp"

#include <span>
#include <vector>

namespace wflow {

/// Derivative stacks of the four real Wigner basis fields. Entry l of each
/// stack holds d^{2l}/dp^{2l} of the field; entry 0 is the field itself.
///
///   W00, W11        Wigner functions of psi0 and psi1
///   W01_re, W01_im  real and imaginary parts of the cross Wigner function
///                   (1/(pi hbar)) int psi0(x+y) psi1(x-y) e^{2ipy/hbar} dy
///
/// Stacks not needed by the selected state are left empty.
struct BasisStacks {
    std::vector<Field2D> w00;
    std::vector<Field2D> w11;
    std::vector<Field2D> w01_re;
    std::vector<Field2D> w01_im;
};

/// Time-independent fields whose weighted sum gives W(x, p; t) = int rho(x+y, x-y) e^{2ipy/hbar} dy / (pi hbar)
/// with rho(x+y, x-y) = Psi*(x+y) Psi(x-y).
struct WignerBasisFields {
    PhaseSpaceGrid grid;
    StateKind state = StateKind::superposition;
    double hbar = 1.0;
    double delta_e = 1.0;
    int l_max = 0;
    BasisStacks stacks;
    /// max over the populated diagonal fields of |int W_aa dx dp - 1|
    double normalization_defect = 0.0;

    [[nodiscard]] std::vector<double> xs() const { return grid.xs(); }
    [[nodiscard]] std::vector<double> ps() const { return grid.ps(); }
    [[nodiscard]] double period() const;
};

/// Evaluates the basis stacks up to order 2 l_max on the grid. Each x-column is
/// a discrete cosine/sine transform over the folded y-lattice; p-derivatives
/// come from the moment kernel (-1)^l (2y/hbar)^{2l} inside the same transform.
///
/// Throws GridInsufficient if the lattice fails validation or any diagonal
/// basis field misses unit normalisation by more than 1e-4.
WignerBasisFields compute_basis_fields(const PhaseSpaceGrid& grid, const EigenstatePair& states,
                                       StateKind state = StateKind::superposition, int l_max = 20);

/// Basis stacks on the grid momenta for arbitrary positions (fields have nx = xs.size()).
BasisStacks compute_basis_columns(std::span<const double> xs, const PhaseSpaceGrid& grid,
                                  const EigenstatePair& states, StateKind state, int l_max);

/// Weighted sum of entry `order` of each stack.
Field2D combine(const BasisStacks& stacks, const SuperpositionWeights& weights, int order = 0);

/// W(x, p; t) on the grid.
Field2D wigner_at(const WignerBasisFields& basis, double t);

/// d^{2l} W / dp^{2l} at time t.
Field2D wigner_p_derivative(const WignerBasisFields& basis, double t, int l);

/// Analytic dW/dt = (dE/hbar) [sin(theta) W01_re - cos(theta) W01_im]; zero for eigenstates.
Field2D wigner_time_derivative(const WignerBasisFields& basis, double t);

struct Marginals {
    std::vector<double> x_density;  ///< int W dp on the x lattice
    std::vector<double> p_density;  ///< int W dx on the p lattice
};

Marginals marginals(const WignerBasisFields& basis, double t);

}  // namespace wflow
