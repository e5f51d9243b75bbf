#include "wflow/wigner.hpp"

#include "wflow/errors.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <string>

namespace wflow {

namespace {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor>;

struct Needs {
    bool w00;
    bool w11;
    bool cross;
};

Needs needs_for(StateKind state)
{
    switch (state) {
    case StateKind::ground: return {true, false, false};
    case StateKind::excited: return {false, true, false};
    case StateKind::superposition: break;
    }
    return {true, true, true};
}

void add_scaled(Field2D& out, const Field2D& in, double w)
{
    if (w == 0.0 || in.empty()) return;
    auto o = out.values();
    const auto v = in.values();
    for (std::size_t n = 0; n < o.size(); ++n) o[n] += w * v[n];
}

}  // namespace

double WignerBasisFields::period() const { return 2.0 * std::numbers::pi * hbar / delta_e; }

BasisStacks compute_basis_columns(std::span<const double> xs, const PhaseSpaceGrid& grid,
                                  const EigenstatePair& states, StateKind state, int l_max)
{
    if (l_max < 0) throw ConfigError("l_max must be non-negative");
    const double hbar = states.hbar();
    const Needs need = needs_for(state);
    const int nx = static_cast<int>(xs.size());
    const int np = grid.np;
    const int nyh = grid.ny / 2 + 1;
    const double dy = grid.dy();

    // Folded trapezoid weights on y >= 0 with the 1/(pi hbar) prefactor.
    std::vector<double> y(static_cast<std::size_t>(nyh));
    Eigen::VectorXd fold(nyh);
    for (int j = 0; j < nyh; ++j) {
        y[static_cast<std::size_t>(j)] = j * dy;
        const bool end = (j == 0 || j == nyh - 1);
        fold[j] = (end ? dy : 2.0 * dy) / (std::numbers::pi * hbar);
    }

    Matrix cos_k(np, nyh);
    Matrix sin_k(need.cross ? np : 0, need.cross ? nyh : 0);
    for (int j = 0; j < nyh; ++j) {
        for (int k = 0; k < np; ++k) {
            const double arg = 2.0 * grid.p(k) * y[static_cast<std::size_t>(j)] / hbar;
            cos_k(k, j) = std::cos(arg);
            if (need.cross) sin_k(k, j) = std::sin(arg);
        }
    }

    // Even-in-y products feed the cosine transform; the odd cross product feeds the sine transform.
    const int n_even = (need.w00 ? 1 : 0) + (need.w11 ? 1 : 0) + (need.cross ? 1 : 0);
    Matrix even(nyh, static_cast<Eigen::Index>(n_even) * nx);
    Matrix odd(need.cross ? nyh : 0, need.cross ? nx : 0);
    for (int i = 0; i < nx; ++i) {
        const double x = xs[static_cast<std::size_t>(i)];
        for (int j = 0; j < nyh; ++j) {
            const double yp = x + y[static_cast<std::size_t>(j)];
            const double ym = x - y[static_cast<std::size_t>(j)];
            const double a0 = states.psi0(yp);
            const double b0 = states.psi0(ym);
            const double a1 = (need.w11 || need.cross) ? states.psi1(yp) : 0.0;
            const double b1 = (need.w11 || need.cross) ? states.psi1(ym) : 0.0;
            int slot = 0;
            if (need.w00) even(j, slot++ * nx + i) = a0 * b0 * fold[j];
            if (need.w11) even(j, slot++ * nx + i) = a1 * b1 * fold[j];
            if (need.cross) {
                even(j, slot * nx + i) = 0.5 * (a0 * b1 + a1 * b0) * fold[j];
                odd(j, i) = 0.5 * (a0 * b1 - a1 * b0) * fold[j];
            }
        }
    }

    BasisStacks out;
    auto alloc = [&](std::vector<Field2D>& s, bool used) {
        if (used) s.assign(static_cast<std::size_t>(l_max) + 1, Field2D(nx, np));
    };
    alloc(out.w00, need.w00);
    alloc(out.w11, need.w11);
    alloc(out.w01_re, need.cross);
    alloc(out.w01_im, need.cross);

    Eigen::VectorXd moment = Eigen::VectorXd::Ones(nyh);
    Matrix scaled_even(even.rows(), even.cols());
    Matrix scaled_odd(odd.rows(), odd.cols());
    Matrix result_even(np, even.cols());
    Matrix result_odd(np, odd.cols());
    for (int l = 0; l <= l_max; ++l) {
        if (l > 0) {
            for (int j = 0; j < nyh; ++j) {
                const double two_y = 2.0 * y[static_cast<std::size_t>(j)] / hbar;
                moment[j] *= -two_y * two_y;
            }
        }
        scaled_even = moment.asDiagonal() * even;
        result_even.noalias() = cos_k * scaled_even;
        int slot = 0;
        auto unpack = [&](std::vector<Field2D>& s, const Matrix& r, int block) {
            auto dst = s[static_cast<std::size_t>(l)].values();
            Eigen::Map<Matrix>(dst.data(), np, nx) = r.middleCols(static_cast<Eigen::Index>(block) * nx, nx);
        };
        if (need.w00) unpack(out.w00, result_even, slot++);
        if (need.w11) unpack(out.w11, result_even, slot++);
        if (need.cross) {
            unpack(out.w01_re, result_even, slot);
            scaled_odd = moment.asDiagonal() * odd;
            result_odd.noalias() = sin_k * scaled_odd;
            unpack(out.w01_im, result_odd, 0);
        }
    }
    return out;
}

WignerBasisFields compute_basis_fields(const PhaseSpaceGrid& grid, const EigenstatePair& states, StateKind state,
                                       int l_max)
{
    grid.validate(states.hbar());
    WignerBasisFields basis;
    basis.grid = grid;
    basis.state = state;
    basis.hbar = states.hbar();
    basis.delta_e = states.gap();
    basis.l_max = l_max;
    const auto xs = grid.xs();
    basis.stacks = compute_basis_columns(xs, grid, states, state, l_max);

    double defect = 0.0;
    if (!basis.stacks.w00.empty()) defect = std::max(defect, std::abs(integrate_field(basis.stacks.w00[0], grid) - 1.0));
    if (!basis.stacks.w11.empty()) defect = std::max(defect, std::abs(integrate_field(basis.stacks.w11[0], grid) - 1.0));
    basis.normalization_defect = defect;
    if (defect > 1e-4) {
        throw GridInsufficient("Wigner normalisation defect " + std::to_string(defect) +
                               " exceeds 1e-4; enlarge the phase-space window or refine the lattice");
    }
    return basis;
}

Field2D combine(const BasisStacks& stacks, const SuperpositionWeights& weights, int order)
{
    const std::vector<Field2D>* any = !stacks.w00.empty() ? &stacks.w00 : &stacks.w11;
    const Field2D& shape = (*any)[static_cast<std::size_t>(order)];
    Field2D out(shape.nx(), shape.np());
    auto pick = [order](const std::vector<Field2D>& s) -> const Field2D& {
        static const Field2D empty;
        return s.empty() ? empty : s[static_cast<std::size_t>(order)];
    };
    add_scaled(out, pick(stacks.w00), weights.w00);
    add_scaled(out, pick(stacks.w11), weights.w11);
    add_scaled(out, pick(stacks.w01_re), weights.w_re);
    add_scaled(out, pick(stacks.w01_im), weights.w_im);
    return out;
}

Field2D wigner_at(const WignerBasisFields& basis, double t) { return wigner_p_derivative(basis, t, 0); }

Field2D wigner_p_derivative(const WignerBasisFields& basis, double t, int l)
{
    if (l < 0 || l > basis.l_max) throw UnsupportedOrder("p-derivative stack order out of range");
    return combine(basis.stacks, state_weights(basis.state, t, basis.delta_e, basis.hbar), l);
}

Field2D wigner_time_derivative(const WignerBasisFields& basis, double t)
{
    Field2D out(basis.grid.nx, basis.grid.np);
    if (basis.state != StateKind::superposition) return out;
    const double rate = basis.delta_e / basis.hbar;
    const double theta = rate * t;
    add_scaled(out, basis.stacks.w01_re[0], rate * std::sin(theta));
    add_scaled(out, basis.stacks.w01_im[0], -rate * std::cos(theta));
    return out;
}

Marginals marginals(const WignerBasisFields& basis, double t)
{
    const Field2D w = wigner_at(basis, t);
    const auto& g = basis.grid;
    const auto wx = trapezoid_weights(g.nx, g.dx());
    const auto wp = trapezoid_weights(g.np, g.dp());
    Marginals m;
    m.x_density.assign(static_cast<std::size_t>(g.nx), 0.0);
    m.p_density.assign(static_cast<std::size_t>(g.np), 0.0);
    for (int i = 0; i < g.nx; ++i) {
        const auto col = w.column(i);
        for (int k = 0; k < g.np; ++k) {
            const double v = col[static_cast<std::size_t>(k)];
            m.x_density[static_cast<std::size_t>(i)] += wp[static_cast<std::size_t>(k)] * v;
            m.p_density[static_cast<std::size_t>(k)] += wx[static_cast<std::size_t>(i)] * v;
        }
    }
    return m;
}

}  // namespace wflow
