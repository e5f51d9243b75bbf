#include "wflow/grid.hpp"

#include "wflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace wflow {

void PhaseSpaceGrid::validate(double hbar) const
{
    if (!(x_max > x_min) || !(p_max > p_min)) throw ConfigError("grid bounds must satisfy min < max");
    if (nx < 8 || np < 8) throw ConfigError("grid needs at least 8 points per axis");
    if (np % 2 != 0) throw ConfigError("np must be even");
    if (ny < 2 || ny % 2 != 0) throw ConfigError("ny must be a positive even count");
    if (!(y_half_width > 0.0)) throw ConfigError("y_half_width must be positive");
    if (static_cast<double>(ny) <= min_ny(hbar)) {
        throw GridInsufficient("ny = " + std::to_string(ny) + " cannot resolve the transform kernel; need ny > " +
                               std::to_string(min_ny(hbar)));
    }
}

double PhaseSpaceGrid::x(int i) const { return x_min + i * dx(); }

double PhaseSpaceGrid::p(int k) const
{
    const double centre = 0.5 * (p_min + p_max);
    return centre + (k - 0.5 * (np - 1)) * dp();
}

std::vector<double> PhaseSpaceGrid::xs() const
{
    std::vector<double> out(static_cast<std::size_t>(nx));
    for (int i = 0; i < nx; ++i) out[static_cast<std::size_t>(i)] = x(i);
    return out;
}

std::vector<double> PhaseSpaceGrid::ps() const
{
    std::vector<double> out(static_cast<std::size_t>(np));
    for (int k = 0; k < np; ++k) out[static_cast<std::size_t>(k)] = p(k);
    return out;
}

double PhaseSpaceGrid::min_ny(double hbar) const
{
    const double p_abs = std::max(std::abs(p_min), std::abs(p_max));
    return 4.0 * p_abs * y_half_width / (std::numbers::pi * hbar);
}

double Field2D::max_abs() const
{
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
}

std::vector<double> trapezoid_weights(int n, double h)
{
    std::vector<double> w(static_cast<std::size_t>(n), h);
    if (n > 0) {
        w.front() *= 0.5;
        w.back() *= 0.5;
    }
    return w;
}

double integrate_field(const Field2D& f, const PhaseSpaceGrid& grid)
{
    const auto wx = trapezoid_weights(f.nx(), grid.dx());
    const auto wp = trapezoid_weights(f.np(), grid.dp());
    double total = 0.0;
    for (int i = 0; i < f.nx(); ++i) {
        double col = 0.0;
        const auto c = f.column(i);
        for (int k = 0; k < f.np(); ++k) col += wp[static_cast<std::size_t>(k)] * c[static_cast<std::size_t>(k)];
        total += wx[static_cast<std::size_t>(i)] * col;
    }
    return total;
}

}  // namespace wflow
