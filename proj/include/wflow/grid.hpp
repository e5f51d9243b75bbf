#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace wflow {

/// Rectangular (x, p) lattice plus the symmetric y-lattice of the Wigner transform.
struct PhaseSpaceGrid {
    double x_min = -4.0;
    double x_max = 3.5;
    double p_min = -12.0;
    double p_max = 12.0;
    int nx = 512;
    int np = 512;
    double y_half_width = 4.5;
    int ny = 2048;  ///< y-lattice has ny + 1 points on [-y_half_width, y_half_width]

    /// Throws ConfigError for malformed lattices and GridInsufficient when the
    /// y-lattice cannot resolve the transform kernel e^{2ipy/hbar}.
    void validate(double hbar) const;

    [[nodiscard]] double dx() const { return (x_max - x_min) / (nx - 1); }
    [[nodiscard]] double dp() const { return (p_max - p_min) / (np - 1); }
    [[nodiscard]] double dy() const { return 2.0 * y_half_width / ny; }
    [[nodiscard]] double x(int i) const;
    /// Momenta are placed symmetrically about the window centre, so a window
    /// with p_min = -p_max gives p(k) == -p(np - 1 - k) bit for bit.
    [[nodiscard]] double p(int k) const;
    [[nodiscard]] std::vector<double> xs() const;
    [[nodiscard]] std::vector<double> ps() const;

    /// Smallest ny for which the y-lattice resolves the highest kernel frequency.
    [[nodiscard]] double min_ny(double hbar) const;

    friend bool operator==(const PhaseSpaceGrid&, const PhaseSpaceGrid&) = default;
};

/// Real field on an nx-by-np lattice, stored x-major (p contiguous).
class Field2D {
public:
    Field2D() = default;
    Field2D(int nx, int np, double fill = 0.0)
        : nx_(nx), np_(np), data_(static_cast<std::size_t>(nx) * static_cast<std::size_t>(np), fill)
    {}

    [[nodiscard]] int nx() const { return nx_; }
    [[nodiscard]] int np() const { return np_; }
    [[nodiscard]] bool empty() const { return data_.empty(); }

    double& operator()(int i, int k) { return data_[index(i, k)]; }
    [[nodiscard]] double operator()(int i, int k) const { return data_[index(i, k)]; }

    [[nodiscard]] std::span<double> column(int i) { return {data_.data() + index(i, 0), static_cast<std::size_t>(np_)}; }
    [[nodiscard]] std::span<const double> column(int i) const
    {
        return {data_.data() + index(i, 0), static_cast<std::size_t>(np_)};
    }
    [[nodiscard]] std::span<double> values() { return data_; }
    [[nodiscard]] std::span<const double> values() const { return data_; }

    [[nodiscard]] double max_abs() const;

private:
    [[nodiscard]] std::size_t index(int i, int k) const
    {
        return static_cast<std::size_t>(i) * static_cast<std::size_t>(np_) + static_cast<std::size_t>(k);
    }

    int nx_ = 0;
    int np_ = 0;
    std::vector<double> data_;
};

/// Trapezoid weights for n uniformly spaced samples with spacing h.
std::vector<double> trapezoid_weights(int n, double h);

/// Double trapezoid integral of a field over the grid.
double integrate_field(const Field2D& f, const PhaseSpaceGrid& grid);

}  // namespace wflow
