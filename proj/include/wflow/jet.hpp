#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace wflow {

/// Truncated Taylor series f(x0 + h) = sum_k c_k h^k, k = 0..order.
///
/// Coefficients are stored normalised (c_k = f^(k)(x0) / k!), which keeps
/// high orders inside the double range; derivative(k) rescales by k!.
/// Binary operations truncate to the smaller of the two orders.
class Jet {
public:
    explicit Jet(int order = 0);

    static Jet constant(double value, int order);
    /// The identity function expanded around x0.
    static Jet variable(double x0, int order);

    [[nodiscard]] int order() const { return static_cast<int>(coeffs_.size()) - 1; }
    [[nodiscard]] double value() const { return coeffs_.front(); }
    [[nodiscard]] double operator[](int k) const { return coeffs_[static_cast<std::size_t>(k)]; }
    double& operator[](int k) { return coeffs_[static_cast<std::size_t>(k)]; }
    [[nodiscard]] std::span<const double> coefficients() const { return coeffs_; }

    /// k-th derivative f^(k)(x0).
    [[nodiscard]] double derivative(int k) const;
    [[nodiscard]] bool all_finite() const;

    Jet& operator+=(const Jet& rhs);
    Jet& operator-=(const Jet& rhs);
    Jet& operator*=(const Jet& rhs);
    Jet& operator+=(double rhs);
    Jet& operator-=(double rhs);
    Jet& operator*=(double rhs);

    friend Jet operator+(Jet lhs, const Jet& rhs) { return lhs += rhs; }
    friend Jet operator-(Jet lhs, const Jet& rhs) { return lhs -= rhs; }
    friend Jet operator*(const Jet& lhs, const Jet& rhs);
    friend Jet operator+(Jet lhs, double rhs) { return lhs += rhs; }
    friend Jet operator+(double lhs, Jet rhs) { return rhs += lhs; }
    friend Jet operator-(Jet lhs, double rhs) { return lhs -= rhs; }
    friend Jet operator*(Jet lhs, double rhs) { return lhs *= rhs; }
    friend Jet operator*(double lhs, Jet rhs) { return rhs *= lhs; }
    friend Jet operator-(Jet arg) { return arg *= -1.0; }

private:
    std::vector<double> coeffs_;
};

Jet exp(const Jet& a);
/// sinh and cosh of the same argument, via the coupled recurrences.
std::pair<Jet, Jet> sinh_cosh(const Jet& a);
Jet sinh(const Jet& a);
Jet cosh(const Jet& a);

double factorial(int k);

}  // namespace wflow
