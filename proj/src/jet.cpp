#include "wflow/jet.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace wflow {

Jet::Jet(int order) : coeffs_(static_cast<std::size_t>(std::max(order, 0)) + 1, 0.0) {}

Jet Jet::constant(double value, int order)
{
    Jet j(order);
    j.coeffs_[0] = value;
    return j;
}

Jet Jet::variable(double x0, int order)
{
    Jet j(order);
    j.coeffs_[0] = x0;
    if (order >= 1) j.coeffs_[1] = 1.0;
    return j;
}

double Jet::derivative(int k) const { return coeffs_[static_cast<std::size_t>(k)] * factorial(k); }

bool Jet::all_finite() const
{
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](double c) { return std::isfinite(c); });
}

Jet& Jet::operator+=(const Jet& rhs)
{
    coeffs_.resize(std::min(coeffs_.size(), rhs.coeffs_.size()));
    for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] += rhs.coeffs_[k];
    return *this;
}

Jet& Jet::operator-=(const Jet& rhs)
{
    coeffs_.resize(std::min(coeffs_.size(), rhs.coeffs_.size()));
    for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] -= rhs.coeffs_[k];
    return *this;
}

Jet& Jet::operator*=(const Jet& rhs)
{
    *this = *this * rhs;
    return *this;
}

Jet& Jet::operator+=(double rhs)
{
    coeffs_[0] += rhs;
    return *this;
}

Jet& Jet::operator-=(double rhs)
{
    coeffs_[0] -= rhs;
    return *this;
}

Jet& Jet::operator*=(double rhs)
{
    for (double& c : coeffs_) c *= rhs;
    return *this;
}

Jet operator*(const Jet& lhs, const Jet& rhs)
{
    const int n = std::min(lhs.order(), rhs.order());
    Jet out(n);
    for (int k = 0; k <= n; ++k) {
        double acc = 0.0;
        for (int i = 0; i <= k; ++i) acc += lhs[i] * rhs[k - i];
        out[k] = acc;
    }
    return out;
}

// b = exp(a)  =>  b' = a' b  =>  k b_k = sum_{j=1..k} j a_j b_{k-j}
Jet exp(const Jet& a)
{
    const int n = a.order();
    Jet b(n);
    b[0] = std::exp(a[0]);
    for (int k = 1; k <= n; ++k) {
        double acc = 0.0;
        for (int j = 1; j <= k; ++j) acc += j * a[j] * b[k - j];
        b[k] = acc / k;
    }
    return b;
}

// s' = a' c, c' = a' s
std::pair<Jet, Jet> sinh_cosh(const Jet& a)
{
    const int n = a.order();
    Jet s(n);
    Jet c(n);
    s[0] = std::sinh(a[0]);
    c[0] = std::cosh(a[0]);
    for (int k = 1; k <= n; ++k) {
        double acc_s = 0.0;
        double acc_c = 0.0;
        for (int j = 1; j <= k; ++j) {
            acc_s += j * a[j] * c[k - j];
            acc_c += j * a[j] * s[k - j];
        }
        s[k] = acc_s / k;
        c[k] = acc_c / k;
    }
    return {std::move(s), std::move(c)};
}

Jet sinh(const Jet& a) { return sinh_cosh(a).first; }

Jet cosh(const Jet& a) { return sinh_cosh(a).second; }

double factorial(int k)
{
    assert(k >= 0);
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

}  // namespace wflow
