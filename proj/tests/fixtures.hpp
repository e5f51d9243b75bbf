#pragma once

#include "wflow/flow.hpp"
#include "wflow/states.hpp"
#include "wflow/topology.hpp"
#include "wflow/wigner.hpp"

#include <cmath>
#include <complex>

namespace wflow::testing {

inline PhaseSpaceGrid coarse_grid()
{
    PhaseSpaceGrid g;
    g.nx = 256;
    g.np = 256;
    return g;
}

inline const CatichaEigenstates& caticha()
{
    static const CatichaEigenstates states{PhysicsConfig{}};
    return states;
}

inline const WignerBasisFields& coarse_basis()
{
    static const WignerBasisFields basis = compute_basis_fields(coarse_grid(), caticha());
    return basis;
}

inline const FlowEngine& coarse_engine()
{
    static const FlowEngine engine(coarse_basis(), caticha());
    return engine;
}

inline double period() { return PhysicsConfig{}.period(); }

/// Closed-form field whose zeros are known: prod (z - a_k) * prod conj(z - b_m).
class ProductField final : public VectorField {
public:
    ProductField(std::vector<Vec2> plus, std::vector<Vec2> minus) : plus_(std::move(plus)), minus_(std::move(minus)) {}

    [[nodiscard]] Vec2 operator()(double x, double p) const override
    {
        std::complex<double> z{1.0, 0.0};
        for (const auto& a : plus_) z *= std::complex<double>(x - a.x, p - a.p);
        for (const auto& b : minus_) z *= std::conj(std::complex<double>(x - b.x, p - b.p));
        return {z.real(), z.imag()};
    }

private:
    std::vector<Vec2> plus_;
    std::vector<Vec2> minus_;
};

/// Samples a VectorField onto a FlowField (W is left zero).
inline FlowField sample_field(const VectorField& v, const PhaseSpaceGrid& g)
{
    FlowField f;
    f.grid = g;
    f.w = Field2D(g.nx, g.np);
    f.jx = Field2D(g.nx, g.np);
    f.jp = Field2D(g.nx, g.np);
    for (int i = 0; i < g.nx; ++i) {
        for (int k = 0; k < g.np; ++k) {
            const auto s = v(g.x(i), g.p(k));
            f.jx(i, k) = s.x;
            f.jp(i, k) = s.p;
        }
    }
    f.converged = true;
    return f;
}

}  // namespace wflow::testing
