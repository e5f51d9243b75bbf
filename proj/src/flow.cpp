#include "wflow/flow.hpp"

#include "wflow/errors.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace wflow {

int FlowField::max_terms_used() const
{
    return terms_used.empty() ? 0 : *std::max_element(terms_used.begin(), terms_used.end());
}

Field2D FlowField::magnitude_squared() const
{
    Field2D out(jx.nx(), jx.np());
    auto o = out.values();
    const auto a = jx.values();
    const auto b = jp.values();
    for (std::size_t n = 0; n < o.size(); ++n) o[n] = a[n] * a[n] + b[n] * b[n];
    return out;
}

Field2D FlowField::direction() const
{
    Field2D out(jx.nx(), jx.np());
    auto o = out.values();
    const auto a = jx.values();
    const auto b = jp.values();
    for (std::size_t n = 0; n < o.size(); ++n) o[n] = std::atan2(b[n], a[n]);
    return out;
}

FlowEngine::FlowEngine(const WignerBasisFields& basis, const EigenstatePair& states, FlowOptions options)
    : basis_(&basis), states_(&states), options_(options)
{
    if (options_.l_max < 0) throw ConfigError("l_max must be non-negative");
    if (!(options_.eps_rel > 0.0)) throw ConfigError("eps_rel must be positive");
    if (options_.l_max > basis.l_max) {
        throw UnsupportedOrder("flow l_max exceeds the precomputed p-derivative stacks");
    }
    const Potential& pot = states.potential();
    const int order = 2 * options_.l_max + 1;
    const auto& g = basis.grid;
    const int nl = options_.l_max + 1;
    coeff_.assign(static_cast<std::size_t>(g.nx) * static_cast<std::size_t>(nl), 0.0);
    const double h2 = 0.25 * basis.hbar * basis.hbar;
    for (int i = 0; i < g.nx; ++i) {
        const Jet v = pot.taylor(g.x(i), order);
        double scale = 1.0;
        for (int l = 0; l < nl; ++l) {
            coeff_[static_cast<std::size_t>(i) * nl + static_cast<std::size_t>(l)] = scale * v[2 * l + 1];
            scale *= -h2;
        }
    }
}

double FlowEngine::series_coefficient(int i, int l) const
{
    return coeff_[static_cast<std::size_t>(i) * static_cast<std::size_t>(options_.l_max + 1) +
                  static_cast<std::size_t>(l)];
}

FlowField FlowEngine::at(double t) const
{
    const auto& b = *basis_;
    const auto& g = b.grid;
    const int nl = options_.l_max + 1;
    const auto weights = state_weights(b.state, t, b.delta_e, b.hbar);
    const double inv_m = 1.0 / states_->mass();

    FlowField f;
    f.grid = g;
    f.t = t;
    f.mass = states_->mass();
    f.w = combine(b.stacks, weights, 0);
    f.jx = Field2D(g.nx, g.np);
    f.jp = Field2D(g.nx, g.np);
    f.terms_used.assign(static_cast<std::size_t>(g.nx), 0);
    f.column_converged.assign(static_cast<std::size_t>(g.nx), false);

    struct Part {
        const std::vector<Field2D>* stack;
        double w;
    };
    const Part parts[] = {{&b.stacks.w00, weights.w00},
                          {&b.stacks.w11, weights.w11},
                          {&b.stacks.w01_re, weights.w_re},
                          {&b.stacks.w01_im, weights.w_im}};

    std::vector<double> term(static_cast<std::size_t>(g.np));
    for (int i = 0; i < g.nx; ++i) {
        const auto wcol = f.w.column(i);
        auto jx = f.jx.column(i);
        for (int k = 0; k < g.np; ++k) jx[static_cast<std::size_t>(k)] = g.p(k) * inv_m * wcol[static_cast<std::size_t>(k)];

        auto jp = f.jp.column(i);
        double col_max = 0.0;
        double last_ratio = 0.0;
        int small_run = 0;
        int significant = 0;
        for (int l = 0; l < nl; ++l) {
            std::fill(term.begin(), term.end(), 0.0);
            for (const auto& part : parts) {
                if (part.w == 0.0 || part.stack->empty()) continue;
                const auto src = (*part.stack)[static_cast<std::size_t>(l)].column(i);
                for (int k = 0; k < g.np; ++k) term[static_cast<std::size_t>(k)] += part.w * src[static_cast<std::size_t>(k)];
            }
            const double c = -series_coefficient(i, l);
            double term_abs = 0.0;
            for (int k = 0; k < g.np; ++k) {
                const double v = c * term[static_cast<std::size_t>(k)];
                jp[static_cast<std::size_t>(k)] += v;
                term_abs = std::max(term_abs, std::abs(v));
            }
            for (int k = 0; k < g.np; ++k) col_max = std::max(col_max, std::abs(jp[static_cast<std::size_t>(k)]));
            if (f.term_max.size() <= static_cast<std::size_t>(l)) f.term_max.resize(static_cast<std::size_t>(l) + 1, 0.0);
            f.term_max[static_cast<std::size_t>(l)] = std::max(f.term_max[static_cast<std::size_t>(l)], term_abs);

            last_ratio = col_max > 0.0 ? term_abs / col_max : 0.0;
            if (term_abs <= options_.eps_rel * col_max) {
                if (++small_run == 2) {
                    f.column_converged[static_cast<std::size_t>(i)] = true;
                    break;
                }
            } else {
                small_run = 0;
                significant = l;
            }
        }
        f.terms_used[static_cast<std::size_t>(i)] = significant;
        f.truncation_defect = std::max(f.truncation_defect, last_ratio);
        if (!f.column_converged[static_cast<std::size_t>(i)]) f.converged = false;
    }
    return f;
}

FlowField flow_field(const WignerBasisFields& basis, const EigenstatePair& states, double t, FlowOptions options)
{
    return FlowEngine(basis, states, options).at(t);
}

namespace {

constexpr int kBand = 4;

double d4(double fm2, double fm1, double fp1, double fp2, double h)
{
    return (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h);
}

}  // namespace

ContinuityResidual continuity_residual(const WignerBasisFields& basis, const FlowField& flow)
{
    const auto& g = flow.grid;
    const Field2D dwdt = wigner_time_derivative(basis, flow.t);
    const double w_floor = 1e-6 * flow.w.max_abs();
    const double dx = g.dx();
    const double dp = g.dp();

    ContinuityResidual r;
    r.residual = Field2D(g.nx, g.np);
    double sum_sq = 0.0;
    for (int i = kBand; i < g.nx - kBand; ++i) {
        for (int k = kBand; k < g.np - kBand; ++k) {
            const double djx = d4(flow.jx(i - 2, k), flow.jx(i - 1, k), flow.jx(i + 1, k), flow.jx(i + 2, k), dx);
            const double djp = d4(flow.jp(i, k - 2), flow.jp(i, k - 1), flow.jp(i, k + 1), flow.jp(i, k + 2), dp);
            const double v = dwdt(i, k) + djx + djp;
            r.residual(i, k) = v;
            if (std::abs(flow.w(i, k)) > w_floor) {
                sum_sq += v * v;
                r.max_abs = std::max(r.max_abs, std::abs(v));
                ++r.samples;
            }
        }
    }
    r.rms = r.samples > 0 ? std::sqrt(sum_sq / r.samples) : 0.0;
    return r;
}

double probability_current_x(const WignerBasisFields& basis, const EigenstatePair& states, double t, double x)
{
    const double xs[] = {x};
    const auto stacks = compute_basis_columns(xs, basis.grid, states, basis.state, 0);
    const Field2D w = combine(stacks, state_weights(basis.state, t, basis.delta_e, basis.hbar), 0);
    const auto& g = basis.grid;
    const auto wp = trapezoid_weights(g.np, g.dp());
    double total = 0.0;
    for (int k = 0; k < g.np; ++k) total += wp[static_cast<std::size_t>(k)] * g.p(k) * w(0, k);
    return total / states.mass();
}

std::vector<double> probability_current_p(const FlowField& flow)
{
    const auto& g = flow.grid;
    const auto wx = trapezoid_weights(g.nx, g.dx());
    std::vector<double> out(static_cast<std::size_t>(g.np), 0.0);
    for (int i = 0; i < g.nx; ++i) {
        const auto col = flow.jp.column(i);
        for (int k = 0; k < g.np; ++k) out[static_cast<std::size_t>(k)] += wx[static_cast<std::size_t>(i)] * col[static_cast<std::size_t>(k)];
    }
    return out;
}

namespace {

struct LinearFit {
    double a_sin;
    double a_cos;
    double sum_sq;
};

LinearFit fit_fixed_period(std::span<const double> t, std::span<const double> y, double period)
{
    double ss = 0.0, sc = 0.0, cc = 0.0, ys = 0.0, yc = 0.0;
    const double w = 2.0 * std::numbers::pi / period;
    for (std::size_t n = 0; n < t.size(); ++n) {
        const double s = std::sin(w * t[n]);
        const double c = std::cos(w * t[n]);
        ss += s * s;
        sc += s * c;
        cc += c * c;
        ys += y[n] * s;
        yc += y[n] * c;
    }
    const double det = ss * cc - sc * sc;
    LinearFit f{(ys * cc - yc * sc) / det, (yc * ss - ys * sc) / det, 0.0};
    for (std::size_t n = 0; n < t.size(); ++n) {
        const double r = y[n] - f.a_sin * std::sin(w * t[n]) - f.a_cos * std::cos(w * t[n]);
        f.sum_sq += r * r;
    }
    return f;
}

}  // namespace

SinusoidFit fit_sinusoid(std::span<const double> t, std::span<const double> y, double period_guess)
{
    if (t.size() != y.size() || t.size() < 4) throw ConfigError("sinusoid fit needs at least four samples");
    const auto objective = [&](double period) { return fit_fixed_period(t, y, period).sum_sq; };
    const auto best =
        boost::math::tools::brent_find_minima(objective, 0.8 * period_guess, 1.2 * period_guess, 52);
    const double period = best.first;
    const LinearFit lf = fit_fixed_period(t, y, period);

    SinusoidFit fit;
    fit.period = period;
    fit.amplitude = std::hypot(lf.a_sin, lf.a_cos);
    fit.phase = std::atan2(lf.a_cos, lf.a_sin);
    const double w = 2.0 * std::numbers::pi / period;
    double sq = 0.0;
    for (std::size_t n = 0; n < t.size(); ++n) {
        const double r = y[n] - fit.amplitude * std::sin(w * t[n] + fit.phase);
        fit.max_residual = std::max(fit.max_residual, std::abs(r));
        sq += r * r;
    }
    fit.rms_residual = std::sqrt(sq / static_cast<double>(t.size()));
    return fit;
}

PointFlowEvaluator::PointFlowEvaluator(const EigenstatePair& states, StateKind state, const PhaseSpaceGrid& grid,
                                       Mode mode, int truncation)
    : states_(&states), state_(state), mode_(mode), truncation_(truncation), dy_(grid.dy()), nyh_(grid.ny / 2 + 1)
{
    if (mode_ == Mode::truncated && 2 * truncation_ + 1 > states.potential().max_order()) {
        throw UnsupportedOrder("truncation order exceeds the potential's jet capacity");
    }
}

PointFlowEvaluator::Sample PointFlowEvaluator::operator()(double x, double p, double t) const
{
    const auto& st = *states_;
    const Potential& pot = st.potential();
    const double hbar = st.hbar();
    const auto wts = state_weights(state_, t, st.gap(), hbar);

    const Jet taylor = mode_ == Mode::truncated ? pot.taylor(x, 2 * truncation_ + 1)
                                                : pot.taylor(x, std::min(pot.max_order(), 15));

    double w = 0.0;
    double jp = 0.0;
    for (int j = 0; j < nyh_; ++j) {
        const double y = j * dy_;
        const double fold = (j == 0 || j == nyh_ - 1) ? dy_ : 2.0 * dy_;
        const double a0 = st.psi0(x + y);
        const double b0 = st.psi0(x - y);
        const double a1 = st.psi1(x + y);
        const double b1 = st.psi1(x - y);
        const double even = wts.w00 * a0 * b0 + wts.w11 * a1 * b1 + wts.w_re * 0.5 * (a0 * b1 + a1 * b0);
        const double odd = wts.w_im * 0.5 * (a0 * b1 - a1 * b0);
        if (even == 0.0 && odd == 0.0) continue;
        const double arg = 2.0 * p * y / hbar;
        const double wy = fold * (even * std::cos(arg) + odd * std::sin(arg));

        double kernel = 0.0;
        if (mode_ == Mode::truncated) {
            const double y2 = y * y;
            double pw = 1.0;
            for (int l = 0; l <= truncation_; ++l) {
                kernel += taylor[2 * l + 1] * pw;
                pw *= y2;
            }
        } else if (y < 0.05) {
            // Odd part of the Taylor expansion, avoiding cancellation in the difference quotient.
            const double y2 = y * y;
            double pw = 1.0;
            for (int k = 1; k <= taylor.order(); k += 2) {
                kernel += taylor[k] * pw;
                pw *= y2;
            }
        } else {
            kernel = (pot.value(x + y) - pot.value(x - y)) / (2.0 * y);
        }
        w += wy;
        jp -= wy * kernel;
    }
    const double norm = 1.0 / (std::numbers::pi * hbar);
    w *= norm;
    jp *= norm;
    return {w, p * w / st.mass(), jp};
}

}  // namespace wflow
