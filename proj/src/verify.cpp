#include "wflow/verify.hpp"

#include "wflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <sstream>

namespace wflow {

namespace {

constexpr double kReferenceLeft = -2.095;
constexpr double kReferenceBarrier = -0.258;
constexpr double kReferenceRight = 1.514;

double fd4(const std::vector<double>& f, std::size_t k, double h)
{
    return (f[k - 2] - 8.0 * f[k - 1] + 8.0 * f[k + 1] - f[k + 2]) / (12.0 * h);
}

/// Direct complex transform (1/(pi hbar)) int Psi*(x+y) Psi(x-y) e^{2ipy/hbar} dy.
double direct_wigner(const EigenstatePair& st, StateKind kind, const PhaseSpaceGrid& g, double x, double p, double t)
{
    const double dy = g.dy();
    std::complex<double> acc = 0.0;
    for (int j = -g.ny / 2; j <= g.ny / 2; ++j) {
        const double y = j * dy;
        const double w = (std::abs(j) == g.ny / 2) ? 0.5 * dy : dy;
        acc += w * std::conj(st.wavefunction(x + y, t, kind)) * st.wavefunction(x - y, t, kind) *
               std::polar(1.0, 2.0 * p * y / st.hbar());
    }
    return acc.real() / (std::numbers::pi * st.hbar());
}

double richardson(const std::function<double(double)>& f, double x, double h)
{
    const auto d = [&](double s) { return (f(x + s) - f(x - s)) / (2.0 * s); };
    return (4.0 * d(0.5 * h) - d(h)) / 3.0;
}

struct Suite {
    const RunConfig& cfg;
    const VerifyOptions& opts;
    const std::function<void(const Check&)>& on_check;
    VerifyReport report;

    void add(Check c)
    {
        if (on_check) on_check(c);
        report.checks.push_back(std::move(c));
    }
    void add(std::string id, std::string desc, double measured, std::string rel, double tol, std::string note = {})
    {
        add(make_check(std::move(id), std::move(desc), measured, std::move(rel), tol, std::move(note)));
    }
    void fail(const std::string& id, const std::string& what)
    {
        add(make_check(id, "computation failed: " + what, 1.0, "==", 0.0));
    }

    template <class F>
    void guarded(const std::string& id, F&& body)
    {
        try {
            body();
        } catch (const std::exception& e) {
            fail(id, e.what());
        }
    }
};

}  // namespace

Check make_check(std::string id, std::string description, double measured, std::string relation, double tolerance,
                 std::string note)
{
    Check c{std::move(id), std::move(description), measured, tolerance, std::move(relation), false, std::move(note)};
    if (c.relation == "<") c.passed = measured < tolerance;
    else if (c.relation == "<=") c.passed = measured <= tolerance;
    else if (c.relation == ">") c.passed = measured > tolerance;
    else if (c.relation == ">=") c.passed = measured >= tolerance;
    else if (c.relation == "==") c.passed = measured == tolerance;
    if (!std::isfinite(measured)) c.passed = false;
    return c;
}

bool VerifyReport::passed() const { return failures() == 0; }

std::size_t VerifyReport::failures() const
{
    return static_cast<std::size_t>(std::count_if(checks.begin(), checks.end(), [](const Check& c) { return !c.passed; }));
}

std::string VerifyReport::summary() const
{
    std::ostringstream os;
    os.precision(6);
    for (const auto& c : checks) {
        os << (c.passed ? "[PASS] " : "[FAIL] ") << c.id << ": " << c.description << " | measured " << c.measured
           << " " << c.relation << " " << c.tolerance;
        if (!c.note.empty()) os << " (" << c.note << ")";
        os << "\n";
    }
    os << checks.size() - failures() << "/" << checks.size() << " checks passed\n";
    return os.str();
}

VerifyReport run_verification(const RunConfig& cfg, const VerifyOptions& options,
                              const std::function<void(const Check&)>& on_check)
{
    Suite s{cfg, options, on_check, {}};
    try {
        cfg.validate();
    } catch (const GridInsufficient& e) {
        s.add("grid.resolution", std::string("grid-insufficient: ") + e.what(), cfg.grid.ny, ">",
              cfg.grid.min_ny(cfg.physics.hbar));
        return s.report;
    }

    s.guarded("config", [&] {
        const std::string text = write_config(cfg);
        const RunConfig back = parse_config(text);
        s.add("config.round_trip", "configuration survives serialisation unchanged",
              back == cfg && write_config(back) == text ? 1.0 : 0.0, "==", 1.0);
        s.add("config.hash", "hash of the re-parsed configuration equals the original",
              config_hash(back) == config_hash(cfg) ? 1.0 : 0.0, "==", 1.0, config_hash(cfg));
    });

    const CatichaEigenstates states(cfg.physics, std::max(kDefaultMaxJetOrder, 2 * cfg.flow.l_max + 1));
    const Potential& pot = states.potential();
    const double T = cfg.physics.period();
    const auto& g = cfg.grid;

    // ---------------------------------------------------------------- potential
    WellLandmarks marks{};
    s.guarded("potential.landmarks", [&] {
        marks = locate_landmarks(pot, -4.0, 3.0);
        s.add("AC1.left_minimum", "left well minimum vs -2.095", std::abs(marks.left_minimum - kReferenceLeft), "<", 0.005,
              "x=" + format_double(marks.left_minimum));
        s.add("AC1.barrier", "barrier top vs -0.258", std::abs(marks.barrier - kReferenceBarrier), "<", 0.005,
              "x=" + format_double(marks.barrier));
        s.add("AC1.right_minimum", "right well minimum vs 1.514", std::abs(marks.right_minimum - kReferenceRight), "<",
              0.005, "x=" + format_double(marks.right_minimum));
    });
    s.guarded("potential.jet_fd", [&] {
        double worst = 0.0;
        for (int n = 1; n <= 6; ++n) {
            std::vector<double> jet_vals;
            std::vector<double> fd_vals;
            for (int j = 0; j <= 24; ++j) {
                const double x = -3.0 + 0.25 * j;
                jet_vals.push_back(potential_derivative(x, n, pot));
                fd_vals.push_back(richardson([&](double z) { return potential_derivative(z, n - 1, pot); }, x, 1e-3));
            }
            double scale = 0.0;
            for (double v : jet_vals) scale = std::max(scale, std::abs(v));
            for (std::size_t j = 0; j < jet_vals.size(); ++j) {
                worst = std::max(worst, std::abs(jet_vals[j] - fd_vals[j]) / scale);
            }
        }
        s.add("potential.jet_vs_fd", "jet derivatives 1..6 vs Richardson differences on [-3,3]", worst, "<", 1e-6);
    });
    s.guarded("potential.e0", [&] {
        PhysicsConfig shifted = cfg.physics;
        shifted.e0 += 1.75;
        const CatichaPotential other(shifted);
        double diff = 0.0;
        for (int n = 1; n <= 5; ++n) {
            for (double x : {-2.0, -0.3, 0.7, 1.5}) {
                diff = std::max(diff, std::abs(potential_derivative(x, n, pot) - potential_derivative(x, n, other)));
            }
        }
        s.add("potential.e0_additive", "derivatives independent of the energy offset", diff, "==", 0.0);
    });

    // ---------------------------------------------------------------- states
    s.guarded("states", [&] {
        s.add("states.norm0", "|int psi0^2 - 1|", std::abs(eigenstate_norm(states, 0) - 1.0), "<", 1e-10);
        s.add("states.norm1", "|int psi1^2 - 1|", std::abs(eigenstate_norm(states, 1) - 1.0), "<", 1e-10);
        s.add("states.overlap", "|<psi0|psi1>|", std::abs(eigenstate_overlap(states)), "<", 1e-8);
        double dens = 0.0;
        for (double t : {0.0, 0.13 * T, 0.25 * T, 0.61 * T}) {
            for (double x = -3.0; x <= 2.5; x += 0.1) {
                dens = std::max(dens, std::abs(states.position_density(x, t, cfg.state) -
                                               std::norm(states.wavefunction(x, t, cfg.state))));
            }
        }
        s.add("states.density_formula", "real-algebra |Psi|^2 vs complex evaluation", dens, "<", 1e-12);
        const auto ps = g.ps();
        const auto phi = momentum_wavefunction(states, ps, 0.25 * T, cfg.state);
        const auto wp = trapezoid_weights(g.np, g.dp());
        double mass = 0.0;
        for (int k = 0; k < g.np; ++k) mass += wp[static_cast<std::size_t>(k)] * std::norm(phi[static_cast<std::size_t>(k)]);
        s.add("states.parseval", "|int |phi|^2 dp - 1|", std::abs(mass - 1.0), "<", 1e-6);
    });

    // ---------------------------------------------------------------- wigner
    WignerBasisFields basis;
    try {
        basis = compute_basis_fields(g, states, cfg.state, cfg.flow.l_max);
    } catch (const GridInsufficient& e) {
        s.add("grid.normalisation", std::string("grid-insufficient: ") + e.what(), 1.0, "==", 0.0);
        return s.report;
    }
    const FlowEngine engine(basis, states, cfg.flow);
    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    s.guarded("wigner.basis", [&] {
        if (!basis.stacks.w00.empty()) {
            s.add("wigner.norm_w00", "|int W00 - 1|", std::abs(integrate_field(basis.stacks.w00[0], g) - 1.0), "<", 1e-6);
            double mn = 0.0;
            for (double v : basis.stacks.w00[0].values()) mn = std::min(mn, v);
            s.add("wigner.w00_negative", "min W00 (ground state is non-Gaussian)", mn, "<", 0.0);
        }
        if (!basis.stacks.w11.empty()) {
            s.add("wigner.norm_w11", "|int W11 - 1|", std::abs(integrate_field(basis.stacks.w11[0], g) - 1.0), "<", 1e-6);
            double asym = 0.0;
            const auto& w = basis.stacks.w11[0];
            for (int i = 0; i < g.nx; ++i) {
                for (int k = 0; k < g.np / 2; ++k) asym = std::max(asym, std::abs(w(i, k) - w(i, g.np - 1 - k)));
            }
            s.add("wigner.w11_p_symmetry", "max |W11(x,-p) - W11(x,p)|", asym, "<", 1e-12);
        }
        if (!basis.stacks.w01_re.empty()) {
            s.add("wigner.cross_re", "|int W01_re|", std::abs(integrate_field(basis.stacks.w01_re[0], g)), "<", 1e-6);
            s.add("wigner.cross_im", "|int W01_im|", std::abs(integrate_field(basis.stacks.w01_im[0], g)), "<", 1e-6);
        }
    });

    s.guarded("wigner.direct", [&] {
        double err = 0.0;
        for (double t : {0.0, T / 8.0, T / 4.0}) {
            const Field2D w = wigner_at(basis, t);
            for (int i = g.nx / 8; i < g.nx; i += g.nx / 5) {
                for (int k = g.np / 3; k < 2 * g.np / 3; k += g.np / 11) {
                    err = std::max(err, std::abs(w(i, k) - direct_wigner(states, cfg.state, g, g.x(i), g.p(k), t)));
                }
            }
        }
        s.add("wigner.direct_transform", "basis combination vs direct complex transform (t = 0, T/8, T/4)", err, "<",
              1e-10);
    });

    s.guarded("wigner.normalisation", [&] {
        double worst = 0.0;
        for (int n = 0; n < 20; ++n) {
            const double t = unit(rng) * T;
            worst = std::max(worst, std::abs(integrate_field(wigner_at(basis, t), g) - 1.0));
        }
        s.add("AC3.normalisation", "max |int W - 1| over 20 random times", worst, "<", 1e-6);
    });

    s.guarded("wigner.marginals", [&] {
        double xerr = 0.0;
        double neg = 0.0;
        double norm_err = 0.0;
        for (double t : {0.0, T / 8.0, T / 4.0, T / 2.0}) {
            const auto m = marginals(basis, t);
            for (int i = 0; i < g.nx; ++i) {
                const double ref = states.position_density(g.x(i), t, cfg.state);
                xerr = std::max(xerr, std::abs(m.x_density[static_cast<std::size_t>(i)] - ref));
            }
            for (double v : m.x_density) neg = std::min(neg, v);
            for (double v : m.p_density) neg = std::min(neg, v);
            const auto wx = trapezoid_weights(g.nx, g.dx());
            const auto wp = trapezoid_weights(g.np, g.dp());
            double nx_ = 0.0;
            double np_ = 0.0;
            for (int i = 0; i < g.nx; ++i) nx_ += wx[static_cast<std::size_t>(i)] * m.x_density[static_cast<std::size_t>(i)];
            for (int k = 0; k < g.np; ++k) np_ += wp[static_cast<std::size_t>(k)] * m.p_density[static_cast<std::size_t>(k)];
            norm_err = std::max({norm_err, std::abs(nx_ - 1.0), std::abs(np_ - 1.0)});
        }
        s.add("AC3.x_marginal", "max |int W dp - |Psi|^2| (t = 0, T/8, T/4, T/2)", xerr, "<", 1e-6);
        s.add("wigner.marginal_nonnegative", "most negative marginal value", neg, ">=", -1e-8);
        s.add("wigner.marginal_norm", "marginal normalisation defect", norm_err, "<", 1e-6);

        const auto m = marginals(basis, T / 4.0);
        const auto phi = momentum_wavefunction(states, g.ps(), T / 4.0, cfg.state);
        double perr = 0.0;
        for (int k = 0; k < g.np; ++k) {
            perr = std::max(perr, std::abs(m.p_density[static_cast<std::size_t>(k)] - std::norm(phi[static_cast<std::size_t>(k)])));
        }
        s.add("AC3.p_marginal", "max |int W dx - |phi|^2| at T/4", perr, "<", 1e-4);

        if (cfg.state == StateKind::superposition) {
            const auto well_mass = [&](double t) {
                const auto mm = marginals(basis, t);
                const auto wx = trapezoid_weights(g.nx, g.dx());
                double left = 0.0;
                for (int i = 0; i < g.nx; ++i) {
                    if (g.x(i) < marks.barrier) left += wx[static_cast<std::size_t>(i)] * mm.x_density[static_cast<std::size_t>(i)];
                }
                return left;
            };
            const double l0 = well_mass(0.0);
            const double lh = well_mass(T / 2.0);
            s.add("wigner.well_swap", "left-well mass at t=0 vs right-well mass at T/2", std::abs(l0 - (1.0 - lh)), "<",
                  0.02, "left(0)=" + format_double(l0) + ", left(T/2)=" + format_double(lh));
        }
    });

    s.guarded("wigner.derivatives", [&] {
        if (basis.l_max < 1) return;
        const double t = T / 4.0;
        const Field2D w = wigner_at(basis, t);
        const Field2D w2 = wigner_p_derivative(basis, t, 1);
        const double floor = 1e-3 * w.max_abs();
        const double h = g.dp();
        double worst = 0.0;
        for (int i = 4; i < g.nx - 4; ++i) {
            for (int k = 4; k < g.np - 4; ++k) {
                if (std::abs(w(i, k)) <= floor) continue;
                const double fd = (2.0 * (w(i, k + 3) + w(i, k - 3)) - 27.0 * (w(i, k + 2) + w(i, k - 2)) +
                                   270.0 * (w(i, k + 1) + w(i, k - 1)) - 490.0 * w(i, k)) /
                                  (180.0 * h * h);
                worst = std::max(worst, std::abs(fd - w2(i, k)) / w2.max_abs());
            }
        }
        s.add("wigner.order2_stack", "d2W/dp2 stack vs sixth-order differences (relative to max)", worst, "<", 1e-4);

        const double dt = 1e-4 * T;
        const Field2D wp = wigner_at(basis, t + dt);
        const Field2D wm = wigner_at(basis, t - dt);
        const Field2D dw = wigner_time_derivative(basis, t);
        double terr = 0.0;
        for (std::size_t n = 0; n < dw.values().size(); ++n) {
            terr = std::max(terr, std::abs((wp.values()[n] - wm.values()[n]) / (2.0 * dt) - dw.values()[n]));
        }
        const double scale = std::max(dw.max_abs(), 1e-300);
        s.add("wigner.time_derivative", "analytic dW/dt vs central difference (h = 1e-4 T, relative)", terr / scale, "<",
              1e-6);
        s.add("wigner.time_derivative_norm", "|int dW/dt|", std::abs(integrate_field(dw, g)), "<", 1e-6);
    });

    s.guarded("wigner.fringes", [&] {
        if (cfg.state != StateKind::superposition) return;
        const double xs[] = {marks.barrier};
        const auto col = compute_basis_columns(xs, g, states, cfg.state, 0);
        const Field2D w = combine(col, state_weights(cfg.state, T / 4.0, cfg.physics.delta_e, cfg.physics.hbar), 0);
        int changes = 0;
        int last = 0;
        for (int k = 0; k < g.np; ++k) {
            if (std::abs(g.p(k)) > 2.0) continue;
            const int sgn = w(0, k) > 0 ? 1 : (w(0, k) < 0 ? -1 : 0);
            if (sgn != 0 && last != 0 && sgn != last) ++changes;
            if (sgn != 0) last = sgn;
        }
        s.add("wigner.fringes", "sign changes of W(X_S, p; T/4) on |p| <= 2", changes, ">=", 3);
    });

    // ---------------------------------------------------------------- flow
    const FlowField f4 = engine.at(T / 4.0);
    s.guarded("flow.basic", [&] {
        double jx_err = 0.0;
        for (int i = 0; i < g.nx; ++i) {
            for (int k = 0; k < g.np; ++k) jx_err = std::max(jx_err, std::abs(f4.jx(i, k) - g.p(k) / states.mass() * f4.w(i, k)));
        }
        s.add("flow.jx_identity", "max |J_x - (p/m) W| relative to max |J_x|", jx_err / f4.jx.max_abs(), "<", 1e-14);
        s.add("flow.converged", "series converged in every column at T/4", f4.converged ? 1.0 : 0.0, "==", 1.0,
              "max l used " + std::to_string(f4.max_terms_used()));
        s.add("flow.truncation_defect", "last-term / column max at T/4", f4.truncation_defect, "<", cfg.flow.eps_rel);
        int violations = 0;
        for (std::size_t l = 3; l < f4.term_max.size(); ++l) {
            if (f4.term_max[l] > f4.term_max[l - 1]) ++violations;
        }
        s.add("flow.series_monotone", "increases of the max term magnitude for l >= 2", violations, "==", 0.0);

        const PointFlowEvaluator exact(states, cfg.state, g, PointFlowEvaluator::Mode::exact);
        double kerr = 0.0;
        for (int i = g.nx / 7; i < g.nx; i += g.nx / 6) {
            for (int k = g.np / 3; k < 2 * g.np / 3; k += g.np / 9) {
                kerr = std::max(kerr, std::abs(exact(g.x(i), g.p(k), T / 4.0).jp - f4.jp(i, k)));
            }
        }
        s.add("flow.exact_kernel", "truncated series vs closed-form nonlocal kernel (relative to max |J_p|)",
              kerr / f4.jp.max_abs(), "<", 1e-8);
    });

    s.guarded("flow.continuity", [&] {
        const auto r1 = continuity_residual(basis, f4);
        s.add("flow.continuity_rms", "continuity residual RMS at T/4 (relative to max |dW/dt|)",
              r1.rms / std::max(wigner_time_derivative(basis, T / 4.0).max_abs(), 1e-300), "<", 1e-3);
        if (!options.refinement_study) return;
        PhaseSpaceGrid fine = g;
        fine.nx = 2 * g.nx;
        fine.np = 2 * g.np;
        const auto basis_f = compute_basis_fields(fine, states, cfg.state, std::min(cfg.flow.l_max, basis.l_max));
        const FlowField ff = FlowEngine(basis_f, states, cfg.flow).at(T / 4.0);
        const auto r2 = continuity_residual(basis_f, ff);
        s.add("AC3.continuity_convergence", "RMS residual ratio under grid doubling", r1.rms / r2.rms, ">=", 8.0,
              "rms " + format_double(r1.rms) + " -> " + format_double(r2.rms));
    });

    s.guarded("flow.currents", [&] {
        double xerr = 0.0;
        for (double t : {0.1 * T, 0.25 * T, 0.4 * T, 0.8 * T}) {
            for (double x : {marks.barrier, -1.0, 0.5, 1.2}) {
                xerr = std::max(xerr, std::abs(probability_current_x(basis, states, t, x) -
                                               states.probability_current(x, t, cfg.state)));
            }
        }
        s.add("flow.current_x", "column integral of J_x vs (hbar/m) Im(Psi* Psi')", xerr, "<", 1e-6);

        const double h = 1e-4 * T;
        const auto mp = marginals(basis, T / 4.0 + h).p_density;
        const auto mm = marginals(basis, T / 4.0 - h).p_density;
        const auto jp = probability_current_p(f4);
        double perr = 0.0;
        for (std::size_t k = 2; k + 2 < jp.size(); ++k) {
            const double lhs = (mp[k] - mm[k]) / (2.0 * h);
            perr = std::max(perr, std::abs(lhs + fd4(jp, k, g.dp())));
        }
        s.add("flow.current_p", "d/dt of the p-marginal vs -d/dp of int J_p dx at T/4", perr, "<", 1e-4);

        const auto mean_p = [&](double t) {
            const auto m = marginals(basis, t).p_density;
            const auto wp = trapezoid_weights(g.np, g.dp());
            double acc = 0.0;
            for (int k = 0; k < g.np; ++k) acc += wp[static_cast<std::size_t>(k)] * g.p(k) * m[static_cast<std::size_t>(k)];
            return acc;
        };
        const double dpdt = (mean_p(T / 4.0 + h) - mean_p(T / 4.0 - h)) / (2.0 * h);
        s.add("flow.ehrenfest", "|int int J_p - d<p>/dt| at T/4", std::abs(integrate_field(f4.jp, g) - dpdt), "<", 1e-6);
    });

    s.guarded("AC2", [&] {
        if (cfg.state != StateKind::superposition) return;
        const int n = cfg.current_samples;
        std::vector<double> ts(static_cast<std::size_t>(n));
        std::vector<double> js(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) {
            ts[static_cast<std::size_t>(j)] = T * j / n;
            js[static_cast<std::size_t>(j)] = probability_current_x(basis, states, ts[static_cast<std::size_t>(j)], marks.barrier);
        }
        const auto fit = fit_sinusoid(ts, js, T);
        s.add("AC2.sinusoid_residual", "max fit residual / amplitude of the barrier current", fit.max_residual / fit.amplitude,
              "<", 0.01, "A=" + format_double(fit.amplitude));
        s.add("AC2.period", "relative error of the fitted period vs 2 pi hbar / dE", std::abs(fit.period / T - 1.0), "<",
              1e-3, "T=" + format_double(fit.period));
        s.add("AC2.phase", "|phase offset| of the fit", std::abs(fit.phase), "<", 0.02);
        s.add("AC2.zero_crossings", "|j_x(X_S; 0)| + |j_x(X_S; T/2)| relative to A",
              (std::abs(js.front()) + std::abs(js[static_cast<std::size_t>(n / 2)])) / fit.amplitude, "<", 1e-6);
    });

    // ---------------------------------------------------------------- degenerate and stationary cases
    s.guarded("AC4", [&] {
        const HarmonicEigenstates osc(1.0, 1.0, 1.0);
        PhaseSpaceGrid hg;
        hg.x_min = -6.0;
        hg.x_max = 6.0;
        hg.p_min = -6.0;
        hg.p_max = 6.0;
        hg.nx = 256;
        hg.np = 256;
        hg.y_half_width = 6.0;
        hg.ny = 512;
        const auto hb = compute_basis_fields(hg, osc, StateKind::ground, 4);
        FlowOptions fo;
        fo.l_max = 4;
        const FlowField hf = FlowEngine(hb, osc, fo).at(0.3);
        double err = 0.0;
        for (int i = 0; i < hg.nx; ++i) {
            const double vp = potential_derivative(hg.x(i), 1, osc.potential());
            for (int k = 0; k < hg.np; ++k) err = std::max(err, std::abs(hf.jp(i, k) + hf.w(i, k) * vp));
        }
        s.add("AC4.harmonic_identity", "max |J_p + W dV/dx| relative to max |J_p|", err / hf.jp.max_abs(), "<", 1e-15);
        s.add("AC4.termination", "series index used for the harmonic potential", hf.max_terms_used(), "==", 0.0);
        const auto pts = analyze_frame(hf, Region{-3.0, 3.0, -3.0, 3.0});
        int vortices = 0;
        bool at_origin = false;
        for (const auto& q : pts) {
            if (q.winding == 1) ++vortices;
            if (std::hypot(q.x, q.p) < 0.05) at_origin = true;
        }
        s.add("topology.harmonic_vortex", "isolated +1 points for the harmonic ground state", vortices, "==", 1.0,
              at_origin ? "at the origin" : "off the origin");
        const auto res = continuity_residual(hb, hf);
        s.add("flow.harmonic_continuity", "continuity residual RMS for the stationary oscillator", res.rms, "<", 1e-6);
    });

    s.guarded("AC5", [&] {
        for (StateKind kind : {StateKind::ground, StateKind::excited}) {
            const auto eb = compute_basis_fields(g, states, kind, cfg.flow.l_max);
            const FlowField ef = FlowEngine(eb, states, cfg.flow).at(0.37 * T);
            double ax = 0.0;
            double ap = 0.0;
            for (int i = 0; i < g.nx; ++i) {
                for (int k = 0; k < g.np / 2; ++k) {
                    ax = std::max(ax, std::abs(ef.jx(i, k) + ef.jx(i, g.np - 1 - k)));
                    ap = std::max(ap, std::abs(ef.jp(i, k) - ef.jp(i, g.np - 1 - k)));
                }
            }
            const std::string tag = to_string(kind);
            s.add("AC5." + tag + ".jx_antisymmetry", "max |J_x(x,p) + J_x(x,-p)| / max |J_x|", ax / ef.jx.max_abs(), "<",
                  1e-12);
            s.add("AC5." + tag + ".jp_symmetry", "max |J_p(x,p) - J_p(x,-p)| / max |J_p|", ap / ef.jp.max_abs(), "<",
                  1e-12);
            const double xs[] = {-1.0, marks.barrier, 0.8};
            double jsum = 0.0;
            for (double x : xs) jsum = std::max(jsum, std::abs(probability_current_x(eb, states, 0.2 * T, x)));
            s.add("flow." + tag + ".stationary_current", "|j_x| of a stationary state", jsum, "<", 1e-12);
            if (kind == StateKind::ground) {
                const auto pts = analyze_frame(ef, cfg.region);
                double mismatch = 0.0;
                for (const auto& q : pts) {
                    double best = std::numeric_limits<double>::infinity();
                    for (const auto& r : pts) {
                        if (r.winding == q.winding) best = std::min(best, std::hypot(q.x - r.x, q.p + r.p));
                    }
                    mismatch = std::max(mismatch, best);
                }
                s.add("topology.ground_p_symmetry", "max distance between a point and the mirror of its partner",
                      mismatch, "<", 2.0 * std::hypot(g.dx(), g.dp()), std::to_string(pts.size()) + " points");
            }
        }
    });

    // ---------------------------------------------------------------- topology at T/4
    s.guarded("topology.snapshot", [&] {
        if (cfg.state != StateKind::superposition) return;
        const auto pts = analyze_frame(f4, cfg.region);
        s.add("topology.count_T4", "stagnation points in the region at T/4", static_cast<double>(pts.size()), ">=", 6.0);

        const PointFlowEvaluator exact(states, cfg.state, g);
        const PointFlowField smooth(exact, T / 4.0);
        const GridFlowEvaluator grid_eval(f4);
        const double cell = std::hypot(g.dx(), g.dp());
        std::vector<StagnationPoint> polished;
        double pin = 0.0;
        double resid = 0.0;
        std::vector<double> mags;
        for (double v : f4.magnitude_squared().values()) mags.push_back(std::sqrt(v));
        std::nth_element(mags.begin(), mags.begin() + static_cast<long>(mags.size() / 2), mags.end());
        const double median = mags[mags.size() / 2];
        for (auto q : pts) {
            polish(q, smooth, cell);
            const auto v = exact(q.x, q.p, T / 4.0);
            resid = std::max(resid, std::hypot(v.jx, v.jp) / median);
            if (std::abs(q.p) > 0.05) pin = std::max(pin, std::abs(v.w) / f4.w.max_abs());
            polished.push_back(q);
        }
        s.add("topology.pinning", "max |W| / max|W| at polished points with p != 0", pin, "<", 1e-6);
        s.add("topology.zero_residual", "max |J| / median |J| at polished points", resid, "<", 1e-3);

        // AC6: well vortices nearest the minima.
        const auto nearest = [&](double x0) {
            const StagnationPoint* best = nullptr;
            for (const auto& q : polished) {
                if (q.winding != 1) continue;
                if (!best || std::hypot(q.x - x0, q.p) < std::hypot(best->x - x0, best->p)) best = &q;
            }
            return best;
        };
        const StagnationPoint* left = nearest(marks.left_minimum);
        const StagnationPoint* right = nearest(marks.right_minimum);
        if (left && right) {
            s.add("AC6.left_displacement", "x_left - X_L (inward shift of the left-well vortex)",
                  left->x - marks.left_minimum, ">", 0.0, "vortex at x=" + format_double(left->x));
            s.add("AC6.right_displacement", "X_R - x_right (inward shift of the right-well vortex)",
                  marks.right_minimum - right->x, ">", 0.0, "vortex at x=" + format_double(right->x));
            s.add("topology.well_vortex_cw", "well vortices rotating clockwise",
                  (left->kind == StagnationKind::vortex_cw) + (right->kind == StagnationKind::vortex_cw), "==", 2.0);
        } else {
            s.fail("AC6", "well vortices not found");
        }

        // AC8: alternating string near the barrier.
        std::vector<StagnationPoint> string;
        for (const auto& q : pts) {
            if (std::abs(q.x - marks.barrier) < 0.3 && q.winding == 1) string.push_back(q);
        }
        std::sort(string.begin(), string.end(), [](const auto& a, const auto& b) { return a.p < b.p; });
        int alternations = 0;
        int best_run = string.empty() ? 0 : 1;
        int run = 1;
        for (std::size_t j = 1; j < string.size(); ++j) {
            const bool alt = (string[j].kind == StagnationKind::vortex_cw && string[j - 1].kind == StagnationKind::vortex_ccw) ||
                             (string[j].kind == StagnationKind::vortex_ccw && string[j - 1].kind == StagnationKind::vortex_cw);
            if (alt) {
                ++alternations;
                best_run = std::max(best_run, ++run);
            } else {
                run = 1;
            }
        }
        double spread = string.empty() ? 0.0 : string.back().p - string.front().p;
        s.add("AC8.vortex_string", "longest alternating-handedness run of vortices within 0.3 of X_S", best_run, ">=", 3.0,
              std::to_string(string.size()) + " vortices spanning dp=" + format_double(spread));

        int p_saddles = 0;
        for (const auto& q : pts) p_saddles += q.kind == StagnationKind::saddle_p_oriented;
        s.add("topology.p_saddles", "p-directed saddles at T/4", p_saddles, ">=", 1.0);

        // Consistency and small-loop windings.
        const double r = 0.3 * std::min(g.dx(), g.dp());
        WindingOptions wopt;
        wopt.max_step = 0.25 * r;
        int inconsistent = 0;
        for (const auto& q : pts) {
            try {
                if (winding_number(WindingLoop::circle(q.x, q.p, r), grid_eval, wopt) != q.winding) ++inconsistent;
            } catch (const Error&) {
                ++inconsistent;
            }
        }
        s.add("topology.consistency", "points whose small-loop winding disagrees with the scan", inconsistent, "==", 0.0);
        if (right) {
            s.add("topology.right_well_loop", "winding of a circle around the right-well vortex",
                  winding_number(WindingLoop::circle(right->x, right->p, 0.1), smooth), "==", 1.0);
        }
        s.add("topology.empty_loop", "winding of a loop with no stagnation point",
              winding_number(WindingLoop::circle(-1.6, 1.0, 0.12), smooth), "==", 0.0);

        // Saddle oracle: dense fixed-step angle sum.
        for (const auto& q : polished) {
            if (q.winding != -1) continue;
            const auto loop = WindingLoop::circle(q.x, q.p, 0.02, 4000);
            double acc = 0.0;
            for (std::size_t j = 0; j < loop.vertices.size(); ++j) {
                const auto& a = loop.vertices[j];
                const auto& b = loop.vertices[(j + 1) % loop.vertices.size()];
                const auto va = smooth(a.x, a.p);
                const auto vb = smooth(b.x, b.p);
                acc += std::remainder(std::atan2(vb.p, vb.x) - std::atan2(va.p, va.x), 2.0 * std::numbers::pi);
            }
            s.add("topology.saddle_loop", "dense angle sum around a saddle / 2 pi", acc / (2.0 * std::numbers::pi), "<",
                  -0.95, "adaptive winding " + std::to_string(winding_number(WindingLoop::circle(q.x, q.p, 0.02), smooth)));
            break;
        }

        // Additivity over rectangles.
        int add_fail = 0;
        int configs = 0;
        const Region boxes[] = {{-2.5, -1.5, -0.5, 0.5}, {-0.6, 0.0, -4.0, 0.0}, {-0.6, 0.0, 0.0, 3.5},
                                {-1.7, 1.0, -3.3, -0.5}, {0.9, 1.8, -0.6, 0.6}, {-2.9, 2.4, -1.6, 1.6}};
        for (const auto& b : boxes) {
            int inside = 0;
            bool near = false;
            const auto loop = WindingLoop::from_region(b);
            for (const auto& q : pts) {
                if (loop.contains(q.x, q.p)) inside += q.winding;
                if (loop.boundary_distance(q.x, q.p) < 2.0 * cell) near = true;
            }
            if (near) continue;
            ++configs;
            WindingOptions wo;
            wo.max_step = 0.5 * std::min(g.dx(), g.dp());
            if (winding_number(loop, grid_eval, wo) != inside) ++add_fail;
        }
        s.add("topology.additivity", "loops whose winding differs from the enclosed charge", add_fail, "==", 0.0,
              std::to_string(configs) + " configurations");
    });

    s.guarded("topology.remnant", [&] {
        if (cfg.state != StateKind::superposition) return;
        const FlowField fh = engine.at(T / 2.0);
        const auto pts = analyze_frame(fh, cfg.region);
        const StagnationPoint* best = nullptr;
        for (const auto& q : pts) {
            if (q.winding == -1 && std::abs(q.p) < 0.1 && (!best || std::abs(q.x - marks.barrier) < std::abs(best->x - marks.barrier))) {
                best = &q;
            }
        }
        s.add("topology.barrier_remnant", "saddle near the barrier top at T/2 classified as separatrix crossing",
              best && best->kind == StagnationKind::separatrix_crossing ? 1.0 : 0.0, "==", 1.0,
              best ? "at x=" + format_double(best->x) : "not found");
    });

    s.guarded("topology.integrality", [&] {
        double worst = 0.0;
        int admissible = 0;
        int attempts = 0;
        while (admissible < 100 && attempts < 1000) {
            ++attempts;
            const double t = unit(rng) * T;
            const double cx = cfg.region.x_min + 0.5 + unit(rng) * (cfg.region.x_max - cfg.region.x_min - 1.0);
            const double cp = cfg.region.p_min + 0.5 + unit(rng) * (cfg.region.p_max - cfg.region.p_min - 1.0);
            const double rx = 0.05 + 0.45 * unit(rng);
            const double rp = 0.05 + 0.45 * unit(rng);
            const FlowField ft = engine.at(t);
            const GridFlowEvaluator ev(ft);
            WindingOptions wo;
            wo.max_step = 0.5 * std::min(g.dx(), g.dp());
            try {
                const auto r = winding_detail(WindingLoop::ellipse(cx, cp, rx, rp, 64), ev, wo);
                worst = std::max(worst, std::abs(r.raw_turns - r.winding));
                ++admissible;
            } catch (const LoopThroughZero&) {
            }
        }
        s.add("topology.integrality", "max |raw winding - integer| over random admissible loops", worst, "<",
              cfg.winding_tolerance, std::to_string(admissible) + " loops");
    });

    // ---------------------------------------------------------------- tracking and charge audits
    if (options.tracking && cfg.state == StateKind::superposition) {
        s.guarded("AC7", [&] {
            const double t0 = cfg.t0_periods * T;
            const double t1 = cfg.t1_periods * T;
            const double dt = cfg.dt_periods * T;
            TrackOptions to;
            to.refinement_radius = cfg.refinement_radius;
            const auto tr = track_flow(engine, t0, t1, dt, cfg.region, to);
            int topo = 0;
            int broken = 0;
            for (const auto& ev : tr.events) {
                if (ev.kind == EventKind::loop_crossing) continue;
                ++topo;
                if (!ev.conserves_charge()) ++broken;
            }
            s.add("AC7.event_conservation", "merge/split events violating charge conservation", broken, "==", 0.0,
                  std::to_string(topo) + " merge/split events");
            s.add("AC7.events_found", "merge/split events detected", topo, ">=", 1.0);

            int spanning = 0;
            for (const auto& seg : tr.segments) {
                if (seg.points.front().t > t0 + 1e-12 || seg.points.back().t < t1 - 1e-9) continue;
                const auto& q = seg.points.front();
                if (q.winding != 1) continue;
                if (std::abs(q.x - marks.left_minimum) < 0.4 || std::abs(q.x - marks.right_minimum) < 0.4) ++spanning;
            }
            s.add("AC7.well_segments", "unbroken well-vortex segments spanning the window", spanning, "==", 2.0);

            const auto loop = WindingLoop::ellipse(cfg.loop_cx, cfg.loop_cp, cfg.loop_ax, cfg.loop_ap);
            std::vector<double> times;
            for (double t : tr.frame_times) {
                const double phase = t / T - std::floor(t / T);
                if (phase <= cfg.loop_half_window_periods || phase >= 1.0 - cfg.loop_half_window_periods) times.push_back(t);
            }
            const auto ledger = charge_ledger(loop, times, engine, cfg.region, tr.events);
            int nonzero = 0;
            int near = 0;
            for (std::size_t j = 0; j < ledger.winding.size(); ++j) {
                nonzero += ledger.winding[j] != 0;
                near += ledger.boundary_proximity[j];
            }
            const auto first = locate_stagnation_points(engine.at(times.front()), cfg.region);
            int enclosed = 0;
            for (const auto& q : first) enclosed += loop.contains(q.x, q.p);
            s.add("AC7.loop_zero", "audit-loop frames with nonzero winding", nonzero, "==", 0.0,
                  std::to_string(times.size()) + " frames, " + std::to_string(enclosed) + " points enclosed at start");
            s.add("AC7.loop_clearance", "audit-loop frames with a point near the boundary", near, "==", 0.0);
            s.add("AC7.loop_nontrivial", "stagnation points inside the audit loop at the window start", enclosed, ">=", 2.0);

            // Right-well loop: constant +1.
            std::vector<double> ts50;
            for (int j = 0; j < 50; ++j) ts50.push_back(T * j / 50.0);
            const auto rw = charge_ledger(WindingLoop::ellipse(marks.right_minimum - 0.1, 0.0, 0.45, 0.6), ts50, engine,
                                          cfg.region);
            s.add("topology.right_well_ledger", "right-well loop winding constant at +1 over one period",
                  rw.constant && rw.winding.front() == 1 ? 1.0 : 0.0, "==", 1.0);

            // Region boundary: every change is carried by a crossing.
            const auto big = charge_ledger(WindingLoop::from_region(cfg.region), ts50, engine, cfg.region, tr.events);
            int unexplained = 0;
            for (std::size_t j = 1; j < big.winding.size(); ++j) {
                if (big.winding[j] == big.winding[j - 1]) continue;
                bool ok = false;
                for (const auto& ev : tr.events) {
                    if (ev.kind == EventKind::loop_crossing && ev.t_b >= big.times[j - 1] && ev.t_a <= big.times[j]) ok = true;
                }
                if (!ok) ++unexplained;
            }
            s.add("topology.region_ledger", "changes of the region-boundary winding without a boundary crossing",
                  unexplained, "==", 0.0, big.constant ? "constant" : "varies through boundary crossings");
        });
    }
    return s.report;
}

}  // namespace wflow
