#include "wflow/config.hpp"
#include "wflow/flow.hpp"
#include "wflow/potential.hpp"
#include "wflow/states.hpp"
#include "wflow/topology.hpp"
#include "wflow/wigner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstring>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace wflow;

namespace {

constexpr double kPi = std::numbers::pi;

struct Line {
    bool pass = true;
    std::ostringstream detail;
    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            pass = false;
            detail << " FAILED[" << what << "]";
        }
    }
};

int failures = 0;

void emit(const char* id, const char* title, Line& line, double seconds)
{
    std::cout << (line.pass ? "[PASS] " : "[FAIL] ") << id << " " << title << " |" << line.detail.str() << " | "
              << seconds << " s" << std::endl;
    failures += line.pass ? 0 : 1;
}

double since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------- oracle potential
// V = E0 + u'' + u'^2, u = log of the closed-form ground state.
struct OraclePotential {
    double q;
    double a;
    double e0;

    [[nodiscard]] double u1(double x) const { return std::tanh(x) - q * (std::sinh(2 * x) + a + a * std::cosh(2 * x)); }
    [[nodiscard]] double u2(double x) const
    {
        const double c = std::cosh(x);
        return 1.0 / (c * c) - q * (2 * std::cosh(2 * x) + 2 * a * std::sinh(2 * x));
    }
    [[nodiscard]] double u3(double x) const
    {
        const double c = std::cosh(x);
        return -2.0 * std::tanh(x) / (c * c) - q * (4 * std::sinh(2 * x) + 4 * a * std::cosh(2 * x));
    }
    [[nodiscard]] double value(double x) const { return e0 + u2(x) + u1(x) * u1(x); }
    [[nodiscard]] double slope(double x) const { return u3(x) + 2 * u1(x) * u2(x); }
};

std::vector<double> oracle_extrema(const OraclePotential& v, double lo, double hi)
{
    std::vector<double> roots;
    const int n = 7000;
    double xa = lo;
    double fa = v.slope(xa);
    for (int j = 1; j <= n; ++j) {
        const double xb = lo + (hi - lo) * j / n;
        const double fb = v.slope(xb);
        if ((fa < 0) != (fb < 0)) {
            double l = xa;
            double r = xb;
            for (int it = 0; it < 80; ++it) {
                const double m = 0.5 * (l + r);
                if ((v.slope(m) < 0) == (v.slope(l) < 0)) l = m;
                else r = m;
            }
            roots.push_back(0.5 * (l + r));
        }
        xa = xb;
        fa = fb;
    }
    return roots;
}

// ---------------------------------------------------------------- oracle winding
// Bilinear sampling of the grid flow, dense fixed-step angle sum.
Vec2 bilinear(const FlowField& f, double x, double p)
{
    const auto& g = f.grid;
    const double fx = std::clamp((x - g.x_min) / g.dx(), 0.0, g.nx - 1.000001);
    const double fp = std::clamp((p - g.p(0)) / g.dp(), 0.0, g.np - 1.000001);
    const int i = static_cast<int>(fx);
    const int k = static_cast<int>(fp);
    const double s = fx - i;
    const double r = fp - k;
    const auto mix = [&](const Field2D& v) {
        return (1 - s) * (1 - r) * v(i, k) + s * (1 - r) * v(i + 1, k) + (1 - s) * r * v(i, k + 1) + s * r * v(i + 1, k + 1);
    };
    return {mix(f.jx), mix(f.jp)};
}

double dense_turns(const FlowField& f, double cx, double cp, double ax, double ap, int n)
{
    double acc = 0.0;
    Vec2 prev = bilinear(f, cx + ax, cp);
    for (int j = 1; j <= n; ++j) {
        const double th = 2 * kPi * j / n;
        const Vec2 cur = bilinear(f, cx + ax * std::cos(th), cp + ap * std::sin(th));
        acc += std::remainder(std::atan2(cur.p, cur.x) - std::atan2(prev.p, prev.x), 2 * kPi);
        prev = cur;
    }
    return acc / (2 * kPi);
}

double circulation(const FlowField& f, double cx, double cp, double r)
{
    double acc = 0.0;
    const int n = 64;
    for (int j = 0; j < n; ++j) {
        const double th = 2 * kPi * (j + 0.5) / n;
        const Vec2 v = bilinear(f, cx + r * std::cos(th), cp + r * std::sin(th));
        acc += -v.x * std::sin(th) + v.p * std::cos(th);
    }
    return acc;
}

// ---------------------------------------------------------------- oracle flow at a point
// Direct quadrature with the nonlocal kernel [V(x+y) - V(x-y)] / (2y).
Vec2 oracle_flow(const EigenstatePair& s, const OraclePotential& v, double x, double p, double t)
{
    const int n = 8000;
    const double Y = 5.5;
    const double dy = Y / n;
    std::complex<double> w_acc = 0.0;
    std::complex<double> j_acc = 0.0;
    for (int j = 0; j < n; ++j) {
        const double y = (j + 0.5) * dy;
        for (double sy : {y, -y}) {
            const auto rho = std::conj(s.wavefunction(x + sy, t, StateKind::superposition)) *
                             s.wavefunction(x - sy, t, StateKind::superposition);
            const auto ker = std::polar(1.0, 2.0 * p * sy);
            w_acc += rho * ker;
            // d/dp of the transform of rho * K gives J_p = -int rho K(x,y) e^{2ipy} dy / pi with K = dV/(2y)
            const double k = (v.value(x + sy) - v.value(x - sy)) / (2.0 * sy);
            j_acc += rho * ker * k;
        }
    }
    const double w = w_acc.real() * dy / kPi;
    const double jp = -j_acc.real() * dy / kPi;
    return {p / s.mass() * w, jp};
}

}  // namespace

int main(int argc, char** argv)
{
    const bool smoke = argc > 1 && std::strcmp(argv[1], "--smoke") == 0;
    const auto start = std::chrono::steady_clock::now();
    RunConfig cfg;
    if (smoke) {
        cfg.grid.nx = 256;
        cfg.grid.np = 256;
    }
    const auto& g = cfg.grid;
    const double T = cfg.physics.period();
    std::cout << "acceptance (" << (smoke ? "smoke, " : "") << g.nx << "x" << g.np << " grid)" << std::endl;

    const CatichaEigenstates states(cfg.physics);
    const OraclePotential vo{cfg.physics.delta_e / 4.0, cfg.physics.alpha, cfg.physics.e0};

    // AC1
    WellLandmarks marks{};
    {
        const auto t0 = std::chrono::steady_clock::now();
        Line line;
        marks = locate_landmarks(states.potential(), -4.0, 3.0);
        const auto roots = oracle_extrema(vo, -4.0, 3.0);
        line.require(roots.size() == 3, "oracle finds three extrema");
        if (roots.size() == 3) {
            const double lib[] = {marks.left_minimum, marks.barrier, marks.right_minimum};
            const double reference[] = {-2.095, -0.258, 1.514};
            double oracle_gap = 0.0;
            double reference_gap = 0.0;
            for (int j = 0; j < 3; ++j) {
                oracle_gap = std::max(oracle_gap, std::abs(lib[j] - roots[static_cast<std::size_t>(j)]));
                reference_gap = std::max(reference_gap, std::abs(lib[j] - reference[j]));
            }
            line.detail << " X_L=" << marks.left_minimum << " X_S=" << marks.barrier << " X_R=" << marks.right_minimum
                        << " max|lib-oracle|=" << oracle_gap << " (tol 1e-6) max|lib-ref|=" << reference_gap << " (tol 0.005)";
            line.require(oracle_gap < 1e-6, "oracle agreement");
            line.require(reference_gap < 0.005, "reference values");
        }
        const double dt = since(t0);
        line.require(dt < 1.0, "runtime < 1 s");
        emit("AC1", "potential landmarks", line, dt);
    }

    auto t_basis = std::chrono::steady_clock::now();
    const auto basis = compute_basis_fields(g, states, StateKind::superposition, cfg.flow.l_max);
    const FlowEngine engine(basis, states, cfg.flow);
    std::cout << "  basis computed in " << since(t_basis) << " s" << std::endl;

    // AC2
    {
        const auto t0 = std::chrono::steady_clock::now();
        Line line;
        const int n = 64;
        std::vector<double> ts;
        std::vector<double> js;
        double oracle_gap = 0.0;
        for (int j = 0; j < n; ++j) {
            const double t = T * j / n;
            const double jx = probability_current_x(basis, states, t, marks.barrier);
            const double x = marks.barrier;
            const double h = 1e-4;
            const double d0 = (states.psi0(x + h) - states.psi0(x - h)) / (2 * h);
            const double d1 = (states.psi1(x + h) - states.psi1(x - h)) / (2 * h);
            const double theta = cfg.physics.delta_e * t / cfg.physics.hbar;
            const double ref = cfg.physics.hbar / (2 * states.mass()) * std::sin(theta) * (states.psi0(x) * d1 - d0 * states.psi1(x));
            oracle_gap = std::max(oracle_gap, std::abs(jx - ref));
            ts.push_back(t);
            js.push_back(jx);
        }
        // Linear least squares at the nominal period: y = s sin + c cos.
        double ss = 0, sc = 0, cc = 0, ys = 0, yc = 0;
        for (int j = 0; j < n; ++j) {
            const double a = std::sin(2 * kPi * ts[static_cast<std::size_t>(j)] / T);
            const double b = std::cos(2 * kPi * ts[static_cast<std::size_t>(j)] / T);
            ss += a * a;
            sc += a * b;
            cc += b * b;
            ys += js[static_cast<std::size_t>(j)] * a;
            yc += js[static_cast<std::size_t>(j)] * b;
        }
        const double det = ss * cc - sc * sc;
        const double s = (ys * cc - yc * sc) / det;
        const double c = (yc * ss - ys * sc) / det;
        const double amp = std::hypot(s, c);
        const double phase = std::atan2(c, s);
        double resid = 0.0;
        for (int j = 0; j < n; ++j) {
            const double th = 2 * kPi * ts[static_cast<std::size_t>(j)] / T;
            resid = std::max(resid, std::abs(js[static_cast<std::size_t>(j)] - s * std::sin(th) - c * std::cos(th)));
        }
        const auto fit = fit_sinusoid(ts, js, T);
        line.detail << " A=" << amp << " phase=" << phase << " (tol 0.02) resid/A=" << resid / amp
                    << " (tol 0.01) T_fit/T-1=" << fit.period / T - 1 << " (tol 1e-3) |j-oracle|=" << oracle_gap
                    << " (tol 1e-6)";
        line.require(resid / amp < 0.01, "sinusoid residual");
        line.require(std::abs(fit.period / T - 1.0) < 1e-3, "period");
        line.require(std::abs(fit.amplitude / amp - 1.0) < 1e-6, "fit amplitudes agree");
        line.require(std::abs(phase) < 0.02, "phase");
        line.require(oracle_gap < 1e-6, "current oracle");
        emit("AC2", "tunnelling current", line, since(t0));
    }

    // AC3
    {
        const auto t0 = std::chrono::steady_clock::now();
        Line line;
        std::mt19937_64 rng(20240601);
        std::uniform_real_distribution<double> u(0.0, T);
        const auto wx = trapezoid_weights(g.nx, g.dx());
        const auto wp = trapezoid_weights(g.np, g.dp());
        double norm_err = 0.0;
        double xm_err = 0.0;
        for (int s = 0; s < 20; ++s) {
            const double t = u(rng);
            const Field2D w = wigner_at(basis, t);
            double total = 0.0;
            for (int i = 0; i < g.nx; ++i) {
                double col = 0.0;
                for (int k = 0; k < g.np; ++k) col += wp[static_cast<std::size_t>(k)] * w(i, k);
                total += wx[static_cast<std::size_t>(i)] * col;
                xm_err = std::max(xm_err, std::abs(col - std::norm(states.wavefunction(g.x(i), t, StateKind::superposition))));
            }
            norm_err = std::max(norm_err, std::abs(total - 1.0));
        }
        // p-marginal against a direct momentum transform on a fine x-lattice.
        const double t = 0.25 * T;
        const Field2D w = wigner_at(basis, t);
        const int nxf = 6000;
        const double xa = -7.0;
        const double xb = 6.0;
        const double hx = (xb - xa) / nxf;
        std::vector<std::complex<double>> psi(static_cast<std::size_t>(nxf));
        for (int j = 0; j < nxf; ++j) psi[static_cast<std::size_t>(j)] = states.wavefunction(xa + (j + 0.5) * hx, t, StateKind::superposition);
        double pm_err = 0.0;
        for (int k = 0; k < g.np; ++k) {
            std::complex<double> phi = 0.0;
            for (int j = 0; j < nxf; ++j) phi += psi[static_cast<std::size_t>(j)] * std::polar(1.0, -g.p(k) * (xa + (j + 0.5) * hx));
            phi *= hx / std::sqrt(2 * kPi);
            double row = 0.0;
            for (int i = 0; i < g.nx; ++i) row += wx[static_cast<std::size_t>(i)] * w(i, k);
            pm_err = std::max(pm_err, std::abs(row - std::norm(phi)));
        }
        // Continuity: centred time difference of W against a fourth-order divergence of J.
        const auto residual_rms = [&](const WignerBasisFields& b) {
            const FlowEngine e(b, states, cfg.flow);
            const FlowField f = e.at(t);
            const double h = 1e-4 * T;
            const Field2D wa = wigner_at(b, t + h);
            const Field2D wb = wigner_at(b, t - h);
            const auto& gg = b.grid;
            const double floor = 1e-6 * f.w.max_abs();
            double acc = 0.0;
            std::size_t cnt = 0;
            for (int i = 4; i < gg.nx - 4; ++i) {
                for (int k = 4; k < gg.np - 4; ++k) {
                    if (std::abs(f.w(i, k)) <= floor) continue;
                    const double dx = (f.jx(i - 2, k) - 8 * f.jx(i - 1, k) + 8 * f.jx(i + 1, k) - f.jx(i + 2, k)) / (12 * gg.dx());
                    const double dp = (f.jp(i, k - 2) - 8 * f.jp(i, k - 1) + 8 * f.jp(i, k + 1) - f.jp(i, k + 2)) / (12 * gg.dp());
                    const double r = (wa(i, k) - wb(i, k)) / (2 * h) + dx + dp;
                    acc += r * r;
                    ++cnt;
                }
            }
            return std::sqrt(acc / static_cast<double>(cnt));
        };
        PhaseSpaceGrid fine = g;
        fine.nx *= 2;
        fine.np *= 2;
        const double r1 = residual_rms(basis);
        const double r2 = residual_rms(compute_basis_fields(fine, states, StateKind::superposition, cfg.flow.l_max));
        line.detail << " max|intW-1|=" << norm_err << " (tol 1e-6, 20 times) x-marginal=" << xm_err
                    << " (tol 1e-6) p-marginal=" << pm_err << " (tol 1e-4) continuity rms " << r1 << " -> " << r2
                    << " ratio=" << r1 / r2 << " (tol >= 8)";
        line.require(norm_err < 1e-6, "normalisation");
        line.require(xm_err < 1e-6, "x-marginal");
        line.require(pm_err < 1e-4, "p-marginal");
        line.require(r1 / r2 >= 8.0, "continuity convergence");
        emit("AC3", "conservation and consistency", line, since(t0));
    }

    // AC4
    {
        const auto t0 = std::chrono::steady_clock::now();
        Line line;
        const double mass = 1.0;
        const double omega = 1.0;
        const HarmonicEigenstates osc(1.0, mass, omega);
        PhaseSpaceGrid hg;
        hg.x_min = -6;
        hg.x_max = 6;
        hg.p_min = -6;
        hg.p_max = 6;
        hg.nx = 256;
        hg.np = 256;
        hg.y_half_width = 6;
        hg.ny = 512;
        const auto hb = compute_basis_fields(hg, osc, StateKind::ground, cfg.flow.l_max);
        const FlowField hf = FlowEngine(hb, osc, cfg.flow).at(1.0);
        double ident = 0.0;
        double gauss = 0.0;
        for (int i = 0; i < hg.nx; ++i) {
            for (int k = 0; k < hg.np; ++k) {
                ident = std::max(ident, std::abs(hf.jp(i, k) + hf.w(i, k) * mass * omega * omega * hg.x(i)));
                gauss = std::max(gauss, std::abs(hf.w(i, k) - std::exp(-hg.x(i) * hg.x(i) - hg.p(k) * hg.p(k)) / kPi));
            }
        }
        line.detail << " max|J_p + W V'|/max|J_p|=" << ident / hf.jp.max_abs() << " (tol 1e-15) terms_used="
                    << hf.max_terms_used() << " (expect 0) |W-gaussian|=" << gauss << " (tol 1e-12)";
        line.require(ident / hf.jp.max_abs() < 1e-15, "classical identity");
        line.require(hf.max_terms_used() == 0, "termination at l = 0");
        line.require(gauss < 1e-12, "Gaussian oracle");
        emit("AC4", "harmonic degenerate case", line, since(t0));
    }

    // AC5
    {
        const auto t0 = std::chrono::steady_clock::now();
        Line line;
        for (StateKind kind : {StateKind::ground, StateKind::excited}) {
            const auto b = compute_basis_fields(g, states, kind, cfg.flow.l_max);
            const FlowField f = FlowEngine(b, states, cfg.flow).at(0.3 * T);
            double ax = 0.0;
            double ap = 0.0;
            for (int i = 0; i < g.nx; ++i) {
                for (int k = 0; k < g.np; ++k) {
                    const int m = g.np - 1 - k;
                    ax = std::max(ax, std::abs(f.jx(i, k) + f.jx(i, m)));
                    ap = std::max(ap, std::abs(f.jp(i, k) - f.jp(i, m)));
                }
            }
            ax /= f.jx.max_abs();
            ap /= f.jp.max_abs();
            line.detail << " " << to_string(kind) << ": jx " << ax << " jp " << ap;
            line.require(ax < 1e-12 && ap < 1e-12, to_string(kind));
        }
        line.detail << " (tol 1e-12)";
        emit("AC5", "eigenstate symmetries", line, since(t0));
    }

    // AC6 and AC8 at T/4
    const FlowField f4 = engine.at(0.25 * T);
    const auto pts = analyze_frame(f4, cfg.region);
    {
        const auto t0 = std::chrono::steady_clock::now();
        Line line;
        const PointFlowEvaluator exact(states, StateKind::superposition, g);
        const PointFlowField smooth(exact, 0.25 * T);
        const StagnationPoint* left = nullptr;
        const StagnationPoint* right = nullptr;
        for (const auto& q : pts) {
            if (q.winding != 1) continue;
            if (std::abs(q.p) < 0.3 && std::abs(q.x - marks.left_minimum) < 0.5) left = &q;
            if (std::abs(q.p) < 0.3 && std::abs(q.x - marks.right_minimum) < 0.5) right = &q;
        }
        line.require(left && right, "well vortices present");
        if (left && right) {
            StagnationPoint l = *left;
            StagnationPoint r = *right;
            polish(l, smooth, 0.1);
            polish(r, smooth, 0.1);
            const Vec2 jl = oracle_flow(states, vo, l.x, l.p, 0.25 * T);
            const Vec2 jr = oracle_flow(states, vo, r.x, r.p, 0.25 * T);
            const double scale = f4.jp.max_abs();
            const double zero = std::max(std::hypot(jl.x, jl.p), std::hypot(jr.x, jr.p)) / scale;
            line.detail << " x_left=" << l.x << " margin " << l.x - marks.left_minimum << "; x_right=" << r.x << " margin "
                        << marks.right_minimum - r.x << "; oracle |J|/max|J_p| at points=" << zero << " (tol 1e-6)";
            line.require(l.x - marks.left_minimum > 0.0, "left inward");
            line.require(marks.right_minimum - r.x > 0.0, "right inward");
            line.require(zero < 1e-6, "oracle confirms zeros");
        }
        emit("AC6", "inward quantum displacement", line, since(t0));
    }

    // AC7
    {
        const auto t0 = std::chrono::steady_clock::now();
        Line line;
        const double dt = T / 500.0;
        const auto tr = track_flow(engine, 0.0, 1.1 * T, dt, cfg.region);
        int topo = 0;
        int conserved = 0;
        int oracle_conserved = 0;
        for (const auto& ev : tr.events) {
            if (ev.kind == EventKind::loop_crossing) continue;
            ++topo;
            conserved += ev.conserves_charge();
            double cx = 0.0;
            double cp = 0.0;
            std::size_t n = 0;
            for (const auto* set : {&ev.before, &ev.after}) {
                for (const auto& q : *set) {
                    cx += q.x;
                    cp += q.p;
                    ++n;
                }
            }
            cx /= static_cast<double>(std::max<std::size_t>(n, 1));
            cp /= static_cast<double>(std::max<std::size_t>(n, 1));
            double rad = 0.05;
            for (const auto* set : {&ev.before, &ev.after}) {
                for (const auto& q : *set) rad = std::max(rad, 1.5 * std::hypot(q.x - cx, q.p - cp));
            }
            // Winding of enclosing circles at both ends of the bracketed interval.
            const FlowField fa = engine.at(ev.t_a);
            const FlowField fb = engine.at(ev.t_b);
            int admissible = 0;
            bool ok = true;
            for (double grow : {1.0, 1.3, 1.7, 2.2}) {
                const double a = dense_turns(fa, cx, cp, rad * grow, rad * grow, 4000);
                const double b = dense_turns(fb, cx, cp, rad * grow, rad * grow, 4000);
                if (std::abs(a - std::round(a)) > 0.05 || std::abs(b - std::round(b)) > 0.05) continue;
                ++admissible;
                ok = ok && std::round(a) == std::round(b);
            }
            ok = ok && admissible > 0;
            oracle_conserved += ok;
        }
        int spanning = 0;
        for (const auto& seg : tr.segments) {
            const auto& q = seg.points.front();
            if (q.t != 0.0 || seg.points.back().t < 1.1 * T - 1e-9 || q.winding != 1) continue;
            if (std::abs(q.x - marks.left_minimum) < 0.5 || std::abs(q.x - marks.right_minimum) < 0.5) ++spanning;
        }
        int loop_nonzero = 0;
        int audited = 0;
        int enclosed0 = -1;
        for (double t : tr.frame_times) {
            const double phase = t / T - std::floor(t / T);
            if (phase > cfg.loop_half_window_periods && phase < 1.0 - cfg.loop_half_window_periods) continue;
            const FlowField f = engine.at(t);
            const double w = dense_turns(f, cfg.loop_cx, cfg.loop_cp, cfg.loop_ax, cfg.loop_ap, 4000);
            if (std::abs(w) > 0.05) ++loop_nonzero;
            ++audited;
            if (enclosed0 < 0) {
                enclosed0 = 0;
                for (const auto& q : locate_stagnation_points(f, cfg.region)) {
                    const double ex = (q.x - cfg.loop_cx) / cfg.loop_ax;
                    const double ep = (q.p - cfg.loop_cp) / cfg.loop_ap;
                    enclosed0 += ex * ex + ep * ep < 1.0;
                }
            }
        }
        line.detail << " merge/split events=" << topo << " conserving=" << conserved << " oracle-conserving="
                    << oracle_conserved << "; well segments spanning [0,1.1T]=" << spanning << "; audit loop nonzero in "
                    << loop_nonzero << "/" << audited << " frames, " << enclosed0 << " points enclosed at t=0";
        line.require(topo > 0, "events detected");
        line.require(conserved == topo, "charge conservation");
        line.require(oracle_conserved == topo, "oracle conservation");
        line.require(spanning == 2, "well segments span window");
        line.require(loop_nonzero == 0, "loop total zero");
        line.require(enclosed0 >= 2, "loop encloses the pair");
        const double secs = since(t0);
        if (smoke) line.require(since(start) < 300.0, "smoke run < 5 min");
        emit("AC7", "topological charge conservation", line, secs);
    }

    {
        const auto t0 = std::chrono::steady_clock::now();
        Line line;
        std::vector<std::pair<double, int>> string;
        for (const auto& q : pts) {
            if (q.winding != 1 || std::abs(q.x - marks.barrier) >= 0.3) continue;
            const double r = 0.25 * std::min(g.dx(), g.dp());
            const double circ = circulation(f4, q.x, q.p, r);
            string.emplace_back(q.p, circ > 0 ? 1 : -1);
        }
        std::sort(string.begin(), string.end());
        int best = string.empty() ? 0 : 1;
        int run = 1;
        for (std::size_t j = 1; j < string.size(); ++j) {
            run = string[j].second != string[j - 1].second ? run + 1 : 1;
            best = std::max(best, run);
        }
        const double spread = string.empty() ? 0.0 : string.back().first - string.front().first;
        line.detail << " vortices within 0.3 of X_S=" << string.size() << " longest alternating run=" << best
                    << " (tol >= 3) p-spread=" << spread;
        line.require(best >= 3, "alternating string");
        line.require(spread > 1.0, "spread along p");
        emit("AC8", "alternating vortex string", line, since(t0));
    }

    std::cout << (failures == 0 ? "all acceptance criteria passed" : std::to_string(failures) + " criteria failed") << " in "
              << since(start) << " s" << std::endl;
    return failures == 0 ? 0 : 1;
}
