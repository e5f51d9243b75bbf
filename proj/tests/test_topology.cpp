#include "fixtures.hpp"
#include "wflow/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace wflow;
using namespace wflow::testing;

namespace {

PhaseSpaceGrid unit_grid(int n = 81)
{
    PhaseSpaceGrid g;
    g.x_min = -2.0;
    g.x_max = 2.0;
    g.p_min = -2.0;
    g.p_max = 2.0;
    g.nx = n;
    g.np = n + 1;
    return g;
}

struct Rotation final : VectorField {
    double sense;
    explicit Rotation(double s) : sense(s) {}
    Vec2 operator()(double x, double p) const override { return {-sense * p, sense * x}; }
};

struct Hyperbolic final : VectorField {
    double angle;  ///< direction of the outflow axis
    explicit Hyperbolic(double a) : angle(a) {}
    Vec2 operator()(double x, double p) const override
    {
        const double c = std::cos(angle);
        const double s = std::sin(angle);
        const double u = c * x + s * p;
        const double v = -s * x + c * p;
        return {c * u + s * v, s * u - c * v};
    }
};

}  // namespace

TEST_CASE("winding of analytic fields")
{
    const Rotation ccw(1.0);
    CHECK(winding_number(WindingLoop::circle(0, 0, 1), ccw) == 1);
    CHECK(winding_number(WindingLoop::circle(3, 0, 1), ccw) == 0);
    const Hyperbolic saddle(0.3);
    CHECK(winding_number(WindingLoop::circle(0, 0, 0.5), saddle) == -1);
    CHECK(winding_number(WindingLoop::rectangle(-1, 1, -1, 1), saddle) == -1);
    CHECK_THROWS_AS((void)winding_number(WindingLoop::circle(1, 0, 1), ccw), LoopThroughZero);
}

TEST_CASE("winding equals enclosed charge for random loops")
{
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    std::vector<Vec2> plus;
    std::vector<Vec2> minus;
    for (int j = 0; j < 4; ++j) plus.push_back({u(rng), u(rng)});
    for (int j = 0; j < 3; ++j) minus.push_back({u(rng), u(rng)});
    const ProductField field(plus, minus);
    int checked = 0;
    for (int s = 0; s < 200; ++s) {
        const double cx = u(rng);
        const double cp = u(rng);
        const double ax = 0.1 + 0.5 * std::abs(u(rng));
        const double ap = 0.1 + 0.5 * std::abs(u(rng));
        const auto loop = WindingLoop::ellipse(cx, cp, ax, ap, 96);
        int expected = 0;
        bool near = false;
        for (const auto& a : plus) {
            expected += loop.contains(a.x, a.p);
            near = near || loop.boundary_distance(a.x, a.p) < 1e-3;
        }
        for (const auto& b : minus) {
            expected -= loop.contains(b.x, b.p);
            near = near || loop.boundary_distance(b.x, b.p) < 1e-3;
        }
        if (near) continue;
        const auto r = winding_detail(loop, field);
        CHECK(r.winding == expected);
        CHECK(std::abs(r.raw_turns - r.winding) < 1e-9);
        ++checked;
    }
    CHECK(checked > 150);
}

TEST_CASE("locate finds every zero of a product field")
{
    const std::vector<Vec2> plus{{-0.913, 0.517}, {0.404, -1.21}};
    const std::vector<Vec2> minus{{0.777, 0.333}};
    const auto g = unit_grid();
    const FlowField f = sample_field(ProductField(plus, minus), g);
    const auto pts = locate_stagnation_points(f, Region{-1.9, 1.9, -1.9, 1.9});
    REQUIRE(pts.size() == 3);
    int total = 0;
    for (const auto& q : pts) {
        total += q.winding;
        double best = 1e9;
        for (const auto& a : plus) {
            if (q.winding == 1) best = std::min(best, std::hypot(q.x - a.x, q.p - a.p));
        }
        for (const auto& b : minus) {
            if (q.winding == -1) best = std::min(best, std::hypot(q.x - b.x, q.p - b.p));
        }
        CHECK(best < 0.02);
    }
    CHECK(total == 1);
}

TEST_CASE("classification")
{
    const auto g = unit_grid();
    const FlowField cw = sample_field(Rotation(-1.0), g);
    const FlowField ccw = sample_field(Rotation(1.0), g);
    const Region r{-1, 1, -1, 1};
    auto a = analyze_frame(cw, r);
    REQUIRE(a.size() == 1);
    CHECK(a[0].kind == StagnationKind::vortex_cw);
    auto b = analyze_frame(ccw, r);
    REQUIRE(b.size() == 1);
    CHECK(b[0].kind == StagnationKind::vortex_ccw);
    CHECK(std::hypot(b[0].x, b[0].p) < 1e-3);

    const auto p_axis = analyze_frame(sample_field(Hyperbolic(std::numbers::pi / 2 - 0.2), g), r);
    REQUIRE(p_axis.size() == 1);
    CHECK(p_axis[0].winding == -1);
    CHECK(p_axis[0].kind == StagnationKind::saddle_p_oriented);
    const auto x_axis = analyze_frame(sample_field(Hyperbolic(0.2), g), r);
    REQUIRE(x_axis.size() == 1);
    CHECK(x_axis[0].kind == StagnationKind::separatrix_crossing);
}

TEST_CASE("Newton polish reaches the analytic zero")
{
    const ProductField field({{0.31, -0.27}}, {});
    StagnationPoint q{0.3, -0.25, 0.0, 1};
    CHECK(polish(q, field, 0.1));
    CHECK(q.x == doctest::Approx(0.31).epsilon(1e-10));
    CHECK(q.p == doctest::Approx(-0.27).epsilon(1e-10));
    const auto j = flow_jacobian(field, 0.0, 0.0, 1e-4, 1e-4);
    CHECK(j[0] == doctest::Approx(1.0));
    CHECK(j[3] == doctest::Approx(1.0));
}

TEST_CASE("tracking: pair annihilation conserves charge")
{
    const auto g = unit_grid(61);
    const Region region{-1.8, 1.8, -1.8, 1.8};
    const FrameProvider frames = [&](double t) {
        const double d = 0.8 - t;
        std::vector<Vec2> plus{{-1.0, -1.0}};
        std::vector<Vec2> minus;
        if (d > 0.0) {
            plus.push_back({0.2 - d / 2, 0.1});
            minus.push_back({0.2 + d / 2, 0.1});
        }
        auto pts = analyze_frame(sample_field(ProductField(plus, minus), g), region);
        for (auto& p : pts) p.t = t;
        return pts;
    };
    TrackOptions o;
    o.gate_floor = 0.15;
    o.boundary_margin = 0.1;
    const auto tr = track(frames, 0.0, 1.2, 0.02, region, o);
    int merges = 0;
    for (const auto& ev : tr.events) {
        CHECK(ev.conserves_charge());
        if (ev.kind == EventKind::merge) {
            ++merges;
            CHECK(ev.t_b - ev.t_a <= 0.02 / 64 + 1e-12);
            CHECK(ev.t_a <= 0.8 + 1e-9);
            CHECK(ev.t_b >= 0.8 - g.dx());
        }
    }
    CHECK(merges == 1);
    bool spans = false;
    for (const auto& seg : tr.segments) {
        if (seg.points.front().t == 0.0 && seg.points.back().t == doctest::Approx(1.2)) spans = true;
    }
    CHECK(spans);
}

TEST_CASE("tracking: points leaving the region are loop crossings")
{
    const auto g = unit_grid(61);
    const Region region{-1.0, 1.0, -1.0, 1.0};
    const FrameProvider frames = [&](double t) {
        auto pts = analyze_frame(sample_field(ProductField({{-0.5 + t, 0.05}}, {}), g), region);
        for (auto& p : pts) p.t = t;
        return pts;
    };
    TrackOptions o;
    o.gate_floor = 0.15;
    o.boundary_margin = 0.15;
    const auto tr = track(frames, 0.0, 2.0, 0.05, region, o);
    REQUIRE(tr.events.size() == 1);
    CHECK(tr.events[0].kind == EventKind::loop_crossing);
    CHECK(tr.events[0].charge_before == 1);
    CHECK(tr.events[0].charge_after == 0);
    CHECK_THROWS_AS((void)track(frames, 1.0, 0.0, 0.1, region, o), ConfigError);
}

TEST_CASE("iso-contours of a radial field are circles")
{
    const auto g = unit_grid(101);
    Field2D f(g.nx, g.np);
    for (int i = 0; i < g.nx; ++i) {
        for (int k = 0; k < g.np; ++k) f(i, k) = g.x(i) * g.x(i) + g.p(k) * g.p(k);
    }
    const auto lines = iso_contours(f, g, 1.0);
    REQUIRE(lines.size() == 1);
    for (const auto& v : lines[0]) CHECK(std::hypot(v.x, v.p) == doctest::Approx(1.0).epsilon(2e-3));
    CHECK(lines[0].front().x == doctest::Approx(lines[0].back().x));
}

TEST_CASE("Wigner flow at a quarter period")
{
    const FlowField f = coarse_engine().at(0.25 * period());
    const auto pts = analyze_frame(f, Region{});
    CHECK(pts.size() >= 6);
    const GridFlowEvaluator ev(f);
    WindingOptions wo;
    wo.max_step = 0.5 * f.grid.dp();
    int total = 0;
    for (const auto& q : pts) total += q.winding;
    const Region box{-2.9, 2.4, -1.6, 1.6};
    int inside = 0;
    for (const auto& q : pts) inside += box.contains(q.x, q.p) ? q.winding : 0;
    CHECK(winding_number(WindingLoop::from_region(box), ev, wo) == inside);
    CHECK(total == winding_number(WindingLoop::from_region(Region{}), ev, wo));
}
