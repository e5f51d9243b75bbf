#include "wflow/topology.hpp"

#include "wflow/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <utility>

namespace wflow {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap(double a)
{
    while (a > kPi) a -= 2.0 * kPi;
    while (a <= -kPi) a += 2.0 * kPi;
    return a;
}

double angle(Vec2 v) { return std::atan2(v.p, v.x); }
double norm(Vec2 v) { return std::hypot(v.x, v.p); }
double dist(double x0, double p0, double x1, double p1) { return std::hypot(x1 - x0, p1 - p0); }

double segment_distance(Vec2 a, Vec2 b, double x, double p)
{
    const double ex = b.x - a.x;
    const double ep = b.p - a.p;
    const double len2 = ex * ex + ep * ep;
    double s = len2 > 0.0 ? ((x - a.x) * ex + (p - a.p) * ep) / len2 : 0.0;
    s = std::clamp(s, 0.0, 1.0);
    return dist(a.x + s * ex, a.p + s * ep, x, p);
}

}  // namespace

Vec2 GridFlowEvaluator::operator()(double x, double p) const
{
    const auto& g = flow_->grid;
    const double fx = std::clamp((x - g.x_min) / g.dx(), 0.0, static_cast<double>(g.nx - 1));
    const double p0 = g.p(0);
    const double fp = std::clamp((p - p0) / g.dp(), 0.0, static_cast<double>(g.np - 1));
    const int i = std::min(static_cast<int>(fx), g.nx - 2);
    const int k = std::min(static_cast<int>(fp), g.np - 2);
    const double u = fx - i;
    const double v = fp - k;
    auto lerp = [&](const Field2D& f) {
        return (1 - u) * (1 - v) * f(i, k) + u * (1 - v) * f(i + 1, k) + (1 - u) * v * f(i, k + 1) +
               u * v * f(i + 1, k + 1);
    };
    return {lerp(flow_->jx), lerp(flow_->jp)};
}

Vec2 PointFlowField::operator()(double x, double p) const
{
    const auto s = (*eval_)(x, p, t_);
    return {s.jx, s.jp};
}

double Region::boundary_distance(double x, double p) const
{
    const double d = std::min({x - x_min, x_max - x, p - p_min, p_max - p});
    return d;
}

std::string to_string(StagnationKind kind)
{
    switch (kind) {
    case StagnationKind::vortex_cw: return "vortex_cw";
    case StagnationKind::vortex_ccw: return "vortex_ccw";
    case StagnationKind::separatrix_crossing: return "separatrix_crossing";
    case StagnationKind::saddle_p_oriented: return "saddle_p_oriented";
    case StagnationKind::unresolved: break;
    }
    return "unresolved";
}

std::string to_string(EventKind kind)
{
    switch (kind) {
    case EventKind::merge: return "merge";
    case EventKind::split: return "split";
    case EventKind::loop_crossing: break;
    }
    return "loop_crossing";
}

// ---------------------------------------------------------------------------
// Loops and winding numbers

WindingLoop WindingLoop::ellipse(double cx, double cp, double ax, double ap, int n)
{
    WindingLoop loop;
    loop.vertices.reserve(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        const double a = 2.0 * kPi * j / n;
        loop.vertices.push_back({cx + ax * std::cos(a), cp + ap * std::sin(a)});
    }
    return loop;
}

WindingLoop WindingLoop::circle(double cx, double cp, double r, int n) { return ellipse(cx, cp, r, r, n); }

WindingLoop WindingLoop::rectangle(double x0, double x1, double p0, double p1)
{
    return {{{x0, p0}, {x1, p0}, {x1, p1}, {x0, p1}}};
}

bool WindingLoop::contains(double x, double p) const
{
    bool inside = false;
    const std::size_t n = vertices.size();
    for (std::size_t a = 0, b = n - 1; a < n; b = a++) {
        const Vec2& va = vertices[a];
        const Vec2& vb = vertices[b];
        if ((va.p > p) != (vb.p > p)) {
            const double xc = va.x + (p - va.p) * (vb.x - va.x) / (vb.p - va.p);
            if (x < xc) inside = !inside;
        }
    }
    return inside;
}

double WindingLoop::boundary_distance(double x, double p) const
{
    double d = std::numeric_limits<double>::infinity();
    const std::size_t n = vertices.size();
    for (std::size_t a = 0; a < n; ++a) d = std::min(d, segment_distance(vertices[a], vertices[(a + 1) % n], x, p));
    return d;
}

bool WindingLoop::is_simple() const
{
    const std::size_t n = vertices.size();
    if (n < 3) return false;
    auto orient = [](Vec2 a, Vec2 b, Vec2 c) { return (b.x - a.x) * (c.p - a.p) - (b.p - a.p) * (c.x - a.x); };
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = vertices[i];
        const Vec2 b = vertices[(i + 1) % n];
        for (std::size_t j = i + 1; j < n; ++j) {
            if (j == i || (j + 1) % n == i || j == (i + 1) % n) continue;
            const Vec2 c = vertices[j];
            const Vec2 d = vertices[(j + 1) % n];
            const double o1 = orient(a, b, c);
            const double o2 = orient(a, b, d);
            const double o3 = orient(c, d, a);
            const double o4 = orient(c, d, b);
            if (((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0)) && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0) return false;
        }
    }
    return true;
}

namespace {

struct WindingWalker {
    const VectorField& field;
    const WindingOptions& options;
    double min_mag = std::numeric_limits<double>::infinity();
    std::size_t samples = 0;

    Vec2 sample(Vec2 q)
    {
        const Vec2 v = field(q.x, q.p);
        const double m = norm(v);
        ++samples;
        min_mag = std::min(min_mag, m);
        if (!(m > 10.0 * options.zero_threshold)) {
            throw LoopThroughZero("flow vanishes on the loop near (" + std::to_string(q.x) + ", " +
                                  std::to_string(q.p) + ")");
        }
        return v;
    }

    double edge(Vec2 a, Vec2 va, Vec2 b, Vec2 vb, int depth)
    {
        const double d = wrap(angle(vb) - angle(va));
        if (std::abs(d) < 0.5 * kPi) return d;
        if (depth >= options.max_depth) {
            throw LoopThroughZero("flow direction jumps on an unresolvable loop step near (" + std::to_string(a.x) +
                                  ", " + std::to_string(a.p) + ")");
        }
        const Vec2 m{0.5 * (a.x + b.x), 0.5 * (a.p + b.p)};
        const Vec2 vm = sample(m);
        return edge(a, va, m, vm, depth + 1) + edge(m, vm, b, vb, depth + 1);
    }
};

}  // namespace

WindingResult winding_detail(const WindingLoop& loop, const VectorField& field, const WindingOptions& options)
{
    if (loop.vertices.size() < 3) throw ConfigError("winding loop needs at least three vertices");
    std::vector<Vec2> pts;
    const std::size_t n = loop.vertices.size();
    for (std::size_t a = 0; a < n; ++a) {
        const Vec2 va = loop.vertices[a];
        const Vec2 vb = loop.vertices[(a + 1) % n];
        int pieces = 1;
        if (options.max_step > 0.0) {
            pieces = std::max(1, static_cast<int>(std::ceil(dist(va.x, va.p, vb.x, vb.p) / options.max_step)));
        }
        for (int s = 0; s < pieces; ++s) {
            const double f = static_cast<double>(s) / pieces;
            pts.push_back({va.x + f * (vb.x - va.x), va.p + f * (vb.p - va.p)});
        }
    }

    WindingWalker walker{field, options};
    std::vector<Vec2> vals;
    vals.reserve(pts.size());
    for (const Vec2& q : pts) vals.push_back(walker.sample(q));
    double total = 0.0;
    for (std::size_t a = 0; a < pts.size(); ++a) {
        const std::size_t b = (a + 1) % pts.size();
        total += walker.edge(pts[a], vals[a], pts[b], vals[b], 0);
    }

    WindingResult r;
    r.raw_turns = total / (2.0 * kPi);
    r.winding = static_cast<int>(std::lround(r.raw_turns));
    r.min_magnitude = walker.min_mag;
    r.samples = walker.samples;
    if (std::abs(r.raw_turns - r.winding) > options.integrality_tolerance) {
        throw NonIntegerWinding("winding sum " + std::to_string(r.raw_turns) + " is not an integer");
    }
    return r;
}

int winding_number(const WindingLoop& loop, const VectorField& field, const WindingOptions& options)
{
    return winding_detail(loop, field, options).winding;
}

// ---------------------------------------------------------------------------
// Plaquette scan

namespace {

/// Bilinear patch over a single grid cell, parametrised by (u, v) in [0, 1]^2.
struct Patch {
    Vec2 c00, c10, c01, c11;

    [[nodiscard]] Vec2 at(double u, double v) const
    {
        return {(1 - u) * (1 - v) * c00.x + u * (1 - v) * c10.x + (1 - u) * v * c01.x + u * v * c11.x,
                (1 - u) * (1 - v) * c00.p + u * (1 - v) * c10.p + (1 - u) * v * c01.p + u * v * c11.p};
    }
};

/// Boundary index of the bilinear field on [u0,u1]x[v0,v1]. Along each axis-aligned
/// edge the field is affine, so the corner-to-corner wrapped angles are exact.
int sub_index(const Patch& patch, double u0, double u1, double v0, double v1)
{
    const Vec2 a = patch.at(u0, v0);
    const Vec2 b = patch.at(u1, v0);
    const Vec2 c = patch.at(u1, v1);
    const Vec2 d = patch.at(u0, v1);
    const double s = wrap(angle(b) - angle(a)) + wrap(angle(c) - angle(b)) + wrap(angle(d) - angle(c)) +
                     wrap(angle(a) - angle(d));
    return static_cast<int>(std::lround(s / (2.0 * kPi)));
}

struct Refiner {
    const Patch& patch;
    double x0, p0, hx, hp;
    const LocateOptions& options;
    std::vector<StagnationPoint>& out;

    void run(double u0, double u1, double v0, double v1, int index, int depth)
    {
        const double radius = 0.5 * std::hypot((u1 - u0) * hx, (v1 - v0) * hp);
        if (radius < options.refinement_radius || depth >= options.max_depth) {
            StagnationPoint sp;
            sp.x = x0 + 0.5 * (u0 + u1) * hx;
            sp.p = p0 + 0.5 * (v0 + v1) * hp;
            sp.winding = index;
            sp.refinement_radius = radius;
            out.push_back(sp);
            return;
        }
        // Splits are slightly off-centre: the symmetric lattice puts zeros on
        // p = 0 exactly at cell mid-lines, where a child's boundary index is undefined.
        int found = 0;
        for (double frac : {0.4876543, 0.381966}) {
            const double um = u0 + frac * (u1 - u0);
            const double vm = v0 + frac * (v1 - v0);
            const double boxes[4][4] = {{u0, um, v0, vm}, {um, u1, v0, vm}, {u0, um, vm, v1}, {um, u1, vm, v1}};
            for (const auto& b : boxes) {
                const int w = sub_index(patch, b[0], b[1], b[2], b[3]);
                if (w != 0) {
                    ++found;
                    run(b[0], b[1], b[2], b[3], w, depth + 1);
                }
            }
            if (found > 0) break;
        }
        if (found == 0) {
            // The zero sits on an internal edge of the split; keep the parent cell.
            StagnationPoint sp;
            sp.x = x0 + 0.5 * (u0 + u1) * hx;
            sp.p = p0 + 0.5 * (v0 + v1) * hp;
            sp.winding = index;
            sp.refinement_radius = radius;
            out.push_back(sp);
        }
    }
};

}  // namespace

std::vector<StagnationPoint> locate_stagnation_points(const FlowField& flow, const Region& region,
                                                      const LocateOptions& options)
{
    const auto& g = flow.grid;
    const double hx = g.dx();
    const double hp = g.dp();
    std::vector<StagnationPoint> raw;
    for (int i = 0; i + 1 < g.nx; ++i) {
        const double xa = g.x(i);
        const double xb = g.x(i + 1);
        if (xb < region.x_min || xa > region.x_max) continue;
        for (int k = 0; k + 1 < g.np; ++k) {
            const double pa = g.p(k);
            const double pb = g.p(k + 1);
            if (pb < region.p_min || pa > region.p_max) continue;
            const Patch patch{{flow.jx(i, k), flow.jp(i, k)},
                              {flow.jx(i + 1, k), flow.jp(i + 1, k)},
                              {flow.jx(i, k + 1), flow.jp(i, k + 1)},
                              {flow.jx(i + 1, k + 1), flow.jp(i + 1, k + 1)}};
            const int w = sub_index(patch, 0.0, 1.0, 0.0, 1.0);
            if (w == 0) continue;
            Refiner ref{patch, xa, pa, hx, hp, options, raw};
            ref.run(0.0, 1.0, 0.0, 1.0, w, 0);
        }
    }

    std::sort(raw.begin(), raw.end(), [](const auto& a, const auto& b) { return std::tie(a.x, a.p) < std::tie(b.x, b.p); });
    std::vector<StagnationPoint> out;
    for (const auto& sp : raw) {
        if (!region.contains(sp.x, sp.p)) continue;
        bool dup = false;
        for (auto& q : out) {
            if (q.winding == sp.winding &&
                dist(q.x, q.p, sp.x, sp.p) < 2.0 * std::max({q.refinement_radius, sp.refinement_radius, options.refinement_radius})) {
                dup = true;
                break;
            }
        }
        if (!dup) out.push_back(sp);
    }
    for (auto& sp : out) {
        sp.t = flow.t;
        sp.kind = StagnationKind::unresolved;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Classification

std::array<double, 4> flow_jacobian(const VectorField& field, double x, double p, double h_x, double h_p)
{
    const Vec2 xp = field(x + h_x, p);
    const Vec2 xm = field(x - h_x, p);
    const Vec2 pp = field(x, p + h_p);
    const Vec2 pm = field(x, p - h_p);
    return {(xp.x - xm.x) / (2 * h_x), (pp.x - pm.x) / (2 * h_p), (xp.p - xm.p) / (2 * h_x), (pp.p - pm.p) / (2 * h_p)};
}

StagnationKind classify(const StagnationPoint& point, const VectorField& field, const ClassifyOptions& options)
{
    const double r = options.probe_radius > 0.0 ? options.probe_radius : 1e-3;
    if (point.winding == 1) {
        constexpr int n = 64;
        double circulation = 0.0;
        for (int j = 0; j < n; ++j) {
            const double a = 2.0 * kPi * (j + 0.5) / n;
            const Vec2 v = field(point.x + r * std::cos(a), point.p + r * std::sin(a));
            circulation += (-std::sin(a) * v.x + std::cos(a) * v.p) * (2.0 * kPi * r / n);
        }
        if (circulation < 0.0) return StagnationKind::vortex_cw;
        if (circulation > 0.0) return StagnationKind::vortex_ccw;
        return StagnationKind::unresolved;
    }
    if (point.winding == -1) {
        const double h = options.jacobian_step > 0.0 ? options.jacobian_step : 0.25 * r;
        const auto jac = flow_jacobian(field, point.x, point.p, h, h);
        Eigen::Matrix2d m;
        m << jac[0], jac[1], jac[2], jac[3];
        if (!m.allFinite() || m.determinant() >= 0.0) return StagnationKind::unresolved;
        Eigen::EigenSolver<Eigen::Matrix2d> es(m);
        const Eigen::Vector2cd ev = es.eigenvalues();
        if (std::abs(ev[0].imag()) > 0.0 || std::abs(ev[1].imag()) > 0.0) return StagnationKind::unresolved;
        const double l0 = ev[0].real();
        const double l1 = ev[1].real();
        const double big = std::max(std::abs(l0), std::abs(l1));
        const double small = std::min(std::abs(l0), std::abs(l1));
        if (small == 0.0 || big / small > options.max_condition) return StagnationKind::unresolved;
        const int out = l0 > 0.0 ? 0 : 1;
        const Eigen::Vector2d dir = es.eigenvectors().col(out).real();
        // within 45 degrees of the p-axis
        if (std::abs(dir[1]) > std::abs(dir[0])) return StagnationKind::saddle_p_oriented;
        return StagnationKind::separatrix_crossing;
    }
    return StagnationKind::unresolved;
}

bool polish(StagnationPoint& point, const VectorField& field, double max_shift, double h, int max_iter)
{
    double x = point.x;
    double p = point.p;
    Vec2 v = field(x, p);
    const double start = norm(v);
    double last_step = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        const auto j = flow_jacobian(field, x, p, h, h);
        const double det = j[0] * j[3] - j[1] * j[2];
        if (det == 0.0 || !std::isfinite(det)) break;
        const double sx = -(j[3] * v.x - j[1] * v.p) / det;
        const double sp = -(-j[2] * v.x + j[0] * v.p) / det;
        double lambda = 1.0;
        Vec2 nv{};
        bool accepted = false;
        for (int ls = 0; ls < 8; ++ls) {
            nv = field(x + lambda * sx, p + lambda * sp);
            if (norm(nv) < norm(v)) {
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!accepted) break;
        x += lambda * sx;
        p += lambda * sp;
        v = nv;
        last_step = std::hypot(lambda * sx, lambda * sp);
        if (last_step < 1e-13 * (1.0 + std::abs(x) + std::abs(p))) break;
    }
    if (!(norm(v) < start) && start != 0.0) return false;
    if (dist(x, p, point.x, point.p) > max_shift) return false;
    point.x = x;
    point.p = p;
    point.refinement_radius = std::max(last_step, 1e-12);
    return true;
}

std::vector<StagnationPoint> analyze_frame(const FlowField& flow, const Region& region, const LocateOptions& locate,
                                           const ClassifyOptions& cls)
{
    auto pts = locate_stagnation_points(flow, region, locate);
    const GridFlowEvaluator eval(flow);
    ClassifyOptions opts = cls;
    if (opts.probe_radius <= 0.0) opts.probe_radius = 0.25 * std::min(flow.grid.dx(), flow.grid.dp());
    for (auto& sp : pts) sp.kind = classify(sp, eval, opts);
    return pts;
}

// ---------------------------------------------------------------------------
// Tracking

namespace {

struct Live {
    int segment;
    StagnationPoint point;
    double speed;
};

std::vector<StagnationPoint> within(const std::vector<StagnationPoint>& pts, double cx, double cp, double r)
{
    std::vector<StagnationPoint> out;
    for (const auto& q : pts) {
        if (dist(q.x, q.p, cx, cp) <= r) out.push_back(q);
    }
    return out;
}

int charge(const std::vector<StagnationPoint>& pts)
{
    int c = 0;
    for (const auto& q : pts) c += q.winding;
    return c;
}

}  // namespace

TrackResult track(const FrameProvider& frames, double t0, double t1, double dt, const Region& region,
                  const TrackOptions& options)
{
    if (!(dt > 0.0) || !(t1 > t0)) throw ConfigError("tracking needs t1 > t0 and dt > 0");
    const int steps = static_cast<int>(std::ceil((t1 - t0) / dt - 1e-9));
    TrackResult result;

    auto gate_of = [&](const Live& l) {
        return std::max({5.0 * dt * l.speed, 10.0 * options.refinement_radius, options.gate_floor});
    };
    const double margin = options.boundary_margin;

    std::vector<Live> live;
    auto start_segment = [&](const StagnationPoint& sp) {
        TrackSegment seg;
        seg.id = static_cast<int>(result.segments.size());
        seg.points.push_back(sp);
        result.segments.push_back(std::move(seg));
        return Live{static_cast<int>(result.segments.size()) - 1, sp, 0.0};
    };

    std::vector<StagnationPoint> prev = frames(t0);
    result.frame_times.push_back(t0);
    for (const auto& sp : prev) live.push_back(start_segment(sp));

    for (int n = 1; n <= steps; ++n) {
        const double ta = t0 + (n - 1) * dt;
        const double tb = std::min(t1, t0 + n * dt);
        std::vector<StagnationPoint> cur = frames(tb);
        result.frame_times.push_back(tb);

        // Candidate pairs by distance, same winding only.
        struct Cand {
            double d;
            std::size_t a;
            std::size_t b;
        };
        std::vector<Cand> cands;
        for (std::size_t a = 0; a < live.size(); ++a) {
            const double gate = gate_of(live[a]);
            for (std::size_t b = 0; b < cur.size(); ++b) {
                if (cur[b].winding != live[a].point.winding) continue;
                const double d = dist(live[a].point.x, live[a].point.p, cur[b].x, cur[b].p);
                if (d <= gate) cands.push_back({d, a, b});
            }
        }
        std::stable_sort(cands.begin(), cands.end(), [](const Cand& l, const Cand& r) { return l.d < r.d; });
        std::vector<int> match_of_live(live.size(), -1);
        std::vector<int> match_of_cur(cur.size(), -1);
        for (const auto& c : cands) {
            if (match_of_live[c.a] >= 0 || match_of_cur[c.b] >= 0) continue;
            // Report ambiguity: a second free candidate within 10% of the gate.
            for (const auto& o : cands) {
                if (o.a == c.a && o.b != c.b && match_of_cur[o.b] < 0 && o.d - c.d < 0.1 * gate_of(live[c.a])) {
                    result.log.push_back("ambiguous match at t=" + std::to_string(tb) + " near (" +
                                         std::to_string(cur[c.b].x) + ", " + std::to_string(cur[c.b].p) +
                                         "); resolved by minimal displacement");
                    break;
                }
            }
            match_of_live[c.a] = static_cast<int>(c.b);
            match_of_cur[c.b] = static_cast<int>(c.a);
        }

        std::vector<Live> next;
        std::vector<Live> gone;
        std::vector<std::size_t> born;
        auto extend = [&](Live l, const StagnationPoint& q) {
            l.speed = dist(l.point.x, l.point.p, q.x, q.p) / (tb - ta);
            l.point = q;
            result.segments[static_cast<std::size_t>(l.segment)].points.push_back(q);
            next.push_back(l);
        };
        for (std::size_t a = 0; a < live.size(); ++a) {
            if (match_of_live[a] < 0) {
                gone.push_back(live[a]);
            } else {
                extend(live[a], cur[static_cast<std::size_t>(match_of_live[a])]);
            }
        }
        for (std::size_t b = 0; b < cur.size(); ++b) {
            if (match_of_cur[b] < 0) born.push_back(b);
        }
        std::vector<bool> consumed(cur.size(), false);

        // Traffic across the region edge.
        auto edge_event = [&](const StagnationPoint& q, bool leaving) {
            TopologyEvent ev;
            ev.t_a = ta;
            ev.t_b = tb;
            ev.kind = EventKind::loop_crossing;
            (leaving ? ev.before : ev.after).push_back(q);
            ev.charge_before = charge(ev.before);
            ev.charge_after = charge(ev.after);
            result.events.push_back(std::move(ev));
        };
        std::vector<Live> gone_inner;
        for (const auto& l : gone) {
            if (region.boundary_distance(l.point.x, l.point.p) < margin) {
                edge_event(l.point, true);
            } else {
                gone_inner.push_back(l);
            }
        }
        std::vector<std::size_t> born_inner;
        for (std::size_t b : born) {
            if (region.boundary_distance(cur[b].x, cur[b].p) < margin) {
                edge_event(cur[b], false);
            } else {
                born_inner.push_back(b);
            }
        }

        // Cluster the remaining unmatched points (single linkage).
        struct Item {
            StagnationPoint point;
            bool vanished;
            std::size_t ref;  ///< index into gone_inner or cur
        };
        std::vector<Item> pool;
        for (std::size_t g = 0; g < gone_inner.size(); ++g) pool.push_back({gone_inner[g].point, true, g});
        for (std::size_t b : born_inner) pool.push_back({cur[b], false, b});
        std::vector<int> cluster(pool.size(), -1);
        int nclusters = 0;
        for (std::size_t s = 0; s < pool.size(); ++s) {
            if (cluster[s] >= 0) continue;
            cluster[s] = nclusters;
            std::vector<std::size_t> stack{s};
            while (!stack.empty()) {
                const std::size_t u = stack.back();
                stack.pop_back();
                for (std::size_t v = 0; v < pool.size(); ++v) {
                    if (cluster[v] < 0 &&
                        dist(pool[u].point.x, pool[u].point.p, pool[v].point.x, pool[v].point.p) <= options.event_radius) {
                        cluster[v] = nclusters;
                        stack.push_back(v);
                    }
                }
            }
            ++nclusters;
        }

        for (int c = 0; c < nclusters; ++c) {
            std::vector<const Item*> members;
            for (std::size_t s = 0; s < pool.size(); ++s) {
                if (cluster[s] == c) members.push_back(&pool[s]);
            }
            double cx = 0.0;
            double cp = 0.0;
            for (const Item* m : members) {
                cx += m->point.x;
                cp += m->point.p;
            }
            cx /= static_cast<double>(members.size());
            cp /= static_cast<double>(members.size());
            double radius = options.event_radius;
            for (const Item* m : members) {
                radius = std::max(radius, dist(cx, cp, m->point.x, m->point.p) + 0.1 * options.event_radius);
            }

            // Locate the change in time on the configuration inside the event disc.
            double a = ta;
            double b = tb;
            std::vector<StagnationPoint> before = within(prev, cx, cp, radius);
            std::vector<StagnationPoint> after = within(cur, cx, cp, radius);
            const bool same = before.size() == after.size() && charge(before) == charge(after);
            if (!same) {
                const double min_width = dt / options.bisection_factor;
                while (b - a > min_width * (1.0 + 1e-9)) {
                    const double m = 0.5 * (a + b);
                    auto mid = within(frames(m), cx, cp, radius);
                    if (mid.size() == before.size() && charge(mid) == charge(before)) {
                        a = m;
                        before = std::move(mid);
                    } else {
                        b = m;
                        after = std::move(mid);
                    }
                }
            }
            if (same) {
                // Nothing was created or destroyed: the points moved faster than
                // the gate. Re-link by winding and distance.
                for (const Item* g : members) {
                    if (!g->vanished) continue;
                    const Item* best = nullptr;
                    for (const Item* m : members) {
                        if (m->vanished || consumed[m->ref] || m->point.winding != g->point.winding) continue;
                        if (!best || dist(g->point.x, g->point.p, m->point.x, m->point.p) <
                                         dist(g->point.x, g->point.p, best->point.x, best->point.p)) {
                            best = m;
                        }
                    }
                    if (best) {
                        consumed[best->ref] = true;
                        extend(gone_inner[g->ref], best->point);
                        result.log.push_back("re-linked fast point at t=" + std::to_string(tb) + " near (" +
                                             std::to_string(best->point.x) + ", " + std::to_string(best->point.p) +
                                             ")");
                    }
                }
                continue;
            }
            TopologyEvent ev;
            ev.t_a = a;
            ev.t_b = b;
            ev.before = before;
            ev.after = after;
            ev.charge_before = charge(before);
            ev.charge_after = charge(after);
            ev.kind = after.size() < before.size() ? EventKind::merge : EventKind::split;
            if (!ev.conserves_charge()) {
                result.log.push_back("charge mismatch in event at t in [" + std::to_string(a) + ", " +
                                     std::to_string(b) + "]");
            }
            result.events.push_back(std::move(ev));
        }

        for (std::size_t b = 0; b < cur.size(); ++b) {
            if (match_of_cur[b] < 0 && !consumed[b]) next.push_back(start_segment(cur[b]));
        }
        std::sort(next.begin(), next.end(), [](const Live& l, const Live& r) {
            return std::tie(l.point.x, l.point.p) < std::tie(r.point.x, r.point.p);
        });
        live = std::move(next);
        prev = std::move(cur);
    }
    return result;
}

TrackResult track_flow(const FlowEngine& engine, double t0, double t1, double dt, const Region& region,
                       TrackOptions options)
{
    const auto& g = engine.basis().grid;
    const double diag = std::hypot(g.dx(), g.dp());
    if (options.gate_floor <= 0.0) options.gate_floor = 1.5 * diag;
    if (options.boundary_margin <= 0.0) options.boundary_margin = 2.0 * diag;
    LocateOptions loc;
    loc.refinement_radius = options.refinement_radius;
    const FrameProvider frames = [&](double t) {
        const FlowField f = engine.at(t);
        return analyze_frame(f, region, loc);
    };
    return track(frames, t0, t1, dt, region, options);
}

ChargeLedger charge_ledger(const WindingLoop& loop, const std::vector<double>& times, const FlowEngine& engine,
                           const Region& region, const std::vector<TopologyEvent>& events)
{
    ChargeLedger ledger;
    const auto& g = engine.basis().grid;
    WindingOptions wopt;
    wopt.max_step = 0.5 * std::min(g.dx(), g.dp());
    for (double t : times) {
        const FlowField f = engine.at(t);
        const GridFlowEvaluator eval(f);
        const auto pts = locate_stagnation_points(f, region);
        bool near = false;
        for (const auto& q : pts) {
            if (loop.boundary_distance(q.x, q.p) < 10.0 * std::max(q.refinement_radius, 1e-4)) near = true;
        }
        ledger.times.push_back(t);
        ledger.boundary_proximity.push_back(near);
        ledger.winding.push_back(winding_number(loop, eval, wopt));
    }
    for (std::size_t n = 1; n < ledger.winding.size(); ++n) {
        if (ledger.winding[n] != ledger.winding[0]) ledger.constant = false;
        if (ledger.winding[n] != ledger.winding[n - 1]) {
            for (const auto& ev : events) {
                if (ev.kind == EventKind::loop_crossing && ev.t_b >= ledger.times[n - 1] && ev.t_a <= ledger.times[n]) {
                    ledger.explanations.push_back(ev);
                }
            }
        }
    }
    return ledger;
}

// ---------------------------------------------------------------------------
// Iso-contours

std::vector<std::vector<Vec2>> iso_contours(const Field2D& f, const PhaseSpaceGrid& grid, double level)
{
    const int nx = f.nx();
    const int np = f.np();
    // Edge ids: horizontal edges (i,k)-(i+1,k) -> 2*(i*np+k); vertical (i,k)-(i,k+1) -> 2*(i*np+k)+1.
    auto hid = [np](int i, int k) { return 2L * (static_cast<long>(i) * np + k); };
    auto vid = [np](int i, int k) { return 2L * (static_cast<long>(i) * np + k) + 1; };
    auto crossing = [&](int i0, int k0, int i1, int k1) {
        const double a = f(i0, k0) - level;
        const double b = f(i1, k1) - level;
        const double s = a / (a - b);
        return Vec2{grid.x(i0) + s * (grid.x(i1) - grid.x(i0)), grid.p(k0) + s * (grid.p(k1) - grid.p(k0))};
    };

    std::map<long, Vec2> point_of;
    std::multimap<long, long> links;
    auto add = [&](long e0, Vec2 q0, long e1, Vec2 q1) {
        point_of[e0] = q0;
        point_of[e1] = q1;
        links.emplace(e0, e1);
        links.emplace(e1, e0);
    };

    for (int i = 0; i + 1 < nx; ++i) {
        for (int k = 0; k + 1 < np; ++k) {
            const bool b0 = f(i, k) > level;
            const bool b1 = f(i + 1, k) > level;
            const bool b2 = f(i + 1, k + 1) > level;
            const bool b3 = f(i, k + 1) > level;
            const int mask = (b0 ? 1 : 0) | (b1 ? 2 : 0) | (b2 ? 4 : 0) | (b3 ? 8 : 0);
            if (mask == 0 || mask == 15) continue;
            std::vector<std::pair<long, Vec2>> e;
            if (b0 != b1) e.emplace_back(hid(i, k), crossing(i, k, i + 1, k));
            if (b1 != b2) e.emplace_back(vid(i + 1, k), crossing(i + 1, k, i + 1, k + 1));
            if (b2 != b3) e.emplace_back(hid(i, k + 1), crossing(i, k + 1, i + 1, k + 1));
            if (b3 != b0) e.emplace_back(vid(i, k), crossing(i, k, i, k + 1));
            if (e.size() == 2) {
                add(e[0].first, e[0].second, e[1].first, e[1].second);
            } else if (e.size() == 4) {
                // Saddle cell: decide the pairing by the centre value.
                const double centre = 0.25 * (f(i, k) + f(i + 1, k) + f(i + 1, k + 1) + f(i, k + 1));
                if ((centre > level) == b0) {
                    add(e[0].first, e[0].second, e[1].first, e[1].second);
                    add(e[2].first, e[2].second, e[3].first, e[3].second);
                } else {
                    add(e[0].first, e[0].second, e[3].first, e[3].second);
                    add(e[1].first, e[1].second, e[2].first, e[2].second);
                }
            }
        }
    }

    std::map<long, int> degree;
    for (const auto& [a, b] : links) ++degree[a];
    std::map<long, bool> used_link;
    auto link_key = [](long a, long b) { return std::min(a, b) * 4000000000L + std::max(a, b); };
    std::vector<std::vector<Vec2>> lines;

    auto walk = [&](long start) {
        std::vector<Vec2> line{point_of[start]};
        long cur = start;
        for (;;) {
            long nxt = -1;
            auto range = links.equal_range(cur);
            for (auto it = range.first; it != range.second; ++it) {
                if (!used_link[link_key(cur, it->second)]) {
                    nxt = it->second;
                    break;
                }
            }
            if (nxt < 0) break;
            used_link[link_key(cur, nxt)] = true;
            line.push_back(point_of[nxt]);
            cur = nxt;
            if (cur == start) break;
        }
        if (line.size() > 1) lines.push_back(std::move(line));
    };
    // Open lines start at grid-boundary crossings (degree 1), then close the loops.
    for (const auto& [e, d] : degree) {
        if (d == 1) walk(e);
    }
    for (const auto& [e, d] : degree) {
        auto range = links.equal_range(e);
        for (auto it = range.first; it != range.second; ++it) {
            if (!used_link[link_key(e, it->second)]) {
                walk(e);
                break;
            }
        }
    }
    return lines;
}

}  // namespace wflow
