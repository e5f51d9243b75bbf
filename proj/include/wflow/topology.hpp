#pragma once

#include "wflow/flow.hpp"

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace wflow {

struct Vec2 {
    double x = 0.0;
    double p = 0.0;
};

/// A planar vector field (J_x, J_p) on phase space.
class VectorField {
public:
    virtual ~VectorField() = default;
    [[nodiscard]] virtual Vec2 operator()(double x, double p) const = 0;
};

/// Bilinear interpolation of a sampled flow; queries outside the grid are clamped.
class GridFlowEvaluator final : public VectorField {
public:
    explicit GridFlowEvaluator(const FlowField& flow) : flow_(&flow) {}
    [[nodiscard]] Vec2 operator()(double x, double p) const override;
    [[nodiscard]] const FlowField& flow() const { return *flow_; }

private:
    const FlowField* flow_;
};

/// Flow from direct quadrature at a fixed time.
class PointFlowField final : public VectorField {
public:
    PointFlowField(const PointFlowEvaluator& eval, double t) : eval_(&eval), t_(t) {}
    [[nodiscard]] Vec2 operator()(double x, double p) const override;

private:
    const PointFlowEvaluator* eval_;
    double t_;
};

struct Region {
    double x_min = -3.0;
    double x_max = 2.5;
    double p_min = -4.0;
    double p_max = 4.0;

    [[nodiscard]] bool contains(double x, double p) const
    {
        return x >= x_min && x <= x_max && p >= p_min && p <= p_max;
    }
    /// Distance to the nearest edge (negative outside).
    [[nodiscard]] double boundary_distance(double x, double p) const;

    friend bool operator==(const Region&, const Region&) = default;
};

enum class StagnationKind { vortex_cw, vortex_ccw, separatrix_crossing, saddle_p_oriented, unresolved };

std::string to_string(StagnationKind kind);

struct StagnationPoint {
    double x = 0.0;
    double p = 0.0;
    double t = 0.0;
    int winding = 0;
    StagnationKind kind = StagnationKind::unresolved;
    double refinement_radius = 0.0;
};

/// Closed polygon in (x, p), traversed counter-clockwise for positive orientation.
struct WindingLoop {
    std::vector<Vec2> vertices;

    static WindingLoop ellipse(double cx, double cp, double ax, double ap, int n = 128);
    static WindingLoop circle(double cx, double cp, double r, int n = 64);
    static WindingLoop rectangle(double x0, double x1, double p0, double p1);
    static WindingLoop from_region(const Region& r) { return rectangle(r.x_min, r.x_max, r.p_min, r.p_max); }

    /// Even-odd point-in-polygon test.
    [[nodiscard]] bool contains(double x, double p) const;
    /// Euclidean distance from a point to the polygon boundary.
    [[nodiscard]] double boundary_distance(double x, double p) const;
    [[nodiscard]] bool is_simple() const;
};

struct WindingOptions {
    /// |J| at or below 10x this value on the loop means the loop touches a zero.
    double zero_threshold = 0.0;
    /// Initial subdivision length for polygon edges (0: vertices only).
    double max_step = 0.0;
    int max_depth = 40;
    double integrality_tolerance = 0.05;
};

struct WindingResult {
    int winding = 0;
    double raw_turns = 0.0;  ///< accumulated angle / 2 pi
    double min_magnitude = 0.0;
    std::size_t samples = 0;
};

/// Accumulates the unwrapped change of atan2(J_p, J_x) along the loop, bisecting
/// until every step changes the angle by less than pi/2.
/// Throws LoopThroughZero or NonIntegerWinding.
WindingResult winding_detail(const WindingLoop& loop, const VectorField& field, const WindingOptions& options = {});
int winding_number(const WindingLoop& loop, const VectorField& field, const WindingOptions& options = {});

struct LocateOptions {
    double refinement_radius = 1e-4;
    int max_depth = 24;
};

/// Poincare-index scan of every plaquette inside the region, followed by recursive
/// subdivision of the bilinear interpolant around each nonzero-index cell.
/// Points come back sorted by (x, p), unclassified except for |winding| > 1 (unresolved).
std::vector<StagnationPoint> locate_stagnation_points(const FlowField& flow, const Region& region,
                                                      const LocateOptions& options = {});

struct ClassifyOptions {
    double probe_radius = 0.0;  ///< circle radius for circulation; 0: a quarter grid cell
    double jacobian_step = 0.0;  ///< finite-difference step; 0: probe_radius / 4
    double max_condition = 1e8;
};

/// Vortex handedness from the circulation sign; saddle orientation from the
/// outflow eigenvector of the finite-difference Jacobian.
StagnationKind classify(const StagnationPoint& point, const VectorField& field, const ClassifyOptions& options);

/// 2x2 Jacobian [dJx/dx dJx/dp; dJp/dx dJp/dp] by central differences.
std::array<double, 4> flow_jacobian(const VectorField& field, double x, double p, double h_x, double h_p);

/// Newton refinement against a smooth evaluator. Returns false (point unchanged)
/// when the iteration leaves `max_shift` or fails to reduce |J|.
bool polish(StagnationPoint& point, const VectorField& field, double max_shift, double h = 1e-5, int max_iter = 20);

/// Located and classified stagnation points of one frame.
std::vector<StagnationPoint> analyze_frame(const FlowField& flow, const Region& region,
                                           const LocateOptions& locate = {}, const ClassifyOptions& cls = {});

enum class EventKind { merge, split, loop_crossing };

std::string to_string(EventKind kind);

struct TopologyEvent {
    double t_a = 0.0;
    double t_b = 0.0;
    EventKind kind = EventKind::merge;
    std::vector<StagnationPoint> before;
    std::vector<StagnationPoint> after;
    int charge_before = 0;
    int charge_after = 0;

    [[nodiscard]] bool conserves_charge() const { return charge_before == charge_after; }
};

struct TrackSegment {
    int id = 0;
    std::vector<StagnationPoint> points;
};

struct TrackOptions {
    int bisection_factor = 64;
    /// Lower bound for the matching gate (0: 1.5 grid-cell diagonals, set by track_flow).
    double gate_floor = 0.0;
    double refinement_radius = 1e-4;
    /// Unmatched points within this distance are treated as one event.
    double event_radius = 0.5;
    /// Points disappearing this close to the region edge are loop crossings.
    double boundary_margin = 0.0;
};

struct TrackResult {
    std::vector<TrackSegment> segments;
    std::vector<TopologyEvent> events;
    std::vector<double> frame_times;
    std::vector<std::string> log;
};

using FrameProvider = std::function<std::vector<StagnationPoint>(double t)>;

/// Greedy same-winding nearest-neighbour tracking between frames t0, t0 + dt, ..., t1.
/// Unmatched appearances/disappearances are bisected in time to dt / bisection_factor
/// and recorded as merge, split or loop-crossing events.
TrackResult track(const FrameProvider& frames, double t0, double t1, double dt, const Region& region,
                  const TrackOptions& options);

/// Tracking on the flow grid of an engine.
TrackResult track_flow(const FlowEngine& engine, double t0, double t1, double dt, const Region& region,
                       TrackOptions options = {});

struct ChargeLedger {
    std::vector<double> times;
    std::vector<int> winding;
    /// Times where a stagnation point came within 10 refinement radii of the loop.
    std::vector<bool> boundary_proximity;
    bool constant = true;
    /// Loop-crossing events overlapping a change of the total, if any.
    std::vector<TopologyEvent> explanations;
};

/// Winding of a fixed loop at each time on the engine's flow grid.
ChargeLedger charge_ledger(const WindingLoop& loop, const std::vector<double>& times, const FlowEngine& engine,
                           const Region& region, const std::vector<TopologyEvent>& events = {});

/// Polylines of the level set f = level by marching squares.
std::vector<std::vector<Vec2>> iso_contours(const Field2D& f, const PhaseSpaceGrid& grid, double level);

}  // namespace wflow
