#include "wflow/commands.hpp"

#include "wflow/errors.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <ostream>

namespace wflow {

namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string header_line(const RunConfig& cfg)
{
    return std::string("# ") + kToolName + " " + kToolVersion + " config_sha256=" + config_hash(cfg);
}

Json provenance(const RunConfig& cfg)
{
    Json j;
    j["tool"] = kToolName;
    j["version"] = kToolVersion;
    j["config_sha256"] = config_hash(cfg);
    return j;
}

fs::path prepare_dir(const RunConfig& cfg)
{
    const fs::path dir(cfg.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw ConfigError("cannot create output directory '" + cfg.output_dir + "'");
    return dir;
}

std::ofstream open_out(const fs::path& path)
{
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot write '" + path.string() + "'");
    return os;
}

void write_text(const fs::path& path, const std::string& text, CommandResult& result)
{
    auto os = open_out(path);
    os << text;
    if (!os) throw ConfigError("write failed for '" + path.string() + "'");
    result.files.push_back(path.string());
}

void write_json(const fs::path& path, const Json& j, CommandResult& result)
{
    write_text(path, j.dump(2) + "\n", result);
}

void write_matrix_csv(const fs::path& path, const RunConfig& cfg, const std::string& name, const Field2D& f,
                      const PhaseSpaceGrid& g, CommandResult& result)
{
    std::string out = header_line(cfg) + " field=" + name + "\n";
    out.reserve(static_cast<std::size_t>(g.nx + 1) * static_cast<std::size_t>(g.np + 1) * 24);
    out += "p\\x";
    for (int i = 0; i < g.nx; ++i) {
        out += ',';
        out += format_double(g.x(i));
    }
    out += '\n';
    for (int k = 0; k < g.np; ++k) {
        out += format_double(g.p(k));
        for (int i = 0; i < g.nx; ++i) {
            out += ',';
            out += format_double(f(i, k));
        }
        out += '\n';
    }
    write_text(path, out, result);
}

Json matrix_json(const Field2D& f, const PhaseSpaceGrid& g)
{
    Json rows = Json::array();
    for (int k = 0; k < g.np; ++k) {
        Json row = Json::array();
        for (int i = 0; i < g.nx; ++i) row.push_back(f(i, k));
        rows.push_back(std::move(row));
    }
    return rows;
}

Json grid_json(const PhaseSpaceGrid& g)
{
    return Json{{"x_min", g.x_min}, {"x_max", g.x_max}, {"nx", g.nx}, {"dx", g.dx()},
                {"p_min", g.p_min}, {"p_max", g.p_max}, {"np", g.np}, {"dp", g.dp()},
                {"y_half_width", g.y_half_width}, {"ny", g.ny}};
}

Json point_json(const StagnationPoint& q)
{
    return Json{{"x", q.x}, {"p", q.p}, {"t", q.t}, {"winding", q.winding}, {"kind", to_string(q.kind)}};
}

Json points_json(const std::vector<StagnationPoint>& pts)
{
    Json a = Json::array();
    for (const auto& q : pts) a.push_back(point_json(q));
    return a;
}

}  // namespace

double parse_time(const std::string& text, double period)
{
    const auto number = [&](std::string_view s) {
        double v = 0.0;
        const auto* end = s.data() + s.size();
        const auto [ptr, ec] = std::from_chars(s.data(), end, v);
        if (ec != std::errc() || ptr != end || s.empty()) throw ConfigError("invalid time '" + text + "'");
        return v;
    };
    std::string_view s(text);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    double v = 0.0;
    if (s == "T") {
        v = period;
    } else if (s.starts_with("T/")) {
        const double d = number(s.substr(2));
        if (d == 0.0) throw ConfigError("invalid time '" + text + "'");
        v = period / d;
    } else if (!s.empty() && s.back() == 'T') {
        v = number(s.substr(0, s.size() - 1)) * period;
    } else {
        v = number(s);
    }
    if (!std::isfinite(v)) throw ConfigError("invalid time '" + text + "'");
    return v;
}

CommandResult cmd_fields(const RunConfig& cfg, double t)
{
    cfg.validate();
    CommandResult result;
    const auto dir = prepare_dir(cfg);
    const CatichaEigenstates states(cfg.physics, std::max(kDefaultMaxJetOrder, 2 * cfg.flow.l_max + 1));
    const auto basis = compute_basis_fields(cfg.grid, states, cfg.state, cfg.flow.l_max);
    const FlowField f = FlowEngine(basis, states, cfg.flow).at(t);
    const auto& g = cfg.grid;
    const Field2D j2 = f.magnitude_squared();
    const Field2D dir_angle = f.direction();

    Json meta = provenance(cfg);
    meta["t"] = t;
    meta["t_periods"] = t / cfg.physics.period();
    meta["period"] = cfg.physics.period();
    meta["state"] = to_string(cfg.state);
    meta["grid"] = grid_json(g);
    meta["normalization"] = integrate_field(f.w, g);
    meta["basis_normalization_defect"] = basis.normalization_defect;
    meta["truncation"] = Json{{"l_max", cfg.flow.l_max},
                              {"eps_rel", cfg.flow.eps_rel},
                              {"converged", f.converged},
                              {"max_terms_used", f.max_terms_used()},
                              {"truncation_defect", f.truncation_defect},
                              {"term_max", f.term_max}};
    meta["converged"] = f.converged;
    meta["conventions"] = Json{
        {"layout", "rows at fixed p (ascending), columns at fixed x (ascending); first row holds x, first column holds p"},
        {"wigner", "W(x,p) = (1/(pi hbar)) int Psi*(x+y) Psi(x-y) exp(2ipy/hbar) dy"},
        {"J_x", "p W / m"},
        {"J_p", "-sum_l (-1)^l (hbar/2)^(2l) V^(2l+1)(x)/(2l+1)! d^(2l)W/dp^(2l)"},
        {"J2", "J_x^2 + J_p^2"},
        {"direction", "atan2(J_p, J_x) in radians, (-pi, pi]; 0 where J = 0"},
        {"units", "hbar = 1 in the default configuration"}};

    Json files = Json::array();
    const std::pair<const char*, const Field2D*> fields[] = {
        {"W", &f.w}, {"Jx", &f.jx}, {"Jp", &f.jp}, {"J2", &j2}, {"direction", &dir_angle}};
    if (cfg.format == "json") {
        Json data = provenance(cfg);
        Json xs = Json::array();
        Json ps = Json::array();
        for (int i = 0; i < g.nx; ++i) xs.push_back(g.x(i));
        for (int k = 0; k < g.np; ++k) ps.push_back(g.p(k));
        data["x"] = std::move(xs);
        data["p"] = std::move(ps);
        for (const auto& [name, field] : fields) data[name] = matrix_json(*field, g);
        write_json(dir / "fields.json", data, result);
        files.push_back("fields.json");
    } else {
        for (const auto& [name, field] : fields) {
            const std::string file = std::string(name) + ".csv";
            write_matrix_csv(dir / file, cfg, name, *field, g, result);
            files.push_back(file);
        }
    }
    meta["files"] = std::move(files);
    write_json(dir / "fields_meta.json", meta, result);

    if (!f.converged) {
        result.code = ExitCode::non_convergence;
        result.message = "flow series did not converge (truncation defect " + format_double(f.truncation_defect) + ")";
    }
    return result;
}

CommandResult cmd_current(const RunConfig& cfg)
{
    cfg.validate();
    CommandResult result;
    const auto dir = prepare_dir(cfg);
    const CatichaEigenstates states(cfg.physics, std::max(kDefaultMaxJetOrder, 2 * cfg.flow.l_max + 1));
    const auto marks = locate_landmarks(states.potential(), -4.0, 3.0);
    const auto basis = compute_basis_fields(cfg.grid, states, cfg.state, 0);
    const double T = cfg.physics.period();
    const int n = cfg.current_samples;
    std::vector<double> ts(static_cast<std::size_t>(n));
    std::vector<double> js(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        ts[static_cast<std::size_t>(j)] = T * j / n;
        js[static_cast<std::size_t>(j)] = probability_current_x(basis, states, ts[static_cast<std::size_t>(j)], marks.barrier);
    }
    const bool stationary = cfg.state != StateKind::superposition;
    SinusoidFit fit{};
    if (!stationary) fit = fit_sinusoid(ts, js, T);
    const auto model = [&](double t) {
        return stationary ? 0.0 : fit.amplitude * std::sin(2.0 * std::numbers::pi * t / fit.period + fit.phase);
    };

    Json summary = provenance(cfg);
    summary["state"] = to_string(cfg.state);
    summary["x_s"] = marks.barrier;
    summary["samples"] = n;
    summary["model"] = "A sin(2 pi t / T_fit + phi0)";
    summary["amplitude"] = fit.amplitude;
    summary["period_fit"] = fit.period;
    summary["period_expected"] = T;
    summary["phase"] = fit.phase;
    summary["max_residual"] = fit.max_residual;
    summary["rms_residual"] = fit.rms_residual;
    summary["relative_residual"] = stationary || fit.amplitude == 0.0 ? 0.0 : fit.max_residual / fit.amplitude;

    if (cfg.format == "json") {
        Json series = Json::array();
        for (int j = 0; j < n; ++j) {
            const double t = ts[static_cast<std::size_t>(j)];
            series.push_back(Json{{"t", t}, {"j_x", js[static_cast<std::size_t>(j)]}, {"fit", model(t)}});
        }
        summary["series"] = std::move(series);
        write_json(dir / "current.json", summary, result);
    } else {
        std::string out = header_line(cfg) + " x_s=" + format_double(marks.barrier) + "\n";
        out += "t,j_x,fit,amplitude,phase,period\n";
        for (int j = 0; j < n; ++j) {
            const double t = ts[static_cast<std::size_t>(j)];
            out += format_double(t) + "," + format_double(js[static_cast<std::size_t>(j)]) + "," + format_double(model(t)) +
                   "," + format_double(fit.amplitude) + "," + format_double(fit.phase) + "," + format_double(fit.period) +
                   "\n";
        }
        write_text(dir / "current.csv", out, result);
        write_json(dir / "current_fit.json", summary, result);
    }
    return result;
}

CommandResult cmd_topology(const RunConfig& cfg, double snapshot_t)
{
    cfg.validate();
    CommandResult result;
    const auto dir = prepare_dir(cfg);
    const CatichaEigenstates states(cfg.physics, std::max(kDefaultMaxJetOrder, 2 * cfg.flow.l_max + 1));
    const auto basis = compute_basis_fields(cfg.grid, states, cfg.state, cfg.flow.l_max);
    const FlowEngine engine(basis, states, cfg.flow);
    const double T = cfg.physics.period();
    const double t0 = cfg.t0_periods * T;
    const double t1 = cfg.t1_periods * T;

    TrackOptions to;
    to.refinement_radius = cfg.refinement_radius;
    const auto tr = track_flow(engine, t0, t1, cfg.dt_periods * T, cfg.region, to);

    std::map<double, std::vector<const StagnationPoint*>> by_time;
    for (double t : tr.frame_times) by_time[t];
    for (const auto& seg : tr.segments) {
        for (const auto& q : seg.points) by_time[q.t].push_back(&q);
    }

    Json doc = provenance(cfg);
    doc["state"] = to_string(cfg.state);
    doc["period"] = T;
    doc["window"] = Json{{"t0", t0}, {"t1", t1}, {"dt", cfg.dt_periods * T}};
    doc["region"] = Json{{"x_min", cfg.region.x_min}, {"x_max", cfg.region.x_max}, {"p_min", cfg.region.p_min},
                         {"p_max", cfg.region.p_max}};
    Json frames = Json::array();
    for (const auto& [t, pts] : by_time) {
        Json fp = Json::array();
        int total = 0;
        for (const auto* q : pts) {
            fp.push_back(Json{{"x", q->x}, {"p", q->p}, {"winding", q->winding}, {"kind", to_string(q->kind)}});
            total += q->winding;
        }
        frames.push_back(Json{{"t", t}, {"total_winding", total}, {"points", std::move(fp)}});
    }
    doc["frames"] = std::move(frames);

    Json segs = Json::array();
    for (const auto& seg : tr.segments) {
        Json pts = Json::array();
        for (const auto& q : seg.points) pts.push_back(Json::array({q.t, q.x, q.p}));
        segs.push_back(Json{{"id", seg.id},
                            {"winding", seg.points.front().winding},
                            {"kind", to_string(seg.points.front().kind)},
                            {"t_start", seg.points.front().t},
                            {"t_end", seg.points.back().t},
                            {"points", std::move(pts)}});
    }
    doc["segments"] = std::move(segs);

    Json events = Json::array();
    bool conserved = true;
    for (const auto& ev : tr.events) {
        if (ev.kind != EventKind::loop_crossing) conserved = conserved && ev.conserves_charge();
        events.push_back(Json{{"kind", to_string(ev.kind)},
                              {"t_a", ev.t_a},
                              {"t_b", ev.t_b},
                              {"charge_before", ev.charge_before},
                              {"charge_after", ev.charge_after},
                              {"before", points_json(ev.before)},
                              {"after", points_json(ev.after)}});
    }
    doc["events"] = std::move(events);
    doc["events_conserve_charge"] = conserved;

    const auto loop = WindingLoop::ellipse(cfg.loop_cx, cfg.loop_cp, cfg.loop_ax, cfg.loop_ap);
    std::vector<double> audit_times;
    for (double t : tr.frame_times) {
        const double phase = t / T - std::floor(t / T);
        if (phase <= cfg.loop_half_window_periods || phase >= 1.0 - cfg.loop_half_window_periods) audit_times.push_back(t);
    }
    const auto ledger = charge_ledger(loop, audit_times, engine, cfg.region, tr.events);
    Json lj;
    lj["loop"] = Json{{"type", "ellipse"}, {"cx", cfg.loop_cx}, {"cp", cfg.loop_cp}, {"ax", cfg.loop_ax}, {"ap", cfg.loop_ap}};
    lj["constant"] = ledger.constant;
    Json entries = Json::array();
    for (std::size_t j = 0; j < ledger.times.size(); ++j) {
        entries.push_back(Json{{"t", ledger.times[j]},
                               {"winding", ledger.winding[j]},
                               {"boundary_proximity", static_cast<bool>(ledger.boundary_proximity[j])}});
    }
    lj["entries"] = std::move(entries);
    doc["charge_audit"] = std::move(lj);
    doc["log"] = tr.log;
    write_json(dir / "topology.json", doc, result);

    const FlowField snap = engine.at(snapshot_t);
    Json iso = provenance(cfg);
    iso["field"] = "J2";
    iso["level"] = cfg.iso_level;
    iso["t"] = snapshot_t;
    iso["snapshot_points"] = points_json(analyze_frame(snap, cfg.region));
    Json lines = Json::array();
    for (const auto& line : iso_contours(snap.magnitude_squared(), cfg.grid, cfg.iso_level)) {
        Json l = Json::array();
        for (const auto& v : line) l.push_back(Json::array({v.x, v.p}));
        lines.push_back(std::move(l));
    }
    iso["polylines"] = std::move(lines);
    write_json(dir / "iso_contours.json", iso, result);

    if (!conserved) {
        result.code = ExitCode::verification_failed;
        result.message = "a merge/split event changed the total winding";
    } else if (!snap.converged) {
        result.code = ExitCode::non_convergence;
        result.message = "flow series did not converge at the snapshot time";
    }
    return result;
}

CommandResult cmd_verify(const RunConfig& cfg, const VerifyOptions& options, std::ostream* progress)
{
    CommandResult result;
    const auto dir = prepare_dir(cfg);
    const auto report = run_verification(cfg, options, [&](const Check& c) {
        if (progress) *progress << (c.passed ? "[PASS] " : "[FAIL] ") << c.id << std::endl;
    });
    Json doc = provenance(cfg);
    doc["passed"] = report.passed();
    doc["failures"] = report.failures();
    Json checks = Json::array();
    for (const auto& c : report.checks) {
        checks.push_back(Json{{"id", c.id},
                              {"description", c.description},
                              {"measured", c.measured},
                              {"relation", c.relation},
                              {"tolerance", c.tolerance},
                              {"passed", c.passed},
                              {"note", c.note}});
    }
    doc["checks"] = std::move(checks);
    write_json(dir / "verify_report.json", doc, result);
    write_text(dir / "verify_summary.txt", report.summary(), result);
    result.message = report.summary();
    if (!report.passed()) result.code = ExitCode::verification_failed;
    return result;
}

}  // namespace wflow
