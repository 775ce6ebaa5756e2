#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "fieldconc/errors.hpp"
#include "fieldconc/harness.hpp"

namespace fc::harness {

namespace {

using Mask = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;
using Clock = std::chrono::steady_clock;

template <class F>
auto stage(const char* name, F&& fn) -> decltype(fn())
{
    try {
        return fn();
    } catch (const Error& e) {
        throw Error(std::string("[") + name + "] " + e.what());
    }
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

json vec(const Vec2& v) { return json::array({v.x(), v.y()}); }

// Parameter interval around t_mid where the boundary stays within radius of the boundary point at t_mid.
std::pair<double, double> default_arc(const geometry::Shape& s, double t_mid, double radius)
{
    const double dt = 2.0 * std::numbers::pi / 8192;
    Vec2 p = geometry::boundary_at(s, t_mid).point;
    double lo = t_mid, hi = t_mid;
    while (hi - t_mid < std::numbers::pi && (geometry::boundary_at(s, hi + dt).point - p).norm() <= radius) hi += dt;
    while (t_mid - lo < std::numbers::pi && (geometry::boundary_at(s, lo - dt).point - p).norm() <= radius) lo -= dt;
    if (hi - lo < dt) throw GeometryError("gap arc is empty");
    return {lo, hi};
}

double segment_distance(const Vec2& p, const Vec2& a, const Vec2& b)
{
    Vec2 ab = b - a;
    double len2 = ab.squaredNorm();
    double t = len2 > 0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    return (p - (a + t * ab)).norm();
}

scatter::IncidentField herglotz_incident(const herglotz::HerglotzKernel& kernel)
{
    scatter::IncidentField f;
    f.value = [kernel](const Vec2& x) { return herglotz::herglotz_eval(kernel, x); };
    f.grad = [kernel](const Vec2& x) { return herglotz::herglotz_grad(kernel, x); };
    f.on_grid = [kernel](const scatter::GridFrame& fr) {
        return herglotz::herglotz_on_grid(kernel, fr.x0, fr.y0, fr.h, fr.nx, fr.ny).value;
    };
    return f;
}

double boundary_sup(const geometry::Shape& s, const scatter::IncidentField& f)
{
    double sup = 0.0;
    for (const auto& bp : geometry::boundary_samples(s, 1024)) sup = std::max(sup, std::abs(f.value(bp.point)));
    return sup;
}

geometry::BoundingBox scene_box(const geometry::Shape& inclusion, const scatter::Ball& ball)
{
    geometry::BoundingBox box = geometry::bounding_box(inclusion);
    Vec2 r(ball.radius, ball.radius);
    box.expand({ball.center - r, ball.center + r});
    return box;
}

struct Context {
    teig::RadialMode mode;
    scatter::Ball ball;
    std::optional<herglotz::HerglotzKernel> kernel;
    herglotz::FitReport fit;
    ConcentrationReport report;
};

Context prepare(const ExperimentConfig& cfg)
{
    cfg.validate();
    Context ctx;
    auto t0 = Clock::now();
    ctx.ball = stage("generator", [&] { return place_generator(cfg); });
    const GeneratorSpec& g = cfg.generator;
    ctx.mode = stage("eig", [&] {
        return teig::make_mode(2, g.m, g.s0, cfg.k, g.r0, g.sigma, teig::Vec3(ctx.ball.center.x(), ctx.ball.center.y(), 0.0));
    });
    ctx.report.timings.emplace_back("eig", seconds_since(t0));
    return ctx;
}

teig::CompositeEigenfunction composite(const ExperimentConfig& cfg, const teig::RadialMode& mode)
{
    return {{mode}, cfg.inclusion};
}

PipelineOutput complete(const ExperimentConfig& cfg, Context ctx)
{
    ConcentrationReport& rep = ctx.report;
    rep.name = cfg.name;
    rep.hash = config_hash(cfg);
    rep.config = to_json(cfg);
    rep.config.erase("output_dir");
    rep.mode = ctx.mode;
    rep.n = ctx.mode.n;
    rep.tau_derived = ctx.mode.tau;
    rep.tau_used = cfg.tau ? *cfg.tau : ctx.mode.tau;
    rep.sigma_used = cfg.sigma;
    rep.generator_center = ctx.ball.center;
    rep.fit = ctx.fit;

    scatter::MediumScene scene;
    scene.inclusion = cfg.inclusion;
    scene.sigma_in = cfg.sigma;
    scene.tau_in = rep.tau_used;
    scene.k = cfg.k;
    scene.generators = {ctx.ball};

    scatter::IncidentField incident;
    if (ctx.kernel) {
        incident = herglotz_incident(*ctx.kernel);
        rep.kernel_norm = ctx.kernel->l2_norm();
    } else {
        incident = scatter::plane_wave(cfg.k, cfg.incident.direction, cfg.incident.amplitude);
    }
    rep.incident_sup_boundary = boundary_sup(cfg.inclusion, incident);

    auto t0 = Clock::now();
    PipelineOutput out;
    out.solve = stage("scatter", [&] { return scatter::solve_scattered(scene, incident, cfg.grid); });
    rep.timings.emplace_back("scatter", seconds_since(t0));
    const scatter::GridFrame& frame = out.solve.total.frame;
    rep.grid_h = frame.h;
    rep.grid_nx = frame.nx - 2 * frame.pml;
    rep.grid_ny = frame.ny - 2 * frame.pml;
    rep.solver_residual = out.solve.residual;

    t0 = Clock::now();
    scatter::VectorFieldGrid grad = scatter::gradient_field(out.solve.total);
    scatter::VectorFieldGrid grad_inc = scatter::gradient_field(out.solve.incident);
    double t_lo, t_hi;
    if (cfg.gap.t0) {
        t_lo = *cfg.gap.t0;
        t_hi = *cfg.gap.t1;
    } else {
        double t_mid = cfg.generator.arc_t;
        if (cfg.generator.center) {
            // nearest boundary parameter to the given centre
            double best = 1e300;
            for (int i = 0; i < 8192; ++i) {
                double t = 2.0 * std::numbers::pi * i / 8192;
                double d = (geometry::boundary_at(cfg.inclusion, t).point - ctx.ball.center).norm();
                if (d < best) {
                    best = d;
                    t_mid = t;
                }
            }
        }
        std::tie(t_lo, t_hi) = default_arc(cfg.inclusion, t_mid, cfg.generator.r0);
    }
    double eps = cfg.gap.epsilon ? *cfg.gap.epsilon
                                 : geometry::signed_distance(cfg.inclusion, ctx.ball.center) - ctx.ball.radius;
    GapMask mask = stage("gap", [&] { return gap_mask(frame, cfg.inclusion, t_lo, t_hi, eps); });
    rep.gap = stage("gap", [&] { return gap_metrics(out.solve.total, grad, out.solve.incident, grad_inc, mask, cfg.k); });

    const double lambda = 2.0 * std::numbers::pi / cfg.k;
    Mask ann = annulus_mask(frame, scene_box(cfg.inclusion, ctx.ball), cfg.annulus.inner * lambda,
                            cfg.annulus.outer * lambda);
    double bar = ctx.kernel ? cfg.annulus.bar_factor * ctx.fit.max_abs_residual : 0.0;
    rep.smallness = stage("smallness", [&] { return smallness_check(out.solve.scattered, ann, bar); });
    if (!ctx.kernel) rep.smallness.passed = false;

    if (ctx.kernel && cfg.annulus.compare_planewave) {
        scatter::IncidentField pw = scatter::plane_wave(cfg.k, cfg.incident.direction, rep.incident_sup_boundary);
        scatter::SolveResult ref = stage("scatter", [&] {
            return scatter::solve_scattered(scene, pw, out.solve.materials, cfg.grid.direct_limit);
        });
        rep.planewave_annulus_sup = smallness_check(ref.scattered, ann, 0.0).sup;
    }
    rep.timings.emplace_back("metrics", seconds_since(t0));

    if (!cfg.output_dir.empty()) {
        stage("output", [&] {
            namespace fs = std::filesystem;
            fs::create_directories(cfg.output_dir);
            fs::path dir(cfg.output_dir);
            scatter::FieldExportMeta meta{cfg.k, cfg.grid.pml_reflection, out.solve.residual,
                                          json{{"config_hash", rep.hash}, {"name", rep.name}}.dump()};
            scatter::write_field_csv((dir / "total.csv").string(), out.solve.total, grad, meta);
            scatter::write_field_csv((dir / "scattered.csv").string(), out.solve.scattered,
                                     scatter::gradient_field(out.solve.scattered), meta);
            scatter::write_field_csv((dir / "incident.csv").string(), out.solve.incident, grad_inc, meta);
            if (ctx.kernel) herglotz::save_kernel((dir / "kernel.csv").string(), *ctx.kernel, &ctx.fit);
            {
                std::ofstream os(dir / "modes.csv");
                teig::write_mode_table(os, {ctx.mode});
            }
            std::ofstream rj(dir / "report.json");
            if (!rj) throw Error("cannot write report");
            rj << rep.to_json().dump(2) << '\n';
            json tj = json::object();
            for (const auto& [name, sec] : rep.timings) tj[name] = sec;
            std::ofstream tf(dir / "timings.json");
            tf << tj.dump(2) << '\n';
            return 0;
        });
    }
    out.report = rep;
    out.kernel = ctx.kernel;
    return out;
}

}  // namespace

scatter::Ball place_generator(const ExperimentConfig& cfg)
{
    const GeneratorSpec& g = cfg.generator;
    scatter::Ball ball;
    ball.radius = g.r0;
    if (g.center) {
        ball.center = *g.center;
    } else {
        geometry::BoundaryPoint bp = geometry::boundary_at(cfg.inclusion, g.arc_t);
        ball.center = bp.point + (g.gap + g.r0) * bp.normal;
    }
    double d = geometry::signed_distance(cfg.inclusion, ball.center);
    if (d <= g.r0) throw GeometryError("generator ball meets the inclusion");
    return ball;
}

GapMask gap_mask(const scatter::GridFrame& frame, const geometry::Shape& inclusion, double t0, double t1,
                 double epsilon)
{
    if (!(epsilon > 0)) throw GeometryError("gap width must be positive");
    std::vector<geometry::BoundaryPoint> arc = geometry::arc_samples(inclusion, t0, t1, 2049);
    geometry::BoundingBox box{arc.front().point, arc.front().point};
    for (const auto& bp : arc) box.expand({bp.point, bp.point});
    GapMask mask;
    mask.t0 = t0;
    mask.t1 = t1;
    mask.epsilon = epsilon;
    mask.cells = Mask::Constant(frame.nx, frame.ny, false);
    for (int j = frame.pml; j < frame.ny - frame.pml; ++j) {
        for (int i = frame.pml; i < frame.nx - frame.pml; ++i) {
            Vec2 p = frame.point(i, j);
            if (p.x() < box.lo.x() - epsilon || p.x() > box.hi.x() + epsilon || p.y() < box.lo.y() - epsilon ||
                p.y() > box.hi.y() + epsilon)
                continue;
            if (geometry::contains(inclusion, p)) continue;
            double d = 1e300;
            for (size_t s = 0; s + 1 < arc.size() && d > epsilon; ++s)
                d = std::min(d, segment_distance(p, arc[s].point, arc[s + 1].point));
            if (d <= epsilon) {
                mask.cells(i, j) = true;
                ++mask.count;
            }
        }
    }
    if (mask.count == 0) throw GeometryError("gap mask contains no grid cells");
    return mask;
}

GapMetrics gap_metrics(const scatter::FieldGrid& total, const scatter::VectorFieldGrid& grad,
                       const scatter::FieldGrid& incident, const scatter::VectorFieldGrid& incident_grad,
                       const GapMask& mask, double k)
{
    const scatter::GridFrame& f = total.frame;
    if (mask.count == 0) throw GeometryError("empty gap mask");
    Eigen::MatrixXd mag = grad.magnitude();
    Eigen::MatrixXd mag_inc = incident_grad.magnitude();
    GapMetrics gm;
    gm.mask_cells = mask.count;
    double max_inc = 0.0;
    int gi = -1, gj = -1;
    for (int j = f.pml; j < f.ny - f.pml; ++j) {
        for (int i = f.pml; i < f.nx - f.pml; ++i) {
            if (mag(i, j) > gm.global_max_grad) {
                gm.global_max_grad = mag(i, j);
                gi = i;
                gj = j;
            }
            if (!mask.cells(i, j)) continue;
            if (mag(i, j) > gm.max_grad) {
                gm.max_grad = mag(i, j);
                gm.argmax = f.point(i, j);
            }
            max_inc = std::max(max_inc, std::abs(incident.u(i, j)));
            gm.incident_max_grad = std::max(gm.incident_max_grad, mag_inc(i, j));
        }
    }
    gm.baseline = k * max_inc;
    gm.ratio = gm.baseline > 0 ? gm.max_grad / gm.baseline : 0.0;
    gm.incident_ratio = gm.incident_max_grad > 0 ? gm.max_grad / gm.incident_max_grad : 0.0;
    if (gi >= 0) {
        gm.global_argmax = f.point(gi, gj);
        gm.global_argmax_in_gap = mask.cells(gi, gj);
    }
    return gm;
}

Mask annulus_mask(const scatter::GridFrame& frame, const geometry::BoundingBox& box, double inner, double outer)
{
    Mask m = Mask::Constant(frame.nx, frame.ny, false);
    for (int j = frame.pml; j < frame.ny - frame.pml; ++j) {
        for (int i = frame.pml; i < frame.nx - frame.pml; ++i) {
            Vec2 p = frame.point(i, j);
            double dx = std::max({box.lo.x() - p.x(), p.x() - box.hi.x(), 0.0});
            double dy = std::max({box.lo.y() - p.y(), p.y() - box.hi.y(), 0.0});
            double d = std::max(dx, dy);
            m(i, j) = d >= inner && d <= outer;
        }
    }
    return m;
}

Smallness smallness_check(const scatter::FieldGrid& scattered, const Mask& annulus, double bar)
{
    const scatter::GridFrame& f = scattered.frame;
    Smallness s;
    double sq = 0.0;
    for (int j = 0; j < f.ny; ++j) {
        for (int i = 0; i < f.nx; ++i) {
            if (!annulus(i, j) || f.in_pml(i, j)) continue;
            double a = std::abs(scattered.u(i, j));
            s.sup = std::max(s.sup, a);
            sq += a * a;
            ++s.cells;
        }
    }
    if (s.cells == 0) throw GeometryError("annulus contains no grid cells");
    s.l2 = std::sqrt(sq) * f.h;
    s.bar = bar;
    s.passed = s.sup <= bar;
    return s;
}

json ConcentrationReport::to_json() const
{
    json js;
    js["version"] = kVersion;
    js["name"] = name;
    js["config_hash"] = hash;
    js["config"] = config;
    js["eigen"] = {{"m", mode.m},         {"s0", mode.s0},       {"k", mode.k},
                   {"r0", mode.r0},       {"sigma", mode.sigma}, {"n", n},
                   {"tau_derived", tau_derived},
                   {"alpha", mode.alpha}, {"beta", mode.beta},   {"center", vec(generator_center)}};
    js["inclusion_material"] = {{"sigma", sigma_used}, {"tau", tau_used}};
    js["herglotz"] = {{"residual_norm", fit.residual_norm},
                      {"solution_norm", fit.solution_norm},
                      {"ball_relative", fit.ball_relative},
                      {"ball_max_abs", fit.ball_max_abs},
                      {"inclusion_max_abs", fit.inclusion_max_abs},
                      {"inclusion_rms", fit.inclusion_rms},
                      {"max_abs_residual", fit.max_abs_residual},
                      {"kernel_l2_norm", kernel_norm},
                      {"incident_sup_on_boundary", incident_sup_boundary}};
    js["grid"] = {{"h", grid_h}, {"nx", grid_nx}, {"ny", grid_ny}, {"solver_residual", solver_residual}};
    js["gap"] = {{"max_grad", gap.max_grad},
                 {"baseline", gap.baseline},
                 {"amplification_ratio", gap.ratio},
                 {"incident_max_grad", gap.incident_max_grad},
                 {"ratio_to_incident_grad", gap.incident_ratio},
                 {"argmax", vec(gap.argmax)},
                 {"global_max_grad", gap.global_max_grad},
                 {"global_argmax", vec(gap.global_argmax)},
                 {"global_argmax_in_gap", gap.global_argmax_in_gap},
                 {"mask_cells", gap.mask_cells}};
    js["smallness"] = {{"annulus_sup", smallness.sup},
                       {"annulus_l2", smallness.l2},
                       {"bar", smallness.bar},
                       {"passed", smallness.passed},
                       {"cells", smallness.cells}};
    js["planewave_annulus_sup"] = planewave_annulus_sup ? json(*planewave_annulus_sup) : json(nullptr);
    return js;
}

PipelineOutput run_pipeline(const ExperimentConfig& cfg)
{
    Context ctx = prepare(cfg);
    if (cfg.incident.kind == IncidentSpec::Kind::herglotz) {
        auto t0 = Clock::now();
        herglotz::TargetOptions opts{cfg.incident.points_per_curve, cfg.incident.derivative_rows};
        herglotz::Recovery rec = stage("herglotz", [&] {
            return herglotz::recover_kernel(composite(cfg, ctx.mode), opts, cfg.incident.directions,
                                            cfg.incident.alpha);
        });
        ctx.kernel = rec.kernel;
        ctx.fit = rec.report;
        ctx.report.timings.emplace_back("herglotz", seconds_since(t0));
    }
    return complete(cfg, std::move(ctx));
}

PipelineOutput run_with_kernel(const ExperimentConfig& cfg, const herglotz::HerglotzKernel& kernel)
{
    kernel.validate();
    if (std::abs(kernel.k - cfg.k) > 1e-12 * cfg.k) throw ConfigError("kernel wavenumber differs from the config");
    Context ctx = prepare(cfg);
    herglotz::TargetOptions opts{cfg.incident.points_per_curve, cfg.incident.derivative_rows};
    herglotz::CollocationSet colloc = herglotz::build_target(composite(cfg, ctx.mode), opts);
    Eigen::MatrixXcd H = herglotz::build_operator(colloc, kernel.quad, kernel.k);
    ctx.fit = herglotz::fit_report(colloc, H, kernel.g);
    ctx.kernel = kernel;
    return complete(cfg, std::move(ctx));
}

}  // namespace fc::harness
