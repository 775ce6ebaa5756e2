#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "fieldconc/errors.hpp"
#include "fieldconc/fieldmetrics.hpp"
#include "fieldconc/harness.hpp"

namespace {

using namespace fc;
using harness::ExperimentConfig;

struct Source {
    std::string config;
    std::string preset;
};

void add_source(CLI::App* cmd, Source& src)
{
    auto* c = cmd->add_option("-c,--config", src.config, "experiment config JSON");
    auto* p = cmd->add_option("-p,--preset", src.preset, "built-in preset: ellipse, rectangle, kite");
    c->excludes(p);
    p->excludes(c);
}

ExperimentConfig load(const Source& src)
{
    if (!src.config.empty()) return harness::load_config(src.config);
    if (!src.preset.empty()) return harness::preset(src.preset);
    throw ConfigError("one of --config or --preset is required");
}

void write_json(const std::string& path, const harness::json& js)
{
    if (path.empty() || path == "-") {
        std::cout << js.dump(2) << '\n';
        return;
    }
    std::ofstream os(path);
    if (!os) throw Error("cannot write " + path);
    os << js.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Field concentration experiments: transmission eigenmodes, Herglotz kernels, Helmholtz scattering."};
    app.set_version_flag("--version", std::string(harness::kVersion));
    app.require_subcommand(1);

    // eig
    auto* eig = app.add_subcommand("eig", "transmission eigenmode table as CSV");
    int dim = 2, s0 = 1, l = 0;
    std::vector<int> orders{12};
    double k = 1.0, r0 = 1.0, sigma = 1.0;
    std::string eig_out, metrics_out;
    double metrics_xi = 0.5;
    eig->add_option("--dim", dim, "2 or 3")->check(CLI::IsMember({2, 3}));
    eig->add_option("-m,--m", orders, "mode orders, comma separated")->delimiter(',');
    eig->add_option("--s0", s0, "zero rank of the bracket");
    eig->add_option("--l", l, "azimuthal index (3D)");
    eig->add_option("-k,--k", k, "wavenumber");
    eig->add_option("--r0", r0, "ball radius");
    eig->add_option("--sigma", sigma, "interior sigma");
    eig->add_option("-o,--out", eig_out, "CSV path (default stdout)");
    eig->add_option("--metrics", metrics_out, "also write localization metrics CSV here");
    eig->add_option("--xi", metrics_xi, "shrink fraction for --metrics");

    // herglotz
    auto* herg = app.add_subcommand("herglotz", "recover the Herglotz kernel for a config");
    Source herg_src;
    std::string kernel_out = "kernel.csv";
    add_source(herg, herg_src);
    herg->add_option("-o,--out", kernel_out, "kernel CSV path");

    // scatter
    auto* scat = app.add_subcommand("scatter", "forward solve from a config and a kernel CSV");
    Source scat_src;
    std::string kernel_in, scat_out = "out";
    add_source(scat, scat_src);
    scat->add_option("--kernel", kernel_in, "kernel CSV; plane-wave configs need none");
    scat->add_option("-o,--out", scat_out, "output directory");

    // pipeline
    auto* pipe = app.add_subcommand("pipeline", "end-to-end run");
    Source pipe_src;
    std::string pipe_out;
    add_source(pipe, pipe_src);
    pipe->add_option("-o,--out", pipe_out, "output directory (overrides the config)");

    // verify
    auto* ver = app.add_subcommand("verify", "property suites; failures are reported in the JSON, not the exit code");
    std::string selector = "all", verify_out;
    ver->add_option("selector", selector, "suite name, comma list, or all");
    ver->add_option("-o,--out", verify_out, "JSON path (default stdout)");
    bool list = false;
    ver->add_flag("--list", list, "print suite names");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*eig) {
            std::vector<teig::RadialMode> modes;
            std::vector<fieldmetrics::MetricsRow> rows;
            for (int m : orders) {
                auto mode = teig::make_mode(dim, m, s0, k, r0, sigma, teig::Vec3::Zero(), dim == 3 ? l : 0);
                modes.push_back(mode);
                if (!metrics_out.empty()) rows.push_back(fieldmetrics::metrics_row(mode, metrics_xi));
            }
            if (eig_out.empty()) {
                teig::write_mode_table(std::cout, modes);
            } else {
                std::ofstream os(eig_out);
                if (!os) throw Error("cannot write " + eig_out);
                teig::write_mode_table(os, modes);
            }
            if (!metrics_out.empty()) {
                std::ofstream os(metrics_out);
                if (!os) throw Error("cannot write " + metrics_out);
                fieldmetrics::write_metrics_csv(os, rows);
            }
        } else if (*herg) {
            ExperimentConfig cfg = load(herg_src);
            cfg.validate();
            scatter::Ball ball = harness::place_generator(cfg);
            const auto& g = cfg.generator;
            auto mode = teig::make_mode(2, g.m, g.s0, cfg.k, g.r0, g.sigma,
                                        teig::Vec3(ball.center.x(), ball.center.y(), 0.0));
            teig::CompositeEigenfunction cf{{mode}, cfg.inclusion};
            auto rec = herglotz::recover_kernel(cf, {cfg.incident.points_per_curve, cfg.incident.derivative_rows},
                                                cfg.incident.directions, cfg.incident.alpha);
            herglotz::save_kernel(kernel_out, rec.kernel, &rec.report);
            std::cout << "kernel " << kernel_out << ": ball relative residual " << rec.report.ball_relative
                      << ", max abs residual " << rec.report.max_abs_residual << ", |g| " << rec.kernel.l2_norm()
                      << '\n';
        } else if (*scat) {
            ExperimentConfig cfg = load(scat_src);
            cfg.output_dir = scat_out;
            harness::PipelineOutput out;
            if (cfg.incident.kind == harness::IncidentSpec::Kind::planewave) {
                if (!kernel_in.empty()) throw ConfigError("a plane-wave config takes no kernel");
                out = harness::run_pipeline(cfg);
            } else {
                if (kernel_in.empty()) throw ConfigError("--kernel is required for Herglotz incidence");
                out = harness::run_with_kernel(cfg, herglotz::load_kernel(kernel_in));
            }
            std::cout << "wrote " << scat_out << ": amplification ratio " << out.report.gap.ratio
                      << ", annulus sup " << out.report.smallness.sup << '\n';
        } else if (*pipe) {
            ExperimentConfig cfg = load(pipe_src);
            if (!pipe_out.empty()) cfg.output_dir = pipe_out;
            auto out = harness::run_pipeline(cfg);
            std::cout << out.report.to_json().dump(2) << '\n';
        } else if (*ver) {
            if (list) {
                for (const auto& n : harness::suite_names()) std::cout << n << '\n';
                return 0;
            }
            write_json(verify_out, harness::verify(selector));
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
