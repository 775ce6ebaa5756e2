#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fieldconc/herglotz.hpp"
#include "fieldconc/scatter.hpp"
#include "fieldconc/teig.hpp"

namespace fc::harness {

using Vec2 = Eigen::Vector2d;
using cplx = std::complex<double>;
using json = nlohmann::json;

inline constexpr const char* kVersion = "1.0.0";

// Virtual ball carrying a radial eigenmode. Without an explicit centre the ball sits outside the
// inclusion along the outward normal at boundary parameter arc_t, separated from it by gap.
struct GeneratorSpec {
    double r0 = 0.25;
    std::optional<Vec2> center;
    int m = 12;
    int s0 = 1;
    double sigma = 1.0;
    double gap = 0.075;
    double arc_t = 0.0;
};

struct IncidentSpec {
    enum class Kind { herglotz, planewave };
    Kind kind = Kind::herglotz;
    double alpha = 1e-5;
    int directions = 256;
    int points_per_curve = 256;
    bool derivative_rows = true;
    Vec2 direction{1.0, 0.0};
    double amplitude = 1.0;
};

// Gamma is the boundary arc [t0, t1]; without explicit bounds it is the part of the boundary within
// one generator radius of the point facing the ball. epsilon defaults to the generator gap.
struct GapSpec {
    std::optional<double> t0, t1;
    std::optional<double> epsilon;
};

// Frame of cells between inner and outer (in background wavelengths) from the box around inclusion
// and generator, measured in the max-norm.
struct AnnulusSpec {
    double inner = 0.25;
    double outer = 0.75;
    double bar_factor = 10.0;
    bool compare_planewave = true;
};

struct ExperimentConfig {
    std::string name = "custom";
    geometry::Shape inclusion = geometry::Disk{};
    double k = 1.0;
    double sigma = 1.0;              // inclusion sigma
    std::optional<double> tau;       // inclusion tau; the generator's derived tau when unset
    GeneratorSpec generator;
    IncidentSpec incident;
    scatter::GridPolicy grid;
    GapSpec gap;
    AnnulusSpec annulus;
    std::string output_dir;          // empty: no files written

    void validate() const;
};

[[nodiscard]] ExperimentConfig parse_config(const json& js);
[[nodiscard]] ExperimentConfig load_config(const std::string& path);
[[nodiscard]] json to_json(const ExperimentConfig& cfg);
// FNV-1a of the canonical JSON dump, as 16 hex digits.
[[nodiscard]] std::string config_hash(const ExperimentConfig& cfg);

// Built-in experiment presets: "ellipse", "rectangle", "kite".
[[nodiscard]] ExperimentConfig preset(const std::string& name);
[[nodiscard]] std::vector<std::string> preset_names();

// Generator ball: explicit centre, or along the outward normal at arc_t, gap away from the inclusion.
[[nodiscard]] scatter::Ball place_generator(const ExperimentConfig& cfg);

// Cells of the non-PML grid within epsilon of the arc and outside the closed inclusion.
struct GapMask {
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> cells;
    double t0 = 0.0, t1 = 0.0, epsilon = 0.0;
    int count = 0;
};
[[nodiscard]] GapMask gap_mask(const scatter::GridFrame& frame, const geometry::Shape& inclusion, double t0,
                               double t1, double epsilon);

struct GapMetrics {
    double max_grad = 0.0;           // max |grad u| over the mask
    double baseline = 0.0;           // k * max |u^i| over the mask
    double ratio = 0.0;              // max_grad / baseline
    double incident_max_grad = 0.0;  // max |grad u^i| over the mask
    double incident_ratio = 0.0;     // max_grad / incident_max_grad
    Vec2 argmax{0.0, 0.0};
    Vec2 global_argmax{0.0, 0.0};    // over the whole non-PML grid
    double global_max_grad = 0.0;
    bool global_argmax_in_gap = false;
    int mask_cells = 0;
};
[[nodiscard]] GapMetrics gap_metrics(const scatter::FieldGrid& total, const scatter::VectorFieldGrid& grad,
                                     const scatter::FieldGrid& incident, const scatter::VectorFieldGrid& incident_grad,
                                     const GapMask& mask, double k);

struct Smallness {
    double sup = 0.0;
    double l2 = 0.0;
    double bar = 0.0;
    bool passed = false;
    int cells = 0;
};
// Annulus frame cells of the non-PML grid around the given box.
[[nodiscard]] Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> annulus_mask(const scatter::GridFrame& frame,
                                                                                const geometry::BoundingBox& box,
                                                                                double inner, double outer);
[[nodiscard]] Smallness smallness_check(const scatter::FieldGrid& scattered,
                                        const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& annulus,
                                        double bar);

struct ConcentrationReport {
    std::string name, hash;
    json config;
    // eigen data
    double n = 0.0, tau_derived = 0.0, tau_used = 0.0, sigma_used = 0.0;
    teig::RadialMode mode;
    Vec2 generator_center{0.0, 0.0};
    // herglotz
    herglotz::FitReport fit;
    double kernel_norm = 0.0;
    double incident_sup_boundary = 0.0;  // max |u^i| on the inclusion boundary
    // scattering
    double grid_h = 0.0;
    int grid_nx = 0, grid_ny = 0;
    double solver_residual = 0.0;
    GapMetrics gap;
    Smallness smallness;
    std::optional<double> planewave_annulus_sup;
    // wall-clock seconds per stage; kept out of the deterministic report JSON
    std::vector<std::pair<std::string, double>> timings;

    [[nodiscard]] json to_json() const;
};

struct PipelineOutput {
    ConcentrationReport report;
    scatter::SolveResult solve;
    std::optional<herglotz::HerglotzKernel> kernel;
};

// find_contrast, normalize, build_target, tikhonov, solve, gradient, gap metrics; writes artifacts when
// cfg.output_dir is set. Errors carry the failing stage in their message.
[[nodiscard]] PipelineOutput run_pipeline(const ExperimentConfig& cfg);

// Pipeline with an already recovered kernel.
[[nodiscard]] PipelineOutput run_with_kernel(const ExperimentConfig& cfg, const herglotz::HerglotzKernel& kernel);

// Property suites. Failures are data: each check reports measured values against its tolerance.
struct CheckResult {
    std::string name;
    bool passed = false;
    std::string summary;
    json details;
    double seconds = 0.0;
};

[[nodiscard]] std::vector<std::string> suite_names();
[[nodiscard]] CheckResult run_suite(const std::string& name);
[[nodiscard]] json verify(const std::string& selector);

}  // namespace fc::harness
