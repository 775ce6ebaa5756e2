#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fieldconc/teig.hpp"

namespace fc::herglotz {

using Vec2 = Eigen::Vector2d;
using CVec2 = Eigen::Vector2cd;
using cplx = std::complex<double>;

// Equispaced directions on the unit circle with weights 2 pi / N.
struct DirectionQuadrature {
    std::vector<double> angles;
    std::vector<double> weights;

    static DirectionQuadrature uniform(int count);
    [[nodiscard]] int size() const { return static_cast<int>(angles.size()); }
    [[nodiscard]] Vec2 node(int j) const { return {std::cos(angles[j]), std::sin(angles[j])}; }
    void validate() const;
};

struct HerglotzKernel {
    DirectionQuadrature quad;
    Eigen::VectorXcd g;
    double k = 1.0;
    double alpha_reg = 0.0;

    void validate() const;
    [[nodiscard]] double l2_norm() const;
};

[[nodiscard]] cplx herglotz_eval(const HerglotzKernel& kernel, const Vec2& x);
[[nodiscard]] CVec2 herglotz_grad(const HerglotzKernel& kernel, const Vec2& x);

// Values and Cartesian derivatives on the tensor grid x0 + i h, y0 + j h; matrices are nx by ny.
struct GridSamples {
    Eigen::MatrixXcd value, dx, dy;
};
[[nodiscard]] GridSamples herglotz_on_grid(const HerglotzKernel& kernel, double x0, double y0, double h, int nx,
                                           int ny);

enum class CurveTag { inclusion, ball };

struct CollocationRow {
    Vec2 point;
    std::optional<Vec2> normal;  // set for normal-derivative rows
    cplx target;                 // unscaled target value
    double scale = 1.0;          // row weight applied to operator row and target alike
    CurveTag tag = CurveTag::inclusion;
    int curve = 0;
};

struct CollocationSet {
    std::vector<CollocationRow> rows;

    [[nodiscard]] Eigen::VectorXcd targets() const;
    [[nodiscard]] int count(CurveTag tag, bool derivative) const;
};

[[nodiscard]] Eigen::MatrixXcd build_operator(const CollocationSet& colloc, const DirectionQuadrature& quad,
                                              double k);

struct TikhonovResult {
    Eigen::VectorXcd g;
    double residual_norm = 0.0;
    double solution_norm = 0.0;
};

// argmin ||H g - f||^2 + alpha ||g||^2 via QR of the stacked matrix [H; sqrt(alpha) I].
[[nodiscard]] TikhonovResult tikhonov_solve(const Eigen::MatrixXcd& H, const Eigen::VectorXcd& f, double alpha);

struct TargetOptions {
    int points_per_curve = 256;
    bool derivative_rows = true;
};

[[nodiscard]] CollocationSet build_target(const teig::CompositeEigenfunction& cf, const TargetOptions& opts);

// Residual summary of a fitted kernel against a collocation set.
struct FitReport {
    double residual_norm = 0.0;        // ||H g - f|| over all (scaled) rows
    double solution_norm = 0.0;        // ||g|| in the discrete l2 sense
    double ball_relative = 0.0;        // value rows on generator balls: ||Hg - f|| / ||f||
    double ball_max_abs = 0.0;         // max |Hg - f| over ball value rows
    double inclusion_max_abs = 0.0;    // max |Hg| over inclusion value rows (target is zero)
    double inclusion_rms = 0.0;
    double max_abs_residual = 0.0;     // max |Hg - f| over all value rows
};

[[nodiscard]] FitReport fit_report(const CollocationSet& colloc, const Eigen::MatrixXcd& H,
                                   const Eigen::VectorXcd& g);

struct Recovery {
    HerglotzKernel kernel;
    CollocationSet colloc;
    FitReport report;
};

[[nodiscard]] Recovery recover_kernel(const teig::CompositeEigenfunction& cf, const TargetOptions& opts,
                                      int directions, double alpha);

// CSV rows: angle,re_g,im_g,weight; sidecar JSON next to it with the extension replaced by .json.
void save_kernel(const std::string& csv_path, const HerglotzKernel& kernel, const FitReport* report = nullptr);
[[nodiscard]] HerglotzKernel load_kernel(const std::string& csv_path);

}  // namespace fc::herglotz
