#pragma once

#include <iosfwd>
#include <numbers>
#include <utility>
#include <vector>

#include "fieldconc/teig.hpp"

namespace fc::fieldmetrics {

enum class Which { v, w };
enum class RegionKind { interior_ball, boundary_sector };

// interior_ball: the concentric ball of radius xi*r0.
// boundary_sector: xi*r0 < r <= r0 restricted to the angular window (theta in 2D, phi in 3D).
struct ShrunkRegion {
    double xi = 0.5;
    RegionKind kind = RegionKind::interior_ball;
    double angle0 = 0.0;
    double angle1 = 2.0 * std::numbers::pi;

    static ShrunkRegion ball(double xi) { return {xi, RegionKind::interior_ball}; }
    static ShrunkRegion sector(double xi, double a0 = 0.0, double a1 = 2.0 * std::numbers::pi)
    {
        return {xi, RegionKind::boundary_sector, a0, a1};
    }
    void validate() const;
};

struct ScalingFit {
    double exponent = 0.0;
    double intercept = 0.0;
    double residual = 0.0;
    std::vector<double> mrange;
};

struct SupSample {
    double value = 0.0;
    double r = 0.0;
    double angle = 0.0;  // theta in 2D, colatitude in 3D
};

[[nodiscard]] double norm_ratio(const teig::RadialMode& mode, const ShrunkRegion& region, Which which);
[[nodiscard]] double grad_norm_ratio(const teig::RadialMode& mode, const ShrunkRegion& region, Which which);
[[nodiscard]] SupSample sup_grad_sector(const teig::RadialMode& mode, const ShrunkRegion& region, Which which,
                                        bool divide_by_k = true);
[[nodiscard]] ScalingFit fit_scaling(const std::vector<std::pair<double, double>>& samples);

// Squared gradient L2 norm over the concentric ball of radius rho, divided by the squared trace.
// 2D uses the Bessel integral identity; 3D integrates the radial and angular parts directly.
[[nodiscard]] double grad_norm_sq(const teig::RadialMode& mode, double rho, Which which);
// Same quantity by direct two-term quadrature; oracle for the identity path.
[[nodiscard]] double grad_norm_sq_direct(const teig::RadialMode& mode, double rho, Which which);

// Both sides of int_0^y [J_m'^2 x + m^2 J_m^2 / x] dx = int_0^y J_{m-1}^2 x dx - m J_m(y)^2.
[[nodiscard]] double bessel_identity_lhs(int m, double y);
[[nodiscard]] double bessel_identity_rhs(int m, double y);

// Sampled sups over theta of |P|, |dP/dtheta| and |l P / sin theta| for P = P(m,l;cos theta).
struct AngularSups {
    double value = 0.0;
    double dtheta = 0.0;
    double azimuthal = 0.0;
};
[[nodiscard]] AngularSups angular_gradient_sups(int m, int l, int samples = 4096);

// Sampled max of |P(m,l;x)| on [-1,1] and the maximizing x in [0,1].
struct LegendreMax {
    double value = 0.0;
    double x0 = 0.0;
};
[[nodiscard]] LegendreMax legendre_max(int m, int l, int samples = 100001);

// r_m = j'_{m,1}/(k n_m), the radius where the interior profile peaks.
[[nodiscard]] double interior_peak_radius(const teig::RadialMode& mode);

struct MetricsRow {
    int m = 0;
    double xi = 0.0;
    double ratio_v = 0.0, ratio_w = 0.0;
    double grad_ratio_v = 0.0, grad_ratio_w = 0.0;
    double sup_grad_v_over_k = 0.0, sup_grad_w_over_k = 0.0;
};
[[nodiscard]] MetricsRow metrics_row(const teig::RadialMode& mode, double xi);
void write_metrics_csv(std::ostream& os, const std::vector<MetricsRow>& rows);

}  // namespace fc::fieldmetrics
