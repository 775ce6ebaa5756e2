#pragma once

#include <complex>
#include <iosfwd>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "fieldconc/geometry.hpp"

namespace fc::teig {

using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;
using cplx = std::complex<double>;

// One radial transmission eigenmode. Points are 3-vectors; 2D modes ignore z.
struct RadialMode {
    int dim = 2;
    int m = 0;
    int l = 0;
    int s0 = 1;
    double k = 1.0;
    double r0 = 1.0;
    double sigma = 1.0;
    double n = 0.0;
    double tau = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    Vec3 center = Vec3::Zero();
    // beta * J_m(k r0) (= alpha * J_m(k n r0)); kept so evaluation never forms huge beta * tiny J products.
    double trace = 0.0;

    [[nodiscard]] bool solved() const { return n > 0.0; }
    [[nodiscard]] bool normalized() const { return trace != 0.0; }
};

struct Bracket {
    double lo = 0.0;
    double hi = 0.0;
};

// Open interval (j_{nu,s0}, j_{nu,s0+1})/(k r0) containing n; nu = m (2D) or m + 1/2 (3D).
[[nodiscard]] Bracket contrast_bracket(int dim, int m, int s0, double k, double r0);

[[nodiscard]] double matching_determinant(int dim, int m, double k, double r0, double sigma, double n);

// |f_m(n)| divided by the sum of the magnitudes of its two terms.
[[nodiscard]] double relative_residual(const RadialMode& mode);

[[nodiscard]] RadialMode find_contrast(int dim, int m, int s0, double k, double r0, double sigma);
[[nodiscard]] RadialMode find_contrast(int dim, int m, int s0, double k, double r0, double sigma,
                                       const Bracket& bracket);

// Sets alpha, beta so that ||v||_{L2(ball)} = 1 (angular factor included).
[[nodiscard]] RadialMode normalize_mode(RadialMode mode);

// Convenience: find_contrast then normalize_mode, with centre and azimuthal index.
[[nodiscard]] RadialMode make_mode(int dim, int m, int s0, double k, double r0, double sigma,
                                   const Vec3& center = Vec3::Zero(), int l = 0);

[[nodiscard]] cplx eval_v(const RadialMode& mode, const Vec3& p);
[[nodiscard]] cplx eval_w(const RadialMode& mode, const Vec3& p);
[[nodiscard]] CVec3 eval_grad_v(const RadialMode& mode, const Vec3& p);
[[nodiscard]] CVec3 eval_grad_w(const RadialMode& mode, const Vec3& p);

// Multi-ball eigenfunction, identically zero on the inclusion.
struct CompositeEigenfunction {
    std::vector<RadialMode> modes;
    std::optional<geometry::Shape> inclusion;

    void validate() const;
};

[[nodiscard]] cplx composite_eval(const CompositeEigenfunction& cf, const Vec3& p);
[[nodiscard]] CVec3 composite_grad(const CompositeEigenfunction& cf, const Vec3& p);

void write_mode_table(std::ostream& os, const std::vector<RadialMode>& modes);

namespace detail {

// Radial profiles relative to the boundary trace: J(k r)/J(k r0) etc.
struct RadialProfile {
    double value;  // R(r)/R(r0)
    double slope;  // d/dr of the above
};

[[nodiscard]] RadialProfile radial_v(const RadialMode& mode, double r);
[[nodiscard]] RadialProfile radial_w(const RadialMode& mode, double r);

}  // namespace detail

}  // namespace fc::teig
