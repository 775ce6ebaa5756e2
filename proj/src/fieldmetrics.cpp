#include "fieldconc/fieldmetrics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "fieldconc/errors.hpp"
#include "fieldconc/specfun.hpp"

namespace fc::fieldmetrics {

namespace {

using specfun::BesselOrder;
using specfun::detail::Scaled;
using teig::RadialMode;

constexpr double kPi = std::numbers::pi;

BesselOrder order_of(const RadialMode& mode, int m)
{
    return mode.dim == 3 ? BesselOrder::sph(m) : BesselOrder::cyl(m);
}

double wavenumber(const RadialMode& mode, Which which) { return which == Which::v ? mode.k : mode.k * mode.n; }

// exp(a - b) with signs, for cross-order ratios.
double ratio(Scaled a, Scaled b)
{
    if (a.sign == 0) return 0.0;
    double d = a.log_abs - b.log_abs;
    if (d < -745.0) return 0.0;
    return a.sign * b.sign * std::exp(d);
}

template <class F>
double integrate(F f, double a, double b)
{
    using boost::math::quadrature::gauss_kronrod;
    if (b <= a) return 0.0;
    double err = 0.0;
    // mapped to [0, 1]: the library compares its error estimate in unit-interval terms
    const double w = b - a;
    auto g = [&](double t) { return w * f(a + w * t); };
    double v = gauss_kronrod<double, 61>::integrate(g, 0.0, 1.0, 20, 1e-13, &err);
    if (!std::isfinite(v)) throw ConvergenceError("radial quadrature produced a non-finite value");
    return v;
}

void require(const RadialMode& mode)
{
    if (!mode.solved()) throw DomainError("metric requires a solved mode");
}

// int_0^rho R(r)^2 r^{d-1} dr with R normalized to 1 at r0
double norm_sq(const RadialMode& mode, double rho, Which which)
{
    double kap = wavenumber(mode, which);
    BesselOrder o = order_of(mode, mode.m);
    double ref = kap * mode.r0;
    int pw = mode.dim - 1;
    return integrate(
        [&](double r) {
            double v = specfun::detail::bessel_j_ratio(o, kap * r, ref);
            return v * v * std::pow(r, pw);
        },
        0.0, rho);
}

}  // namespace

void ShrunkRegion::validate() const
{
    if (!(xi > 0.0 && xi < 1.0)) throw DomainError("shrink fraction xi must lie in (0,1)");
    if (kind == RegionKind::boundary_sector && !(angle1 > angle0)) throw DomainError("empty angular window");
}

double grad_norm_sq(const RadialMode& mode, double rho, Which which)
{
    require(mode);
    double kap = wavenumber(mode, which);
    double ref = kap * mode.r0;
    double y = kap * rho;
    const int m = mode.m;
    if (mode.dim == 3) return grad_norm_sq_direct(mode, rho, which);
    Scaled den = specfun::detail::bessel_j_scaled(BesselOrder::cyl(m), ref);
    BesselOrder lower = BesselOrder::cyl(m == 0 ? 1 : m - 1);  // J_{-1}^2 = J_1^2
    double integral = integrate(
        [&](double t) {
            double v = ratio(specfun::detail::bessel_j_scaled(lower, t), den);
            return v * v * t;
        },
        0.0, y);
    double edge = ratio(specfun::detail::bessel_j_scaled(BesselOrder::cyl(m), y), den);
    return integral - m * edge * edge;
}

double grad_norm_sq_direct(const RadialMode& mode, double rho, Which which)
{
    require(mode);
    double kap = wavenumber(mode, which);
    double ref = kap * mode.r0;
    double y = kap * rho;
    const double m = mode.m;
    BesselOrder o = order_of(mode, mode.m);
    Scaled den = specfun::detail::bessel_j_scaled(o, ref);
    if (mode.dim == 2) {
        return integrate(
            [&](double t) {
                double jp = ratio(specfun::detail::bessel_j_prime_scaled(o, t), den);
                double j = ratio(specfun::detail::bessel_j_scaled(o, t), den);
                return jp * jp * t + (t > 0 ? m * m / t * j * j : 0.0);
            },
            0.0, y);
    }
    return integrate(
        [&](double t) {
            double jp = ratio(specfun::detail::bessel_j_prime_scaled(o, t), den);
            double j = ratio(specfun::detail::bessel_j_scaled(o, t), den);
            return jp * jp * t * t + m * (m + 1) * j * j;
        },
        0.0, y);
}

double bessel_identity_lhs(int m, double y)
{
    if (m < 1) throw DomainError("identity is stated for m >= 1");
    BesselOrder o = BesselOrder::cyl(m);
    return integrate(
        [&](double x) {
            if (x == 0.0) return 0.0;
            double jp = specfun::detail::bessel_j_prime_scaled(o, x).value_or_zero();
            double j = specfun::detail::bessel_j_scaled(o, x).value_or_zero();
            return jp * jp * x + double(m) * m / x * j * j;
        },
        0.0, y);
}

double bessel_identity_rhs(int m, double y)
{
    if (m < 1) throw DomainError("identity is stated for m >= 1");
    BesselOrder lower = BesselOrder::cyl(m - 1);
    double integral = integrate(
        [&](double x) {
            double j = specfun::detail::bessel_j_scaled(lower, x).value_or_zero();
            return j * j * x;
        },
        0.0, y);
    double jm = specfun::detail::bessel_j_scaled(BesselOrder::cyl(m), y).value_or_zero();
    return integral - m * jm * jm;
}

double norm_ratio(const RadialMode& mode, const ShrunkRegion& region, Which which)
{
    require(mode);
    region.validate();
    if (region.kind != RegionKind::interior_ball) throw DomainError("norm_ratio expects an interior ball region");
    double inner = norm_sq(mode, region.xi * mode.r0, which);
    double full = norm_sq(mode, mode.r0, which);
    return std::clamp(std::sqrt(inner / full), 0.0, 1.0);
}

double grad_norm_ratio(const RadialMode& mode, const ShrunkRegion& region, Which which)
{
    require(mode);
    region.validate();
    if (region.kind != RegionKind::interior_ball) throw DomainError("grad_norm_ratio expects an interior ball region");
    double inner = std::max(0.0, grad_norm_sq(mode, region.xi * mode.r0, which));
    double full = grad_norm_sq(mode, mode.r0, which);
    return std::clamp(std::sqrt(inner / full), 0.0, 1.0);
}

SupSample sup_grad_sector(const RadialMode& mode, const ShrunkRegion& region, Which which, bool divide_by_k)
{
    require(mode);
    region.validate();
    if (region.kind != RegionKind::boundary_sector) throw DomainError("sup_grad_sector expects a boundary sector");
    const int nr = std::max(40, 8 * mode.m);
    const int na = std::max(720, 16 * mode.m);
    SupSample best;
    const double r_in = region.xi * mode.r0;
    std::vector<double> radii(nr);
    for (int i = 0; i < nr; ++i) radii[i] = r_in + (mode.r0 - r_in) * (i + 1) / nr;

    if (mode.dim == 2) {
        for (double r : radii) {
            for (int j = 0; j < na; ++j) {
                double th = region.angle0 + (region.angle1 - region.angle0) * j / (na - 1);
                teig::Vec3 p = mode.center + teig::Vec3(r * std::cos(th), r * std::sin(th), 0.0);
                teig::CVec3 g = which == Which::v ? teig::eval_grad_v(mode, p) : teig::eval_grad_w(mode, p);
                double val = g.norm();
                if (val > best.value) best = {val, r, th};
            }
        }
    } else {
        // |grad| separates into radial and colatitude factors; the phi window does not change it.
        int al = std::abs(mode.l);
        double cn = std::sqrt((2.0 * mode.m + 1.0) / (4.0 * kPi));
        std::vector<double> yv(na), ya(na), theta(na);
        for (int j = 0; j < na; ++j) {
            double th = kPi * j / (na - 1);
            theta[j] = th;
            double q = specfun::assoc_legendre_normalized(mode.m, al, std::cos(th));
            double qt = specfun::detail::legendre_normalized_dtheta(mode.m, al, th);
            double qs = specfun::detail::legendre_normalized_over_sin(mode.m, al, th);
            yv[j] = cn * cn * q * q;
            ya[j] = cn * cn * (qt * qt + qs * qs);
        }
        for (double r : radii) {
            teig::detail::RadialProfile rp = which == Which::v ? teig::detail::radial_v(mode, r)
                                                               : teig::detail::radial_w(mode, r);
            double a = mode.trace * rp.slope;
            double b = mode.trace * rp.value / r;
            for (int j = 0; j < na; ++j) {
                double val = std::sqrt(a * a * yv[j] + b * b * ya[j]);
                if (val > best.value) best = {val, r, theta[j]};
            }
        }
    }
    if (divide_by_k) best.value /= mode.k;
    return best;
}

ScalingFit fit_scaling(const std::vector<std::pair<double, double>>& samples)
{
    if (samples.size() < 4) throw DomainError("scaling fit needs at least four samples");
    const double n = static_cast<double>(samples.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    ScalingFit fit;
    for (auto [m, v] : samples) {
        if (!(m > 0) || !(v > 0)) throw DomainError("scaling fit needs positive orders and values");
        double x = std::log(m), y = std::log(v);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        fit.mrange.push_back(m);
    }
    double den = n * sxx - sx * sx;
    if (den <= 0) throw DomainError("scaling fit needs at least two distinct orders");
    fit.exponent = (n * sxy - sx * sy) / den;
    fit.intercept = (sy - fit.exponent * sx) / n;
    for (auto [m, v] : samples) {
        double e = std::log(v) - (fit.intercept + fit.exponent * std::log(m));
        fit.residual += e * e;
    }
    return fit;
}

AngularSups angular_gradient_sups(int m, int l, int samples)
{
    AngularSups s;
    int al = std::abs(l);
    for (int j = 0; j < samples; ++j) {
        double th = kPi * j / (samples - 1);
        s.value = std::max(s.value, std::abs(specfun::assoc_legendre_normalized(m, al, std::cos(th))));
        s.dtheta = std::max(s.dtheta, std::abs(specfun::detail::legendre_normalized_dtheta(m, al, th)));
        s.azimuthal = std::max(s.azimuthal, std::abs(specfun::detail::legendre_normalized_over_sin(m, al, th)));
    }
    return s;
}

LegendreMax legendre_max(int m, int l, int samples)
{
    LegendreMax best;
    for (int i = 0; i < samples; ++i) {
        double x = -1.0 + 2.0 * i / (samples - 1);
        double v = std::abs(specfun::assoc_legendre_normalized(m, l, x));
        if (v > best.value || (v == best.value && std::abs(x) < best.x0)) best = {v, std::abs(x)};
    }
    return best;
}

double interior_peak_radius(const RadialMode& mode)
{
    require(mode);
    double z = specfun::bessel_zero({order_of(mode, mode.m), 1, true});
    return z / (mode.k * mode.n);
}

MetricsRow metrics_row(const RadialMode& mode, double xi)
{
    MetricsRow row;
    row.m = mode.m;
    row.xi = xi;
    ShrunkRegion ball = ShrunkRegion::ball(xi);
    ShrunkRegion shell = ShrunkRegion::sector(xi);
    row.ratio_v = norm_ratio(mode, ball, Which::v);
    row.ratio_w = norm_ratio(mode, ball, Which::w);
    row.grad_ratio_v = grad_norm_ratio(mode, ball, Which::v);
    row.grad_ratio_w = grad_norm_ratio(mode, ball, Which::w);
    row.sup_grad_v_over_k = sup_grad_sector(mode, shell, Which::v).value;
    row.sup_grad_w_over_k = sup_grad_sector(mode, shell, Which::w).value;
    return row;
}

void write_metrics_csv(std::ostream& os, const std::vector<MetricsRow>& rows)
{
    os << "m,xi,ratio_v,ratio_w,grad_ratio_v,grad_ratio_w,sup_grad_v_over_k,sup_grad_w_over_k\n";
    os.precision(12);
    for (const MetricsRow& r : rows) {
        os << r.m << ',' << r.xi << ',' << r.ratio_v << ',' << r.ratio_w << ',' << r.grad_ratio_v << ','
           << r.grad_ratio_w << ',' << r.sup_grad_v_over_k << ',' << r.sup_grad_w_over_k << '\n';
    }
}

}  // namespace fc::fieldmetrics
