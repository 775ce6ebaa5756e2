#include "fieldconc/teig.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "fieldconc/errors.hpp"
#include "fieldconc/specfun.hpp"

namespace fc::teig {

namespace {

using specfun::BesselOrder;
using specfun::detail::Scaled;

constexpr double kPi = std::numbers::pi;
constexpr int kScanPoints = 2048;

BesselOrder order_for(int dim, int m) { return dim == 3 ? BesselOrder::sph(m) : BesselOrder::cyl(m); }

void check_common(int dim, int m, double k, double r0)
{
    if (dim != 2 && dim != 3) throw DomainError("dimension must be 2 or 3");
    if (m < 0) throw DomainError("mode order must be non-negative");
    if (!(k > 0) || !(r0 > 0)) throw DomainError("k and r0 must be positive");
}

// f_m(n) / c with c = max(|R'(k r0)|, |R(k r0)|), so the scan never sees tiny magnitudes.
struct Determinant {
    BesselOrder order;
    double kr0;
    double sigma;
    double a;  // R'(k r0)/c
    double b;  // R(k r0)/c

    Determinant(int dim, int m, double k, double r0, double sigma_)
        : order(order_for(dim, m)), kr0(k * r0), sigma(sigma_)
    {
        Scaled da = specfun::detail::bessel_j_prime_scaled(order, kr0);
        Scaled db = specfun::detail::bessel_j_scaled(order, kr0);
        double ref = std::max(da.sign ? da.log_abs : -1e300, db.sign ? db.log_abs : -1e300);
        a = da.sign ? da.sign * std::exp(da.log_abs - ref) : 0.0;
        b = db.sign ? db.sign * std::exp(db.log_abs - ref) : 0.0;
    }

    [[nodiscard]] double operator()(double n) const
    {
        double x = kr0 * n;
        double j = specfun::detail::bessel_j_scaled(order, x).value_or_zero();
        double jp = specfun::detail::bessel_j_prime_scaled(order, x).value_or_zero();
        return a * j - sigma * n * b * jp;
    }

    // With sigma = 1 every k is a root at n = 1 (w = v); divide that root out before scanning.
    [[nodiscard]] double deflated(double n) const
    {
        if (sigma != 1.0) return (*this)(n);
        if (std::abs(n - 1.0) < 1e-8) {
            const double e = 1e-6;
            return 0.5 * ((*this)(1.0 + e) - (*this)(1.0 - e)) / e;
        }
        return (*this)(n) / (n - 1.0);
    }
};

double profile_ratio(BesselOrder o, double x, double xref) { return specfun::detail::bessel_j_ratio(o, x, xref); }
double profile_slope_ratio(BesselOrder o, double x, double xref)
{
    return specfun::detail::bessel_j_prime_ratio(o, x, xref);
}

// Integral over [a, b] mapped to [0, 1]; the library measures its error estimate in unit-interval terms,
// which never meets a relative tolerance on short intervals otherwise.
template <class F>
double unit_integral(F f, double a, double b, double& err)
{
    using boost::math::quadrature::gauss_kronrod;
    const double w = b - a;
    auto g = [&](double t) { return w * f(a + w * t); };
    return gauss_kronrod<double, 61>::integrate(g, 0.0, 1.0, 15, 1e-13, &err);
}

double radial_integral(const RadialMode& mode, double upper)
{
    BesselOrder o = order_for(mode.dim, mode.m);
    double kr0 = mode.k * mode.r0;
    int pw = mode.dim - 1;
    auto f = [&](double r) {
        double v = profile_ratio(o, mode.k * r, kr0);
        return v * v * std::pow(r, pw);
    };
    // the integrand grows like r^(2m + pw); geometric chunks keep each piece well resolved
    const double step = std::exp(-std::min(0.5, 8.0 / (2.0 * mode.m + pw + 1.0)));
    double val = 0.0, err = 0.0;
    double hi = upper;
    for (int j = 0; j < 400 && hi > 0.0; ++j) {
        double lo = (j == 399) ? 0.0 : hi * step;
        double e = 0.0;
        double piece = unit_integral(f, lo, hi, e);
        val += piece;
        err += e;
        hi = lo;
        if (std::abs(piece) < 1e-17 * std::abs(val)) {
            // what is left near the centre
            val += unit_integral(f, 0.0, hi, e);
            err += e;
            break;
        }
    }
    if (!std::isfinite(val) || err > 1e-9 * std::abs(val) + 1e-300)
        throw ConvergenceError("normalization quadrature did not converge");
    return val;
}

struct Local {
    double r;
    double x, y, z;
};

Local local_coords(const RadialMode& mode, const Vec3& p)
{
    Vec3 d = p - mode.center;
    if (mode.dim == 2) d.z() = 0.0;
    double r = d.norm();
    if (r > mode.r0 * (1.0 + 1e-12)) {
        throw DomainError("point at distance " + std::to_string(r) + " lies outside the ball of radius " +
                          std::to_string(mode.r0));
    }
    return {r, d.x(), d.y(), d.z()};
}

void require_normalized(const RadialMode& mode)
{
    if (!mode.normalized()) throw DomainError("mode must be normalized before evaluation");
}

cplx eval_profile(const RadialMode& mode, const Vec3& p, bool interior)
{
    require_normalized(mode);
    Local lc = local_coords(mode, p);
    detail::RadialProfile rp = interior ? detail::radial_w(mode, lc.r) : detail::radial_v(mode, lc.r);
    double amp = mode.trace * rp.value;
    if (amp == 0.0) return 0.0;
    if (mode.dim == 2) {
        double th = std::atan2(lc.y, lc.x);
        return std::polar(1.0, mode.m * th) * amp;
    }
    double theta = lc.r > 0 ? std::acos(std::clamp(lc.z / lc.r, -1.0, 1.0)) : 0.0;
    double phi = std::atan2(lc.y, lc.x);
    return amp * specfun::sph_harm(mode.m, mode.l, theta, phi);
}

CVec3 grad_profile(const RadialMode& mode, const Vec3& p, bool interior)
{
    require_normalized(mode);
    Local lc = local_coords(mode, p);
    const cplx I(0.0, 1.0);
    detail::RadialProfile rp = interior ? detail::radial_w(mode, lc.r) : detail::radial_v(mode, lc.r);
    CVec3 g = CVec3::Zero();
    if (lc.r < 1e-14 * mode.r0) {
        if (mode.m != 1) return g;
        double s = mode.trace * rp.slope;
        if (mode.dim == 2) {
            g << s, I * s, 0.0;
        } else if (mode.l == 0) {
            g << 0.0, 0.0, s * std::sqrt(3.0 / (4.0 * kPi));
        } else {
            double c = s * std::sqrt(3.0 / (8.0 * kPi));
            g << c, (mode.l > 0 ? 1.0 : -1.0) * I * c, 0.0;
        }
        return g;
    }
    if (mode.dim == 2) {
        double th = std::atan2(lc.y, lc.x);
        cplx e = std::polar(mode.trace, mode.m * th);
        cplx radial = e * rp.slope;
        cplx angular = e * (I * static_cast<double>(mode.m) / lc.r) * rp.value;
        double c = std::cos(th), s = std::sin(th);
        g << radial * c - angular * s, radial * s + angular * c, 0.0;
        return g;
    }
    double theta = std::acos(std::clamp(lc.z / lc.r, -1.0, 1.0));
    double phi = std::atan2(lc.y, lc.x);
    int al = std::abs(mode.l);
    double norm = std::sqrt((2.0 * mode.m + 1.0) / (4.0 * kPi));
    cplx e = std::polar(1.0, mode.l * phi);
    double q = specfun::assoc_legendre_normalized(mode.m, al, std::cos(theta));
    double qt = specfun::detail::legendre_normalized_dtheta(mode.m, al, theta);
    double qs = specfun::detail::legendre_normalized_over_sin(mode.m, al, theta);
    cplx y = norm * q * e;
    cplx y_theta = norm * qt * e;
    cplx y_phi = (mode.l >= 0 ? 1.0 : -1.0) * I * norm * qs * e;
    cplx cr = mode.trace * rp.slope * y;
    cplx ct = mode.trace * rp.value / lc.r * y_theta;
    cplx cp = mode.trace * rp.value / lc.r * y_phi;
    double st = std::sin(theta), ct_ = std::cos(theta), sp = std::sin(phi), cpv = std::cos(phi);
    g << cr * st * cpv + ct * ct_ * cpv - cp * sp, cr * st * sp + ct * ct_ * sp + cp * cpv, cr * ct_ - ct * st;
    return g;
}

}  // namespace

namespace detail {

RadialProfile radial_v(const RadialMode& mode, double r)
{
    BesselOrder o = order_for(mode.dim, mode.m);
    double kr0 = mode.k * mode.r0;
    return {profile_ratio(o, mode.k * r, kr0), mode.k * profile_slope_ratio(o, mode.k * r, kr0)};
}

RadialProfile radial_w(const RadialMode& mode, double r)
{
    BesselOrder o = order_for(mode.dim, mode.m);
    double kn = mode.k * mode.n;
    double ref = kn * mode.r0;
    return {profile_ratio(o, kn * r, ref), kn * profile_slope_ratio(o, kn * r, ref)};
}

}  // namespace detail

Bracket contrast_bracket(int dim, int m, int s0, double k, double r0)
{
    check_common(dim, m, k, r0);
    if (s0 < 1) throw DomainError("zero rank s0 must be >= 1");
    BesselOrder o = dim == 3 ? BesselOrder::cyl_half(m) : BesselOrder::cyl(m);
    double a = specfun::bessel_zero({o, s0, false});
    double b = specfun::bessel_zero({o, s0 + 1, false});
    return {a / (k * r0), b / (k * r0)};
}

double matching_determinant(int dim, int m, double k, double r0, double sigma, double n)
{
    check_common(dim, m, k, r0);
    if (!(sigma > 0) || !(n > 0)) throw DomainError("sigma and n must be positive");
    BesselOrder o = order_for(dim, m);
    double kr0 = k * r0;
    double x = kr0 * n;
    using specfun::detail::bessel_j_prime_scaled;
    using specfun::detail::bessel_j_scaled;
    double t1 = bessel_j_prime_scaled(o, kr0).value_or_zero() * bessel_j_scaled(o, x).value_or_zero();
    double t2 = sigma * n * bessel_j_scaled(o, kr0).value_or_zero() * bessel_j_prime_scaled(o, x).value_or_zero();
    return t1 - t2;
}

double relative_residual(const RadialMode& mode)
{
    Determinant det(mode.dim, mode.m, mode.k, mode.r0, mode.sigma);
    BesselOrder o = order_for(mode.dim, mode.m);
    double x = mode.k * mode.r0 * mode.n;
    double j = specfun::detail::bessel_j_scaled(o, x).value_or_zero();
    double jp = specfun::detail::bessel_j_prime_scaled(o, x).value_or_zero();
    double scale = std::abs(det.a * j) + std::abs(mode.sigma * mode.n * det.b * jp);
    return std::abs(det(mode.n)) / scale;
}

RadialMode find_contrast(int dim, int m, int s0, double k, double r0, double sigma)
{
    return find_contrast(dim, m, s0, k, r0, sigma, contrast_bracket(dim, m, s0, k, r0));
}

RadialMode find_contrast(int dim, int m, int s0, double k, double r0, double sigma, const Bracket& br)
{
    check_common(dim, m, k, r0);
    if (!(sigma > 0)) throw DomainError("sigma must be positive");
    if (s0 < 1) throw DomainError("zero rank s0 must be >= 1");
    Determinant det(dim, m, k, r0, sigma);
    double prev_n = br.lo;
    double prev_g = det.deflated(prev_n);
    for (int i = 1; i <= kScanPoints; ++i) {
        double cur_n = br.lo + (br.hi - br.lo) * i / kScanPoints;
        double cur_g = det.deflated(cur_n);
        if (cur_g == 0.0 || (prev_g > 0) != (cur_g > 0)) {
            double lo = prev_n, hi = cur_n;
            double glo = prev_g;
            if (cur_g == 0.0) lo = hi;
            for (int it = 0; it < 200 && hi - lo > 2e-16 * hi; ++it) {
                double mid = 0.5 * (lo + hi);
                double gm = det.deflated(mid);
                if (gm == 0.0) {
                    lo = hi = mid;
                    break;
                }
                if ((gm > 0) == (glo > 0)) {
                    lo = mid;
                    glo = gm;
                } else {
                    hi = mid;
                }
            }
            RadialMode mode;
            mode.dim = dim;
            mode.m = m;
            mode.s0 = s0;
            mode.k = k;
            mode.r0 = r0;
            mode.sigma = sigma;
            mode.n = std::abs(det.deflated(lo)) <= std::abs(det.deflated(hi)) ? lo : hi;
            mode.tau = sigma * mode.n * mode.n;
            if (!(mode.n > br.lo && mode.n < br.hi))
                throw ConvergenceError("root landed on the bracket boundary");
            return mode;
        }
        prev_n = cur_n;
        prev_g = cur_g;
    }
    if (sigma == 1.0 && br.lo < 1.0 && br.hi > 1.0) {
        // only the trivial root remains
        RadialMode mode;
        mode.dim = dim;
        mode.m = m;
        mode.s0 = s0;
        mode.k = k;
        mode.r0 = r0;
        mode.sigma = sigma;
        mode.n = 1.0;
        mode.tau = 1.0;
        return mode;
    }
    throw ConvergenceError("no sign change of the matching determinant in the bracket (m=" + std::to_string(m) +
                           ", s0=" + std::to_string(s0) + ")");
}

RadialMode normalize_mode(RadialMode mode)
{
    if (!mode.solved()) throw DomainError("normalize_mode requires a solved contrast");
    BesselOrder o = order_for(mode.dim, mode.m);
    double kr0 = mode.k * mode.r0;
    double knr0 = kr0 * mode.n;

    // degeneracy: J(k n r0) tiny compared with the profile maximum on [0, k n r0]
    Scaled jw = specfun::detail::bessel_j_scaled(o, knr0);
    if (jw.sign == 0) throw DegenerateModeError("interior trace vanishes at the root");
    double peak = 0.0;
    for (int i = 1; i <= 512; ++i) peak = std::max(peak, std::abs(profile_ratio(o, knr0 * i / 512.0, knr0)));
    if (peak > 1e8) {
        throw DegenerateModeError("J_m(k n r0) is below 1e-8 of its maximum; try another s0 (m=" +
                                  std::to_string(mode.m) + ")");
    }

    double angular = mode.dim == 2 ? 2.0 * kPi : 1.0;
    double integral = radial_integral(mode, mode.r0);
    Scaled jv = specfun::detail::bessel_j_scaled(o, kr0);
    if (jv.sign == 0) throw DegenerateModeError("exterior trace vanishes");
    double log_trace = -0.5 * std::log(angular * integral);
    mode.trace = jv.sign * std::exp(log_trace);
    double log_beta = log_trace - jv.log_abs;
    if (log_beta > 709.0) throw OutOfRangeError("beta overflows for m=" + std::to_string(mode.m));
    mode.beta = std::exp(log_beta);
    double log_alpha = log_trace - jw.log_abs;
    if (log_alpha > 709.0) throw OutOfRangeError("alpha overflows for m=" + std::to_string(mode.m));
    mode.alpha = jv.sign * jw.sign * std::exp(log_alpha);
    return mode;
}

RadialMode make_mode(int dim, int m, int s0, double k, double r0, double sigma, const Vec3& center, int l)
{
    if (dim == 3 && std::abs(l) > m) throw DomainError("|l| must not exceed m");
    if (dim == 2 && l != 0) throw DomainError("azimuthal index l is only used in 3D");
    RadialMode mode = find_contrast(dim, m, s0, k, r0, sigma);
    mode.center = center;
    mode.l = l;
    return normalize_mode(mode);
}

cplx eval_v(const RadialMode& mode, const Vec3& p) { return eval_profile(mode, p, false); }
cplx eval_w(const RadialMode& mode, const Vec3& p) { return eval_profile(mode, p, true); }
CVec3 eval_grad_v(const RadialMode& mode, const Vec3& p) { return grad_profile(mode, p, false); }
CVec3 eval_grad_w(const RadialMode& mode, const Vec3& p) { return grad_profile(mode, p, true); }

void CompositeEigenfunction::validate() const
{
    for (size_t i = 0; i < modes.size(); ++i) {
        const RadialMode& a = modes[i];
        if (!a.normalized()) throw DomainError("composite members must be normalized modes");
        for (size_t j = i + 1; j < modes.size(); ++j) {
            const RadialMode& b = modes[j];
            if ((a.center - b.center).norm() <= a.r0 + b.r0)
                throw GeometryError("generator balls " + std::to_string(i) + " and " + std::to_string(j) + " overlap");
        }
        if (inclusion) {
            if (a.dim != 2) throw GeometryError("inclusions are planar; composite members must be 2D");
            geometry::Vec2 c(a.center.x(), a.center.y());
            if (geometry::contains(*inclusion, c)) throw GeometryError("generator centre lies inside the inclusion");
            for (const auto& bp : geometry::boundary_samples(*inclusion, 4096)) {
                if ((bp.point - c).norm() <= a.r0)
                    throw GeometryError("generator ball " + std::to_string(i) + " touches the inclusion");
            }
        }
    }
}

cplx composite_eval(const CompositeEigenfunction& cf, const Vec3& p)
{
    for (const RadialMode& mode : cf.modes) {
        Vec3 d = p - mode.center;
        if (mode.dim == 2) d.z() = 0.0;
        if (d.norm() <= mode.r0 * (1.0 + 1e-12)) return eval_v(mode, p);
    }
    return 0.0;
}

CVec3 composite_grad(const CompositeEigenfunction& cf, const Vec3& p)
{
    for (const RadialMode& mode : cf.modes) {
        Vec3 d = p - mode.center;
        if (mode.dim == 2) d.z() = 0.0;
        if (d.norm() <= mode.r0 * (1.0 + 1e-12)) return eval_grad_v(mode, p);
    }
    return CVec3::Zero();
}

void write_mode_table(std::ostream& os, const std::vector<RadialMode>& modes)
{
    os << "dim,m,l,s0,k,r0,sigma,n,tau,alpha,beta\n";
    os.precision(17);
    for (const RadialMode& md : modes) {
        os << md.dim << ',' << md.m << ',' << md.l << ',' << md.s0 << ',' << md.k << ',' << md.r0 << ','
           << md.sigma << ',' << md.n << ',' << md.tau << ',' << md.alpha << ',' << md.beta << '\n';
    }
}

}  // namespace fc::teig
