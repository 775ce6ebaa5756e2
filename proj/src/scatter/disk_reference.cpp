#include <algorithm>
#include <cmath>
#include <numbers>

#include "fieldconc/errors.hpp"
#include "fieldconc/scatter.hpp"
#include "fieldconc/specfun.hpp"

namespace fc::scatter {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx I(0.0, 1.0);

// J_0..J_{count-1} and derivatives at complex argument.
void j_with_prime(int count, cplx z, std::vector<cplx>& j, std::vector<cplx>& dj)
{
    j = specfun::detail::bessel_j_sequence(count + 1, z);
    dj.assign(count, 0.0);
    if (std::abs(z) == 0.0) {
        if (count > 1) dj[1] = 0.5;
    } else {
        for (int m = 0; m < count; ++m) dj[m] = (m == 0) ? -j[1] : j[m - 1] - (static_cast<double>(m) / z) * j[m];
    }
    j.resize(count);
}

// H^(1)_0..H^(1)_{count-1} and derivatives at x > 0.
void h_with_prime(int count, double x, std::vector<cplx>& h, std::vector<cplx>& dh)
{
    std::vector<double> j = specfun::detail::bessel_j_sequence(count + 1, x);
    std::vector<double> y = specfun::detail::bessel_y_sequence(count + 1, x);
    h.resize(count + 1);
    for (int m = 0; m <= count; ++m) h[m] = cplx(j[m], y[m]);
    dh.assign(count, 0.0);
    for (int m = 0; m < count; ++m) dh[m] = (m == 0) ? -h[1] : h[m - 1] - (m / x) * h[m];
    h.resize(count);
}

}  // namespace

double DiskReference::sigma_at(double r) const
{
    if (scene_.smoothing_width <= 0) return r < radius_ ? 1.0 : 0.0;
    return smooth_fraction(r - radius_, scene_.smoothing_width);
}

cplx DiskReference::sigma_c(double r) const { return 1.0 + (scene_.sigma_in - 1.0) * sigma_at(r); }
cplx DiskReference::tau_c(double r) const { return 1.0 + (scene_.tau_in - 1.0) * sigma_at(r); }

DiskReference::DiskReference(const MediumScene& scene, const Vec2& direction) : scene_(scene)
{
    scene.validate();
    const auto* disk = std::get_if<geometry::Disk>(&scene.inclusion);
    if (!disk) throw GeometryError("series reference needs a disk inclusion");
    center_ = disk->center;
    radius_ = disk->radius;
    if (!(direction.norm() > 0)) throw DomainError("incident direction must be nonzero");
    direction_ = direction.normalized();
    const double k = scene.k;
    const double w = scene.smoothing_width;
    if (w >= radius_) throw GeometryError("smoothing width must be below the disk radius");
    kn_ = k * scene.contrast();

    const double r_in = radius_ - w, r_out = radius_ + w;
    double size = std::max(std::abs(kn_), k) * r_out;
    order_ = static_cast<int>(std::ceil(size + 4.0 * std::cbrt(size) + 12.0));
    const int count = order_ + 1;

    std::vector<cplx> ji, dji, hb, dhb;
    j_with_prime(count, kn_ * r_in, ji, dji);
    h_with_prime(count, k * r_out, hb, dhb);
    std::vector<double> jb = specfun::detail::bessel_j_sequence(count + 1, k * r_out);

    // radial problem (r sigma u')' = (sigma m^2 / r - k^2 tau r) u across the transition band
    const int steps = (w > 0) ? 800 : 0;
    const double dr = (w > 0) ? 2.0 * w / steps : 0.0;
    tables_.resize(count);
    std::vector<cplx> alpha(count), beta(count);
    for (int m = 0; m < count; ++m) {
        cplx u = ji[m];
        cplx p = r_in * scene.sigma_in * kn_ * dji[m];
        RadialTable& tab = tables_[m];
        tab.r_start = r_in;
        tab.dr = dr;
        auto rhs = [&](double r, cplx uu, cplx pp, cplx& du, cplx& dp) {
            cplx s = sigma_c(r);
            du = pp / (s * r);
            dp = (s * static_cast<double>(m * m) / r - k * k * tau_c(r) * r) * uu;
        };
        tab.u.push_back(u);
        tab.du.push_back(p / (r_in * scene.sigma_in));
        for (int n = 0; n < steps; ++n) {
            double r = r_in + n * dr;
            cplx k1u, k1p, k2u, k2p, k3u, k3p, k4u, k4p;
            rhs(r, u, p, k1u, k1p);
            rhs(r + 0.5 * dr, u + 0.5 * dr * k1u, p + 0.5 * dr * k1p, k2u, k2p);
            rhs(r + 0.5 * dr, u + 0.5 * dr * k2u, p + 0.5 * dr * k2p, k3u, k3p);
            rhs(r + dr, u + dr * k3u, p + dr * k3p, k4u, k4p);
            u += dr / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
            p += dr / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
            double rn = r + dr;
            tab.u.push_back(u);
            tab.du.push_back(p / (rn * sigma_c(rn)));
        }
        // exterior: u = alpha J + beta H with unit outer coefficient sigma
        cplx du_out = p / r_out;
        double djb = (m == 0) ? -jb[1] : jb[m - 1] - (m / (k * r_out)) * jb[m];
        cplx det = 2.0 * I / (kPi * r_out);
        alpha[m] = (u * k * dhb[m] - du_out * hb[m]) / det;
        beta[m] = (jb[m] * du_out - k * djb * u) / det;
        if (std::abs(alpha[m]) == 0.0) throw DegenerateModeError("interior mode decouples from the incident wave");
    }

    const double phi = std::atan2(direction_.y(), direction_.x());
    const cplx shift = std::polar(1.0, k * direction_.dot(center_));
    a_.resize(2 * order_ + 1);
    b_.resize(2 * order_ + 1);
    c_.resize(2 * order_ + 1);
    for (int m = -order_; m <= order_; ++m) {
        int am = std::abs(m);
        cplx a = shift * std::pow(I, am) * std::polar(1.0, -m * phi);
        a_[m + order_] = a;
        cplx scale = a / alpha[am];
        c_[m + order_] = scale;
        b_[m + order_] = scale * beta[am];
    }
}

void DiskReference::modal_inside(int m, double r, cplx& u, cplx& du) const
{
    const RadialTable& tab = tables_[m];
    if (tab.u.size() < 2) {
        u = tab.u.front();
        du = tab.du.front();
        return;
    }
    double s = (r - tab.r_start) / tab.dr;
    int n = std::clamp(static_cast<int>(std::floor(s)), 0, static_cast<int>(tab.u.size()) - 2);
    double t = s - n;
    u = (1.0 - t) * tab.u[n] + t * tab.u[n + 1];
    du = (1.0 - t) * tab.du[n] + t * tab.du[n + 1];
}

void DiskReference::modal(double r, std::vector<cplx>& um, std::vector<cplx>& dum) const
{
    if (r < 0) throw DomainError("radius must be non-negative");
    const int count = order_ + 1;
    const double w = scene_.smoothing_width;
    const double k = scene_.k;
    std::vector<cplx> R(count), dR(count), Q(count, 0.0), dQ(count, 0.0);
    if (r <= radius_ - w) {
        j_with_prime(count, kn_ * r, R, dR);
        for (auto& d : dR) d *= kn_;
    } else if (r < radius_ + w) {
        for (int m = 0; m < count; ++m) modal_inside(m, r, R[m], dR[m]);
    } else {
        std::vector<double> j = specfun::detail::bessel_j_sequence(count + 1, k * r);
        std::vector<cplx> h, dh;
        h_with_prime(count, k * r, h, dh);
        for (int m = 0; m < count; ++m) {
            R[m] = j[m];
            dR[m] = k * ((m == 0) ? -j[1] : j[m - 1] - (m / (k * r)) * j[m]);
            Q[m] = h[m];
            dQ[m] = k * dh[m];
        }
    }
    um.assign(2 * order_ + 1, 0.0);
    dum.assign(2 * order_ + 1, 0.0);
    const bool outside = r >= radius_ + w;
    for (int m = -order_; m <= order_; ++m) {
        int am = std::abs(m), idx = m + order_;
        if (outside) {
            um[idx] = a_[idx] * R[am] + b_[idx] * Q[am];
            dum[idx] = a_[idx] * dR[am] + b_[idx] * dQ[am];
        } else {
            um[idx] = c_[idx] * R[am];
            dum[idx] = c_[idx] * dR[am];
        }
    }
}

cplx DiskReference::scattered(const Vec2& x) const
{
    Vec2 d = x - center_;
    double r = d.norm();
    cplx inc = std::polar(1.0, scene_.k * direction_.dot(x));
    if (r < radius_ + scene_.smoothing_width) return total(x) - inc;
    std::vector<cplx> h, dh;
    h_with_prime(order_ + 1, scene_.k * r, h, dh);
    double th = std::atan2(d.y(), d.x());
    cplx s = 0.0;
    for (int m = -order_; m <= order_; ++m) s += b_[m + order_] * h[std::abs(m)] * std::polar(1.0, m * th);
    return s;
}

cplx DiskReference::total(const Vec2& x) const
{
    Vec2 d = x - center_;
    double r = d.norm();
    if (r >= radius_ + scene_.smoothing_width) return std::polar(1.0, scene_.k * direction_.dot(x)) + scattered(x);
    std::vector<cplx> um, dum;
    modal(r, um, dum);
    double th = std::atan2(d.y(), d.x());
    cplx s = 0.0;
    for (int m = -order_; m <= order_; ++m) s += um[m + order_] * std::polar(1.0, m * th);
    return s;
}

CVec2 DiskReference::total_grad(const Vec2& x) const
{
    Vec2 d = x - center_;
    double r = d.norm();
    if (r < 1e-9) {
        // only |m| = 1 contributes at the centre
        std::vector<cplx> um, dum;
        modal(1e-9, um, dum);
        cplx dp = dum[order_ + 1], dm = dum[order_ - 1];
        return CVec2(dp + dm, I * (dp - dm));
    }
    std::vector<cplx> um, dum;
    modal(r, um, dum);
    double th = std::atan2(d.y(), d.x());
    cplx ur = 0.0, ut = 0.0;
    for (int m = -order_; m <= order_; ++m) {
        cplx e = std::polar(1.0, m * th);
        ur += dum[m + order_] * e;
        ut += I * static_cast<double>(m) * um[m + order_] * e;
    }
    double c = std::cos(th), s = std::sin(th);
    return CVec2(c * ur - s * ut / r, s * ur + c * ut / r);
}

double DiskReference::net_flux(double rho) const
{
    if (!(rho > 0)) throw DomainError("flux radius must be positive");
    std::vector<cplx> um, dum;
    modal(rho, um, dum);
    double s = 0.0;
    for (size_t i = 0; i < um.size(); ++i) s += std::imag(std::conj(um[i]) * dum[i]);
    double sig = std::real(sigma_c(rho));
    return 2.0 * kPi * rho * sig * s;
}

}  // namespace fc::scatter
