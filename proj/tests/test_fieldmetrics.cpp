#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>

#include "fieldconc/errors.hpp"
#include "fieldconc/fieldmetrics.hpp"

using namespace fc;
using fieldmetrics::ShrunkRegion;
using fieldmetrics::Which;

namespace {

template <class F>
double unit_gk(F f, double a, double b)
{
    double w = b - a;
    auto g = [&](double t) { return w * f(a + w * t); };
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, 0.0, 1.0, 20, 1e-14);
}

// L2 ratio of J_m(q r) over [0, xi r0] vs [0, r0], split at many points so each piece is smooth.
double ratio_oracle(int m, double q, double r0, double xi)
{
    auto piece = [&](double a, double b) {
        double s = 0.0;
        const int parts = 64;
        for (int i = 0; i < parts; ++i) {
            double lo = a + (b - a) * i / parts, hi = a + (b - a) * (i + 1) / parts;
            s += unit_gk([&](double r) { return std::pow(boost::math::cyl_bessel_j(m, q * r), 2) * r; }, lo, hi);
        }
        return s;
    };
    double inner = piece(0.0, xi * r0);
    return std::sqrt(inner / (inner + piece(xi * r0, r0)));
}

teig::RadialMode mode2(int m) { return teig::make_mode(2, m, 1, 3.0, 1.0, 1.0 / 3.0); }

}  // namespace

TEST_CASE("fit_scaling on exact inputs")
{
    std::vector<std::pair<double, double>> cube, flat;
    for (double m : {2.0, 5.0, 9.0, 17.0, 40.0}) {
        cube.emplace_back(m, m * m * m);
        flat.emplace_back(m, 7.5);
    }
    auto f = fieldmetrics::fit_scaling(cube);
    CHECK(std::abs(f.exponent - 3.0) < 1e-12);
    CHECK(f.residual < 1e-20);
    CHECK(f.mrange.size() == 5);
    CHECK(std::abs(fieldmetrics::fit_scaling(flat).exponent) < 1e-12);

    CHECK_THROWS_AS((void)fieldmetrics::fit_scaling({{1, 1}, {2, 2}, {3, 3}}), DomainError);
    CHECK_THROWS_AS((void)fieldmetrics::fit_scaling({{1, 1}, {2, 0}, {3, 3}, {4, 4}}), DomainError);
    CHECK_THROWS_AS((void)fieldmetrics::fit_scaling({{1, 1}, {2, -2}, {3, 3}, {4, 4}}), DomainError);
}

TEST_CASE("region validation")
{
    auto md = mode2(3);
    CHECK_THROWS_AS((void)fieldmetrics::norm_ratio(md, ShrunkRegion::ball(0.0), Which::v), DomainError);
    CHECK_THROWS_AS((void)fieldmetrics::norm_ratio(md, ShrunkRegion::ball(1.0), Which::v), DomainError);
    CHECK_THROWS_AS((void)fieldmetrics::norm_ratio(md, ShrunkRegion::sector(0.5), Which::v), DomainError);
    CHECK_THROWS_AS((void)fieldmetrics::sup_grad_sector(md, ShrunkRegion::ball(0.5), Which::v), DomainError);
}

TEST_CASE("ratios lie in [0, 1] and do not increase as the region shrinks")
{
    for (int m : {0, 5, 20}) {
        auto md = mode2(m);
        for (Which w : {Which::v, Which::w}) {
            double prev_n = 2.0, prev_g = 2.0;
            for (double xi : {0.95, 0.8, 0.6, 0.4, 0.2}) {
                double rn = fieldmetrics::norm_ratio(md, ShrunkRegion::ball(xi), w);
                double rg = fieldmetrics::grad_norm_ratio(md, ShrunkRegion::ball(xi), w);
                CHECK(rn >= 0.0);
                CHECK(rn <= 1.0);
                CHECK(rg >= 0.0);
                CHECK(rg <= 1.0);
                CHECK(rn <= prev_n);
                CHECK(rg <= prev_g);
                prev_n = rn;
                prev_g = rg;
            }
        }
    }
}

TEST_CASE("nearly full region keeps nearly all of the norm")
{
    auto md = teig::make_mode(2, 0, 1, 1.0, 1.0, 0.25);
    CHECK(fieldmetrics::norm_ratio(md, ShrunkRegion::ball(0.999), Which::v) >= 0.99);
    CHECK(fieldmetrics::grad_norm_ratio(md, ShrunkRegion::ball(0.999), Which::v) >= 0.9);
}

TEST_CASE("norm ratios against independent quadrature")
{
    for (int m : {4, 15, 40}) {
        auto md = mode2(m);
        double v = fieldmetrics::norm_ratio(md, ShrunkRegion::ball(0.5), Which::v);
        double w = fieldmetrics::norm_ratio(md, ShrunkRegion::ball(0.5), Which::w);
        CHECK(v == doctest::Approx(ratio_oracle(m, md.k, md.r0, 0.5)).epsilon(1e-6));
        CHECK(w == doctest::Approx(ratio_oracle(m, md.k * md.n, md.r0, 0.5)).epsilon(1e-6));
        if (m == 40) CHECK(w < 1e-3);
    }
}

TEST_CASE("gradient norm identity path agrees with direct quadrature")
{
    for (int dim : {2, 3}) {
        for (int m : {1, 6, 25}) {
            auto md = teig::make_mode(dim, m, 1, 3.0, 1.0, 1.0 / 3.0, teig::Vec3::Zero(), dim == 3 ? m / 2 : 0);
            for (Which w : {Which::v, Which::w}) {
                for (double rho : {0.3, 0.7, 1.0}) {
                    double a = fieldmetrics::grad_norm_sq(md, rho, w);
                    double b = fieldmetrics::grad_norm_sq_direct(md, rho, w);
                    CHECK(std::abs(a - b) <= 1e-7 * std::abs(b) + 1e-300);
                }
            }
        }
    }
    for (int m = 1; m <= 30; m += 7) {
        for (double y : {0.5 * m, 1.0 * m, 2.0 * m}) {
            double l = fieldmetrics::bessel_identity_lhs(m, y);
            CHECK(std::abs(l - fieldmetrics::bessel_identity_rhs(m, y)) <= 1e-9 * std::abs(l));
        }
    }
}

TEST_CASE("gradient ratio decays geometrically in m")
{
    // squared ratio ~ xi^(2m): slope of its log against m close to 2 ln xi
    const double xi = 0.5;
    std::vector<double> ms, logs;
    for (int m = 10; m <= 40; m += 5) {
        double r = fieldmetrics::grad_norm_ratio(mode2(m), ShrunkRegion::ball(xi), Which::v);
        ms.push_back(m);
        logs.push_back(2.0 * std::log(r));
    }
    double mx = 0, my = 0;
    for (size_t i = 0; i < ms.size(); ++i) {
        mx += ms[i];
        my += logs[i];
    }
    mx /= ms.size();
    my /= ms.size();
    double sxy = 0, sxx = 0;
    for (size_t i = 0; i < ms.size(); ++i) {
        sxy += (ms[i] - mx) * (logs[i] - my);
        sxx += (ms[i] - mx) * (ms[i] - mx);
    }
    double slope = sxy / sxx;
    CHECK(std::abs(slope / (2.0 * std::log(xi)) - 1.0) <= 0.15);
}

TEST_CASE("where the boundary-shell gradient peaks")
{
    for (int m : {20, 40}) {
        auto md = mode2(m);
        auto sv = fieldmetrics::sup_grad_sector(md, ShrunkRegion::sector(0.5), Which::v);
        CHECK(sv.r == doctest::Approx(md.r0));
        CHECK(sv.value > 0.0);

        auto sw = fieldmetrics::sup_grad_sector(md, ShrunkRegion::sector(0.5), Which::w, false);
        double rm = fieldmetrics::interior_peak_radius(md);
        CHECK(rm < md.r0);
        CHECK(std::abs(sw.r - rm) <= 0.05 * md.r0);

        auto raw = fieldmetrics::sup_grad_sector(md, ShrunkRegion::sector(0.5), Which::v, false);
        CHECK(raw.value == doctest::Approx(sv.value * md.k));
    }
    // r_m approaches r0 with growing m
    CHECK(fieldmetrics::interior_peak_radius(mode2(40)) > fieldmetrics::interior_peak_radius(mode2(10)));
}

TEST_CASE("sector sup agrees with pointwise gradients")
{
    auto md = mode2(12);
    auto s = fieldmetrics::sup_grad_sector(md, ShrunkRegion::sector(0.5, 0.2, 1.0), Which::v, false);
    CHECK(s.angle >= 0.2);
    CHECK(s.angle <= 1.0);
    teig::Vec3 p(s.r * std::cos(s.angle), s.r * std::sin(s.angle), 0.0);
    CHECK(teig::eval_grad_v(md, p).norm() == doctest::Approx(s.value).epsilon(1e-12));
}

TEST_CASE("3D colatitude gradient is controlled by the azimuthal one")
{
    double worst = 0.0;
    for (int m = 1; m <= 40; ++m) {
        for (int l = 1; l <= m; ++l) {
            auto s = fieldmetrics::angular_gradient_sups(m, l, 2048);
            CHECK(s.value > 0.0);
            worst = std::max(worst, s.dtheta / s.azimuthal);
        }
    }
    CHECK(worst <= 10.0);
}

TEST_CASE("legendre_max locates the peak")
{
    auto lm = fieldmetrics::legendre_max(10, 0, 20001);
    CHECK(lm.value == doctest::Approx(1.0));
    CHECK(lm.x0 == doctest::Approx(1.0));
    auto l1 = fieldmetrics::legendre_max(30, 30, 20001);
    CHECK(l1.x0 == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("metrics CSV")
{
    std::ostringstream os;
    fieldmetrics::write_metrics_csv(os, {fieldmetrics::metrics_row(mode2(6), 0.5)});
    std::string s = os.str();
    CHECK(s.rfind("m,xi,ratio_v,ratio_w,grad_ratio_v,grad_ratio_w,sup_grad_v_over_k,sup_grad_w_over_k\n", 0) == 0);
    CHECK(s.find("\n6,0.5,") != std::string::npos);
}
