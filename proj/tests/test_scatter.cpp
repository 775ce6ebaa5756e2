#include <doctest.h>

#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <numbers>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/bessel_prime.hpp>
#include <boost/math/special_functions/hankel.hpp>

#include "fieldconc/errors.hpp"
#include "fieldconc/scatter.hpp"

using namespace fc;
using scatter::cplx;
using scatter::Vec2;

namespace {

// Sharp disk at the origin, incidence along +x, real contrast; sigma u_r continuous.
struct SeriesOracle {
    double k, R, sigma, kn;
    int order;
    std::vector<cplx> b, c;

    SeriesOracle(double k_, double R_, double sigma_, double tau_)
        : k(k_), R(R_), sigma(sigma_), kn(k_ * std::sqrt(tau_ / sigma_))
    {
        using namespace boost::math;
        order = static_cast<int>(std::max(k, kn) * R) + 30;
        const cplx I(0, 1);
        for (int m = 0; m <= order; ++m) {
            cplx im = std::pow(I, m);
            double j = cyl_bessel_j(m, k * R), jp = cyl_bessel_j_prime(m, k * R);
            cplx h = cyl_hankel_1(m, k * R);
            cplx hp(jp, cyl_neumann_prime(m, k * R));
            double ji = cyl_bessel_j(m, kn * R), jip = cyl_bessel_j_prime(m, kn * R);
            // im j + bb h = cc ji ; im k jp + bb k hp = sigma kn cc jip
            cplx det = h * sigma * kn * jip - k * hp * ji;
            cplx bb = im * (k * jp * ji - j * sigma * kn * jip) / det;
            cplx cc = im * (j * k * hp - k * jp * h) / (-det);
            b.push_back(bb);
            c.push_back(cc);
        }
    }

    cplx total(const Vec2& x) const
    {
        double r = x.norm(), th = std::atan2(x.y(), x.x());
        cplx sum = 0.0;
        for (int m = 0; m <= order; ++m) {
            double ang = m == 0 ? 1.0 : 2.0 * std::cos(m * th);
            cplx radial;
            if (r < R) {
                radial = c[m] * boost::math::cyl_bessel_j(m, kn * r);
            } else {
                radial = std::pow(cplx(0, 1), m) * boost::math::cyl_bessel_j(m, k * r) +
                         b[m] * boost::math::cyl_hankel_1(m, k * r);
            }
            sum += ang * radial;
        }
        return sum;
    }
};

scatter::MediumScene disk_scene(double k, double sigma, cplx tau)
{
    scatter::MediumScene s;
    s.inclusion = geometry::Disk{{0.0, 0.0}, 1.0};
    s.sigma_in = sigma;
    s.tau_in = tau;
    s.k = k;
    return s;
}

double grid_error(const scatter::SolveResult& sol, const SeriesOracle& ref)
{
    const auto& f = sol.total.frame;
    double num = 0.0, den = 0.0;
    for (int j = f.pml; j < f.ny - f.pml; ++j) {
        for (int i = f.pml; i < f.nx - f.pml; ++i) {
            cplx e = ref.total(f.point(i, j));
            num += std::norm(sol.total.u(i, j) - e);
            den += std::norm(e);
        }
    }
    return std::sqrt(num / den);
}

}  // namespace

TEST_CASE("library series reference agrees with an independent series")
{
    auto scene = disk_scene(3.0, 1.0 / 3.0, 3.0);
    SeriesOracle oracle(3.0, 1.0, 1.0 / 3.0, 3.0);
    scatter::DiskReference ref(scene, Vec2(1.0, 0.0));
    for (Vec2 x : {Vec2(0.1, 0.2), Vec2(-0.7, 0.5), Vec2(1.5, 0.0), Vec2(-2.0, 3.0), Vec2(0.0, 1.0001)}) {
        cplx want = oracle.total(x);
        CHECK(std::abs(ref.total(x) - want) <= 1e-9 * (1 + std::abs(want)));
    }
}

TEST_CASE("grid solution matches the disk series at 15 points per wavelength")
{
    auto scene = disk_scene(3.0, 1.0 / 3.0, 3.0);
    SeriesOracle oracle(3.0, 1.0, 1.0 / 3.0, 3.0);
    scatter::GridPolicy policy;
    policy.points_per_wavelength = 15.0;
    auto sol = scatter::solve_scattered(scene, scatter::plane_wave(3.0, Vec2(1.0, 0.0)), policy);
    double err = grid_error(sol, oracle);
    CHECK(err <= 2e-2);
    CHECK(sol.residual < 1e-8);

    // a thicker absorbing layer leaves the error essentially unchanged
    policy.pml_cells = 24;
    auto thick = scatter::solve_scattered(scene, scatter::plane_wave(3.0, Vec2(1.0, 0.0)), policy);
    double err2 = grid_error(thick, oracle);
    CHECK(err2 <= 2e-2);
    CHECK(std::abs(err2 - err) <= 0.25 * err);
}

TEST_CASE("no contrast means no scattering")
{
    auto scene = disk_scene(2.0, 1.0, 1.0);
    scatter::GridPolicy policy;
    auto sol = scatter::solve_scattered(scene, scatter::plane_wave(2.0, Vec2(0.6, 0.8)), policy);
    CHECK(sol.scattered.u.cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((sol.total.u - sol.incident.u).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("absorbing media take energy out of the field")
{
    scatter::DiskReference lossy(disk_scene(2.0, 0.5, cplx(2.0, 0.5)), Vec2(1.0, 0.0));
    CHECK(lossy.net_flux(2.0) < 0.0);
    scatter::DiskReference real(disk_scene(2.0, 0.5, 2.0), Vec2(1.0, 0.0));
    CHECK(std::abs(real.net_flux(2.0)) < 1e-8);
    // independent of the circle radius outside the disk
    CHECK(lossy.net_flux(3.0) == doctest::Approx(lossy.net_flux(1.5)).epsilon(1e-6));
}

TEST_CASE("gradient stencil is exact on quadratics")
{
    scatter::FieldGrid fg;
    fg.frame = {-1.0, 0.5, 0.1, 12, 9, 0};
    fg.u.resize(12, 9);
    for (int i = 0; i < 12; ++i) {
        for (int j = 0; j < 9; ++j) {
            Vec2 p = fg.frame.point(i, j);
            fg.u(i, j) = cplx(p.x() * p.x() + 2 * p.x() * p.y(), -p.y() * p.y());
        }
    }
    auto g = scatter::gradient_field(fg);
    for (int i = 0; i < 12; ++i) {
        for (int j = 0; j < 9; ++j) {
            Vec2 p = fg.frame.point(i, j);
            CHECK(std::abs(g.ux(i, j) - cplx(2 * p.x() + 2 * p.y(), 0.0)) < 1e-12);
            CHECK(std::abs(g.uy(i, j) - cplx(2 * p.x(), -2 * p.y())) < 1e-12);
        }
    }
    CHECK(g.magnitude()(0, 0) == doctest::Approx(std::sqrt(std::norm(g.ux(0, 0)) + std::norm(g.uy(0, 0)))));
}

TEST_CASE("smooth transition profile")
{
    CHECK(scatter::smooth_fraction(-0.3, 0.2) == 1.0);
    CHECK(scatter::smooth_fraction(0.3, 0.2) == 0.0);
    CHECK(scatter::smooth_fraction(0.0, 0.2) == doctest::Approx(0.5));
    double prev = 1.0;
    for (double d = -0.2; d <= 0.2; d += 0.01) {
        double f = scatter::smooth_fraction(d, 0.2);
        CHECK(f <= prev);
        prev = f;
    }
}

TEST_CASE("scene and policy validation")
{
    auto scene = disk_scene(2.0, 0.5, 2.0);
    CHECK(std::abs(scene.contrast() - cplx(2.0)) < 1e-12);
    scatter::GridPolicy policy;
    policy.points_per_wavelength = 9.0;
    CHECK_THROWS_AS(policy.validate(), DomainError);
    policy = {};
    policy.max_unknowns = 100;
    CHECK_THROWS_AS((void)scatter::discretize(scene, policy), ResourceError);

    auto bad = scene;
    bad.tau_in = cplx(2.0, -0.1);
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad = scene;
    bad.k = 0.0;
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad = scene;
    bad.generators = {{Vec2(0.5, 0.0), 0.2}};
    CHECK_THROWS_AS(bad.validate(), GeometryError);
    bad = scene;
    bad.generators = {{Vec2(3.0, 0.0), 0.5}, {Vec2(3.5, 0.5), 0.5}};
    CHECK_THROWS_AS(bad.validate(), GeometryError);

    auto rect = scene;
    rect.inclusion = geometry::Rectangle{};
    CHECK_THROWS_AS(scatter::DiskReference(rect, Vec2(1.0, 0.0)), GeometryError);
}

TEST_CASE("material grid marks the inclusion")
{
    auto scene = disk_scene(2.0, 0.5, 2.0);
    scatter::GridPolicy policy;
    auto mat = scatter::discretize(scene, policy);
    CHECK(mat.contrast_area() == doctest::Approx(std::numbers::pi).epsilon(2e-2));
    CHECK(mat.frame.pml == policy.pml_cells);
    CHECK(mat.sigma_x.rows() == mat.frame.nx - 1);
    CHECK(mat.sigma_y.cols() == mat.frame.ny - 1);
    // centre node is inside, corner node outside
    auto [ci, cj] = std::pair{static_cast<int>(std::lround(-mat.frame.x0 / mat.frame.h)),
                              static_cast<int>(std::lround(-mat.frame.y0 / mat.frame.h))};
    CHECK(std::abs(mat.tau(ci, cj) - cplx(2.0)) < 1e-12);
    CHECK(std::abs(mat.tau(mat.frame.pml, mat.frame.pml) - cplx(1.0)) < 1e-12);
}

TEST_CASE("field export")
{
    auto dir = std::filesystem::temp_directory_path() / "fieldconc-test-scatter";
    std::filesystem::create_directories(dir);
    scatter::FieldGrid fg;
    fg.frame = {0.0, 0.0, 0.5, 6, 5, 1};
    fg.u = Eigen::MatrixXcd::Constant(6, 5, cplx(1.0, -2.0));
    auto g = scatter::gradient_field(fg);
    auto path = (dir / "total.csv").string();
    scatter::write_field_csv(path, fg, g, {2.0, 1e-6, 1e-12, "{\"note\": 1}"});
    std::ifstream is(path);
    std::string header;
    std::getline(is, header);
    CHECK(header == "x,y,re_u,im_u,abs_grad");
    int rows = 0;
    for (std::string line; std::getline(is, line);) ++rows;
    CHECK(rows == 4 * 3);
    CHECK(std::filesystem::exists(dir / "total.json"));
    std::filesystem::remove_all(dir);
}
