#include <doctest.h>

#include <cmath>
#include <string>

#include "fieldconc/errors.hpp"
#include "fieldconc/harness.hpp"

using namespace fc;
using harness::json;
using harness::Vec2;

namespace {

// Small scene: unit disk, m = 4 mode in a ball of radius 1 at distance 0.5, coarse grid.
harness::ExperimentConfig small_config()
{
    harness::ExperimentConfig cfg;
    cfg.name = "small";
    cfg.inclusion = geometry::Disk{{0.0, 0.0}, 1.0};
    cfg.k = 1.0;
    cfg.generator.r0 = 1.0;
    cfg.generator.m = 4;
    cfg.generator.gap = 0.5;
    cfg.generator.sigma = 0.25;
    cfg.incident.directions = 64;
    cfg.incident.points_per_curve = 64;
    cfg.incident.alpha = 1e-8;
    cfg.grid.points_per_wavelength = 12.0;
    cfg.annulus.compare_planewave = false;
    return cfg;
}

bool message_has(const std::function<void()>& fn, const std::string& needle)
{
    try {
        fn();
    } catch (const std::exception& e) {
        return std::string(e.what()).find(needle) != std::string::npos;
    }
    return false;
}

}  // namespace

TEST_CASE("config JSON round trip")
{
    for (const auto& name : harness::preset_names()) {
        auto cfg = harness::preset(name);
        json a = harness::to_json(cfg);
        json b = harness::to_json(harness::parse_config(a));
        CHECK(a == b);
    }
    auto cfg = small_config();
    cfg.tau = 2.5;
    cfg.gap.t0 = 0.1;
    cfg.gap.t1 = 0.4;
    cfg.gap.epsilon = 0.2;
    cfg.generator.center = Vec2(3.0, 0.5);
    cfg.incident.kind = harness::IncidentSpec::Kind::planewave;
    cfg.grid.spacing = 0.05;
    json a = harness::to_json(cfg);
    CHECK(harness::to_json(harness::parse_config(a)) == a);
}

TEST_CASE("shipped config files equal the presets")
{
    for (const auto& name : harness::preset_names()) {
        auto cfg = harness::load_config(std::string(FC_SOURCE_DIR) + "/configs/" + name + ".json");
        CHECK(harness::to_json(cfg) == harness::to_json(harness::preset(name)));
        CHECK(harness::config_hash(cfg) == harness::config_hash(harness::preset(name)));
    }
    CHECK_THROWS_AS((void)harness::preset("teapot"), ConfigError);
    CHECK_THROWS_AS((void)harness::load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("config validation")
{
    json js = harness::to_json(small_config());
    js["colour"] = "blue";
    CHECK_THROWS_AS((void)harness::parse_config(js), ConfigError);
    js = harness::to_json(small_config());
    js["generator"]["wobble"] = 1;
    CHECK_THROWS_AS((void)harness::parse_config(js), ConfigError);
    js = harness::to_json(small_config());
    js["k"] = -1.0;
    CHECK_THROWS_AS((void)harness::parse_config(js), ConfigError);
    js = harness::to_json(small_config());
    js["inclusion"]["type"] = "torus";
    CHECK_THROWS_AS((void)harness::parse_config(js), ConfigError);
    js = harness::to_json(small_config());
    js["k"] = "three";
    CHECK_THROWS_AS((void)harness::parse_config(js), ConfigError);

    auto cfg = small_config();
    cfg.gap.t0 = 1.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = small_config();
    cfg.annulus.inner = 0.8;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("config hash is stable and ignores the output directory")
{
    auto a = small_config();
    auto b = small_config();
    b.output_dir = "/tmp/elsewhere";
    CHECK(harness::config_hash(a) == harness::config_hash(b));
    CHECK(harness::config_hash(a).size() == 16);
    b.k = 1.0 + 1e-9;
    CHECK(harness::config_hash(a) != harness::config_hash(b));
}

TEST_CASE("generator placement")
{
    auto cfg = small_config();
    auto ball = harness::place_generator(cfg);
    // outward normal at t = 0 is +x; centre at radius + gap + r0
    CHECK(ball.center.x() == doctest::Approx(2.5));
    CHECK(std::abs(ball.center.y()) < 1e-12);
    CHECK(ball.radius == 1.0);
    cfg.generator.center = Vec2(1.5, 0.0);
    CHECK_THROWS_AS((void)harness::place_generator(cfg), GeometryError);
}

TEST_CASE("gap and annulus masks on a synthetic frame")
{
    scatter::GridFrame frame{-3.0, -3.0, 0.1, 61, 61, 0};
    geometry::Shape disk = geometry::Disk{{0.0, 0.0}, 1.0};
    auto mask = harness::gap_mask(frame, disk, -0.3, 0.3, 0.2);
    int count = 0;
    for (int i = 0; i < frame.nx; ++i) {
        for (int j = 0; j < frame.ny; ++j) {
            Vec2 p = frame.point(i, j);
            double r = p.norm(), th = std::atan2(p.y(), p.x());
            bool inside = r > 1.0 && r - 1.0 <= 0.2 && std::abs(th) <= 0.3 - 1e-9;
            bool clearly_out = r < 1.0 || r > 1.25 || std::abs(th) > 0.6;
            if (inside) CHECK(mask.cells(i, j));
            if (clearly_out) CHECK_FALSE(mask.cells(i, j));
            count += mask.cells(i, j) ? 1 : 0;
        }
    }
    CHECK(count == mask.count);
    CHECK(mask.count > 0);
    CHECK_THROWS_AS((void)harness::gap_mask(frame, disk, -0.3, 0.3, 0.0), GeometryError);

    geometry::BoundingBox box{{-1.0, -1.0}, {1.0, 1.0}};
    auto ann = harness::annulus_mask(frame, box, 0.5, 1.5);
    for (int i = 0; i < frame.nx; ++i) {
        for (int j = 0; j < frame.ny; ++j) {
            Vec2 p = frame.point(i, j);
            double d = std::max(std::abs(p.x()), std::abs(p.y())) - 1.0;
            if (d > 0.5 + 1e-9 && d < 1.5 - 1e-9) CHECK(ann(i, j));
            if (d < 0.5 - 1e-9 || d > 1.5 + 1e-9) CHECK_FALSE(ann(i, j));
        }
    }

    scatter::FieldGrid sc;
    sc.frame = frame;
    sc.u = Eigen::MatrixXcd::Zero(frame.nx, frame.ny);
    sc.u(0, 30) = 0.7;  // x = -3: distance 2 from the box, outside the frame
    sc.u(10, 30) = std::complex<double>(0.0, 0.3);  // x = -2: distance 1, inside the frame
    auto s = harness::smallness_check(sc, ann, 0.5);
    CHECK(s.sup == doctest::Approx(0.3));
    CHECK(s.passed);
    CHECK(harness::smallness_check(sc, ann, 0.2).passed == false);
}

TEST_CASE("pipeline is deterministic")
{
    auto cfg = small_config();
    auto a = harness::run_pipeline(cfg).report.to_json();
    auto b = harness::run_pipeline(cfg).report.to_json();
    CHECK(a.dump() == b.dump());
    CHECK(a.at("config_hash") == harness::config_hash(cfg));
    CHECK(a.at("gap").at("mask_cells").get<int>() > 0);
}

TEST_CASE("plane-wave incidence does not concentrate in the gap")
{
    auto cfg = small_config();
    cfg.incident.kind = harness::IncidentSpec::Kind::planewave;
    auto out = harness::run_pipeline(cfg);
    CHECK(!out.kernel.has_value());
    CHECK(out.report.gap.ratio < 10.0);
    CHECK(out.report.gap.ratio > 0.0);
}

TEST_CASE("pipeline errors name the failing stage")
{
    auto cfg = small_config();
    cfg.generator.m = 400;
    CHECK(message_has([&] { (void)harness::run_pipeline(cfg); }, "[eig]"));
    cfg = small_config();
    cfg.grid.max_unknowns = 1000;
    CHECK(message_has([&] { (void)harness::run_pipeline(cfg); }, "[scatter]"));
}

TEST_CASE("kernel reuse")
{
    auto cfg = small_config();
    auto first = harness::run_pipeline(cfg);
    REQUIRE(first.kernel.has_value());
    auto again = harness::run_with_kernel(cfg, *first.kernel);
    CHECK(again.report.gap.max_grad == doctest::Approx(first.report.gap.max_grad).epsilon(1e-12));
    auto wrong = *first.kernel;
    wrong.k = 2.0;
    CHECK_THROWS_AS((void)harness::run_with_kernel(cfg, wrong), ConfigError);
}

TEST_CASE("verify selector")
{
    auto names = harness::suite_names();
    CHECK(names.size() >= 10);
    CHECK(names.front() == "specfun");
    CHECK_THROWS_AS((void)harness::verify("specfun,nonsense"), ConfigError);
    json out = harness::verify("bessel-identity");
    CHECK(out.at("suites").size() == 1);
    CHECK(out.at("suites")[0].at("name") == "bessel-identity");
    CHECK(out.at("passed").get<int>() + out.at("failed").get<int>() == 1);
    CHECK(out.at("suites")[0].contains("details"));
}
