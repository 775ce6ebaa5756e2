#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <set>

#include "fieldconc/errors.hpp"
#include "fieldconc/harness.hpp"

namespace fc::harness {

namespace {

void check_keys(const json& js, const std::set<std::string>& allowed, const std::string& where)
{
    if (!js.is_object()) throw ConfigError(where + " must be a JSON object");
    for (const auto& [key, _] : js.items()) {
        if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

Vec2 vec2(const json& js, const std::string& what)
{
    if (!js.is_array() || js.size() != 2) throw ConfigError(what + " must be a pair of numbers");
    return {js[0].get<double>(), js[1].get<double>()};
}

json pair(const Vec2& v) { return json::array({v.x(), v.y()}); }

geometry::Shape parse_shape(const json& js)
{
    std::string type = js.at("type").get<std::string>();
    if (type == "disk") {
        check_keys(js, {"type", "center", "radius"}, "inclusion");
        return geometry::Disk{vec2(js.at("center"), "disk center"), js.at("radius").get<double>()};
    }
    if (type == "ellipse") {
        check_keys(js, {"type", "center", "semi_axes"}, "inclusion");
        Vec2 ax = vec2(js.at("semi_axes"), "ellipse semi_axes");
        return geometry::Ellipse{vec2(js.at("center"), "ellipse center"), ax.x(), ax.y()};
    }
    if (type == "rectangle") {
        check_keys(js, {"type", "bounds"}, "inclusion");
        const json& b = js.at("bounds");
        if (!b.is_array() || b.size() != 4) throw ConfigError("rectangle bounds must be [xmin, xmax, ymin, ymax]");
        return geometry::Rectangle{b[0].get<double>(), b[1].get<double>(), b[2].get<double>(), b[3].get<double>()};
    }
    if (type == "kite") {
        check_keys(js, {"type", "shift", "a", "b", "c"}, "inclusion");
        geometry::Kite kite;
        if (js.contains("shift")) kite.shift = vec2(js["shift"], "kite shift");
        kite.a = js.value("a", kite.a);
        kite.b = js.value("b", kite.b);
        kite.c = js.value("c", kite.c);
        return kite;
    }
    throw ConfigError("unknown inclusion type '" + type + "'");
}

json shape_json(const geometry::Shape& s)
{
    return std::visit(
        [](const auto& g) -> json {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, geometry::Disk>) {
                return {{"type", "disk"}, {"center", pair(g.center)}, {"radius", g.radius}};
            } else if constexpr (std::is_same_v<T, geometry::Ellipse>) {
                return {{"type", "ellipse"}, {"center", pair(g.center)}, {"semi_axes", json::array({g.a, g.b})}};
            } else if constexpr (std::is_same_v<T, geometry::Rectangle>) {
                return {{"type", "rectangle"}, {"bounds", json::array({g.xmin, g.xmax, g.ymin, g.ymax})}};
            } else {
                return {{"type", "kite"}, {"shift", pair(g.shift)}, {"a", g.a}, {"b", g.b}, {"c", g.c}};
            }
        },
        s);
}

}  // namespace

void ExperimentConfig::validate() const
{
    geometry::validate(inclusion);
    if (!(k > 0)) throw ConfigError("k must be positive");
    if (!(sigma > 0)) throw ConfigError("sigma must be positive");
    if (tau && !(*tau > 0)) throw ConfigError("tau must be positive");
    const GeneratorSpec& g = generator;
    if (!(g.r0 > 0)) throw ConfigError("generator r0 must be positive");
    if (g.m < 0 || g.s0 < 1) throw ConfigError("generator needs m >= 0 and s0 >= 1");
    if (!(g.sigma > 0)) throw ConfigError("generator sigma must be positive");
    if (!g.center && !(g.gap > 0)) throw ConfigError("generator gap must be positive");
    const IncidentSpec& inc = incident;
    if (inc.kind == IncidentSpec::Kind::herglotz) {
        if (!(inc.alpha > 0)) throw ConfigError("alpha must be positive");
        if (inc.directions < 8) throw ConfigError("need at least 8 directions");
        if (inc.points_per_curve < 8) throw ConfigError("need at least 8 collocation points per curve");
    } else if (!(inc.direction.norm() > 0)) {
        throw ConfigError("plane-wave direction must be nonzero");
    }
    grid.validate();
    if (gap.epsilon && !(*gap.epsilon > 0)) throw ConfigError("gap epsilon must be positive");
    if (gap.t0.has_value() != gap.t1.has_value()) throw ConfigError("gap arc needs both t0 and t1");
    if (gap.t0 && !(*gap.t1 > *gap.t0)) throw ConfigError("gap arc needs t1 > t0");
    if (!(annulus.inner >= 0 && annulus.outer > annulus.inner)) throw ConfigError("annulus needs 0 <= inner < outer");
    if (!(annulus.bar_factor > 0)) throw ConfigError("annulus bar factor must be positive");
    if (grid.margin >= 0 && annulus.outer * 2.0 * std::numbers::pi / k > grid.margin)
        throw ConfigError("annulus reaches beyond the grid margin");
}

ExperimentConfig parse_config(const json& js)
{
    check_keys(js, {"name", "inclusion", "k", "sigma", "tau", "generator", "incident", "grid", "gap", "annulus",
                    "output_dir"},
               "config");
    ExperimentConfig cfg;
    try {
        cfg.name = js.value("name", cfg.name);
        cfg.inclusion = parse_shape(js.at("inclusion"));
        cfg.k = js.at("k").get<double>();
        cfg.sigma = js.at("sigma").get<double>();
        if (js.contains("tau") && !js["tau"].is_null()) cfg.tau = js["tau"].get<double>();
        cfg.generator.sigma = cfg.sigma;
        if (js.contains("generator")) {
            const json& g = js["generator"];
            check_keys(g, {"r0", "center", "m", "s0", "sigma", "gap", "arc_t"}, "generator");
            GeneratorSpec& gs = cfg.generator;
            gs.r0 = g.value("r0", gs.r0);
            if (g.contains("center") && !g["center"].is_null()) gs.center = vec2(g["center"], "generator center");
            gs.m = g.value("m", gs.m);
            gs.s0 = g.value("s0", gs.s0);
            gs.sigma = g.value("sigma", cfg.sigma);
            gs.gap = g.value("gap", 0.3 * gs.r0);
            gs.arc_t = g.value("arc_t", gs.arc_t);
        }
        if (js.contains("incident")) {
            const json& i = js["incident"];
            std::string type = i.value("type", "herglotz");
            IncidentSpec& is = cfg.incident;
            if (type == "herglotz") {
                check_keys(i, {"type", "alpha", "directions", "points_per_curve", "derivative_rows"}, "incident");
                is.kind = IncidentSpec::Kind::herglotz;
                is.alpha = i.value("alpha", is.alpha);
                is.directions = i.value("directions", is.directions);
                is.points_per_curve = i.value("points_per_curve", is.points_per_curve);
                is.derivative_rows = i.value("derivative_rows", is.derivative_rows);
            } else if (type == "planewave") {
                check_keys(i, {"type", "direction", "amplitude"}, "incident");
                is.kind = IncidentSpec::Kind::planewave;
                if (i.contains("direction")) is.direction = vec2(i["direction"], "plane-wave direction");
                is.amplitude = i.value("amplitude", is.amplitude);
            } else {
                throw ConfigError("unknown incident type '" + type + "'");
            }
        }
        if (js.contains("grid")) {
            const json& g = js["grid"];
            check_keys(g, {"points_per_wavelength", "spacing", "margin", "pml_cells", "pml_reflection", "subsamples",
                           "max_unknowns", "direct_limit"},
                       "grid");
            scatter::GridPolicy& gp = cfg.grid;
            gp.points_per_wavelength = g.value("points_per_wavelength", gp.points_per_wavelength);
            if (g.contains("spacing") && !g["spacing"].is_null()) gp.spacing = g["spacing"].get<double>();
            gp.margin = g.value("margin", gp.margin);
            gp.pml_cells = g.value("pml_cells", gp.pml_cells);
            gp.pml_reflection = g.value("pml_reflection", gp.pml_reflection);
            gp.subsamples = g.value("subsamples", gp.subsamples);
            gp.max_unknowns = g.value("max_unknowns", gp.max_unknowns);
            gp.direct_limit = g.value("direct_limit", gp.direct_limit);
        }
        if (js.contains("gap")) {
            const json& g = js["gap"];
            check_keys(g, {"t0", "t1", "epsilon"}, "gap");
            if (g.contains("t0") && !g["t0"].is_null()) cfg.gap.t0 = g["t0"].get<double>();
            if (g.contains("t1") && !g["t1"].is_null()) cfg.gap.t1 = g["t1"].get<double>();
            if (g.contains("epsilon") && !g["epsilon"].is_null()) cfg.gap.epsilon = g["epsilon"].get<double>();
        }
        if (js.contains("annulus")) {
            const json& a = js["annulus"];
            check_keys(a, {"inner", "outer", "bar_factor", "compare_planewave"}, "annulus");
            cfg.annulus.inner = a.value("inner", cfg.annulus.inner);
            cfg.annulus.outer = a.value("outer", cfg.annulus.outer);
            cfg.annulus.bar_factor = a.value("bar_factor", cfg.annulus.bar_factor);
            cfg.annulus.compare_planewave = a.value("compare_planewave", cfg.annulus.compare_planewave);
        }
        cfg.output_dir = js.value("output_dir", std::string());
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path)
{
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config " + path);
    json js;
    try {
        js = json::parse(is);
    } catch (const json::exception& e) {
        throw ConfigError("config " + path + " is not valid JSON: " + e.what());
    }
    return parse_config(js);
}

json to_json(const ExperimentConfig& cfg)
{
    json js;
    js["name"] = cfg.name;
    js["inclusion"] = shape_json(cfg.inclusion);
    js["k"] = cfg.k;
    js["sigma"] = cfg.sigma;
    js["tau"] = cfg.tau ? json(*cfg.tau) : json(nullptr);
    const GeneratorSpec& g = cfg.generator;
    js["generator"] = {{"r0", g.r0},       {"center", g.center ? pair(*g.center) : json(nullptr)},
                       {"m", g.m},         {"s0", g.s0},
                       {"sigma", g.sigma}, {"gap", g.gap},
                       {"arc_t", g.arc_t}};
    const IncidentSpec& i = cfg.incident;
    if (i.kind == IncidentSpec::Kind::herglotz) {
        js["incident"] = {{"type", "herglotz"},
                          {"alpha", i.alpha},
                          {"directions", i.directions},
                          {"points_per_curve", i.points_per_curve},
                          {"derivative_rows", i.derivative_rows}};
    } else {
        js["incident"] = {{"type", "planewave"}, {"direction", pair(i.direction)}, {"amplitude", i.amplitude}};
    }
    const scatter::GridPolicy& gp = cfg.grid;
    js["grid"] = {{"points_per_wavelength", gp.points_per_wavelength},
                  {"spacing", gp.spacing ? json(*gp.spacing) : json(nullptr)},
                  {"margin", gp.margin},
                  {"pml_cells", gp.pml_cells},
                  {"pml_reflection", gp.pml_reflection},
                  {"subsamples", gp.subsamples},
                  {"max_unknowns", gp.max_unknowns},
                  {"direct_limit", gp.direct_limit}};
    auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
    js["gap"] = {{"t0", opt(cfg.gap.t0)}, {"t1", opt(cfg.gap.t1)}, {"epsilon", opt(cfg.gap.epsilon)}};
    js["annulus"] = {{"inner", cfg.annulus.inner},
                     {"outer", cfg.annulus.outer},
                     {"bar_factor", cfg.annulus.bar_factor},
                     {"compare_planewave", cfg.annulus.compare_planewave}};
    js["output_dir"] = cfg.output_dir;
    return js;
}

std::string config_hash(const ExperimentConfig& cfg)
{
    json js = to_json(cfg);
    js.erase("output_dir");
    std::string text = js.dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::vector<std::string> preset_names() { return {"ellipse", "rectangle", "kite"}; }

ExperimentConfig preset(const std::string& name)
{
    ExperimentConfig cfg;
    cfg.name = name;
    if (name == "ellipse") {
        cfg.inclusion = geometry::Ellipse{{-3.2, -3.2}, 3.0, 4.0};
        cfg.k = 3.0;
        cfg.sigma = 1.0;
        cfg.tau = 17.5285;
        cfg.generator = {2.0, std::nullopt, 12, 1, 1.0, 0.6, std::numbers::pi / 4};
        cfg.incident.alpha = 1e-5;
    } else if (name == "rectangle") {
        cfg.inclusion = geometry::Rectangle{-5.1, -1.1, -4.0, 4.0};
        cfg.k = 1.0;
        cfg.sigma = 0.25;
        cfg.tau = 16.2183;
        cfg.generator = {3.0, std::nullopt, 4, 1, 0.25, 0.9, 0.0};
        cfg.incident.alpha = 1e-6;
    } else if (name == "kite") {
        cfg.inclusion = geometry::Kite{};
        cfg.k = std::sqrt(3.0);
        cfg.sigma = 1.0 / 3.0;
        cfg.tau = 19.9121;
        cfg.generator = {2.0, std::nullopt, 4, 1, 1.0 / 3.0, 0.6, 0.0};
        cfg.incident.alpha = 1e-3;
    } else {
        throw ConfigError("unknown preset '" + name + "'");
    }
    cfg.validate();
    return cfg;
}

}  // namespace fc::harness
