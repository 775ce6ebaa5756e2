#include "fieldconc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "fieldconc/errors.hpp"

namespace fc::geometry {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

template <class... Ts>
struct Overload : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overload(Ts...) -> Overload<Ts...>;

Vec2 unit(const Vec2& v)
{
    double n = v.norm();
    if (n == 0.0) throw GeometryError("zero-length tangent");
    return v / n;
}

// Outward normal for a counter-clockwise tangent.
Vec2 outward(const Vec2& tangent) { return unit(Vec2(tangent.y(), -tangent.x())); }

BoundaryPoint rectangle_at(const Rectangle& r, double t)
{
    double w = r.xmax - r.xmin;
    double h = r.ymax - r.ymin;
    double perim = 2.0 * (w + h);
    double s = std::fmod(t / kTwoPi * perim, perim);
    if (s < 0) s += perim;
    double cy = 0.5 * (r.ymin + r.ymax);
    // right edge upper half, top, left, bottom, right edge lower half
    double seg = 0.5 * h;
    if (s < seg) return {Vec2(r.xmax, cy + s), Vec2(1, 0)};
    s -= seg;
    if (s < w) return {Vec2(r.xmax - s, r.ymax), Vec2(0, 1)};
    s -= w;
    if (s < h) return {Vec2(r.xmin, r.ymax - s), Vec2(-1, 0)};
    s -= h;
    if (s < w) return {Vec2(r.xmin + s, r.ymin), Vec2(0, -1)};
    s -= w;
    return {Vec2(r.xmax, r.ymin + s), Vec2(1, 0)};
}

// Kite interior: with s = (y - shift.y)/b, the boundary at height y sits at
// x = shift.x + c(1 - 2 s^2) +/- a sqrt(1 - s^2).
bool kite_contains(const Kite& k, const Vec2& p)
{
    double s = (p.y() - k.shift.y()) / k.b;
    if (std::abs(s) >= 1.0) return false;
    double mid = k.shift.x() + k.c * (1.0 - 2.0 * s * s);
    return std::abs(p.x() - mid) < k.a * std::sqrt(1.0 - s * s);
}

}  // namespace

void BoundingBox::expand(const BoundingBox& other)
{
    lo = lo.cwiseMin(other.lo);
    hi = hi.cwiseMax(other.hi);
}

std::string shape_name(const Shape& s)
{
    return std::visit(Overload{[](const Disk&) { return std::string("disk"); },
                               [](const Ellipse&) { return std::string("ellipse"); },
                               [](const Rectangle&) { return std::string("rectangle"); },
                               [](const Kite&) { return std::string("kite"); }},
                      s);
}

void validate(const Shape& s)
{
    std::visit(Overload{[](const Disk& d) {
                            if (!(d.radius > 0)) throw GeometryError("disk radius must be positive");
                        },
                        [](const Ellipse& e) {
                            if (!(e.a > 0 && e.b > 0)) throw GeometryError("ellipse semi-axes must be positive");
                        },
                        [](const Rectangle& r) {
                            if (!(r.xmax > r.xmin && r.ymax > r.ymin)) throw GeometryError("rectangle bounds are empty");
                        },
                        [](const Kite& k) {
                            if (!(k.a > 0 && k.b > 0)) throw GeometryError("kite axes must be positive");
                        }},
               s);
}

bool contains(const Shape& s, const Vec2& p)
{
    return std::visit(
        Overload{[&](const Disk& d) { return (p - d.center).norm() < d.radius; },
                 [&](const Ellipse& e) {
                     double u = (p.x() - e.center.x()) / e.a;
                     double v = (p.y() - e.center.y()) / e.b;
                     return u * u + v * v < 1.0;
                 },
                 [&](const Rectangle& r) {
                     return p.x() > r.xmin && p.x() < r.xmax && p.y() > r.ymin && p.y() < r.ymax;
                 },
                 [&](const Kite& k) { return kite_contains(k, p); }},
        s);
}

BoundaryPoint boundary_at(const Shape& s, double t)
{
    return std::visit(
        Overload{[&](const Disk& d) -> BoundaryPoint {
                     Vec2 n(std::cos(t), std::sin(t));
                     return {d.center + d.radius * n, n};
                 },
                 [&](const Ellipse& e) -> BoundaryPoint {
                     Vec2 p(e.center.x() + e.a * std::cos(t), e.center.y() + e.b * std::sin(t));
                     Vec2 tan(-e.a * std::sin(t), e.b * std::cos(t));
                     return {p, outward(tan)};
                 },
                 [&](const Rectangle& r) { return rectangle_at(r, t); },
                 [&](const Kite& k) -> BoundaryPoint {
                     Vec2 p(k.a * std::cos(t) + k.c * std::cos(2 * t) + k.shift.x(), k.b * std::sin(t) + k.shift.y());
                     Vec2 tan(-k.a * std::sin(t) - 2 * k.c * std::sin(2 * t), k.b * std::cos(t));
                     return {p, outward(tan)};
                 }},
        s);
}

std::vector<BoundaryPoint> boundary_samples(const Shape& s, int count)
{
    if (count < 1) throw GeometryError("boundary sampling needs at least one point");
    std::vector<BoundaryPoint> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) out.push_back(boundary_at(s, kTwoPi * i / count));
    return out;
}

std::vector<BoundaryPoint> arc_samples(const Shape& s, double t0, double t1, int count)
{
    if (count < 2) throw GeometryError("arc sampling needs at least two points");
    std::vector<BoundaryPoint> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) out.push_back(boundary_at(s, t0 + (t1 - t0) * i / (count - 1)));
    return out;
}

BoundingBox bounding_box(const Shape& s)
{
    return std::visit(
        Overload{[](const Disk& d) -> BoundingBox {
                     Vec2 r(d.radius, d.radius);
                     return {d.center - r, d.center + r};
                 },
                 [](const Ellipse& e) -> BoundingBox {
                     Vec2 r(e.a, e.b);
                     return {e.center - r, e.center + r};
                 },
                 [](const Rectangle& r) -> BoundingBox { return {Vec2(r.xmin, r.ymin), Vec2(r.xmax, r.ymax)}; },
                 [&](const Kite&) -> BoundingBox {
                     BoundingBox box{Vec2::Constant(std::numeric_limits<double>::max()),
                                     Vec2::Constant(std::numeric_limits<double>::lowest())};
                     for (const auto& bp : boundary_samples(s, 4096)) {
                         box.lo = box.lo.cwiseMin(bp.point);
                         box.hi = box.hi.cwiseMax(bp.point);
                     }
                     return box;
                 }},
        s);
}

double area(const Shape& s)
{
    return std::visit(Overload{[](const Disk& d) { return std::numbers::pi * d.radius * d.radius; },
                               [](const Ellipse& e) { return std::numbers::pi * e.a * e.b; },
                               [](const Rectangle& r) { return (r.xmax - r.xmin) * (r.ymax - r.ymin); },
                               // Green's theorem: x'(t) y(t) integrates to -a b pi, the c term drops out.
                               [](const Kite& k) { return std::numbers::pi * k.a * k.b; }},
                      s);
}

double distance_to_arc(const Shape& s, double t0, double t1, const Vec2& p)
{
    const int n = 2048;
    double best = std::numeric_limits<double>::max();
    double best_t = t0;
    for (int i = 0; i <= n; ++i) {
        double t = t0 + (t1 - t0) * i / n;
        double d = (boundary_at(s, t).point - p).norm();
        if (d < best) {
            best = d;
            best_t = t;
        }
    }
    // golden-section refinement on the neighbouring sample interval
    double h = (t1 - t0) / n;
    double a = std::max(t0, best_t - h);
    double b = std::min(t1, best_t + h);
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    auto f = [&](double t) { return (boundary_at(s, t).point - p).norm(); };
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < 60; ++i) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    return std::min(best, std::min(fc, fd));
}

double signed_distance(const Shape& s, const Vec2& p)
{
    if (const auto* d = std::get_if<Disk>(&s)) return (p - d->center).norm() - d->radius;
    double dist = distance_to_arc(s, 0.0, kTwoPi, p);
    return contains(s, p) ? -dist : dist;
}

double arc_length(const Shape& s, double t0, double t1)
{
    const int n = 4096;
    double len = 0.0;
    Vec2 prev = boundary_at(s, t0).point;
    for (int i = 1; i <= n; ++i) {
        Vec2 cur = boundary_at(s, t0 + (t1 - t0) * i / n).point;
        len += (cur - prev).norm();
        prev = cur;
    }
    return len;
}

}  // namespace fc::geometry
