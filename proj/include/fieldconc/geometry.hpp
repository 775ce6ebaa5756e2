#pragma once

#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace fc::geometry {

using Vec2 = Eigen::Vector2d;

struct Disk {
    Vec2 center{0.0, 0.0};
    double radius = 1.0;
};

// Axis-aligned ellipse; a is the x semi-axis, b the y semi-axis.
struct Ellipse {
    Vec2 center{0.0, 0.0};
    double a = 1.0;
    double b = 1.0;
};

struct Rectangle {
    double xmin = -1.0, xmax = 1.0, ymin = -1.0, ymax = 1.0;
};

// (a cos t + c cos 2t + shift.x, b sin t + shift.y); the classic kite uses a=1, c=0.65, b=1.5.
struct Kite {
    Vec2 shift{1.4, 0.0};
    double a = 1.0;
    double b = 1.5;
    double c = 0.65;
};

using Shape = std::variant<Disk, Ellipse, Rectangle, Kite>;

struct BoundingBox {
    Vec2 lo, hi;
    void expand(const BoundingBox& other);
};

struct BoundaryPoint {
    Vec2 point;
    Vec2 normal;  // outward unit normal
};

[[nodiscard]] std::string shape_name(const Shape& s);
void validate(const Shape& s);

// Strict interior test.
[[nodiscard]] bool contains(const Shape& s, const Vec2& p);

// Boundary parameter t in [0, 2pi); counter-clockwise. Rectangles are parametrized by arc length
// starting at the midpoint of the right edge.
[[nodiscard]] BoundaryPoint boundary_at(const Shape& s, double t);
[[nodiscard]] std::vector<BoundaryPoint> boundary_samples(const Shape& s, int count);
[[nodiscard]] std::vector<BoundaryPoint> arc_samples(const Shape& s, double t0, double t1, int count);

[[nodiscard]] BoundingBox bounding_box(const Shape& s);
[[nodiscard]] double area(const Shape& s);

// Distance from p to the boundary arc t in [t0, t1], by dense sampling plus local refinement.
[[nodiscard]] double distance_to_arc(const Shape& s, double t0, double t1, const Vec2& p);

// Signed distance to the boundary (negative inside). Exact for disks, sampled otherwise.
[[nodiscard]] double signed_distance(const Shape& s, const Vec2& p);

// Arc length of the boundary between parameters t0 and t1.
[[nodiscard]] double arc_length(const Shape& s, double t0, double t1);

}  // namespace fc::geometry
