#ifndef BUDDE_GEOMETRY_HPP
#define BUDDE_GEOMETRY_HPP

#include <cmath>

namespace budde {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double norm() const { return std::hypot(x, y); }
    double squared_norm() const { return x * x + y * y; }
};

inline double distance(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

/// Planar pose (position + heading).
struct Pose2 {
    double x = 0.0;
    double y = 0.0;
    double theta = 0.0;

    Vec2 position() const { return {x, y}; }
    Vec2 heading() const { return {std::cos(theta), std::sin(theta)}; }

    /// World point expressed in this pose's frame.
    Vec2 to_local(const Vec2& world) const {
        const double dx = world.x - x;
        const double dy = world.y - y;
        const double c = std::cos(theta);
        const double s = std::sin(theta);
        return {c * dx + s * dy, -s * dx + c * dy};
    }

    /// Local point expressed in world coordinates.
    Vec2 to_world(const Vec2& local) const {
        const double c = std::cos(theta);
        const double s = std::sin(theta);
        return {x + c * local.x - s * local.y, y + s * local.x + c * local.y};
    }
};

inline double wrap_angle(double a) {
    while (a > M_PI) a -= 2.0 * M_PI;
    while (a < -M_PI) a += 2.0 * M_PI;
    return a;
}

}  // namespace budde

#endif  // BUDDE_GEOMETRY_HPP
