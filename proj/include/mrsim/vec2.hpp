#pragma once

#include <cmath>
#include <stdexcept>

namespace mrsim {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2() = default;
    constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

    constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
    constexpr Vec2 operator-() const { return {-x, -y}; }
    Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
    Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
    constexpr bool operator==(const Vec2&) const = default;

    double norm() const { return std::hypot(x, y); }
    constexpr double norm_sq() const { return x * x + y * y; }
    constexpr double dot(Vec2 o) const { return x * o.x + y * o.y; }
    constexpr double cross(Vec2 o) const { return x * o.y - y * o.x; }
    bool finite() const { return std::isfinite(x) && std::isfinite(y); }

    /// Unit vector in the same direction; throws on (near-)zero input.
    Vec2 normalized(double eps = 0.0) const {
        const double n = norm();
        if (n <= eps || !std::isfinite(n))
            throw std::domain_error("Vec2::normalized: zero or non-finite vector");
        return {x / n, y / n};
    }

    Vec2 rotated(double angle) const {
        const double c = std::cos(angle), s = std::sin(angle);
        return {c * x - s * y, s * x + c * y};
    }
};

constexpr Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }

/// Scales `v` down so its norm does not exceed `max_norm`.
inline Vec2 clamp_norm(Vec2 v, double max_norm) {
    const double n = v.norm();
    if (n > max_norm && n > 0.0) return v * (max_norm / n);
    return v;
}

/// Position + velocity pair; the argument shape of every field formula.
struct KinematicState {
    Vec2 p;
    Vec2 v;
    constexpr bool operator==(const KinematicState&) const = default;
};

}  // namespace mrsim
