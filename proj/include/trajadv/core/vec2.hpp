#pragma once

#include <cmath>

namespace trajadv::core {

struct Vec2 {
    double x{0.0};
    double y{0.0};

    constexpr Vec2() = default;
    constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

    constexpr Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
    constexpr Vec2& operator+=(const Vec2& o) {
        x += o.x;
        y += o.y;
        return *this;
    }
    constexpr Vec2& operator-=(const Vec2& o) {
        x -= o.x;
        y -= o.y;
        return *this;
    }
    constexpr Vec2& operator*=(double s) {
        x *= s;
        y *= s;
        return *this;
    }

    constexpr double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    // z-component of the 2D cross product; positive when o is to the left
    constexpr double cross(const Vec2& o) const { return x * o.y - y * o.x; }
    double norm() const { return std::hypot(x, y); }
    constexpr double norm_sq() const { return x * x + y * y; }

    friend constexpr Vec2 operator*(double s, const Vec2& v) { return v * s; }
    friend constexpr bool operator==(const Vec2&, const Vec2&) = default;
};

inline double distance(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

// Normalize an angle to (-pi, pi].
inline double normalize_angle(double a) {
    constexpr double two_pi = 6.283185307179586476925286766559;
    double r = std::remainder(a, two_pi);
    if (r <= -3.14159265358979323846) r += two_pi;
    return r;
}

}  // namespace trajadv::core
