#pragma once

#include <cmath>

namespace monomap {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
    bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }

    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double cross(const Vec2& o) const { return x * o.y - y * o.x; }
    double norm2() const { return x * x + y * y; }
    double norm() const { return std::sqrt(norm2()); }
    Vec2 perp() const { return {-y, x}; }  // rotate +90 degrees

    Vec2 normalized() const {
        double n = norm();
        return n > 0.0 ? Vec2{x / n, y / n} : Vec2{0.0, 0.0};
    }
};

inline Vec2 operator*(double s, const Vec2& v) { return {v.x * s, v.y * s}; }

inline double dist(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

// squared distance from p to segment [a,b]
inline double point_segment_dist2(const Vec2& p, const Vec2& a, const Vec2& b) {
    Vec2 d = b - a;
    double len2 = d.norm2();
    if (len2 == 0.0) return (p - a).norm2();
    double t = (p - a).dot(d) / len2;
    t = t < 0.0 ? 0.0 : (t > 1.0 ? 1.0 : t);
    return (p - (a + d * t)).norm2();
}

struct Box2 {
    Vec2 lo{0, 0}, hi{0, 0};
    bool empty = true;

    void expand(const Vec2& p) {
        if (empty) { lo = hi = p; empty = false; return; }
        lo.x = std::min(lo.x, p.x); lo.y = std::min(lo.y, p.y);
        hi.x = std::max(hi.x, p.x); hi.y = std::max(hi.y, p.y);
    }
    void expand(const Box2& b) {
        if (b.empty) return;
        expand(b.lo); expand(b.hi);
    }
    bool contains(const Vec2& p, double tol = 0.0) const {
        return !empty && p.x >= lo.x - tol && p.x <= hi.x + tol &&
               p.y >= lo.y - tol && p.y <= hi.y + tol;
    }
    bool intersects(const Box2& b, double tol = 0.0) const {
        return !empty && !b.empty &&
               lo.x <= b.hi.x + tol && b.lo.x <= hi.x + tol &&
               lo.y <= b.hi.y + tol && b.lo.y <= hi.y + tol;
    }
    Vec2 center() const { return (lo + hi) * 0.5; }
    double diagonal() const { return empty ? 0.0 : (hi - lo).norm(); }
};

}  // namespace monomap
