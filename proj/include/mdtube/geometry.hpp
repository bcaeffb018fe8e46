#pragma once

#include <algorithm>
#include <array>
#include <cmath>

namespace mdtube {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
    double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }

    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }
    friend Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
    friend Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
    friend Vec3 operator*(Vec3 a, double s) { return a *= s; }
    friend Vec3 operator*(double s, Vec3 a) { return a *= s; }
    friend bool operator==(const Vec3&, const Vec3&) = default;
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline double distance(const Vec3& a, const Vec3& b) { return norm(a - b); }

/// Axis-aligned box.
struct Box {
    Vec3 lo, hi;
    Vec3 center() const { return 0.5 * (lo + hi); }
    Vec3 size() const { return hi - lo; }
    double volume() const {
        const Vec3 s = size();
        return s.x * s.y * s.z;
    }
};

/// Straight line piece from a to b.
struct LineSegment {
    Vec3 a, b;

    double length() const { return distance(a, b); }
    Vec3 midpoint() const { return 0.5 * (a + b); }

    /// Axial coordinate of the orthogonal projection, in units of length (unclamped).
    double axial(const Vec3& p) const {
        const Vec3 d = b - a;
        const double len = norm(d);
        return dot(p - a, d) / len;
    }

    /// Distance from p to the infinite carrier line.
    double radial_distance(const Vec3& p) const {
        const Vec3 d = b - a;
        const double len2 = dot(d, d);
        const Vec3 w = p - a;
        const double t = dot(w, d) / len2;
        return norm(w - t * d);
    }

    /// Distance from p to the closed segment.
    double distance_to(const Vec3& p) const {
        const Vec3 d = b - a;
        const double len2 = dot(d, d);
        if (len2 == 0.0) return distance(p, a);
        const double t = std::clamp(dot(p - a, d) / len2, 0.0, 1.0);
        return distance(p, a + t * d);
    }
};

}  // namespace mdtube
