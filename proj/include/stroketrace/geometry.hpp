#ifndef STROKETRACE_GEOMETRY_HPP
#define STROKETRACE_GEOMETRY_HPP

#include <cmath>
#include <numbers>

namespace stroketrace {

// Image coordinates: origin at the top-left pixel centre, x rightward,
// y downward. Pixel (i, j) has its centre at (i, j).

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

struct Pixel {
    int x = 0;
    int y = 0;

    friend bool operator==(const Pixel&, const Pixel&) = default;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point p) { return {s * p.x, s * p.y}; }

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double norm(Point p) { return std::hypot(p.x, p.y); }
inline double distance(Point a, Point b) { return norm(a - b); }

/// Unit vector for a heading in radians (0 = +x, pi/2 = +y).
inline Point direction(double heading) { return {std::cos(heading), std::sin(heading)}; }

inline Point to_point(Pixel p) { return {static_cast<double>(p.x), static_cast<double>(p.y)}; }

/// Wraps an angle into [0, 2pi).
inline double normalize_angle(double a) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    a = std::fmod(a, two_pi);
    if (a < 0.0) {
        a += two_pi;
    }
    if (a >= two_pi) {
        a = 0.0;
    }
    return a;
}

/// Signed smallest difference b - a, in (-pi, pi].
inline double angle_difference(double a, double b) {
    double d = normalize_angle(b - a);
    return d > std::numbers::pi ? d - 2.0 * std::numbers::pi : d;
}

/// Distance from p to the segment [a, b].
inline double point_segment_distance(Point p, Point a, Point b) {
    const Point ab = b - a;
    const double len2 = dot(ab, ab);
    if (len2 == 0.0) {
        return distance(p, a);
    }
    double t = dot(p - a, ab) / len2;
    t = t < 0.0 ? 0.0 : (t > 1.0 ? 1.0 : t);
    return distance(p, a + t * ab);
}

} // namespace stroketrace

#endif
