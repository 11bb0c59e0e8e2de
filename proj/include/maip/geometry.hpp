#pragma once

#include <cmath>
#include <optional>
#include <vector>

namespace maip {

inline constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double dot(Vec2 o) const { return x * o.x + y * o.y; }
    double norm() const { return std::sqrt(x * x + y * y); }
};

inline double dist(Vec2 a, Vec2 b) { return (a - b).norm(); }

// Rotate p around c by quarter turns counterclockwise.
inline Vec2 rotate_quarter(Vec2 p, Vec2 c, int quarters) {
    Vec2 d{p.x - c.x, p.y - c.y};
    switch (((quarters % 4) + 4) % 4) {
        case 0: return p;
        case 1: return {c.x - d.y, c.y + d.x};
        case 2: return {c.x - d.x, c.y - d.y};
        default: return {c.x + d.y, c.y - d.x};
    }
}

struct Rect {
    double xmin = 0, ymin = 0, xmax = 0, ymax = 0;

    bool contains(Vec2 p) const {
        return p.x >= xmin && p.x < xmax && p.y >= ymin && p.y < ymax;
    }
    Vec2 center() const { return {(xmin + xmax) / 2, (ymin + ymax) / 2}; }
    Rect rotated_quarter(Vec2 c, int quarters) const {
        Vec2 a = rotate_quarter({xmin, ymin}, c, quarters);
        Vec2 b = rotate_quarter({xmax, ymax}, c, quarters);
        return {std::min(a.x, b.x), std::min(a.y, b.y), std::max(a.x, b.x), std::max(a.y, b.y)};
    }
};

// Point test against an oriented box centered at `center`, heading
// `theta_deg`, of given length (along heading) and width.
inline bool point_in_oriented_box(Vec2 p, Vec2 center, double theta_deg, double length,
                                  double width) {
    const double th = deg2rad(theta_deg);
    const double c = std::cos(th), s = std::sin(th);
    const Vec2 d = p - center;
    const double u = d.x * c + d.y * s;    // along heading
    const double w = -d.x * s + d.y * c;   // lateral
    return std::fabs(u) <= length / 2 && std::fabs(w) <= width / 2;
}

// Piecewise path of line segments and circular arcs, parameterized by arc
// length s from the path start. Used for lane centerlines and turn paths.
class Path {
  public:
    struct PointTangent {
        Vec2 pos;
        double theta_deg;  // tangent heading in [-180, 180)
    };

    void add_line(Vec2 from, Vec2 to);
    // phi0/phi1 in radians; counterclockwise iff phi1 > phi0.
    void add_arc(Vec2 center, double radius, double phi0, double phi1);

    double length() const { return total_; }
    PointTangent eval(double s) const;

    // Arc-length of the point on the path closest to p, restricted to
    // s in [s_lo, s_hi]; nullopt if the lateral distance exceeds max_lateral.
    std::optional<double> project(Vec2 p, double s_lo, double s_hi, double max_lateral) const;

  private:
    struct Segment {
        bool is_arc = false;
        Vec2 a, b;          // line endpoints
        Vec2 center;        // arc center
        double radius = 0;
        double phi0 = 0, phi1 = 0;
        double len = 0;
    };
    std::vector<Segment> segs_;
    double total_ = 0;
};

}  // namespace maip
