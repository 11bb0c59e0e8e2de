#include "maip/geometry.hpp"

#include "maip/tensor.hpp"  // wrap_degrees_scalar

namespace maip {

void Path::add_line(Vec2 from, Vec2 to) {
    Segment s;
    s.is_arc = false;
    s.a = from;
    s.b = to;
    s.len = dist(from, to);
    total_ += s.len;
    segs_.push_back(s);
}

void Path::add_arc(Vec2 center, double radius, double phi0, double phi1) {
    Segment s;
    s.is_arc = true;
    s.center = center;
    s.radius = radius;
    s.phi0 = phi0;
    s.phi1 = phi1;
    s.len = radius * std::fabs(phi1 - phi0);
    total_ += s.len;
    segs_.push_back(s);
}

Path::PointTangent Path::eval(double s) const {
    double remaining = std::max(0.0, std::min(s, total_));
    for (size_t i = 0; i < segs_.size(); ++i) {
        const Segment& seg = segs_[i];
        const bool last = (i + 1 == segs_.size());
        if (remaining > seg.len && !last) {
            remaining -= seg.len;
            continue;
        }
        const double t = seg.len > 0 ? std::min(remaining, seg.len) / seg.len : 0.0;
        if (!seg.is_arc) {
            const Vec2 d = seg.b - seg.a;
            return {seg.a + d * t, wrap_degrees_scalar(rad2deg(std::atan2(d.y, d.x)))};
        }
        const double phi = seg.phi0 + (seg.phi1 - seg.phi0) * t;
        const Vec2 pos{seg.center.x + seg.radius * std::cos(phi),
                       seg.center.y + seg.radius * std::sin(phi)};
        // tangent: +90 deg from the radial direction when counterclockwise
        const double dir = seg.phi1 >= seg.phi0 ? 90.0 : -90.0;
        return {pos, wrap_degrees_scalar(rad2deg(phi) + dir)};
    }
    return {{0, 0}, 0};
}

std::optional<double> Path::project(Vec2 p, double s_lo, double s_hi, double max_lateral) const {
    // sampled projection; fine for leader search and conflict tests
    constexpr double kStep = 0.25;
    double best_d = max_lateral;
    std::optional<double> best_s;
    const double hi = std::min(s_hi, total_);
    for (double s = std::max(0.0, s_lo); s <= hi; s += kStep) {
        const double d = dist(eval(s).pos, p);
        if (d <= best_d) {
            best_d = d;
            best_s = s;
        }
    }
    return best_s;
}

}  // namespace maip
