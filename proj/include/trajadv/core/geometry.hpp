#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "trajadv/core/vec2.hpp"

namespace trajadv::core {

double point_segment_distance(const Vec2& q, const Vec2& a, const Vec2& b);

// Minimum distance from q to any segment of the polyline.
double point_polyline_distance(const Vec2& q, std::span<const Vec2> polyline);

// Location of a point on a polyline: segment index, parameter within the
// segment, cumulative arc length, and the point itself.
struct PolylineLocation {
    std::size_t segment{0};
    double t{0.0};
    double s{0.0};
    Vec2 point;
};

// Polyline with a cumulative-length table for arc-length queries.
class Polyline {
  public:
    Polyline() = default;
    explicit Polyline(std::vector<Vec2> points);

    const std::vector<Vec2>& points() const { return points_; }
    double length() const { return cumulative_.empty() ? 0.0 : cumulative_.back(); }
    std::size_t size() const { return points_.size(); }

    Vec2 point_at(double s) const;
    PolylineLocation project(const Vec2& q) const;

  private:
    std::vector<Vec2> points_;
    std::vector<double> cumulative_;
};

}  // namespace trajadv::core
