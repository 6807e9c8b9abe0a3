#include "trajadv/core/geometry.hpp"

#include <algorithm>
#include <limits>

namespace trajadv::core {

double point_segment_distance(const Vec2& q, const Vec2& a, const Vec2& b) {
    const Vec2 d = b - a;
    const double len_sq = d.norm_sq();
    if (len_sq == 0.0) return distance(q, a);
    const double t = std::clamp((q - a).dot(d) / len_sq, 0.0, 1.0);
    return distance(q, a + d * t);
}

double point_polyline_distance(const Vec2& q, std::span<const Vec2> polyline) {
    if (polyline.empty()) return std::numeric_limits<double>::infinity();
    if (polyline.size() == 1) return distance(q, polyline[0]);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < polyline.size(); ++i) {
        best = std::min(best, point_segment_distance(q, polyline[i], polyline[i + 1]));
    }
    return best;
}

Polyline::Polyline(std::vector<Vec2> points) : points_(std::move(points)) {
    cumulative_.resize(points_.size(), 0.0);
    for (std::size_t i = 1; i < points_.size(); ++i) {
        cumulative_[i] = cumulative_[i - 1] + distance(points_[i - 1], points_[i]);
    }
}

Vec2 Polyline::point_at(double s) const {
    if (points_.empty()) return {};
    if (points_.size() == 1 || s <= 0.0) return points_.front();
    if (s >= length()) return points_.back();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
    const std::size_t i = static_cast<std::size_t>(it - cumulative_.begin());
    const double seg_len = cumulative_[i] - cumulative_[i - 1];
    const double t = seg_len > 0.0 ? (s - cumulative_[i - 1]) / seg_len : 0.0;
    return points_[i - 1] + (points_[i] - points_[i - 1]) * t;
}

PolylineLocation Polyline::project(const Vec2& q) const {
    PolylineLocation best;
    if (points_.empty()) return best;
    if (points_.size() == 1) {
        best.point = points_[0];
        return best;
    }
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < points_.size(); ++i) {
        const Vec2 d = points_[i + 1] - points_[i];
        const double len_sq = d.norm_sq();
        const double t = len_sq > 0.0 ? std::clamp((q - points_[i]).dot(d) / len_sq, 0.0, 1.0) : 0.0;
        const Vec2 p = points_[i] + d * t;
        const double dist = distance(q, p);
        if (dist < best_dist) {
            best_dist = dist;
            best.segment = i;
            best.t = t;
            best.s = cumulative_[i] + t * (cumulative_[i + 1] - cumulative_[i]);
            best.point = p;
        }
    }
    return best;
}

}  // namespace trajadv::core
