#include "trajadv/clothoid/clothoid.hpp"

#include <cmath>
#include <string>

#include "trajadv/core/vec2.hpp"

namespace trajadv::clothoid {

namespace {

constexpr double kMaxQuadratureInterval = 0.05;  // meters

// 5-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr double kNodes[5] = {
    -0.9061798459386640, -0.5384693101056831, 0.0,
    0.5384693101056831, 0.9061798459386640,
};
constexpr double kWeights[5] = {
    0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
    0.4786286704993665, 0.2369268850561891,
};

double raw_heading(const Configuration& start, double c1, double l) {
    return start.psi + start.c0 * l + 0.5 * c1 * l * l;
}

// Integral of (cos psi(s), sin psi(s)) for s in [a, b], arc-relative.
Vec2 integrate_direction(const Configuration& start, double c1, double a, double b) {
    const double span = b - a;
    if (span <= 0.0) return {0.0, 0.0};
    const int intervals = static_cast<int>(std::ceil(span / kMaxQuadratureInterval));
    const double h = span / intervals;
    Vec2 sum{0.0, 0.0};
    for (int i = 0; i < intervals; ++i) {
        const double mid = a + (i + 0.5) * h;
        const double half = 0.5 * h;
        for (int k = 0; k < 5; ++k) {
            const double s = mid + half * kNodes[k];
            const double psi = raw_heading(start, c1, s);
            sum += Vec2{std::cos(psi), std::sin(psi)} * (kWeights[k] * half);
        }
    }
    return sum;
}

void check_arc_position(const ClothoidArc& arc, double l) {
    if (!(l >= 0.0) || !(l <= arc.length)) {
        throw core::ValidationError("arc position " + std::to_string(l) +
                                    " outside [0, " + std::to_string(arc.length) + "]");
    }
}

void check_arc(const ClothoidArc& arc) {
    if (!std::isfinite(arc.length) || !std::isfinite(arc.c1) || arc.length < 0.0) {
        throw core::ValidationError("clothoid arc must have finite c1 and length >= 0");
    }
}

}  // namespace

double curvature_at(const Configuration& start, const ClothoidArc& arc, double l) {
    check_arc_position(arc, l);
    return start.c0 + arc.c1 * l;
}

double heading_at(const Configuration& start, const ClothoidArc& arc, double l) {
    check_arc_position(arc, l);
    return core::normalize_angle(raw_heading(start, arc.c1, l));
}

Configuration propagate(const Configuration& start, const ClothoidArc& arc) {
    check_arc(arc);
    const Vec2 d = integrate_direction(start, arc.c1, 0.0, arc.length);
    Configuration end;
    end.x = start.x + d.x;
    end.y = start.y + d.y;
    end.psi = core::normalize_angle(raw_heading(start, arc.c1, arc.length));
    end.c0 = start.c0 + arc.c1 * arc.length;
    return end;
}

std::vector<Configuration> propagate_chain(const Configuration& start,
                                           const std::vector<ClothoidArc>& arcs) {
    std::vector<Configuration> configs;
    configs.reserve(arcs.size() + 1);
    configs.push_back(start);
    for (const auto& arc : arcs) configs.push_back(propagate(configs.back(), arc));
    return configs;
}

std::vector<ArcSample> sample_arc(const Configuration& start, const ClothoidArc& arc,
                                  double spacing) {
    check_arc(arc);
    if (!(spacing > 0.0)) throw core::ValidationError("sample spacing must be positive");

    std::vector<ArcSample> samples;
    samples.push_back({0.0, start});

    // Positions are accumulated incrementally (quadrature over [prev, next]);
    // heading and curvature come from their closed forms at each s.
    const double end_eps = spacing * 1e-9;
    double prev_s = 0.0;
    Vec2 pos{start.x, start.y};
    for (double s = spacing; s < arc.length - end_eps; s += spacing) {
        pos += integrate_direction(start, arc.c1, prev_s, s);
        Configuration c;
        c.x = pos.x;
        c.y = pos.y;
        c.psi = core::normalize_angle(raw_heading(start, arc.c1, s));
        c.c0 = start.c0 + arc.c1 * s;
        samples.push_back({s, c});
        prev_s = s;
    }
    if (arc.length > 0.0) {
        pos += integrate_direction(start, arc.c1, prev_s, arc.length);
        Configuration c;
        c.x = pos.x;
        c.y = pos.y;
        c.psi = core::normalize_angle(raw_heading(start, arc.c1, arc.length));
        c.c0 = start.c0 + arc.c1 * arc.length;
        samples.push_back({arc.length, c});
    }
    return samples;
}

}  // namespace trajadv::clothoid
