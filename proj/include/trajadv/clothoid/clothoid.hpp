#pragma once

#include <vector>

#include "trajadv/core/types.hpp"

namespace trajadv::clothoid {

using core::ClothoidArc;
using core::Configuration;
using core::Vec2;

// Continuous-curvature segment model. Along an arc of length L starting at
// configuration (x, y, psi, c0) with curvature rate c1:
//
//   c(l)   = c0 + c1*l
//   psi(l) = psi + c0*l + c1*l^2/2
//   x(l)   = x + integral_0^l cos(psi(s)) ds     (same with sin for y)
//
// The position integral has no elementary closed form; it is evaluated with
// fixed-order Gauss-Legendre quadrature on sub-intervals of at most 0.05 m,
// which keeps the absolute position error below 1e-8 m for the curvature
// magnitudes this library works with. Headings are normalized to (-pi, pi]
// only on returned values, never inside the integrals.

struct ArcSample {
    double s{0.0};  // arc length from the start of the arc
    Configuration config;
};

// c(l) = c0 + c1*l. Throws ValidationError when l is outside [0, arc.length].
double curvature_at(const Configuration& start, const ClothoidArc& arc, double l);

// psi(l) = psi + c0*l + c1*l^2/2, normalized to (-pi, pi].
// Throws ValidationError when l is outside [0, arc.length].
double heading_at(const Configuration& start, const ClothoidArc& arc, double l);

// Configuration at the far end of the arc. Accepts length >= 0 (zero-length
// arcs act as the identity); throws ValidationError on negative or non-finite
// arcs.
Configuration propagate(const Configuration& start, const ClothoidArc& arc);

// Configurations [start, p1, ..., pn] visited while traversing the arcs in
// order; result size is arcs.size() + 1.
std::vector<Configuration> propagate_chain(const Configuration& start,
                                           const std::vector<ClothoidArc>& arcs);

// Samples at s = 0, spacing, 2*spacing, ... plus the arc endpoint (always
// included, never duplicated). Throws ValidationError when spacing <= 0.
std::vector<ArcSample> sample_arc(const Configuration& start, const ClothoidArc& arc,
                                  double spacing);

}  // namespace trajadv::clothoid
