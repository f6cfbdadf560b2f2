#pragma once

// Bundled test measures spanning the doubling, fractal and nondoubling
// regimes. All generators are deterministic.

#include <string>
#include <vector>

#include "ndcz/measure.hpp"

namespace ndcz {

/// Uniform grid on [0,1] (d=1) or [0,1]^2 (d=2), unit total mass, n = d.
PointMeasure make_uniform(std::size_t points_per_axis, int dim = 1);

/// Midpoints of the depth-k middle-thirds iterate, weights 2^-k,
/// n = log 2 / log 3.
PointMeasure make_cantor(int depth);

/// Cell centers on [-4, 4] (zero excluded for even counts) with normalized
/// Gaussian cell weights, n = 1.
PointMeasure make_gauss(std::size_t points);

/// Geometric ladder +-4^i around a unit mass at the origin with weights 32^i:
/// every admissible ball at the origin fails (4,16)-doubling.
PointMeasure make_ladder(int levels = 7);

/// Two uniform clusters with a 1e3 weight contrast across a wide gap.
PointMeasure make_dumbbell();

/// Named registry: uniform64, uniform256, uniform1024, uniform2d484,
/// cantor5, gauss64, gauss128, ladder, dumbbell.
PointMeasure bundled_measure(const std::string& name);

const std::vector<std::string>& bundled_names();  // the five acceptance ones

}  // namespace ndcz
