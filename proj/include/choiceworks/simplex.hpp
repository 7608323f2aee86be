#ifndef CHOICEWORKS_SIMPLEX_HPP
#define CHOICEWORKS_SIMPLEX_HPP

#include "choiceworks/convex_cut.hpp"
#include "choiceworks/names.hpp"

#include <functional>

namespace cw {

struct VandermondeLift {
  ClosedSetName image;
  // First-coordinate projection, a left inverse of the lifting curve.
  std::function<Scalar(const Vec&)> projector;
};

// Lifts a one-dimensional set of up to n points along x -> (x, x^2, ..,
// x^{n-1}); the image points are vertices of a proper simplex.
VandermondeLift vandermonde_lift(const ClosedSetName& name);

// From an Exactly(n+1) name of proper-simplex vertices in dimension n,
// produces an Exactly(n+2) name that adds one point strictly inside the
// simplex. The extra ball rides inside the convex hull of the vertex balls
// and relocates between the parts of a split when a removal strands it.
ClosedSetName add_interior_point(const ClosedSetName& name);

// Recovers one vertex of the simplex from a point of its convex hull, as the
// intersection of nested balls that provably keep the point outside the
// affine span of the excluded vertices.
PointName recover_vertex(const ClosedSetName& name, const PointName& x, int max_rounds = 64);

struct SimplexReduction {
  // Pre-processor: the convex hull of the lifted set.
  std::function<ConvexSetName(const ClosedSetName&)> K;
  // Post-processor: recover a lifted vertex from the oracle's hull point and
  // project it back to the line.
  std::function<PointName(const ClosedSetName&, const PointName&)> H;
};

SimplexReduction reduce_finite_to_simplex(int n);

}  // namespace cw

#endif  // CHOICEWORKS_SIMPLEX_HPP
