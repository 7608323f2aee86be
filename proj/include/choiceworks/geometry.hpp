#ifndef CHOICEWORKS_GEOMETRY_HPP
#define CHOICEWORKS_GEOMETRY_HPP

#include "choiceworks/scalar.hpp"

namespace cw {

// Closed ball in the maximum metric, i.e. an axis-aligned hypercube.
struct Ball {
  Vec center;
  Scalar radius;

  Ball() = default;
  Ball(Vec c, Scalar r) : center(std::move(c)), radius(std::move(r)) {
    if (center.empty()) throw Error(Error::Code::DimensionMismatch, "Ball: dimension must be >= 1");
    if (radius < 0) throw Error(Error::Code::InputFault, "Ball: negative radius");
  }

  std::size_t dimension() const { return center.size(); }

  bool contains(const Vec& p) const { return dist_max(center, p) <= radius; }
  bool strictly_contains(const Vec& p) const { return dist_max(center, p) < radius; }

  // The 2^d corner points.
  std::vector<Vec> corners() const {
    std::vector<Vec> out;
    std::size_t d = dimension();
    out.reserve(std::size_t(1) << d);
    for (std::size_t mask = 0; mask < (std::size_t(1) << d); ++mask) {
      Vec p(d);
      for (std::size_t i = 0; i < d; ++i)
        p[i] = center[i] + ((mask >> i) & 1 ? radius : -radius);
      out.push_back(std::move(p));
    }
    return out;
  }

  bool operator==(const Ball& other) const = default;
};

// True iff the closed inner ball lies in the open interior of the outer ball.
inline bool ball_inside(const Ball& inner, const Ball& outer) {
  if (inner.dimension() != outer.dimension())
    throw Error(Error::Code::DimensionMismatch, "ball_inside: dimension mismatch");
  return dist_max(inner.center, outer.center) + inner.radius < outer.radius;
}

// True iff the closed balls have empty intersection.
inline bool balls_disjoint(const Ball& a, const Ball& b) {
  if (a.dimension() != b.dimension())
    throw Error(Error::Code::DimensionMismatch, "balls_disjoint: dimension mismatch");
  return dist_max(a.center, b.center) > a.radius + b.radius;
}

struct Interval {
  Scalar lo;
  Scalar hi;

  Interval() : lo(0), hi(0) {}
  Interval(Scalar l, Scalar h) : lo(std::move(l)), hi(std::move(h)) {
    if (lo > hi) throw Error(Error::Code::InputFault, "Interval: lo > hi");
  }

  Scalar width() const { return hi - lo; }
  Scalar mid() const { return (lo + hi) / 2; }
  bool contains(const Scalar& x) const { return lo <= x && x <= hi; }

  Interval operator+(const Interval& o) const { return {lo + o.lo, hi + o.hi}; }
  Interval operator-(const Interval& o) const { return {lo - o.hi, hi - o.lo}; }
  Interval operator*(const Interval& o) const {
    Scalar a = lo * o.lo, b = lo * o.hi, c = hi * o.lo, d = hi * o.hi;
    Scalar mn = a, mx = a;
    for (const Scalar& v : {b, c, d}) {
      if (v < mn) mn = v;
      if (v > mx) mx = v;
    }
    return {mn, mx};
  }
  Interval operator+(const Scalar& s) const { return {lo + s, hi + s}; }
  Interval operator*(const Scalar& s) const {
    return s >= 0 ? Interval{lo * s, hi * s} : Interval{hi * s, lo * s};
  }

  bool operator==(const Interval& other) const = default;
};

enum class Sign { Positive, Negative, Unknown };

// The only mechanism by which a sign is ever "proven": lo > 0 or hi < 0.
inline Sign interval_sign(const Interval& v) {
  if (v.lo > 0) return Sign::Positive;
  if (v.hi < 0) return Sign::Negative;
  return Sign::Unknown;
}

}  // namespace cw

#endif  // CHOICEWORKS_GEOMETRY_HPP
